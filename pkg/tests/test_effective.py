"""Tests for the effective slow-particle dynamics and circular orbits."""

import math

import numpy as np
import pytest

from src.effective.dynamics import (
    EffectiveState,
    effective_default_step,
    effective_energy,
    effective_force,
    integrate_effective,
    radial_stiffness,
)
from src.effective.orbits import frequency_split, simulate_circular_orbit
from src.errors import BadActionsError, NoOrbitError
from src.fulldyn.integrator import hybrid_state, integrate
from src.model.dipole import DipoleSpinModel
from src.model.params import ModelParams


@pytest.fixture
def model():
    return DipoleSpinModel.scaled(ModelParams(), timescale_ratio=20.0)


def pure(model, label):
    actions = np.zeros(2)
    actions[model.band_of(label)] = 1.0
    return actions


class TestEffectiveForce:
    """Test the frozen-action force law."""

    def test_curvature_force_does_no_work(self, model):
        """Test the velocity-dependent part is perpendicular to the velocity."""
        actions = pure(model, "-")
        q = [0.4, 0.3]
        v = np.array([0.05, -0.02])
        moving = effective_force(EffectiveState(q, v, actions), model)
        resting = effective_force(EffectiveState(q, np.zeros(2), actions), model)
        assert (moving - resting) @ v == pytest.approx(0.0, abs=1e-15)

    def test_equal_populations_feel_nothing(self, model):
        """Test equal populations cancel both the gradient and the curvature force."""
        state = EffectiveState([0.4, 0.3], [0.05, -0.02], [0.5, 0.5])
        np.testing.assert_allclose(effective_force(state, model), [0.0, 0.0], atol=1e-15)

    def test_flipped_moment_reverses_chirality(self, model):
        """Test flipping μ with the same band populations keeps ℋ₁ but reverses ℬ."""
        flipped = DipoleSpinModel.scaled(ModelParams(mu=9.2740100783e-24), timescale_ratio=20.0)
        q = [0.4, 0.3]
        v = np.array([0.05, -0.02])
        actions = [1.0, 0.0]
        np.testing.assert_allclose(flipped.band_energies(np.array(q)), model.band_energies(np.array(q)))
        rest = effective_force(EffectiveState(q, np.zeros(2), actions), model)
        rest_flipped = effective_force(EffectiveState(q, np.zeros(2), actions), flipped)
        np.testing.assert_allclose(rest_flipped, rest, rtol=1e-12)
        lorentz = effective_force(EffectiveState(q, v, actions), model) - rest
        lorentz_flipped = effective_force(EffectiveState(q, v, actions), flipped) - rest_flipped
        np.testing.assert_allclose(lorentz_flipped, -lorentz, rtol=1e-9, atol=1e-15)

    def test_bad_actions(self, model):
        """Test actions not summing to ħ are refused."""
        with pytest.raises(BadActionsError):
            effective_force(EffectiveState([0.1, 0.0], [0.0, 0.0], [0.6, 0.6]), model)

    def test_origin_stiffness(self, model):
        """Test κ → −15/4 near the origin for the attractive band."""
        assert radial_stiffness(model, 1e-3, pure(model, "-")) == pytest.approx(-3.75, rel=1e-5)

    def test_stiffness_needs_positive_radius(self, model):
        """Test a zero radius is refused."""
        with pytest.raises(ValueError, match="positive"):
            radial_stiffness(model, 0.0, pure(model, "-"))

    def test_no_time_scale(self, model):
        """Test equal populations need an explicit step."""
        state = EffectiveState([0.0, 0.0], [0.0, 0.0], [0.5, 0.5])
        with pytest.raises(ValueError, match="explicit step"):
            effective_default_step(model, state)


class TestIntegrateEffective:
    """Test the effective integrator."""

    def test_energy_conserved(self, model):
        """Test the effective energy over several slow periods."""
        initial = EffectiveState([0.3, 0.0], [0.0, 0.05], pure(model, "-"))
        period = 2 * math.pi / model.slow_frequency()
        trajectory = integrate_effective(model, initial, 3 * period, output_times=np.linspace(0, 3 * period, 13))
        assert np.max(np.abs(trajectory.energy - effective_energy(initial, model))) < 1e-9
        assert len(trajectory.samples) == 13

    def test_free_motion_with_equal_populations(self, model):
        """Test equal populations move in a straight line."""
        initial = EffectiveState([0.1, 0.2], [0.01, -0.03], [0.5, 0.5])
        trajectory = integrate_effective(model, initial, 10.0, dt=0.5)
        np.testing.assert_allclose(trajectory.final.q, [0.2, -0.1], atol=1e-12)

    def test_flipped_moment_mirrors_trajectory(self, model):
        """Test reversing ℬ at fixed ℋ₁ sends y(t) to −y(t) and leaves x(t) alone."""
        flipped = DipoleSpinModel.scaled(ModelParams(mu=9.2740100783e-24), timescale_ratio=20.0)
        omega = model.slow_frequency()
        t_final = 0.5 * math.pi / omega
        times = np.linspace(0.0, t_final, 9)
        initial = EffectiveState([0.0, 0.0], [0.5 * omega, 0.0], [1.0, 0.0])
        dt = t_final / 512
        original = integrate_effective(model, initial, t_final, output_times=times, dt=dt).positions
        mirrored = integrate_effective(flipped, initial, t_final, output_times=times, dt=dt).positions
        assert abs(original[-1, 1]) > 1e-6
        np.testing.assert_allclose(mirrored[:, 0], original[:, 0], rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(mirrored[:, 1], -original[:, 1], rtol=1e-12, atol=1e-15)

    def test_deflection_matches_full_dynamics(self):
        """Test the effective drift across the launch direction tracks the exact dynamics."""
        model = DipoleSpinModel.scaled(ModelParams(), timescale_ratio=50.0)
        omega = model.slow_frequency()
        t_final = 0.5 * math.pi / omega
        band = model.band_of("-")
        full = integrate(
            model, hybrid_state(model, [0.0, 0.0], velocity=(0.5 * omega, 0.0), amplitudes=np.eye(2)[band]), t_final
        )
        effective = integrate_effective(
            model, EffectiveState([0.0, 0.0], [0.5 * omega, 0.0], pure(model, "-")), t_final
        )
        assert effective.final.q[1] > 0.0
        assert 0.5 < full.final.q[1] / effective.final.q[1] < 1.5

    def test_frame(self, model, tmp_path):
        """Test tabulation in SI and CSV output."""
        initial = EffectiveState([0.3, 0.0], [0.0, 0.05], pure(model, "-"))
        trajectory = integrate_effective(model, initial, 5.0)
        frame = trajectory.to_frame(model.units)
        assert list(frame.columns) == ["t", "x", "y", "px", "py", "energy"]
        assert frame["x"].iloc[0] == pytest.approx(0.3 * model.units.length)
        assert frame["py"].iloc[0] == pytest.approx(0.05 * model.mass * model.units.momentum)
        assert trajectory.write_csv(tmp_path / "effective.csv", model.units).exists()


class TestFrequencySplit:
    """Test circular-orbit frequencies."""

    def test_split_equals_curvature_over_mass(self, model):
        """Test ν_cw − ν_ccw = ℬ/2πM."""
        report = frequency_split(model, 0.3, pure(model, "-"))
        assert report.delta_nu == pytest.approx(report.curvature_at_r / (2 * math.pi * model.mass))
        assert report.root_split == pytest.approx(report.delta_nu, rel=1e-9)
        assert report.is_consistent()
        assert report.delta_nu < 0

    def test_repulsive_band_has_no_orbit(self, model):
        """Test the repulsive band raises NO_ORBIT."""
        with pytest.raises(NoOrbitError) as exc_info:
            frequency_split(model, 0.3, pure(model, "+"))
        assert exc_info.value.code == "NO_ORBIT"

    def test_si_values(self):
        """Test the reference parameters at a 1 nm orbit."""
        params = ModelParams()
        model = DipoleSpinModel.from_params(params)
        report = frequency_split(model, 1e-9 / params.d, pure(model, "-")).to_si(model.units)
        assert report.radius == pytest.approx(1e-9)
        assert report.curvature_at_r == pytest.approx(-9 / 8 * params.hbar / params.d**2, rel=1e-5)
        assert report.delta_nu == pytest.approx(-7.55e-9, rel=1e-3)
        assert report.to_dict().keys() == {"radius", "nu_cw", "nu_ccw", "delta_nu", "curvature_at_r"}

    @pytest.mark.parametrize("sense", [1, -1])
    def test_simulated_orbit(self, model, sense):
        """Test a launched orbit stays circular at the predicted frequency."""
        actions = pure(model, "-")
        report = frequency_split(model, 0.3, actions)
        measured = simulate_circular_orbit(model, 0.3, actions, sense)
        expected = report.nu_ccw if sense > 0 else report.nu_cw
        assert measured.frequency == pytest.approx(expected, rel=1e-6)
        assert measured.radial_deviation < 1e-6
