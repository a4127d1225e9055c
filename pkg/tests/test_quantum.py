"""Tests for fast-system states and action–angle coordinates."""

import math

import numpy as np
import pytest

from src.errors import BadActionsError
from src.model.dipole import DipoleSpinModel
from src.model.eigen import EigenFrame, GaugeAnchor
from src.model.params import ModelParams
from src.quantum.state import (
    ActionAngleState,
    QuantumState,
    from_action_angle,
    populations,
    schrodinger_rhs,
    superposition,
    to_action_angle,
    validate_actions,
    wrap_angle,
)


@pytest.fixture
def model():
    return DipoleSpinModel.scaled(ModelParams(), timescale_ratio=20.0)


@pytest.fixture
def frame(model):
    return model.eigenframe(np.array([0.6, -0.25]))


@pytest.fixture
def sigma_z_frame():
    return EigenFrame(np.array([-1.0, 1.0]), np.eye(2), GaugeAnchor.MAX_COMPONENT, 1.0)


def random_states(rng, count, dim=2):
    amps = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return [QuantumState.normalized(a) for a in amps]


def random_unitary_frame(rng, dim=3):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    unitary, _ = np.linalg.qr(z)
    return EigenFrame(np.arange(dim, dtype=float), unitary, GaugeAnchor.MAX_COMPONENT, 1.0)


class TestWrapAngle:
    """Test angle wrapping into (−π, π]."""

    def test_pi_boundaries(self):
        """Test both ends of the interval map to +π."""
        assert wrap_angle(math.pi) == math.pi
        assert wrap_angle(-math.pi) == math.pi

    def test_full_turns_removed(self):
        """Test multiples of 2π are removed."""
        assert wrap_angle(0.5 + 4.0 * math.pi) == pytest.approx(0.5, abs=1e-14)
        assert wrap_angle(-0.5 - 2.0 * math.pi) == pytest.approx(-0.5, abs=1e-14)

    @pytest.mark.parametrize("angle", [0.3, 1.0, 2.9, 4.0, 7.5])
    def test_odd(self, angle):
        """Test wrap(−x) = −wrap(x) away from ±π."""
        assert wrap_angle(-angle) == -wrap_angle(angle)


class TestQuantumState:
    """Test the normalized amplitude vector."""

    def test_rejects_unnormalized(self):
        """Test a norm off by more than the tolerance is refused."""
        with pytest.raises(ValueError, match="not normalized"):
            QuantumState(np.array([1.0, 1.0]))

    def test_normalized(self):
        """Test normalized divides by the norm."""
        psi = QuantumState.normalized([3.0, 4.0j])
        np.testing.assert_allclose(psi.amps, [0.6, 0.8j])
        assert psi.norm == pytest.approx(1.0)
        assert psi.dim == 2

    def test_zero_vector(self):
        """Test the zero vector cannot be normalized."""
        with pytest.raises(ValueError, match="zero vector"):
            QuantumState.normalized([0.0, 0.0])

    def test_non_finite(self):
        """Test NaN amplitudes are refused."""
        with pytest.raises(ValueError, match="finite"):
            QuantumState(np.array([np.nan, 1.0]))

    def test_read_only(self):
        """Test amplitudes cannot be modified in place."""
        psi = QuantumState(np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            psi.amps[0] = 0.0

    def test_conj(self):
        """Test complex conjugation."""
        psi = QuantumState(np.array([0.6j, 0.8]))
        np.testing.assert_array_equal(psi.conj().amps, [-0.6j, 0.8])


class TestActions:
    """Test action validation."""

    def test_valid(self):
        """Test non-negative actions summing to ħ pass."""
        np.testing.assert_array_equal(validate_actions([0.25, 0.75]), [0.25, 0.75])

    def test_custom_hbar(self):
        """Test the sum is checked against the given ħ."""
        validate_actions([1.0, 1.0], hbar=2.0)
        with pytest.raises(BadActionsError):
            validate_actions([0.5, 0.5], hbar=2.0)

    def test_negative(self):
        """Test a negative action is refused."""
        with pytest.raises(BadActionsError, match="non-negative"):
            validate_actions([-0.1, 1.1])

    def test_bad_sum(self):
        """Test actions not summing to ħ are refused."""
        with pytest.raises(BadActionsError, match="sum"):
            validate_actions([0.5, 0.4])

    def test_actions_sum_to_hbar_in_any_frame(self):
        """Test Σ Iₙ = ħ for random states in random unitary frames."""
        rng = np.random.default_rng(7)
        for psi in random_states(rng, 200, dim=3):
            state = to_action_angle(psi, random_unitary_frame(rng), hbar=2.0)
            assert state.actions.sum() == pytest.approx(2.0, abs=1e-12)
            validate_actions(state.actions, hbar=2.0)

    def test_error_code(self):
        """Test the error carries its report code."""
        with pytest.raises(BadActionsError) as exc_info:
            validate_actions([2.0, 0.0])
        assert exc_info.value.code == "BAD_ACTIONS"


class TestActionAngle:
    """Test conversion between amplitudes and action–angle coordinates."""

    def test_angles_are_minus_phases(self, frame):
        """Test Θₙ = −arg aₙ."""
        psi = superposition(frame, [0.6, 0.8 * np.exp(-0.3j)])
        state = to_action_angle(psi, frame)
        np.testing.assert_allclose(state.actions, [0.36, 0.64], atol=1e-14)
        np.testing.assert_allclose(state.angles, [0.0, 0.3], atol=1e-14)

    def test_empty_band_angle_is_zero(self, frame):
        """Test an unoccupied band gets angle zero."""
        psi = superposition(frame, [0.0, 1j])
        state = to_action_angle(psi, frame)
        assert state.angles[0] == 0.0
        assert state.actions[1] == pytest.approx(1.0)

    def test_rebuild(self, frame):
        """Test from_action_angle reproduces the state."""
        psi = superposition(frame, [np.sqrt(0.3) * np.exp(0.7j), np.sqrt(0.7) * np.exp(-1.2j)])
        rebuilt = from_action_angle(to_action_angle(psi, frame), frame)
        np.testing.assert_allclose(rebuilt.amps, psi.amps, atol=1e-14)

    def test_sigma_z_basis_angles(self, sigma_z_frame):
        """Test (1, i)/√2 in the σz basis has Θ = (0, −π/2)."""
        psi = QuantumState.normalized([1.0, 1j])
        state = to_action_angle(psi, sigma_z_frame)
        np.testing.assert_allclose(state.actions, [0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(state.angles, [0.0, -math.pi / 2], atol=1e-15)

    def test_sigma_z_basis_rebuild(self, sigma_z_frame):
        """Test I = (ħ/2, ħ/2), Θ = (0, π) gives (1, −1)/√2."""
        psi = from_action_angle(ActionAngleState([0.5, 0.5], [0.0, math.pi]), sigma_z_frame)
        np.testing.assert_allclose(psi.amps, np.array([1.0, -1.0]) / math.sqrt(2.0), atol=1e-15)

    def test_round_trip_random_states(self, frame):
        """Test from_action_angle ∘ to_action_angle is the identity up to a global phase."""
        rng = np.random.default_rng(11)
        for psi in random_states(rng, 1000):
            rebuilt = from_action_angle(to_action_angle(psi, frame), frame)
            assert abs(np.vdot(rebuilt.amps, psi.amps)) == pytest.approx(1.0, abs=1e-12)

    def test_rebuild_rejects_bad_actions(self, frame):
        """Test rebuilding from invalid actions raises."""
        with pytest.raises(BadActionsError):
            from_action_angle(ActionAngleState([0.5, 0.7], [0.0, 0.0]), frame)

    def test_populations_sum_to_one(self, frame):
        """Test band populations of a normalized state."""
        psi = QuantumState.normalized([1.0, 2.0 - 1.0j])
        assert populations(psi, frame).sum() == pytest.approx(1.0, abs=1e-14)

    def test_populations_property(self):
        """Test populations are actions over ħ."""
        state = ActionAngleState([0.5, 1.5], [0.0, 0.0], hbar=2.0)
        np.testing.assert_allclose(state.populations, [0.25, 0.75])


class TestSchrodingerRhs:
    """Test the frozen-position Schrödinger right-hand side."""

    def test_eigenstate_evolves_by_phase(self, model, frame):
        """Test an eigenstate gives dψ/dt = −iEψ."""
        q = np.array([0.6, -0.25])
        psi = QuantumState(frame.state(1))
        np.testing.assert_allclose(
            schrodinger_rhs(psi, q, model), -1j * frame.energies[1] * psi.amps, atol=1e-14
        )

    def test_norm_preserving(self, model):
        """Test Re⟨ψ|dψ/dt⟩ = 0 for random states at random positions."""
        rng = np.random.default_rng(3)
        positions = rng.uniform(-2.0, 2.0, size=(1000, 2))
        for psi, q in zip(random_states(rng, 1000), positions):
            rate = np.vdot(psi.amps, schrodinger_rhs(psi, q, model))
            assert abs(rate.real) < 1e-12
