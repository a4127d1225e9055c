"""Circular orbits and the clockwise/counter-clockwise frequency split."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from src.effective.dynamics import EffectiveState, integrate_effective, radial_stiffness
from src.errors import NoOrbitError
from src.geometry.curvature import curvature
from src.model.base import HybridModel
from src.model.units import UnitSystem
from src.quantum.state import validate_actions

SPLIT_RTOL = 1e-6


@dataclass(frozen=True)
class FrequencySplitReport:
    """Circulation frequencies at one orbit radius.

    Model units unless converted with to_si (then m, Hz, Hz, Hz, kg/s).
    nu_cw and nu_ccw come from the roots of Mω² + ℬω + κ = 0, delta_nu
    from ℬ/2πM directly.
    """

    radius: float
    nu_cw: float
    nu_ccw: float
    delta_nu: float
    curvature_at_r: float

    @property
    def root_split(self) -> float:
        return self.nu_cw - self.nu_ccw

    def is_consistent(self, rtol: float = SPLIT_RTOL) -> bool:
        """Root-based split agrees with ℬ/2πM."""
        scale = max(abs(self.delta_nu), 1e-12 * max(self.nu_cw, self.nu_ccw))
        return abs(self.root_split - self.delta_nu) <= rtol * scale

    def to_si(self, units: UnitSystem) -> "FrequencySplitReport":
        hertz = units.frequency
        return FrequencySplitReport(
            radius=self.radius * units.length,
            nu_cw=self.nu_cw * hertz,
            nu_ccw=self.nu_ccw * hertz,
            delta_nu=self.delta_nu * hertz,
            curvature_at_r=self.curvature_at_r * units.curvature,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _roots(mass: float, field: float, stiffness: float) -> tuple[float, float]:
    discriminant = field * field - 4.0 * mass * stiffness
    # Stable form: no cancellation between field and the square root
    partial = -0.5 * (field + math.copysign(math.sqrt(discriminant), field))
    first, second = partial / mass, stiffness / partial
    return max(first, second), min(first, second)


def frequency_split(model: HybridModel, r: float, actions) -> FrequencySplitReport:
    """
    Circulation frequencies of circular orbits of radius r about the origin.

    Balancing M·ω²·r against the radial force κ·r plus the curvature force
    ℬ·ω·r gives Mω² + ℬω + κ = 0. The positive root is the
    counter-clockwise angular velocity, the negative root the clockwise one.

    Args:
        model: Hybrid model with rotational symmetry about the origin
        r: Orbit radius
        actions: Frozen band actions

    Returns:
        FrequencySplitReport in model units

    Raises:
        NoOrbitError: If the radial force is not attractive at r
        BadActionsError: If the actions are invalid
    """
    actions = validate_actions(actions, model.hbar)
    stiffness = radial_stiffness(model, r, actions)
    if stiffness >= 0.0:
        raise NoOrbitError(f"No circular orbit at r = {r!r}: radial force is not attractive")
    field = curvature(model, np.array([r, 0.0]), actions)
    omega_ccw, omega_cw = _roots(model.mass, field, stiffness)
    return FrequencySplitReport(
        radius=r,
        nu_cw=-omega_cw / (2.0 * math.pi),
        nu_ccw=omega_ccw / (2.0 * math.pi),
        delta_nu=field / (2.0 * math.pi * model.mass),
        curvature_at_r=field,
    )


@dataclass(frozen=True)
class OrbitMeasurement:
    """Circulation frequency and radius wobble of a simulated orbit."""

    frequency: float
    radial_deviation: float


def simulate_circular_orbit(
    model: HybridModel,
    r: float,
    actions,
    sense: int,
    revolutions: int = 4,
    steps_per_revolution: int = 2048,
    samples_per_revolution: int = 16,
) -> OrbitMeasurement:
    """
    Launch the effective dynamics on the predicted circular orbit and measure it.

    The particle starts at (r, 0) with the tangential speed ωr of the root
    and then moves freely under the effective force. No constraint holds it
    on the circle, so the radial deviation measures how well the root
    matches a true orbit.

    Args:
        model: Hybrid model
        r: Orbit radius
        actions: Frozen band actions
        sense: +1 counter-clockwise, −1 clockwise
        revolutions: Number of predicted periods to integrate
        steps_per_revolution: RK4 steps per predicted period
        samples_per_revolution: Angle samples per period (must exceed 2)

    Returns:
        OrbitMeasurement with the frequency from the unwrapped polar angle
        and max |r(t) − r| / r

    Raises:
        NoOrbitError: If no circular orbit exists at r
    """
    report = frequency_split(model, r, actions)
    nu = report.nu_ccw if sense > 0 else report.nu_cw
    omega = 2.0 * math.pi * nu
    period = 1.0 / nu
    initial = EffectiveState(q=[r, 0.0], v=[0.0, math.copysign(omega * r, sense)], actions=actions)
    n_samples = revolutions * samples_per_revolution
    times = period * np.arange(n_samples + 1) / samples_per_revolution
    trajectory = integrate_effective(
        model,
        initial,
        t_final=float(times[-1]),
        output_times=times,
        dt=period / steps_per_revolution,
    )
    positions = trajectory.positions
    angles = np.unwrap(np.arctan2(positions[:, 1], positions[:, 0]))
    radii = np.linalg.norm(positions, axis=1)
    return OrbitMeasurement(
        frequency=abs(angles[-1] - angles[0]) / (2.0 * math.pi * (times[-1] - times[0])),
        radial_deviation=float(np.max(np.abs(radii - r)) / r),
    )
