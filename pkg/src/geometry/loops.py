"""Berry phases around closed loops in the particle plane."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DegenerateSpectrumError
from src.fulldyn.stepping import rk4_step
from src.geometry.connection import berry_connection
from src.model.base import HybridModel
from src.model.dipole import DipoleSpinModel
from src.quantum.state import superposition, validate_actions, wrap_angle

MAX_SPACING = 0.05
LOOP_POINTS = 512
LOOP_TOL = 1e-8
MAX_LOOP_POINTS = 2**20
MIN_OVERLAP = 0.5
# Links above this angle make the winding number ambiguous
RESOLVED_LINK = math.pi / 4


@dataclass(frozen=True)
class LoopPath:
    """Closed polyline q₀ … q_K with q_K == q₀ exactly.

    Circles remember their geometry so refinement resamples the circle
    instead of inserting chord midpoints.
    """

    points: np.ndarray
    band: int
    max_spacing: float = MAX_SPACING
    radius: Optional[float] = None
    center: tuple[float, float] = (0.0, 0.0)
    orientation: int = 1

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 4:
            raise ValueError("A loop needs at least three distinct points")
        if not np.array_equal(points[0], points[-1]):
            raise ValueError("Loop is not closed: first and last points differ")
        spacing = float(np.max(np.linalg.norm(np.diff(points, axis=0), axis=1)))
        if spacing > self.max_spacing:
            raise ValueError(f"Loop spacing {spacing:.3g} exceeds {self.max_spacing:.3g}")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)

    @classmethod
    def circle(
        cls,
        radius: float,
        band: int,
        points: int = LOOP_POINTS,
        center: tuple[float, float] = (0.0, 0.0),
        orientation: int = 1,
        max_spacing: float = MAX_SPACING,
    ) -> "LoopPath":
        """Circle traversed counter-clockwise (orientation +1) or clockwise (-1)."""
        if not radius > 0:
            raise ValueError("radius must be positive")
        while 2.0 * math.pi * radius / points > max_spacing:
            points *= 2
        angles = 2.0 * math.pi * np.arange(points) / points
        ring = np.column_stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)])
        ring = np.vstack([ring, ring[:1]])
        if orientation < 0:
            ring = ring[::-1]
        return cls(ring, band, max_spacing, radius, tuple(center), 1 if orientation > 0 else -1)

    @property
    def segments(self) -> int:
        return len(self.points) - 1

    def reversed(self) -> "LoopPath":
        """Same points in the opposite order."""
        return LoopPath(
            self.points[::-1], self.band, self.max_spacing, self.radius, self.center, -self.orientation
        )

    def refined(self) -> "LoopPath":
        """Loop with twice as many segments."""
        if self.radius is not None:
            return LoopPath.circle(
                self.radius, self.band, 2 * self.segments, self.center, self.orientation, self.max_spacing
            )
        midpoints = 0.5 * (self.points[:-1] + self.points[1:])
        refined = np.empty((2 * self.segments + 1, 2))
        refined[0:-1:2] = self.points[:-1]
        refined[1::2] = midpoints
        refined[-1] = self.points[0]
        return LoopPath(refined, self.band, self.max_spacing, orientation=self.orientation)


@dataclass(frozen=True)
class LoopPhase:
    """Berry phase of one band around a loop.

    Attributes:
        phase: Gauge-invariant phase wrapped to (−π, π]
        total: Unwrapped sum of link angles, −∮A·dq
        winding: (total − phase)/2π when every link is resolved, else None
        resolved: False when some link angle exceeds π/4
        points: Number of segments used
        band: Band index
    """

    phase: float
    total: float
    winding: Optional[int]
    resolved: bool
    points: int
    band: int


def _link_angles(model: HybridModel, path: LoopPath) -> np.ndarray:
    states = model.eigenstates(path.points[:-1], path.band)
    links = np.sum(np.conj(states) * np.roll(states, -1, axis=0), axis=1)
    if np.min(np.abs(links)) < MIN_OVERLAP:
        raise DegenerateSpectrumError("Loop overlaps collapsed; refine the loop or avoid the crossing")
    return np.angle(links)


def _phase_of(model: HybridModel, path: LoopPath) -> LoopPhase:
    angles = _link_angles(model, path)
    # fsum keeps the total independent of summation order
    total = math.fsum(angles.tolist())
    phase = wrap_angle(total)
    resolved = bool(np.max(np.abs(angles)) < RESOLVED_LINK)
    winding = round((total - phase) / (2.0 * math.pi)) if resolved else None
    return LoopPhase(phase, total, winding, resolved, path.segments, path.band)


def _reversed_phase(result: LoopPhase) -> LoopPhase:
    # Clockwise result from the counter-clockwise one
    return LoopPhase(
        phase=wrap_angle(-result.phase),
        total=-result.total,
        winding=None if result.winding is None else -result.winding,
        resolved=result.resolved,
        points=result.points,
        band=result.band,
    )


def berry_phase_loop(
    model: HybridModel,
    path: LoopPath,
    tol: float = LOOP_TOL,
    max_points: int = MAX_LOOP_POINTS,
) -> LoopPhase:
    """
    Gauge-invariant Berry phase γ = arg Πₖ⟨φ(qₖ)|φ(qₖ₊₁)⟩.

    The path is refined by doubling until successive phases agree to tol.
    A counter-clockwise loop gives −∮Aₙ·dq; a clockwise one is evaluated
    counter-clockwise and negated.

    Args:
        model: Hybrid model
        path: Closed loop carrying the band index
        tol: Convergence tolerance in radians
        max_points: Stop refining beyond this many segments

    Returns:
        LoopPhase of the finest path evaluated

    Raises:
        DegenerateSpectrumError: If adjacent states are nearly orthogonal
    """
    if path.orientation < 0:
        return _reversed_phase(berry_phase_loop(model, path.reversed(), tol, max_points))
    current = _phase_of(model, path)
    while 2 * current.points <= max_points:
        path = path.refined()
        finer = _phase_of(model, path)
        if abs(wrap_angle(finer.phase - current.phase)) < tol:
            return finer
        current = finer
    return current


def solid_angle(model: DipoleSpinModel, radius: float) -> float:
    """
    Solid angle the field direction sweeps for a circle of given radius about
    the origin: 2π(1 − cos θ) with tan θ = 3r/(2 − r²) in units of d.
    """
    theta = math.atan2(3.0 * radius, 2.0 - radius * radius)
    return 2.0 * math.pi * (1.0 - math.cos(theta))


def dipole_loop_prediction(model: DipoleSpinModel, radius: float, band: int) -> float:
    """Expected counter-clockwise loop phase: −½Ω for '+', +½Ω for '-' (μ₀m_F > 0)."""
    sign = -1.0 if model.band_label(band) == "+" else 1.0
    return wrap_angle(sign * model.orientation * 0.5 * solid_angle(model, radius))


def angle_rate(model: HybridModel, q: np.ndarray, q_dot: np.ndarray, actions, band: int) -> float:
    """
    dΘₙ/dt in the adiabatic limit: Eₙ/ħ − Aₙ·q̇.

    The first term is ∂ℋ₁/∂Iₙ for ℋ₁ = Σ EₙIₙ/ħ, so it does not depend on
    the actions; they are validated for consistency with the caller's state.
    """
    validate_actions(actions, model.hbar)
    energy = float(model.band_energies(q)[band])
    connection = berry_connection(model, q, band).value
    return energy / model.hbar - float(connection @ np.asarray(q_dot, dtype=float))


def _rk4_dynamical_phase(z: float) -> float:
    # Phase the RK4 propagator actually applies to e^{-iz}; removes the
    # integrator's own phase error from the dynamical part
    return -float(np.angle(1.0 - 1j * z - z * z / 2.0 + 1j * z**3 / 6.0 + z**4 / 24.0))


def adiabatic_loop_phase(
    model: HybridModel,
    radius: float,
    period: float,
    band: int,
    amplitudes=None,
    center: tuple[float, float] = (0.0, 0.0),
    steps_per_fast_period: int = 64,
) -> float:
    """
    Geometric phase read off the quantum evolution along a driven loop.

    The particle is dragged once around a counter-clockwise circle in the
    given time while ψ follows the Schrödinger equation. The change of the
    unwrapped angle Θₙ = −arg aₙ minus the dynamical part ∫Eₙ dt/ħ converges
    to the loop Berry phase as the period grows.

    Args:
        model: Hybrid model
        radius: Loop radius
        period: Time for one revolution
        band: Band whose angle is tracked
        amplitudes: Initial band amplitudes; defaults to the pure band state
        center: Loop centre
        steps_per_fast_period: RK4 steps per fast period at the start

    Returns:
        Extracted phase wrapped to (−π, π]
    """
    if not period > 0:
        raise ValueError("period must be positive")
    omega = 2.0 * math.pi / period
    center_arr = np.asarray(center, dtype=float)

    def position(t: float) -> np.ndarray:
        return center_arr + radius * np.array([math.cos(omega * t), math.sin(omega * t)])

    def rhs(t: float, amps: np.ndarray) -> np.ndarray:
        return (-1j / model.hbar) * (model.hamiltonian(position(t)) @ amps)

    frame = model.eigenframe(position(0.0))
    if amplitudes is None:
        amplitudes = np.eye(frame.dim)[band]
    amps = superposition(frame, amplitudes).amps.copy()

    dt_max = 2.0 * math.pi / model.fast_frequency(position(0.0)) / steps_per_fast_period
    n_steps = max(1, math.ceil(period / dt_max))
    h = period / n_steps

    previous = np.vdot(frame.state(band), amps)
    angle_change = 0.0
    dynamical = 0.0
    for k in range(n_steps):
        t = k * h
        energy_mid = float(model.band_energies(position(t + 0.5 * h))[band])
        dynamical += _rk4_dynamical_phase(energy_mid * h / model.hbar)
        amps = rk4_step(rhs, t, amps, h)
        amps /= np.linalg.norm(amps)
        current = np.vdot(model.eigenframe(position(t + h)).state(band), amps)
        angle_change -= float(np.angle(current * np.conj(previous)))
        previous = current
    return wrap_angle(angle_change - dynamical)
