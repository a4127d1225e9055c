"""RK4 integration of the coupled Schrödinger and Newton equations.

The joint state is packed into one real vector (Re ψ, Im ψ, q, p) and
advanced with fixed-step fourth-order Runge–Kutta. ψ is renormalized only
when its norm drifts by more than 1e-12, and every such event is counted.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.errors import DegenerateSpectrumError, NonFiniteStateError, StepTooLargeError
from src.fulldyn.stepping import MAX_STEPS, doubling_error, output_schedule, rk4_step, sub_steps
from src.model.base import HybridModel
from src.model.forces import expectation_gradient
from src.model.units import UnitSystem
from src.quantum.state import QuantumState, band_amplitudes, superposition
from src.utils.artifacts import write_csv

STEPS_PER_FAST_PERIOD = 64
RENORM_TOL = 1e-12
STEP_ERROR_TOL = 1e-6
CHECK_EVERY = 4096


@dataclass(frozen=True)
class HybridState:
    """Instantaneous joint state (ψ, q, p) at time t, in model units."""

    psi: QuantumState
    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(2)
        p = np.array(self.p, dtype=float).reshape(2)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and np.isfinite(self.t)):
            raise NonFiniteStateError("Hybrid state has non-finite components")
        q.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.psi.amps.real, self.psi.amps.imag, self.q, self.p])

    @classmethod
    def from_vector(cls, y: np.ndarray, t: float, dim: int) -> "HybridState":
        amps = y[:dim] + 1j * y[dim : 2 * dim]
        return cls(QuantumState(amps), y[2 * dim : 2 * dim + 2], y[2 * dim + 2 :], t)

    def time_reversed(self) -> "HybridState":
        """(ψ*, q, −p): retraces the motion when the Hamiltonian is real."""
        return HybridState(self.psi.conj(), self.q, -self.p, self.t)

    def mirrored(self) -> "HybridState":
        """Reflection y → −y combined with time reversal: (ψ*, x, −y, −px, py)."""
        return HybridState(
            self.psi.conj(),
            np.array([self.q[0], -self.q[1]]),
            np.array([-self.p[0], self.p[1]]),
            self.t,
        )


@dataclass
class Trajectory:
    """Sampled hybrid trajectory with per-sample diagnostics."""

    samples: list[HybridState]
    energy: np.ndarray
    norm: np.ndarray
    actions: np.ndarray
    renormalizations: int = 0
    steps: int = 0
    max_step_norm_drift: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.q for s in self.samples])

    @property
    def momenta(self) -> np.ndarray:
        return np.array([s.p for s in self.samples])

    @property
    def final(self) -> HybridState:
        return self.samples[-1]

    def to_frame(self, units: Optional[UnitSystem] = None) -> pd.DataFrame:
        """
        Tabulate the trajectory.

        Args:
            units: Convert to SI with this unit system; None keeps model units

        Returns:
            DataFrame with columns t, x, y, px, py, re_psi_k, im_psi_k,
            energy, norm, I_k
        """
        scale = _Scales.of(units)
        positions = self.positions * scale.length
        momenta = self.momenta * scale.momentum
        columns = {
            "t": self.times * scale.time,
            "x": positions[:, 0],
            "y": positions[:, 1],
            "px": momenta[:, 0],
            "py": momenta[:, 1],
        }
        amps = np.array([s.psi.amps for s in self.samples])
        for k in range(amps.shape[1]):
            columns[f"re_psi_{k + 1}"] = amps[:, k].real
            columns[f"im_psi_{k + 1}"] = amps[:, k].imag
        columns["energy"] = self.energy * scale.energy
        columns["norm"] = self.norm
        for k in range(self.actions.shape[1]):
            columns[f"I_{k + 1}"] = self.actions[:, k] * scale.action
        return pd.DataFrame(columns)

    def write_csv(self, path: Path, units: Optional[UnitSystem] = None) -> Path:
        return write_csv(self.to_frame(units), path)


@dataclass(frozen=True)
class _Scales:
    length: float = 1.0
    time: float = 1.0
    momentum: float = 1.0
    energy: float = 1.0
    action: float = 1.0

    @classmethod
    def of(cls, units: Optional[UnitSystem]) -> "_Scales":
        if units is None:
            return cls()
        return cls(units.length, units.time, units.momentum, units.energy, units.action)


@dataclass
class _Propagator:
    """Joint RHS of the hybrid equations and the per-step bookkeeping."""

    model: HybridModel
    dim: int
    renormalizations: int = 0
    steps: int = 0
    max_step_norm_drift: float = 0.0
    _inv_mass: float = field(init=False)

    def __post_init__(self):
        self._inv_mass = 1.0 / self.model.mass

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        n = self.dim
        psi = y[:n] + 1j * y[n : 2 * n]
        q = y[2 * n : 2 * n + 2]
        hamiltonian, gradient = self.model.hamiltonian_and_gradient(q)
        dpsi = (-1j / self.model.hbar) * (hamiltonian @ psi)
        force = -expectation_gradient(psi, gradient) - self.model.potential_gradient(q)
        return np.concatenate([dpsi.real, dpsi.imag, y[2 * n + 2 :] * self._inv_mass, force])

    def advance(self, t: float, y: np.ndarray, h: float, check_error: bool) -> np.ndarray:
        y_next = rk4_step(self.rhs, t, y, h)
        if not np.all(np.isfinite(y_next)):
            raise NonFiniteStateError(f"Non-finite state after step at t = {t!r}")
        if check_error:
            error = doubling_error(self.rhs, t, y, h, y_next)
            bound = STEP_ERROR_TOL * max(float(np.linalg.norm(y)), 1.0)
            if not error <= bound:
                raise StepTooLargeError(
                    f"Local error {error:.3e} exceeds {bound:.3e} with step {h!r}"
                )
        n = self.dim
        norm = float(np.sqrt(np.sum(y_next[: 2 * n] ** 2)))
        drift = abs(norm - 1.0)
        self.max_step_norm_drift = max(self.max_step_norm_drift, drift)
        if drift > RENORM_TOL:
            y_next[: 2 * n] /= norm
            self.renormalizations += 1
        self.steps += 1
        return y_next


def total_energy(state: HybridState, model: HybridModel) -> float:
    """⟨ψ|Ĥ₁(q)|ψ⟩ + |p|²/2M + V(q)."""
    amps = state.psi.amps
    spin = float(np.real(np.vdot(amps, model.hamiltonian(state.q) @ amps)))
    return spin + float(state.p @ state.p) / (2.0 * model.mass) + model.potential(state.q)


def default_step(model: HybridModel, q: np.ndarray, steps_per_period: int = STEPS_PER_FAST_PERIOD) -> float:
    """
    Step resolving the fast precession at q with a fixed number of steps.

    Raises:
        ValueError: If the fast frequency vanishes (decoupled spin)
    """
    omega = model.fast_frequency(np.asarray(q, dtype=float))
    if not omega > 0:
        raise ValueError("Fast frequency is zero; pass an explicit step")
    return 2.0 * np.pi / omega / steps_per_period


def step(
    state: HybridState,
    dt: float,
    model: HybridModel,
    check_error: bool = True,
) -> HybridState:
    """
    Advance the joint state by one RK4 step.

    Raises:
        StepTooLargeError: If check_error and the step-doubling error
            estimate exceeds 1e-6 of the state norm
        NonFiniteStateError: If the step produces NaN or infinity
    """
    propagator = _Propagator(model, state.psi.dim)
    y = propagator.advance(state.t, state.to_vector(), dt, check_error)
    return HybridState.from_vector(y, state.t + dt, state.psi.dim)


def _actions(model: HybridModel, state: HybridState) -> np.ndarray:
    try:
        frame = model.eigenframe(state.q)
    except DegenerateSpectrumError:
        return np.full(state.psi.dim, np.nan)
    return model.hbar * np.abs(band_amplitudes(state.psi, frame)) ** 2


def integrate(
    model: HybridModel,
    initial: HybridState,
    t_final: float,
    output_times: Optional[Sequence[float]] = None,
    dt: Optional[float] = None,
    check_every: int = CHECK_EVERY,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """
    Integrate the exact hybrid equations of motion.

    Args:
        model: Hybrid model
        initial: Starting state; its t is the start time
        t_final: End time
        output_times: Sample times; each is landed on exactly. Defaults to
            the start and the end
        dt: Maximum step; defaults to 1/64 of the fast period at the start
        check_every: Re-check the local error every this many steps. The
            first step of every output interval whose step size differs
            from the last checked one is always checked, so a step that
            is too large fails before it is repeated
        max_steps: Refuse runs needing more steps

    Returns:
        Trajectory with one sample per output time

    Raises:
        StepTooLargeError: If the step does not resolve the dynamics
        NonFiniteStateError: If the state blows up
        StepBudgetError: If the run needs more than max_steps steps
    """
    dim = initial.psi.dim
    if dt is None:
        dt = default_step(model, initial.q)
    plan = output_schedule(initial.t, t_final, output_times, dt, max_steps)

    propagator = _Propagator(model, dim)
    samples: list[HybridState] = []
    y = initial.to_vector()
    t = initial.t
    checked_h = None
    for t_out, n_steps, h in plan:
        for t_step in sub_steps(t, n_steps, h):
            check = h != checked_h or propagator.steps % check_every == 0
            checked_h = h if check else checked_h
            y = propagator.advance(t_step, y, h, check)
        t = t_out
        samples.append(initial if n_steps == 0 and t_out == initial.t else HybridState.from_vector(y, t, dim))

    return Trajectory(
        samples=samples,
        energy=np.array([total_energy(s, model) for s in samples]),
        norm=np.array([s.psi.norm for s in samples]),
        actions=np.array([_actions(model, s) for s in samples]),
        renormalizations=propagator.renormalizations,
        steps=propagator.steps,
        max_step_norm_drift=propagator.max_step_norm_drift,
    )


def hybrid_state(
    model: HybridModel,
    q,
    velocity=(0.0, 0.0),
    amplitudes=None,
    t: float = 0.0,
) -> HybridState:
    """
    Joint state from band amplitudes at the starting position.

    Args:
        model: Hybrid model
        q: Starting position
        velocity: Starting velocity; momentum is mass·velocity
        amplitudes: Complex amplitudes on the eigenbasis at q; defaults to
            the lowest band
        t: Starting time
    """
    q = np.asarray(q, dtype=float)
    frame = model.eigenframe(q)
    if amplitudes is None:
        amplitudes = np.eye(frame.dim)[0]
    psi = superposition(frame, amplitudes)
    return HybridState(psi, q, model.mass * np.asarray(velocity, dtype=float), t)
