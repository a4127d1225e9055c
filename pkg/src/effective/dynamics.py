"""Effective equation of motion of the slow particle.

With the band actions frozen, the particle obeys
M·q̈ = −∇ℋ₁ − ∇V + ℬ·(q̇_y, −q̇_x), with ℋ₁ = Σₙ Iₙ·Eₙ(q)/ħ.
The curvature term is perpendicular to the velocity and does no work.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.errors import NonFiniteStateError
from src.fulldyn.stepping import MAX_STEPS, output_schedule, rk4_step, sub_steps
from src.geometry.curvature import curvature
from src.model.base import HybridModel
from src.model.units import UnitSystem
from src.quantum.state import validate_actions
from src.utils.artifacts import write_csv

STEPS_PER_SLOW_PERIOD = 1024
MIN_STIFFNESS_RADIUS = 1e-3


@dataclass(frozen=True)
class EffectiveState:
    """Slow-particle state with frozen band actions, in model units."""

    q: np.ndarray
    v: np.ndarray
    actions: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(2)
        v = np.array(self.v, dtype=float).reshape(2)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
            raise NonFiniteStateError("Effective state has non-finite components")
        actions = np.array(self.actions, dtype=float)
        for name, value in (("q", q), ("v", v), ("actions", actions)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)
        object.__setattr__(self, "t", float(self.t))


@dataclass
class EffectiveTrajectory:
    """Sampled effective trajectory with the conserved energy per sample."""

    samples: list[EffectiveState]
    energy: np.ndarray
    mass: float
    steps: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.q for s in self.samples])

    @property
    def velocities(self) -> np.ndarray:
        return np.array([s.v for s in self.samples])

    @property
    def final(self) -> EffectiveState:
        return self.samples[-1]

    def to_frame(self, units: Optional[UnitSystem] = None) -> pd.DataFrame:
        """Columns t, x, y, px, py, energy; SI when units are given."""
        length = units.length if units else 1.0
        time = units.time if units else 1.0
        momentum = units.momentum if units else 1.0
        energy = units.energy if units else 1.0
        positions = self.positions * length
        momenta = self.mass * self.velocities * momentum
        return pd.DataFrame(
            {
                "t": self.times * time,
                "x": positions[:, 0],
                "y": positions[:, 1],
                "px": momenta[:, 0],
                "py": momenta[:, 1],
                "energy": self.energy * energy,
            }
        )

    def write_csv(self, path: Path, units: Optional[UnitSystem] = None) -> Path:
        return write_csv(self.to_frame(units), path)


def _force(model: HybridModel, q: np.ndarray, v: np.ndarray, actions: np.ndarray) -> np.ndarray:
    gradient = (actions / model.hbar) @ model.energy_gradients(q)
    field = curvature(model, q, actions)
    return -gradient - model.potential_gradient(q) + field * np.array([v[1], -v[0]])


def effective_force(state: EffectiveState, model: HybridModel) -> np.ndarray:
    """
    Force −∇ℋ₁ − ∇V + ℬ·(v_y, −v_x) on the slow particle.

    Raises:
        BadActionsError: If the actions do not sum to ħ
    """
    actions = validate_actions(state.actions, model.hbar)
    return _force(model, state.q, state.v, actions)


def effective_energy(state: EffectiveState, model: HybridModel) -> float:
    """½M|v|² + ℋ₁(q) + V(q); conserved by the effective dynamics."""
    actions = validate_actions(state.actions, model.hbar)
    band_energy = float((actions / model.hbar) @ model.band_energies(state.q))
    return 0.5 * model.mass * float(state.v @ state.v) + band_energy + model.potential(state.q)


def radial_stiffness(model: HybridModel, r: float, actions) -> float:
    """κ = F_x/r at (r, 0) with the particle at rest; negative means attractive."""
    if not r > 0:
        raise ValueError("radius must be positive")
    actions = validate_actions(actions, model.hbar)
    force = _force(model, np.array([r, 0.0]), np.zeros(2), actions)
    return float(force[0]) / r


def effective_default_step(
    model: HybridModel, state: EffectiveState, steps_per_period: int = STEPS_PER_SLOW_PERIOD
) -> float:
    """
    Step resolving the local slow oscillation and cyclotron motion.

    Raises:
        ValueError: If neither force sets a time scale
    """
    radius = max(float(np.linalg.norm(state.q)), MIN_STIFFNESS_RADIUS)
    stiffness = abs(radial_stiffness(model, radius, state.actions))
    omega = math.sqrt(stiffness / model.mass) + abs(curvature(model, state.q, state.actions)) / model.mass
    if not omega > 0:
        raise ValueError("No slow time scale at this state; pass an explicit step")
    return 2.0 * math.pi / omega / steps_per_period


def integrate_effective(
    model: HybridModel,
    initial: EffectiveState,
    t_final: float,
    output_times: Optional[Sequence[float]] = None,
    dt: Optional[float] = None,
    max_steps: int = MAX_STEPS,
) -> EffectiveTrajectory:
    """
    Integrate the effective equation of motion with RK4.

    Args:
        model: Hybrid model
        initial: Starting state; its actions stay fixed
        t_final: End time
        output_times: Sample times landed on exactly; default start and end
        dt: Maximum step; defaults to 1/1024 of the local slow period
        max_steps: Refuse runs needing more steps

    Returns:
        EffectiveTrajectory

    Raises:
        BadActionsError: If the actions are invalid
        NonFiniteStateError: If the state blows up
    """
    actions = validate_actions(initial.actions, model.hbar)
    if dt is None:
        dt = effective_default_step(model, initial)
    plan = output_schedule(initial.t, t_final, output_times, dt, max_steps)
    inv_mass = 1.0 / model.mass

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate([y[2:], _force(model, y[:2], y[2:], actions) * inv_mass])

    samples: list[EffectiveState] = []
    y = np.concatenate([initial.q, initial.v])
    t = initial.t
    steps = 0
    for t_out, n_steps, h in plan:
        for t_step in sub_steps(t, n_steps, h):
            y = rk4_step(rhs, t_step, y, h)
            steps += 1
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(f"Non-finite effective state at t = {t_out!r}")
        t = t_out
        samples.append(EffectiveState(y[:2], y[2:], actions, t))

    return EffectiveTrajectory(
        samples=samples,
        energy=np.array([effective_energy(s, model) for s in samples]),
        mass=model.mass,
        steps=steps,
    )
