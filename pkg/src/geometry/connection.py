"""Berry connection Aₙ = i⟨φₙ|∇φₙ⟩ by central differences."""

from dataclasses import dataclass

import numpy as np

from src.errors import GaugeSingularError
from src.model.base import HybridModel
from src.quantum.state import validate_actions

CONNECTION_STEP = 1e-6
GAUGE_TOL = 1e-8


@dataclass(frozen=True)
class ConnectionEstimate:
    """Connection vector and the size of its discarded imaginary part.

    For normalized states i⟨φ|∂φ⟩ is real; a residual much larger than the
    finite-difference error means the gauge is not smooth at q.
    """

    value: np.ndarray
    residual: float


def berry_connection(
    model: HybridModel, q: np.ndarray, band: int, h: float = CONNECTION_STEP
) -> ConnectionEstimate:
    """
    Berry connection of one band in the model's gauge.

    Args:
        model: Hybrid model; its gauge anchor fixes the phases
        q: Particle position
        band: Band index
        h: Finite-difference step (model length units)

    Returns:
        ConnectionEstimate with value (Ax, Ay)

    Raises:
        GaugeSingularError: If q or a stencil point is within 1e-8 (anchor
            weight) of the chart singularity
    """
    q = np.asarray(q, dtype=float)
    center = model.eigenframe(q)
    frames = [center]
    derivative = []
    for j in range(2):
        step = np.zeros(2)
        step[j] = h
        forward = model.eigenframe(q + step)
        backward = model.eigenframe(q - step)
        frames.extend([forward, backward])
        derivative.append((forward.state(band) - backward.state(band)) / (2.0 * h))
    if min(frame.anchor_weight for frame in frames) < GAUGE_TOL:
        raise GaugeSingularError(f"Gauge chart is singular near q = {q.tolist()}")

    overlaps = np.array([np.vdot(center.state(band), d) for d in derivative])
    return ConnectionEstimate(value=-overlaps.imag, residual=float(np.max(np.abs(overlaps.real))))


def weighted_potential(connections, actions, hbar: float = 1.0) -> np.ndarray:
    """
    Population-weighted potential Ā = Σₙ Iₙ·Aₙ.

    Args:
        connections: Per-band connection vectors or ConnectionEstimates
        actions: Band actions Iₙ = ħ·|aₙ|²
        hbar: Action unit the actions must sum to

    Raises:
        BadActionsError: If the actions are invalid
    """
    actions = validate_actions(actions, hbar)
    vectors = [np.asarray(getattr(c, "value", c), dtype=float) for c in connections]
    if len(vectors) != len(actions):
        raise ValueError("Need one connection per band")
    return sum(I * A for I, A in zip(actions, vectors))
