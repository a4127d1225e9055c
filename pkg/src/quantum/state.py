"""Quantum state of the fast system and its action–angle description."""

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from src.errors import BadActionsError
from src.model.base import HybridModel
from src.model.eigen import EigenFrame

NORM_TOL = 1e-10
ACTION_SUM_TOL = 1e-8
EMPTY_BAND = 1e-30


def wrap_angle(angle: float) -> float:
    """Map an angle into (−π, π]; odd under negation except at ±π."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector ψ ∈ ℂᴺ in the fixed computational basis."""

    amps: np.ndarray
    norm_tol: ClassVar[float] = NORM_TOL

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise ValueError("Amplitudes must be finite")
        if abs(np.linalg.norm(amps) - 1.0) > self.norm_tol:
            raise ValueError(f"State is not normalized: ‖ψ‖ = {np.linalg.norm(amps):.12f}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, amps) -> "QuantumState":
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("Cannot normalize a zero vector")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return len(self.amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def conj(self) -> "QuantumState":
        return QuantumState(np.conj(self.amps))


@dataclass(frozen=True)
class ActionAngleState:
    """Band actions Iₙ = ħ|aₙ|² and angles Θₙ = −arg aₙ."""

    actions: np.ndarray
    angles: np.ndarray
    hbar: float = field(default=1.0)

    def __post_init__(self):
        actions = np.array(self.actions, dtype=float)
        angles = np.array(self.angles, dtype=float)
        if actions.shape != angles.shape:
            raise ValueError("actions and angles must have the same length")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "angles", angles)

    @property
    def populations(self) -> np.ndarray:
        return self.actions / self.hbar


def band_amplitudes(psi: QuantumState, frame: EigenFrame) -> np.ndarray:
    """aₙ = ⟨φₙ|ψ⟩ for every band of the frame."""
    return frame.states.conj().T @ psi.amps


def populations(psi: QuantumState, frame: EigenFrame) -> np.ndarray:
    return np.abs(band_amplitudes(psi, frame)) ** 2


def schrodinger_rhs(psi: QuantumState, q: np.ndarray, model: HybridModel) -> np.ndarray:
    """dψ/dt = −(i/ħ)·Ĥ₁(q)·ψ with q held fixed."""
    return (-1j / model.hbar) * (model.hamiltonian(np.asarray(q, dtype=float)) @ psi.amps)


def to_action_angle(psi: QuantumState, frame: EigenFrame, hbar: float = 1.0) -> ActionAngleState:
    """
    Action–angle coordinates of ψ relative to an eigenframe.

    Args:
        psi: Normalized state
        frame: Eigenbasis at the current particle position
        hbar: Action unit

    Returns:
        ActionAngleState; angles of empty bands (|aₙ|² < 1e-30) are zero
    """
    amps = band_amplitudes(psi, frame)
    weights = np.abs(amps) ** 2
    angles = np.array(
        [0.0 if w < EMPTY_BAND else wrap_angle(-float(np.angle(a))) for a, w in zip(amps, weights)]
    )
    return ActionAngleState(actions=hbar * weights, angles=angles, hbar=hbar)


def validate_actions(actions, hbar: float = 1.0) -> np.ndarray:
    """
    Check that actions are non-negative and sum to ħ.

    Raises:
        BadActionsError: On a negative action or a sum off by more than 1e-8·ħ
    """
    actions = np.asarray(actions, dtype=float)
    if np.any(actions < 0) or not np.all(np.isfinite(actions)):
        raise BadActionsError(f"Actions must be finite and non-negative, got {actions.tolist()}")
    if abs(float(np.sum(actions)) - hbar) > ACTION_SUM_TOL * hbar:
        raise BadActionsError(f"Actions sum to {float(np.sum(actions))!r}, expected {hbar!r}")
    return actions


def from_action_angle(state: ActionAngleState, frame: EigenFrame) -> QuantumState:
    """
    Rebuild ψ = Σ √(Iₙ/ħ)·e^{−iΘₙ}·|φₙ⟩.

    Raises:
        BadActionsError: If the actions are invalid
    """
    actions = validate_actions(state.actions, state.hbar)
    amps = np.sqrt(actions / state.hbar) * np.exp(-1j * state.angles)
    return QuantumState.normalized(frame.states @ amps)


def superposition(frame: EigenFrame, amplitudes) -> QuantumState:
    """State with the given (normalized) band amplitudes."""
    return QuantumState.normalized(frame.states @ np.asarray(amplitudes, dtype=complex))
