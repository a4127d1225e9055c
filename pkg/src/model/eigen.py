"""Hermitian operators, eigenframes and gauge fixing."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh

from src.errors import DegenerateSpectrumError

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-12


class GaugeAnchor(str, Enum):
    """Phase convention applied to eigenvectors.

    The two pole charts apply to two-level frames built from a unit Bloch
    vector n: NORTH_SINGULAR is smooth everywhere except n = +z, SOUTH_SINGULAR
    everywhere except n = -z. MAX_COMPONENT makes the largest-magnitude
    component real and positive (first one on ties).
    """

    NORTH_SINGULAR = "north_singular"
    SOUTH_SINGULAR = "south_singular"
    MAX_COMPONENT = "max_component"


@dataclass(frozen=True)
class HermitianOperator:
    """N×N Hermitian matrix acting on the fast Hilbert space."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Operator must be square, got shape {matrix.shape}")
        scale = max(float(np.max(np.abs(matrix))), 1.0)
        if np.max(np.abs(matrix - matrix.conj().T)) > HERMITICITY_TOL * scale:
            raise ValueError("Operator is not Hermitian")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, amps: np.ndarray) -> float:
        return float(np.real(np.vdot(amps, self.matrix @ amps)))


@dataclass(frozen=True)
class EigenFrame:
    """Eigenbasis of a Hamiltonian at one classical configuration.

    Attributes:
        energies: Eigenvalues in ascending order
        states: Column n is the normalized eigenvector of energies[n]
        gauge_anchor: Phase convention the columns follow
        anchor_weight: Smallest magnitude of the component the phase was
            fixed on; near zero means the chart is close to its singularity
    """

    energies: np.ndarray
    states: np.ndarray
    gauge_anchor: GaugeAnchor
    anchor_weight: float

    def __post_init__(self):
        energies = np.array(self.energies, dtype=float)
        states = np.array(self.states, dtype=complex)
        energies.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return len(self.energies)

    def state(self, band: int) -> np.ndarray:
        return self.states[:, band]

    def residual(self, matrix: np.ndarray) -> float:
        """Largest ‖Hφₙ − Eₙφₙ‖ over the bands."""
        diff = np.asarray(matrix) @ self.states - self.states * self.energies
        return float(np.max(np.linalg.norm(diff, axis=0)))


def two_level_states(
    axis: np.ndarray, anchor: GaugeAnchor
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Spin-up / spin-down states along unit Bloch vectors in a pole chart.

    Args:
        axis: Unit vectors, shape (..., 3)
        anchor: NORTH_SINGULAR or SOUTH_SINGULAR

    Returns:
        (plus, minus, weight): eigenvectors of σ·n with eigenvalues +1 and -1,
        each shape (..., 2), and the anchor weight of the chart, shape (...).
        Overlaps between minus states are the exact complex conjugates of
        the matching plus-state overlaps, so the two bands get connections
        and curvatures of opposite sign.
    """
    axis = np.asarray(axis, dtype=float)
    nx, ny, nz = axis[..., 0], axis[..., 1], axis[..., 2]
    transverse_plus = nx + 1j * ny
    transverse_minus = nx - 1j * ny

    if anchor is GaugeAnchor.NORTH_SINGULAR:
        weight = np.sqrt(np.clip((1.0 - nz) / 2.0, 0.0, 1.0))
        safe = np.where(weight > 0.0, weight, 1.0)
        ratio_minus = np.where(weight > 0.0, transverse_minus / (2.0 * safe), 1.0)
        ratio_plus = np.where(weight > 0.0, transverse_plus / (2.0 * safe), 1.0)
        plus = np.stack([ratio_minus, weight + 0j], axis=-1)
        minus = np.stack([weight + 0j, -ratio_plus], axis=-1)
    elif anchor is GaugeAnchor.SOUTH_SINGULAR:
        weight = np.sqrt(np.clip((1.0 + nz) / 2.0, 0.0, 1.0))
        safe = np.where(weight > 0.0, weight, 1.0)
        ratio_minus = np.where(weight > 0.0, transverse_minus / (2.0 * safe), 1.0)
        ratio_plus = np.where(weight > 0.0, transverse_plus / (2.0 * safe), 1.0)
        plus = np.stack([weight + 0j, ratio_plus], axis=-1)
        minus = np.stack([-ratio_minus, weight + 0j], axis=-1)
    else:
        raise ValueError(f"{anchor.value} is not a two-level pole chart")
    return plus, minus, weight


def fix_max_component(states: np.ndarray) -> tuple[np.ndarray, float]:
    """Rephase each column so its largest-magnitude entry is real and positive."""
    states = np.array(states, dtype=complex)
    weights = []
    for n in range(states.shape[1]):
        column = states[:, n]
        idx = int(np.argmax(np.abs(column)))
        magnitude = abs(column[idx])
        column *= np.conj(column[idx]) / magnitude
        column[idx] = magnitude
        weights.append(magnitude)
    return states, float(min(weights))


def _two_level(matrix: np.ndarray, anchor: GaugeAnchor) -> EigenFrame:
    # H = c·I + h·σ
    center = 0.5 * float(np.real(matrix[0, 0] + matrix[1, 1]))
    hz = 0.5 * float(np.real(matrix[0, 0] - matrix[1, 1]))
    hx = float(np.real(matrix[1, 0]))
    hy = float(np.imag(matrix[1, 0]))
    half_gap = math.hypot(hx, hy, hz)
    scale = abs(center) + half_gap
    if scale == 0.0 or 2.0 * half_gap < DEGENERACY_TOL * scale:
        raise DegenerateSpectrumError(f"Spectral gap {2.0 * half_gap:.3e} below tolerance")

    axis = np.array([hx, hy, hz]) / half_gap
    chart = anchor
    if anchor is GaugeAnchor.MAX_COMPONENT:
        chart = GaugeAnchor.NORTH_SINGULAR if axis[2] <= 0.0 else GaugeAnchor.SOUTH_SINGULAR
    plus, minus, weight = two_level_states(axis, chart)
    states = np.column_stack([minus, plus])
    weight = float(weight)
    if anchor is GaugeAnchor.MAX_COMPONENT:
        states, weight = fix_max_component(states)
    return EigenFrame(
        energies=np.array([center - half_gap, center + half_gap]),
        states=states,
        gauge_anchor=anchor,
        anchor_weight=weight,
    )


def eigensystem(
    hamiltonian: HermitianOperator | np.ndarray,
    gauge_anchor: GaugeAnchor = GaugeAnchor.MAX_COMPONENT,
) -> EigenFrame:
    """
    Diagonalize a Hermitian matrix under a deterministic phase convention.

    Two-level matrices use a closed form with residual at machine precision;
    larger ones go through scipy's Hermitian solver.

    Args:
        hamiltonian: Operator or raw N×N matrix
        gauge_anchor: Phase convention of the returned eigenvectors

    Returns:
        EigenFrame with ascending energies

    Raises:
        DegenerateSpectrumError: If the smallest gap is below 1e-12·‖H‖
        ValueError: If a pole chart is requested for N > 2
    """
    if not isinstance(hamiltonian, HermitianOperator):
        hamiltonian = HermitianOperator(hamiltonian)
    matrix = hamiltonian.matrix

    if hamiltonian.dim == 2:
        return _two_level(matrix, gauge_anchor)

    if gauge_anchor is not GaugeAnchor.MAX_COMPONENT:
        raise ValueError("Pole charts only apply to two-level systems")
    energies, states = eigh(matrix)
    scale = float(np.linalg.norm(matrix, 2))
    if scale == 0.0 or np.min(np.diff(energies)) < DEGENERACY_TOL * scale:
        raise DegenerateSpectrumError("Degenerate spectrum")
    states, weight = fix_max_component(states)
    return EigenFrame(energies, states, gauge_anchor, weight)
