"""Abstract hybrid model and a generic matrix-valued implementation."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.model.eigen import EigenFrame, GaugeAnchor, eigensystem

FD_STEP = 1e-6


class HybridModel(ABC):
    """A fast quantum system coupled to a slow classical particle in a plane.

    Subclasses supply Ĥ₁(q). Everything else has a finite-difference default
    so a new model only needs the Hamiltonian and the particle mass. All
    quantities are in the model's own units; hbar defaults to one.
    """

    mass: float
    hbar: float = 1.0
    gauge_anchor: GaugeAnchor = GaugeAnchor.MAX_COMPONENT

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension N of the fast Hilbert space."""

    @abstractmethod
    def hamiltonian(self, q: np.ndarray) -> np.ndarray:
        """Ĥ₁ at particle position q as an N×N complex matrix."""

    def hamiltonian_gradient(self, q: np.ndarray) -> np.ndarray:
        """∂Ĥ₁/∂x and ∂Ĥ₁/∂y by central differences, shape (2, N, N)."""
        q = np.asarray(q, dtype=float)
        grads = []
        for j in range(2):
            step = np.zeros(2)
            step[j] = FD_STEP
            grads.append((self.hamiltonian(q + step) - self.hamiltonian(q - step)) / (2.0 * FD_STEP))
        return np.stack(grads)

    def hamiltonian_and_gradient(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.hamiltonian(q), self.hamiltonian_gradient(q)

    def potential(self, q: np.ndarray) -> float:
        """Extra classical potential V(q)."""
        return 0.0

    def potential_gradient(self, q: np.ndarray) -> np.ndarray:
        return np.zeros(2)

    def eigenframe(self, q: np.ndarray) -> EigenFrame:
        return eigensystem(self.hamiltonian(np.asarray(q, dtype=float)), self.gauge_anchor)

    def eigenstates(self, points: np.ndarray, band: int) -> np.ndarray:
        """Band eigenvectors at many positions, shape (len(points), N)."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return np.array([self.eigenframe(q).state(band) for q in points])

    def band_energies(self, q: np.ndarray) -> np.ndarray:
        return self.eigenframe(q).energies

    def energy_gradients(self, q: np.ndarray) -> np.ndarray:
        """∇Eₙ for every band by central differences, shape (N, 2)."""
        q = np.asarray(q, dtype=float)
        columns = []
        for j in range(2):
            step = np.zeros(2)
            step[j] = FD_STEP
            columns.append(
                (self.band_energies(q + step) - self.band_energies(q - step)) / (2.0 * FD_STEP)
            )
        return np.stack(columns, axis=1)

    def fast_frequency(self, q: np.ndarray) -> float:
        """Largest transition frequency (E_max − E_min)/ħ at q."""
        energies = self.band_energies(q)
        return float(energies[-1] - energies[0]) / self.hbar


@dataclass(frozen=True)
class MatrixModel(HybridModel):
    """Hybrid model defined by a callable q -> Ĥ₁(q).

    Useful for N-level systems and for tests. Gradients come from finite
    differences unless hamiltonian_gradient_fn is given.
    """

    hamiltonian_fn: Callable[[np.ndarray], np.ndarray]
    mass: float
    hbar: float = 1.0
    potential_fn: Optional[Callable[[np.ndarray], float]] = None
    potential_gradient_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hamiltonian_gradient_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def dim(self) -> int:
        return int(np.asarray(self.hamiltonian_fn(np.zeros(2))).shape[0])

    def hamiltonian(self, q: np.ndarray) -> np.ndarray:
        return np.asarray(self.hamiltonian_fn(np.asarray(q, dtype=float)), dtype=complex)

    def hamiltonian_gradient(self, q: np.ndarray) -> np.ndarray:
        if self.hamiltonian_gradient_fn is not None:
            return np.asarray(self.hamiltonian_gradient_fn(np.asarray(q, dtype=float)), dtype=complex)
        return super().hamiltonian_gradient(q)

    def potential(self, q: np.ndarray) -> float:
        return 0.0 if self.potential_fn is None else float(self.potential_fn(np.asarray(q, dtype=float)))

    def potential_gradient(self, q: np.ndarray) -> np.ndarray:
        if self.potential_gradient_fn is not None:
            return np.asarray(self.potential_gradient_fn(np.asarray(q, dtype=float)), dtype=float)
        if self.potential_fn is None:
            return np.zeros(2)
        q = np.asarray(q, dtype=float)
        grad = np.zeros(2)
        for j in range(2):
            step = np.zeros(2)
            step[j] = FD_STEP
            grad[j] = (self.potential(q + step) - self.potential(q - step)) / (2.0 * FD_STEP)
        return grad
