"""Mean-field force on the particle."""

import numpy as np

from src.model.base import HybridModel


def expectation_gradient(amps: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    """Re⟨ψ|∂ⱼĤ|ψ⟩ for each direction j of a (2, N, N) gradient."""
    return np.real((gradient @ amps) @ np.conj(amps))


def mean_field_force(psi, q: np.ndarray, model: HybridModel) -> np.ndarray:
    """
    Force −∇_q⟨ψ|Ĥ₁(q)|ψ⟩ the fast system exerts on the particle.

    The state is held fixed while q varies. The spin–dipole model evaluates
    the field gradient analytically, other models fall back to central
    differences of the Hamiltonian.

    Args:
        psi: QuantumState or normalized amplitude vector
        q: Particle position in model units
        model: Hybrid model

    Returns:
        Force vector (Fx, Fy) in model units
    """
    amps = np.asarray(getattr(psi, "amps", psi), dtype=complex)
    gradient = model.hamiltonian_gradient(np.asarray(q, dtype=float))
    return -expectation_gradient(amps, gradient)
