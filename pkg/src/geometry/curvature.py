"""Berry curvature ℬ = Σₙ Iₙ·(∇×Aₙ)_z.

The numerical estimate uses the gauge-invariant plaquette product: the phase
of ⟨φ₁|φ₂⟩⟨φ₂|φ₃⟩⟨φ₃|φ₄⟩⟨φ₄|φ₁⟩ around a small counter-clockwise square is
minus the enclosed flux, whatever phases the eigen-solver returns.
"""

import numpy as np

from src.errors import DegenerateSpectrumError
from src.model.base import HybridModel
from src.model.dipole import DipoleSpinModel
from src.quantum.state import validate_actions

PLAQUETTE_STEP = 1e-4
MIN_OVERLAP = 0.5
# Counter-clockwise corners of a unit square centred on the origin
_CORNERS = 0.5 * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def _plaquettes(model: HybridModel, centers: np.ndarray, band: int, delta: float) -> np.ndarray:
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    corners = centers[:, None, :] + delta * _CORNERS[None, :, :]
    states = model.eigenstates(corners.reshape(-1, 2), band).reshape(len(centers), 4, -1)
    following = np.roll(states, -1, axis=1)
    links = np.sum(np.conj(states) * following, axis=-1)
    if np.min(np.abs(links)) < MIN_OVERLAP:
        raise DegenerateSpectrumError("Plaquette overlaps collapsed; reduce delta or avoid the crossing")
    return -np.angle(np.prod(links, axis=1)) / delta**2


def band_curvature(
    model: HybridModel, q: np.ndarray, band: int, delta: float = PLAQUETTE_STEP
) -> float:
    """Curvature of a single band from one plaquette of side delta centred on q."""
    return float(_plaquettes(model, q, band, delta)[0])


def _extrapolated(model: HybridModel, centers: np.ndarray, band: int, delta: float, richardson: bool):
    coarse = _plaquettes(model, centers, band, delta)
    if not richardson:
        return coarse
    fine = _plaquettes(model, centers, band, 0.5 * delta)
    return (4.0 * fine - coarse) / 3.0


def curvature_numeric(
    model: HybridModel,
    q: np.ndarray,
    actions,
    delta: float = PLAQUETTE_STEP,
    richardson: bool = True,
) -> float:
    """
    Population-weighted curvature from plaquette products.

    Args:
        model: Hybrid model
        q: Particle position
        actions: Band actions Iₙ, summing to ħ
        delta: Plaquette side
        richardson: Combine delta and delta/2 to cancel the O(δ²) error

    Returns:
        ℬ(q) in model units (ħ per length²)

    Raises:
        DegenerateSpectrumError: If neighbouring eigenstates are nearly orthogonal
        BadActionsError: If the actions are invalid
    """
    actions = validate_actions(actions, model.hbar)
    total = 0.0
    for band, action in enumerate(actions):
        if action == 0.0:
            continue
        total += action * float(_extrapolated(model, q, band, delta, richardson)[0])
    return total


def dipole_band_curvature(r2):
    """Curvature of the field-aligned spin state for μ₀m_F > 0, in 1/d²."""
    return 9.0 * (r2 + 2.0) / (2.0 * ((r2 + 1.0) * (r2 + 4.0)) ** 1.5)


def dipole_curvature(model: DipoleSpinModel, q: np.ndarray, actions) -> float:
    """
    Closed-form curvature of the spin–dipole model.

    ℬ = s·9(r²+2)/(2[(r²+1)(r²+4)]^{3/2})·(I₊ − I₋) in internal units,
    s = sign(μ₀m_F). It depends on neither the spin moment nor the dipole
    strength.
    """
    actions = validate_actions(actions, model.hbar)
    imbalance = actions[model.band_of("+")] - actions[model.band_of("-")]
    r2 = float(q[0]) ** 2 + float(q[1]) ** 2
    return model.orientation * dipole_band_curvature(r2) * imbalance


def curvature(model: HybridModel, q: np.ndarray, actions) -> float:
    """ℬ(q): closed form for the spin–dipole model, plaquettes otherwise."""
    if isinstance(model, DipoleSpinModel):
        return dipole_curvature(model, q, actions)
    return curvature_numeric(model, q, actions)


def curvature_grid(
    model: HybridModel,
    xs,
    ys,
    actions,
    delta: float = PLAQUETTE_STEP,
    richardson: bool = True,
) -> np.ndarray:
    """
    Numerical curvature on a rectangular grid.

    Returns:
        Array of shape (len(xs), len(ys)); entry [i, j] is ℬ(xs[i], ys[j])
    """
    actions = validate_actions(actions, model.hbar)
    xx, yy = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), indexing="ij")
    centers = np.column_stack([xx.ravel(), yy.ravel()])
    total = np.zeros(len(centers))
    for band, action in enumerate(actions):
        if action == 0.0:
            continue
        total += action * _extrapolated(model, centers, band, delta, richardson)
    return total.reshape(xx.shape)
