"""Magnetic particle moving above a single spin.

The particle carries a dipole mu0*m_F pointing out of its plane of motion,
the spin sits a distance d below the plane. SI helpers (dipole_field,
field_magnitude, spin_hamiltonian) take ModelParams; DipoleSpinModel works in
the internal units of src.model.units.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from src.model.base import HybridModel
from src.model.eigen import EigenFrame, GaugeAnchor, HermitianOperator, two_level_states
from src.model.params import ModelParams
from src.model.units import UnitSystem

# |∂²ℋ₁/∂r²| at the origin for a fully polarized spin, in units of |mu|B(0)/d²
INTRINSIC_STIFFNESS = 15.0 / 4.0
# Fast precession frequency at the origin in internal units
ORIGIN_FAST_FREQUENCY = 2.0
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class FieldVector:
    """Magnetic field (T) at the spin."""

    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.bx, self.by, self.bz)):
            raise ValueError("Field components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz])

    @property
    def magnitude(self) -> float:
        return math.hypot(self.bx, self.by, self.bz)


def dipole_field(x: float, y: float, params: ModelParams) -> FieldVector:
    """
    Field of the particle dipole at the spin for particle position (x, y).

    Args:
        x: Particle x coordinate (m)
        y: Particle y coordinate (m)
        params: Model parameters; uses mu0_mF and d

    Returns:
        FieldVector in tesla
    """
    d = params.d
    r2 = x * x + y * y
    prefactor = -params.mu0_mF / (4.0 * math.pi * (d * d + r2) ** 2.5)
    return FieldVector(
        bx=prefactor * 3.0 * x * d,
        by=prefactor * 3.0 * y * d,
        bz=prefactor * (2.0 * d * d - r2),
    )


def field_magnitude(r, params: ModelParams):
    """Simplified |B| = |mu0_mF|·√(4d²+r²)/(4π(d²+r²)²); accepts arrays."""
    d = params.d
    r = np.asarray(r, dtype=float)
    value = abs(params.mu0_mF) * np.sqrt(4.0 * d * d + r * r) / (4.0 * math.pi * (d * d + r * r) ** 2)
    return float(value) if value.ndim == 0 else value


def spin_hamiltonian(field_vector: FieldVector, mu: float) -> HermitianOperator:
    """Ĥ₁ = −mu·σ·B in joules, built so the off-diagonals are exact conjugates."""
    off_lower = complex(-mu * field_vector.bx, -mu * field_vector.by)
    matrix = np.array(
        [
            [complex(-mu * field_vector.bz, 0.0), off_lower.conjugate()],
            [off_lower, complex(mu * field_vector.bz, 0.0)],
        ]
    )
    return HermitianOperator(matrix)


def scaled_field(x, y, orientation: float):
    """Field in units of B(0) with lengths in units of d; accepts arrays."""
    u = 1.0 + x * x + y * y
    w = orientation / (2.0 * u**2.5)
    return -3.0 * x * w, -3.0 * y * w, -(2.0 - x * x - y * y) * w


def scaled_field_strength(r2):
    """|B|/B(0) as a function of r²/d²."""
    return np.sqrt(4.0 + r2) / (2.0 * (1.0 + r2) ** 2)


@dataclass(frozen=True)
class DipoleSpinModel(HybridModel):
    """Spin–dipole hybrid in internal units.

    Internal units: length d, energy |mu|B(0), time hbar/(|mu|B(0)), hbar = 1.
    The spin Hamiltonian becomes −g·σ·b(q) with g = mu/|mu| (zero when mu = 0)
    and b the scaled dipole field. An optional harmonic trap
    V = ½·M·(trap_ratio·ω_slow)²·r² can be added; it is not part of the bare
    spin–dipole system but lets equal-population configurations orbit.

    Attributes:
        params: SI parameters the units are derived from
        mass: Particle mass in internal units
        trap_ratio: Trap frequency in units of the intrinsic slow frequency
    """

    params: ModelParams
    mass: float
    trap_ratio: float = 0.0
    units: UnitSystem = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.trap_ratio < 0 or not math.isfinite(self.trap_ratio):
            raise ValueError("trap_ratio must be a finite non-negative number")
        object.__setattr__(self, "units", UnitSystem.from_params(self.params))

    @classmethod
    def from_params(cls, params: ModelParams, trap_ratio: float = 0.0) -> "DipoleSpinModel":
        """Model with the physical SI mass of params."""
        units = UnitSystem.from_params(params)
        return cls(params=params, mass=params.mass / units.mass, trap_ratio=trap_ratio)

    @classmethod
    def scaled(
        cls, params: ModelParams, timescale_ratio: float, trap_ratio: float = 0.0
    ) -> "DipoleSpinModel":
        """
        Model whose mass is chosen for a given fast/slow frequency ratio.

        Args:
            params: Field and spin parameters; params.mass is ignored
            timescale_ratio: ω_fast/ω_slow at the origin
            trap_ratio: Trap frequency in units of the intrinsic slow frequency

        Returns:
            DipoleSpinModel with mass (15/16)(1 + trap_ratio²)·R²

        Raises:
            ValueError: If mu is zero (no intrinsic slow frequency)
        """
        if params.mu == 0.0:
            raise ValueError("A timescale ratio needs a nonzero spin moment")
        if not timescale_ratio > 0:
            raise ValueError("timescale_ratio must be positive")
        omega_slow = ORIGIN_FAST_FREQUENCY / timescale_ratio
        mass = INTRINSIC_STIFFNESS * (1.0 + trap_ratio**2) / omega_slow**2
        return cls(params=params, mass=mass, trap_ratio=trap_ratio)

    @property
    def dim(self) -> int:
        return 2

    @property
    def coupling(self) -> float:
        """g = mu / reference moment: ±1, or 0 for a decoupled spin."""
        return self.params.mu / self.units.reference_moment

    @property
    def orientation(self) -> float:
        """Sign of mu0_mF."""
        return 1.0 if self.params.mu0_mF > 0 else -1.0

    @property
    def gauge_anchor(self) -> GaugeAnchor:
        # The chart singularity sits where the field points along +z (or -z
        # for a flipped dipole), which is never reached in the plane.
        return GaugeAnchor.NORTH_SINGULAR if self.orientation > 0 else GaugeAnchor.SOUTH_SINGULAR

    @property
    def trap_stiffness(self) -> float:
        return INTRINSIC_STIFFNESS * abs(self.coupling) * self.trap_ratio**2

    def slow_frequency(self) -> float:
        """Radial oscillation frequency at the origin for a fully polarized spin."""
        return math.sqrt((INTRINSIC_STIFFNESS * abs(self.coupling) + self.trap_stiffness) / self.mass)

    def timescale_ratio(self) -> float:
        return ORIGIN_FAST_FREQUENCY * abs(self.coupling) / self.slow_frequency()

    def field(self, q: np.ndarray) -> np.ndarray:
        return np.array(scaled_field(float(q[0]), float(q[1]), self.orientation))

    def field_jacobian(self, q: np.ndarray) -> np.ndarray:
        """J[j, k] = ∂b_k/∂q_j, shape (2, 3)."""
        x, y = float(q[0]), float(q[1])
        s = self.orientation
        r2 = x * x + y * y
        u52 = (1.0 + r2) ** -2.5
        u72 = (1.0 + r2) ** -3.5
        cross = 7.5 * s * x * y * u72
        radial = s * u72 * (6.0 - 1.5 * r2)
        return np.array(
            [
                [-3.0 * s * (0.5 * u52 - 2.5 * x * x * u72), cross, x * radial],
                [cross, -3.0 * s * (0.5 * u52 - 2.5 * y * y * u72), y * radial],
            ]
        )

    def field_strength(self, q: np.ndarray) -> float:
        return float(scaled_field_strength(float(q[0]) ** 2 + float(q[1]) ** 2))

    def field_strength_gradient(self, q: np.ndarray) -> np.ndarray:
        x, y = float(q[0]), float(q[1])
        r2 = x * x + y * y
        coefficient = -3.0 * (5.0 + r2) / (2.0 * math.sqrt(4.0 + r2) * (1.0 + r2) ** 3)
        return coefficient * np.array([x, y])

    def _spin_matrix(self, b: np.ndarray) -> np.ndarray:
        g = self.coupling
        off_lower = complex(-g * b[0], -g * b[1])
        return np.array(
            [
                [complex(-g * b[2], 0.0), off_lower.conjugate()],
                [off_lower, complex(g * b[2], 0.0)],
            ]
        )

    def hamiltonian(self, q: np.ndarray) -> np.ndarray:
        return self._spin_matrix(self.field(q))

    def hamiltonian_gradient(self, q: np.ndarray) -> np.ndarray:
        jacobian = self.field_jacobian(q)
        return -self.coupling * np.einsum("jk,kab->jab", jacobian, PAULI)

    def hamiltonian_and_gradient(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.hamiltonian(q), self.hamiltonian_gradient(q)

    def potential(self, q: np.ndarray) -> float:
        return 0.5 * self.trap_stiffness * float(q[0] ** 2 + q[1] ** 2)

    def potential_gradient(self, q: np.ndarray) -> np.ndarray:
        return self.trap_stiffness * np.asarray(q, dtype=float)

    def band_of(self, label: str) -> int:
        """Band index of the state aligned ("+") or anti-aligned ("-") with the field."""
        if label not in ("+", "-"):
            raise ValueError(f"Unknown band label {label!r}, expected '+' or '-'")
        plus_first = self.coupling >= 0
        if label == "+":
            return 0 if plus_first else 1
        return 1 if plus_first else 0

    def band_label(self, band: int) -> str:
        return "+" if band == self.band_of("+") else "-"

    def _ordered(self, plus: np.ndarray, minus: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (plus, minus) if self.coupling >= 0 else (minus, plus)

    def eigenframe(self, q: np.ndarray) -> EigenFrame:
        b = self.field(q)
        strength = self.field_strength(q)
        plus, minus, weight = two_level_states(b / np.linalg.norm(b), self.gauge_anchor)
        energy_plus = -self.coupling * strength
        energies = np.array(self._ordered(energy_plus, -energy_plus))
        lower, upper = self._ordered(plus, minus)
        return EigenFrame(
            energies=energies,
            states=np.column_stack([lower, upper]),
            gauge_anchor=self.gauge_anchor,
            anchor_weight=float(weight),
        )

    def eigenstates(self, points: np.ndarray, band: int) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        b = np.stack(scaled_field(points[:, 0], points[:, 1], self.orientation), axis=-1)
        plus, minus, _ = two_level_states(b / np.linalg.norm(b, axis=-1, keepdims=True), self.gauge_anchor)
        return self._ordered(plus, minus)[band]

    def band_energies(self, q: np.ndarray) -> np.ndarray:
        energy_plus = -self.coupling * self.field_strength(q)
        return np.array(self._ordered(energy_plus, -energy_plus))

    def energy_gradients(self, q: np.ndarray) -> np.ndarray:
        grad_plus = -self.coupling * self.field_strength_gradient(q)
        return np.stack(self._ordered(grad_plus, -grad_plus))

    def fast_frequency(self, q: np.ndarray) -> float:
        return 2.0 * abs(self.coupling) * self.field_strength(q)
