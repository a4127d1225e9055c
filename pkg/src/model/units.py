"""Internal unit system.

All dynamics run in nondimensional units: length d, energy |mu|B(0) and time
hbar/(|mu|B(0)). Conversion to SI happens only when results are reported.
"""

import math
from dataclasses import dataclass

from src.model.params import BOHR_MAGNETON, ModelParams


@dataclass(frozen=True)
class UnitSystem:
    """SI size of one internal unit of each quantity."""

    length: float
    energy: float
    time: float
    hbar: float
    reference_moment: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "UnitSystem":
        """
        Build the unit system of a spin–dipole model.

        Args:
            params: SI model parameters

        Returns:
            Unit system with energy unit |mu|B(0). When mu is zero the Bohr
            magneton stands in for |mu| so the units stay finite.
        """
        reference_moment = abs(params.mu) if params.mu != 0.0 else BOHR_MAGNETON
        field_at_origin = abs(params.mu0_mF) / (2.0 * math.pi * params.d**3)
        energy = reference_moment * field_at_origin
        return cls(
            length=params.d,
            energy=energy,
            time=params.hbar / energy,
            hbar=params.hbar,
            reference_moment=reference_moment,
        )

    @property
    def mass(self) -> float:
        return self.energy * self.time**2 / self.length**2

    @property
    def velocity(self) -> float:
        return self.length / self.time

    @property
    def momentum(self) -> float:
        return self.mass * self.velocity

    @property
    def force(self) -> float:
        return self.energy / self.length

    @property
    def frequency(self) -> float:
        """Angular frequency unit (rad/s)."""
        return 1.0 / self.time

    @property
    def action(self) -> float:
        return self.hbar

    @property
    def connection(self) -> float:
        return 1.0 / self.length

    @property
    def vector_potential(self) -> float:
        """Unit of the population-weighted potential (kg·m/s)."""
        return self.hbar / self.length

    @property
    def curvature(self) -> float:
        """Unit of the curvature field (kg/s), equal to hbar/d²."""
        return self.mass / self.time
