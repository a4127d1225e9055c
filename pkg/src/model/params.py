"""Physical parameters of the spin–dipole example model."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

BOHR_MAGNETON = 9.2740100783e-24  # J/T
HBAR = 1.054571817e-34  # J·s


class ModelParams(BaseModel):
    """SI parameters of the magnetic particle / single spin system.

    Defaults are the parameter set used for the order-of-magnitude estimates
    of the Berry curvature and the circulation frequency split. The spin
    moment defaults to minus one Bohr magneton, which makes the ground band
    attractive so that circular orbits exist.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    mu0_mF: float = Field(2.0e-21, description="Dipole strength mu0*m_F of the particle (T·m³)")
    mu: float = Field(-BOHR_MAGNETON, description="Signed spin magnetic moment (J/T)")
    d: float = Field(1.0e-6, gt=0, description="Distance between particle plane and spin (m)")
    mass: float = Field(2.5e-15, gt=0, description="Particle mass M (kg)")
    hbar: float = Field(HBAR, gt=0, description="Reduced Planck constant (J·s)")

    @field_validator("mu0_mF")
    @classmethod
    def check_nonzero(cls, v: float) -> float:
        """Reject a vanishing dipole: the field and the unit system need it."""
        if v == 0.0 or not math.isfinite(v):
            raise ValueError("mu0_mF must be finite and nonzero")
        return v

    def scaled(self, **factors: float) -> "ModelParams":
        """Return a copy with the named fields multiplied by the given factors."""
        updates = {name: getattr(self, name) * factor for name, factor in factors.items()}
        return self.model_copy(update=updates)
