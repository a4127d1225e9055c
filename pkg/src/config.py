"""Configuration management for hybrid Berry-force scenarios."""

import math
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigParseError, ConfigValidationError
from src.fulldyn.stepping import MAX_STEPS
from src.model.dipole import ORIGIN_FAST_FREQUENCY, DipoleSpinModel
from src.model.params import ModelParams

SCHEMA_VERSION = 1


class ScenarioName(str, Enum):
    """Runnable scenarios."""

    REPRODUCE_PAPER = "reproduce_paper"
    SYMMETRY_BREAK = "symmetry_break"
    FREQUENCY_SPLIT = "frequency_split"
    FULL_VS_EFFECTIVE = "full_vs_effective"
    BERRY_LOOP = "berry_loop"
    CURVATURE_MAP = "curvature_map"
    ADIABATIC_SWEEP = "adiabatic_sweep"


# Scenarios that run the exact hybrid dynamics
FULL_DYNAMICS_SCENARIOS = {
    ScenarioName.SYMMETRY_BREAK,
    ScenarioName.FULL_VS_EFFECTIVE,
    ScenarioName.ADIABATIC_SWEEP,
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class PotentialConfig(_Section):
    """Optional classical potential (not part of the bare spin–dipole system)."""

    trap_ratio: float = Field(
        0.0,
        ge=0,
        description="Harmonic trap frequency as a multiple of the intrinsic slow frequency (dimensionless)",
    )


class SpinConfig(_Section):
    """Initial spin state as band populations and phases."""

    plus: float = Field(0.0, ge=0, le=1, description="Population |a₊|² of the field-aligned state")
    minus: float = Field(1.0, ge=0, le=1, description="Population |a₋|² of the anti-aligned state")
    phase_plus: float = Field(0.0, description="arg a₊ (rad)")
    phase_minus: float = Field(0.0, description="arg a₋ (rad)")
    equal_phase: float = Field(
        math.pi / 2,
        description="Relative phase arg a₊ − arg a₋ of equal-population runs (rad)",
    )

    @model_validator(mode="after")
    def check_total(self) -> "SpinConfig":
        if abs(self.plus + self.minus - 1.0) > 1e-12:
            raise ValueError(f"populations must sum to 1, got {self.plus + self.minus!r}")
        return self


class InitialConfig(_Section):
    """Initial conditions of the particle and the spin."""

    position: Optional[tuple[float, float]] = Field(
        None, description="Particle position (m); scenario default when omitted"
    )
    velocity: Optional[tuple[float, float]] = Field(None, description="Particle velocity (m/s)")
    velocity_slow: Optional[tuple[float, float]] = Field(
        None, description="Particle velocity in units of d·ω_slow (dimensionless)"
    )
    spin: SpinConfig = Field(default_factory=SpinConfig)

    @model_validator(mode="after")
    def check_single_velocity(self) -> "InitialConfig":
        if self.velocity is not None and self.velocity_slow is not None:
            raise ValueError("give either velocity or velocity_slow, not both")
        return self


class NumericsConfig(_Section):
    """Integration and discretization settings."""

    timescale_ratio: Optional[float] = Field(
        100.0,
        gt=1,
        description="ω_fast/ω_slow of scaled runs (dimensionless); null runs the SI mass",
    )
    ratios: list[float] = Field(
        default_factory=lambda: [1e2, 1e3, 1e4],
        min_length=1,
        description="Timescale ratios swept by full_vs_effective and adiabatic_sweep",
    )
    steps_per_fast_period: int = Field(64, ge=8, description="RK4 steps per fast precession period")
    step: Optional[float] = Field(None, gt=0, description="Explicit full-dynamics step (s) for SI runs")
    periods: Optional[float] = Field(
        None, gt=0, description="Run length in slow periods; scenario default when omitted"
    )
    duration: Optional[float] = Field(None, gt=0, description="Run length (s) for SI runs")
    samples: int = Field(200, ge=2, description="Output samples per trajectory")
    conservation_steps: int = Field(1_000_000, ge=1, description="Steps of the long conservation run")
    plaquette: float = Field(1e-4, gt=0, description="Plaquette side in units of d")
    loop_tolerance: float = Field(1e-8, gt=0, description="Loop-phase convergence tolerance (rad)")
    workers: int = Field(1, ge=1, description="Worker processes for ratio sweeps")

    @field_validator("ratios")
    @classmethod
    def check_ratios(cls, v: list[float]) -> list[float]:
        if any(not r > 1 for r in v):
            raise ValueError("timescale ratios must exceed 1")
        return v


class GeometryConfig(_Section):
    """Radii and grids of the geometric scenarios."""

    loop_radius: Optional[float] = Field(None, gt=0, description="Berry loop radius (m); default d/10")
    orbit_radius: float = Field(1e-9, gt=0, description="Orbit radius of the frequency split (m)")
    grid_size: int = Field(64, ge=2, description="Curvature map points per axis")
    grid_extent: Optional[float] = Field(
        None, gt=0, description="Curvature map half-width (m); default 3d"
    )


class ScenarioConfig(_Section):
    """Main configuration of one scenario run."""

    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: ScenarioName
    model: ModelParams = Field(default_factory=ModelParams)
    potential: PotentialConfig = Field(default_factory=PotentialConfig)
    initial: InitialConfig = Field(default_factory=InitialConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    output_dir: Path = Field(Path("runs"), description="Directory for artifacts and the manifest")

    @field_validator("output_dir", mode="before")
    @classmethod
    def convert_to_path(cls, v):
        """Convert string paths to Path objects."""
        return Path(v)

    @model_validator(mode="after")
    def check_step_budget(self) -> "ScenarioConfig":
        if self.scenario in FULL_DYNAMICS_SCENARIOS and self.model.mu == 0.0:
            raise ValueError(f"scenario {self.scenario.value} needs a nonzero spin moment model.mu")
        if self.scenario in FULL_DYNAMICS_SCENARIOS and self.numerics.timescale_ratio is None:
            steps = estimate_si_steps(self)
            if steps > MAX_STEPS:
                raise ValueError(
                    f"SI full-dynamics run needs about {steps:.3g} steps (limit {MAX_STEPS:.0e}); "
                    "set numerics.timescale_ratio to run a scaled model instead"
                )
        return self


def estimate_si_steps(cfg: ScenarioConfig) -> float:
    """Full-dynamics steps implied by an SI run (no timescale ratio)."""
    model = DipoleSpinModel.from_params(cfg.model, cfg.potential.trap_ratio)
    units = model.units
    if cfg.numerics.duration is not None:
        duration = cfg.numerics.duration / units.time
    else:
        periods = cfg.numerics.periods if cfg.numerics.periods is not None else 1.0
        duration = periods * 2.0 * math.pi / model.slow_frequency()
    if cfg.numerics.step is not None:
        dt = cfg.numerics.step / units.time
    else:
        fast = ORIGIN_FAST_FREQUENCY * abs(model.coupling)
        dt = 2.0 * math.pi / fast / cfg.numerics.steps_per_fast_period
    return duration / dt


def _field_path(loc: tuple) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def load_config(config_path: Optional[Path] = None) -> ScenarioConfig:
    """
    Load and validate a scenario configuration from a YAML file.

    Args:
        config_path: Path to config file. Defaults to configs/base.yaml

    Returns:
        Validated ScenarioConfig

    Raises:
        ConfigParseError: If the file is missing, is not valid YAML or is not a mapping
        ConfigValidationError: With every validation error and its field path
    """
    if config_path is None:
        project_root = Path(__file__).parent.parent
        config_path = project_root / "configs" / "base.yaml"
    config_path = Path(config_path)

    if not config_path.exists():
        raise ConfigParseError(f"Config file not found: {config_path}")

    try:
        with open(config_path, "r") as f:
            config_dict = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigParseError(f"Invalid YAML in {config_path}: {e}") from e

    if not isinstance(config_dict, dict):
        raise ConfigParseError(f"Config must be a mapping, got {type(config_dict).__name__}")

    try:
        return ScenarioConfig(**config_dict)
    except ValidationError as e:
        raise ConfigValidationError([(_field_path(err["loc"]), err["msg"]) for err in e.errors()]) from e
