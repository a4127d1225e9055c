"""Error kinds raised by the simulator.

Every error carries a ``code`` matching the name used in reports and run
manifests, so callers can branch on the kind without importing the class.
"""


class HybridBerryError(Exception):
    """Base class for all simulator errors."""

    code = "ERROR"


class DegenerateSpectrumError(HybridBerryError, ArithmeticError):
    """Eigenvalue gap too small for the instantaneous-eigenstate picture."""

    code = "DEGENERATE"


class GaugeSingularError(HybridBerryError, ArithmeticError):
    """The gauge-fixing component of an eigenvector underflowed."""

    code = "GAUGE_SINGULAR"


class BadActionsError(HybridBerryError, ValueError):
    """Actions are negative or do not sum to hbar."""

    code = "BAD_ACTIONS"


class StepTooLargeError(HybridBerryError, RuntimeError):
    """Local error estimate of an integration step exceeded its bound."""

    code = "STEP_TOO_LARGE"


class NonFiniteStateError(HybridBerryError, FloatingPointError):
    """A state component left the finite range during integration."""

    code = "NONFINITE"


class NoOrbitError(HybridBerryError, ValueError):
    """The radial force cannot sustain circular motion."""

    code = "NO_ORBIT"


class StepBudgetError(HybridBerryError, ValueError):
    """A run would need more integration steps than allowed."""

    code = "STEP_BUDGET"


class ConfigParseError(HybridBerryError, ValueError):
    """Config file missing, unreadable, or not valid YAML."""

    code = "PARSE_ERROR"


class ConfigValidationError(HybridBerryError, ValueError):
    """Config parsed but failed validation.

    Attributes:
        errors: List of ``(field_path, message)`` tuples, one per problem
    """

    code = "VALIDATION_ERROR"

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        lines = [f"{path}: {message}" for path, message in errors]
        super().__init__("Invalid config:\n  " + "\n  ".join(lines))
