"""Run manifest and fail-soft check bookkeeping."""

import math
from dataclasses import dataclass
from typing import Any, Callable, Generic, Literal, Optional, TypeVar

from pydantic import BaseModel, Field, field_validator

T = TypeVar("T")


class CheckRecord(BaseModel):
    """Outcome of one check; numbers are SI unless the detail says otherwise."""

    name: str
    status: Literal["PASSED", "FAILED"]
    measured: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""
    error_code: Optional[str] = None


class RunManifest(BaseModel):
    """Record of one scenario run, written after every artifact."""

    schema_version: int = 1
    scenario: str
    config: dict[str, Any]
    code_version: str
    started_at: str
    finished_at: str
    wall_clock_seconds: float
    checks: list[CheckRecord] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)

    @field_validator("checks")
    @classmethod
    def check_unique_names(cls, v: list[CheckRecord]) -> list[CheckRecord]:
        names = [c.name for c in v]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate check names: {duplicates}")
        return v

    @property
    def passed(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == "PASSED"]

    @property
    def failed(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == "FAILED"]


@dataclass(frozen=True)
class Outcome:
    """What a check function returns."""

    passed: bool
    measured: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""


def within_relative(measured: float, expected: float, rtol: float, detail: str = "") -> Outcome:
    passed = math.isfinite(measured) and abs(measured - expected) <= rtol * abs(expected)
    return Outcome(passed, float(measured), float(expected), rtol, detail or "relative tolerance")


def within_absolute(measured: float, expected: float, atol: float, detail: str = "") -> Outcome:
    passed = math.isfinite(measured) and abs(measured - expected) <= atol
    return Outcome(passed, float(measured), float(expected), atol, detail or "absolute tolerance")


def below(measured: float, limit: float, detail: str = "") -> Outcome:
    passed = math.isfinite(measured) and measured < limit
    return Outcome(passed, float(measured), None, limit, detail or "upper bound")


class Attempt(Generic[T]):
    """Result of a computation several checks depend on, or the error it raised."""

    def __init__(self, fn: Callable[[], T]):
        self.error: Optional[Exception] = None
        self._value: Optional[T] = None
        try:
            self._value = fn()
        except Exception as e:
            self.error = e

    def get(self) -> T:
        if self.error is not None:
            raise self.error
        return self._value


class CheckRunner:
    """Runs checks one at a time; a failing check never stops the others."""

    def __init__(self):
        self.records: list[CheckRecord] = []

    def run(self, name: str, fn: Callable[[], Outcome]) -> CheckRecord:
        try:
            outcome = fn()
            record = CheckRecord(
                name=name,
                status="PASSED" if outcome.passed else "FAILED",
                measured=outcome.measured,
                expected=outcome.expected,
                tolerance=outcome.tolerance,
                detail=outcome.detail,
            )
        except Exception as e:
            record = CheckRecord(
                name=name,
                status="FAILED",
                detail=str(e),
                error_code=getattr(e, "code", type(e).__name__),
            )
        self.records.append(record)
        return record
