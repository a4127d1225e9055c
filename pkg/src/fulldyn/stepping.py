"""Fixed-step Runge–Kutta stepping shared by the integrators."""

import math
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from src.errors import StepBudgetError

MAX_STEPS = 10**9

Rhs = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(rhs: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical fourth-order Runge–Kutta step."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def doubling_error(rhs: Rhs, t: float, y: np.ndarray, h: float, full: np.ndarray) -> float:
    """Local error estimate of a step by comparing with two half steps."""
    half = rk4_step(rhs, t, y, 0.5 * h)
    half = rk4_step(rhs, t + 0.5 * h, half, 0.5 * h)
    return float(np.linalg.norm(full - half)) / 15.0


def output_schedule(
    t0: float,
    t_final: float,
    output_times: Optional[Sequence[float]],
    dt: float,
    max_steps: int = MAX_STEPS,
) -> list[tuple[float, int, float]]:
    """
    Plan uniform sub-steps that land exactly on every output time.

    Args:
        t0: Start time
        t_final: End time, t_final >= t0
        output_times: Increasing sample times in [t0, t_final]; default
            samples the start and the end
        dt: Maximum step size
        max_steps: Refuse plans needing more steps than this

    Returns:
        List of (t_out, n_steps, h); n_steps is zero when t_out == t0

    Raises:
        ValueError: On a bad interval or unordered output times
        StepBudgetError: If the plan exceeds max_steps
    """
    if not dt > 0 or not math.isfinite(dt):
        raise ValueError(f"Step size must be positive and finite, got {dt!r}")
    if t_final < t0:
        raise ValueError("t_final must not precede the initial time")
    if output_times is None:
        output_times = [t0] if t_final == t0 else [t0, t_final]
    times = [float(t) for t in output_times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("output_times must be strictly increasing")
    if times and (times[0] < t0 or times[-1] > t_final):
        raise ValueError("output_times must lie within [t0, t_final]")

    plan = []
    current = t0
    total = 0
    for t_out in times:
        span = t_out - current
        n_steps = 0 if span == 0.0 else max(1, math.ceil(span / dt * (1.0 - 1e-12)))
        total += n_steps
        plan.append((t_out, n_steps, span / n_steps if n_steps else 0.0))
        current = t_out
    if total > max_steps:
        raise StepBudgetError(f"Integration needs {total} steps, budget is {max_steps}")
    return plan


def sub_steps(t_start: float, n_steps: int, h: float) -> Iterator[float]:
    """Start times of the uniform sub-steps of one schedule interval."""
    for k in range(n_steps):
        yield t_start + k * h
