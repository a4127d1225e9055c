"""Scenario runners.

Each runner computes its checks and writes its artifacts through a single
ArtifactWriter; run_scenario writes the manifest last. Sweeps over timescale
ratios can fan out to worker processes, results are collected in input
order so artifacts do not depend on the worker count.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd

from src import __version__
from src.cli.manifest import (
    Attempt,
    CheckRunner,
    Outcome,
    RunManifest,
    below,
    within_absolute,
    within_relative,
)
from src.config import ScenarioConfig, ScenarioName
from src.effective.dynamics import EffectiveState, integrate_effective
from src.effective.orbits import frequency_split, simulate_circular_orbit
from src.fulldyn.integrator import default_step, hybrid_state, integrate
from src.geometry.curvature import curvature_grid, curvature_numeric, dipole_band_curvature, dipole_curvature
from src.geometry.loops import (
    LoopPath,
    adiabatic_loop_phase,
    angle_rate,
    berry_phase_loop,
    dipole_loop_prediction,
    solid_angle,
)
from src.model.dipole import DipoleSpinModel, dipole_field
from src.model.params import ModelParams
from src.utils.artifacts import ArtifactWriter

# Reference values quoted for the default parameter set
REFERENCE_FIELD = 3.2e-4  # T
REFERENCE_CURVATURE = 1.20e-22  # kg/s
REFERENCE_SPLIT = 0.7e-8  # Hz
GEOMETRIC_SCALE = 10.0

EFFECTIVE_STEPS_PER_PERIOD = 1024
DEFAULT_RATIO = 100.0


@dataclass
class ScenarioContext:
    cfg: ScenarioConfig
    writer: ArtifactWriter
    checks: CheckRunner


def _parallel_map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _band_amplitudes(model: DipoleSpinModel, plus: complex, minus: complex) -> np.ndarray:
    amps = np.zeros(2, dtype=complex)
    amps[model.band_of("+")] = plus
    amps[model.band_of("-")] = minus
    return amps


def _spin_amplitudes(cfg: ScenarioConfig, model: DipoleSpinModel) -> np.ndarray:
    spin = cfg.initial.spin
    return _band_amplitudes(
        model,
        math.sqrt(spin.plus) * np.exp(1j * spin.phase_plus),
        math.sqrt(spin.minus) * np.exp(1j * spin.phase_minus),
    )


def _actions(amplitudes: np.ndarray) -> np.ndarray:
    weights = np.abs(amplitudes) ** 2
    return weights / weights.sum()


def _run_model(cfg: ScenarioConfig, ratio: Optional[float] = None) -> DipoleSpinModel:
    """Scaled model at the given (or configured) ratio, SI mass when there is none."""
    ratio = ratio if ratio is not None else cfg.numerics.timescale_ratio
    if ratio is None:
        return DipoleSpinModel.from_params(cfg.model, cfg.potential.trap_ratio)
    return DipoleSpinModel.scaled(cfg.model, ratio, cfg.potential.trap_ratio)


def _initial_kinematics(
    cfg: ScenarioConfig, model: DipoleSpinModel, position: tuple, velocity_slow: tuple
) -> tuple[np.ndarray, np.ndarray]:
    """Start position and velocity in model units, with scenario defaults in units of d and d·ω_slow."""
    units = model.units
    initial = cfg.initial
    q = np.asarray(initial.position, dtype=float) / units.length if initial.position else np.asarray(position)
    if initial.velocity is not None:
        v = np.asarray(initial.velocity, dtype=float) / units.velocity
    else:
        v = np.asarray(initial.velocity_slow or velocity_slow, dtype=float) * model.slow_frequency()
    return q.astype(float), v.astype(float)


def _duration(cfg: ScenarioConfig, model: DipoleSpinModel, default_periods: float) -> float:
    if cfg.numerics.duration is not None and cfg.numerics.timescale_ratio is None:
        return cfg.numerics.duration / model.units.time
    periods = cfg.numerics.periods if cfg.numerics.periods is not None else default_periods
    return periods * 2.0 * math.pi / model.slow_frequency()


def _full_step(cfg: ScenarioConfig, model: DipoleSpinModel, q: np.ndarray) -> float:
    if cfg.numerics.step is not None and cfg.numerics.timescale_ratio is None:
        return cfg.numerics.step / model.units.time
    return default_step(model, q, cfg.numerics.steps_per_fast_period)


# ---------------------------------------------------------------- reproduce_paper


def _curvature_si(params: ModelParams, trap_ratio: float, q: np.ndarray, actions, delta: float):
    model = DipoleSpinModel.from_params(params, trap_ratio)
    scale = model.units.curvature
    closed = dipole_curvature(model, q, actions) * scale
    numeric = curvature_numeric(model, q, actions, delta=delta) * scale
    return closed, numeric


def run_reproduce_paper(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    params = cfg.model
    model = DipoleSpinModel.from_params(params, cfg.potential.trap_ratio)
    units = model.units
    r = cfg.geometry.orbit_radius
    q = np.array([r / params.d, 0.0])
    actions = _actions(_spin_amplitudes(cfg, model))

    field = Attempt(lambda: dipole_field(r, 0.0, params))
    curvatures = Attempt(
        lambda: _curvature_si(params, cfg.potential.trap_ratio, q, actions, cfg.numerics.plaquette)
    )
    split = Attempt(lambda: frequency_split(model, q[0], actions).to_si(units))
    rescaled = Attempt(
        lambda: _curvature_si(
            params.scaled(mu=GEOMETRIC_SCALE, mu0_mF=GEOMETRIC_SCALE),
            cfg.potential.trap_ratio,
            q,
            actions,
            cfg.numerics.plaquette,
        )
    )

    checks.run("field_magnitude", lambda: within_relative(abs(field.get().bz), REFERENCE_FIELD, 0.02, "|Bz| (T)"))
    checks.run(
        "curvature_closed_form",
        lambda: within_relative(abs(curvatures.get()[0]), REFERENCE_CURVATURE, 0.02, "|ℬ| closed form (kg/s)"),
    )
    checks.run(
        "curvature_plaquette",
        lambda: within_relative(abs(curvatures.get()[1]), REFERENCE_CURVATURE, 0.02, "|ℬ| plaquette (kg/s)"),
    )
    checks.run(
        "curvature_agreement",
        lambda: within_relative(curvatures.get()[1], curvatures.get()[0], 1e-6, "plaquette vs closed form"),
    )
    checks.run(
        "frequency_split",
        lambda: within_relative(abs(split.get().delta_nu), REFERENCE_SPLIT, 0.10, "|Δν| (Hz)"),
    )
    checks.run(
        "frequency_split_consistency",
        lambda: within_relative(split.get().root_split, split.get().delta_nu, 1e-6, "root split vs ℬ/2πM (Hz)"),
    )
    checks.run(
        "geometric_character_closed_form",
        lambda: within_relative(rescaled.get()[0], curvatures.get()[0], 1e-12, "ℬ after scaling μ and μ₀m_F"),
    )
    checks.run(
        "geometric_character_plaquette",
        lambda: within_relative(rescaled.get()[1], curvatures.get()[1], 1e-12, "ℬ after scaling μ and μ₀m_F"),
    )

    if field.error is None and curvatures.error is None and split.error is None:
        ctx.writer.json(
            "reference_numbers.json",
            {
                "orbit_radius": r,
                "field": {"bx": field.get().bx, "by": field.get().by, "bz": field.get().bz},
                "curvature_closed_form": curvatures.get()[0],
                "curvature_plaquette": curvatures.get()[1],
                "frequency_split": split.get().to_dict(),
            },
        )


# ---------------------------------------------------------------- symmetry_break


def run_symmetry_break(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    model = _run_model(cfg)
    q0, v0 = _initial_kinematics(cfg, model, (0.0, 0.0), (0.5, 0.0))
    duration = _duration(cfg, model, default_periods=0.25)
    times = np.linspace(0.0, duration, cfg.numerics.samples)
    dt_effective = 2.0 * math.pi / model.slow_frequency() / EFFECTIVE_STEPS_PER_PERIOD
    spin = cfg.initial.spin
    half = 1.0 / math.sqrt(2.0)
    runs = {
        "plus": _band_amplitudes(model, 1.0, 0.0),
        "minus": _band_amplitudes(model, 0.0, 1.0),
        "equal": _band_amplitudes(
            model,
            half * np.exp(1j * (spin.phase_minus + spin.equal_phase)),
            half * np.exp(1j * spin.phase_minus),
        ),
    }

    def simulate(label: str, amplitudes: np.ndarray):
        full = integrate(
            model,
            hybrid_state(model, q0, v0, amplitudes),
            duration,
            times,
            dt=_full_step(cfg, model, q0),
        )
        effective = integrate_effective(
            model, EffectiveState(q0, v0, _actions(amplitudes)), duration, times, dt=dt_effective
        )
        ctx.writer.csv(f"symmetry_break_{label}_full.csv", full.to_frame(model.units))
        ctx.writer.csv(f"symmetry_break_{label}_effective.csv", effective.to_frame(model.units))
        return full, effective

    results = {label: Attempt(lambda a=amps, l=label: simulate(l, a)) for label, amps in runs.items()}

    def deflection(label: str) -> Outcome:
        full, effective = results[label].get()
        y_full = float(full.final.q[1])
        y_effective = float(effective.final.q[1])
        passed = y_effective != 0.0 and math.copysign(1.0, y_full) == math.copysign(1.0, y_effective)
        return Outcome(passed, y_full * model.units.length, y_effective * model.units.length, None,
                       "final y (m), sign must match the effective prediction")

    def sign_flip() -> Outcome:
        y_plus = float(results["plus"].get()[0].final.q[1])
        y_minus = float(results["minus"].get()[0].final.q[1])
        return Outcome(
            y_plus * y_minus < 0.0,
            y_plus * model.units.length,
            -y_minus * model.units.length,
            None,
            "final y of the '+' run (m) against minus the '-' run",
        )

    def equal_population() -> Outcome:
        positions = results["equal"].get()[0].positions
        excursion = float(np.max(np.abs(positions[:, 0] - positions[0, 0])))
        return below(
            abs(float(np.mean(positions[:, 1]))) / excursion,
            1e-3,
            "time-averaged |y| over the x-excursion",
        )

    checks.run("deflection_plus", lambda: deflection("plus"))
    checks.run("deflection_minus", lambda: deflection("minus"))
    checks.run("deflection_sign_flip", sign_flip)
    checks.run("equal_population_symmetry", equal_population)


# ---------------------------------------------------------------- frequency_split


def run_frequency_split(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    model = DipoleSpinModel.from_params(cfg.model, cfg.potential.trap_ratio)
    r = cfg.geometry.orbit_radius / cfg.model.d
    actions = _actions(_spin_amplitudes(cfg, model))

    report = Attempt(lambda: frequency_split(model, r, actions))
    if report.error is None:
        ctx.writer.json("frequency_split.json", report.get().to_si(model.units).to_dict())

    ratio = cfg.numerics.timescale_ratio or DEFAULT_RATIO
    scaled = DipoleSpinModel.scaled(cfg.model, ratio, cfg.potential.trap_ratio)

    def orbits():
        predicted = frequency_split(scaled, r, actions)
        ccw = simulate_circular_orbit(scaled, r, actions, sense=1)
        cw = simulate_circular_orbit(scaled, r, actions, sense=-1)
        return predicted, ccw, cw

    simulated = Attempt(orbits)

    checks.run(
        "split_consistency",
        lambda: within_relative(
            report.get().to_si(model.units).root_split,
            report.get().to_si(model.units).delta_nu,
            1e-6,
            "root split vs ℬ/2πM (Hz)",
        ),
    )
    checks.run(
        "orbit_split_oracle",
        lambda: within_relative(
            simulated.get()[2].frequency - simulated.get()[1].frequency,
            simulated.get()[0].delta_nu,
            1e-3,
            f"simulated ν_cw − ν_ccw of the scaled model (ratio {ratio:g}, model units)",
        ),
    )
    checks.run(
        "orbit_radius_stability",
        lambda: below(
            max(simulated.get()[1].radial_deviation, simulated.get()[2].radial_deviation),
            1e-6,
            "max |r(t) − r|/r of the launched orbits",
        ),
    )


# ---------------------------------------------------------------- full_vs_effective


@dataclass(frozen=True)
class _RatioJob:
    params: ModelParams
    trap_ratio: float
    ratio: float
    position: tuple
    velocity: tuple
    amplitudes: tuple
    periods: float
    samples: int
    steps_per_fast_period: int


def _compare_dynamics(job: _RatioJob) -> dict:
    model = DipoleSpinModel.scaled(job.params, job.ratio, job.trap_ratio)
    q0 = np.asarray(job.position, dtype=float)
    v0 = np.asarray(job.velocity, dtype=float) * model.slow_frequency()
    amplitudes = np.asarray(job.amplitudes, dtype=complex)
    duration = job.periods * 2.0 * math.pi / model.slow_frequency()
    times = np.linspace(0.0, duration, job.samples)
    full = integrate(
        model,
        hybrid_state(model, q0, v0, amplitudes),
        duration,
        times,
        dt=default_step(model, q0, job.steps_per_fast_period),
    )
    effective = integrate_effective(
        model,
        EffectiveState(q0, v0, _actions(amplitudes)),
        duration,
        times,
        dt=duration / (EFFECTIVE_STEPS_PER_PERIOD * job.periods),
    )
    scale = float(np.max(np.linalg.norm(effective.positions, axis=1)))
    initial_actions = full.actions[0]
    return {
        "ratio": job.ratio,
        "discrepancy": float(np.linalg.norm(full.final.q - effective.final.q)) / scale,
        "max_action_drift": float(np.max(np.abs(full.actions - initial_actions))),
        "max_norm_drift": float(np.max(np.abs(full.norm - 1.0))),
        "max_energy_drift": float(np.max(np.abs(full.energy - full.energy[0])) / abs(full.energy[0])),
        "steps": full.steps,
        "renormalizations": full.renormalizations,
        "max_step_norm_drift": full.max_step_norm_drift,
        "full": full.to_frame(model.units),
        "effective": effective.to_frame(model.units),
    }


def _ratio_jobs(cfg: ScenarioConfig, default_periods: float) -> list[_RatioJob]:
    jobs = []
    for ratio in cfg.numerics.ratios:
        model = _run_model(cfg, ratio)
        q0, v0 = _initial_kinematics(cfg, model, (0.5, 0.0), (0.0, 0.0))
        jobs.append(
            _RatioJob(
                params=cfg.model,
                trap_ratio=cfg.potential.trap_ratio,
                ratio=ratio,
                position=tuple(q0),
                velocity=tuple(v0 / model.slow_frequency()),
                amplitudes=tuple(_spin_amplitudes(cfg, model)),
                periods=cfg.numerics.periods or default_periods,
                samples=cfg.numerics.samples,
                steps_per_fast_period=cfg.numerics.steps_per_fast_period,
            )
        )
    return jobs


def _summary_frame(rows: list[dict]) -> pd.DataFrame:
    keys = [
        "ratio",
        "discrepancy",
        "max_action_drift",
        "max_norm_drift",
        "max_energy_drift",
        "steps",
        "renormalizations",
        "max_step_norm_drift",
    ]
    return pd.DataFrame([{k: row[k] for k in keys} for row in rows])


def run_full_vs_effective(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    sweep = Attempt(lambda: _parallel_map(_compare_dynamics, _ratio_jobs(cfg, 1.0), cfg.numerics.workers))
    if sweep.error is None:
        for row in sweep.get():
            ctx.writer.csv(f"full_vs_effective_R{row['ratio']:g}_full.csv", row["full"])
            ctx.writer.csv(f"full_vs_effective_R{row['ratio']:g}_effective.csv", row["effective"])
        ctx.writer.csv("full_vs_effective.csv", _summary_frame(sweep.get()))

    def monotone() -> Outcome:
        discrepancies = [row["discrepancy"] for row in sweep.get()]
        decreasing = all(b < a for a, b in zip(discrepancies, discrepancies[1:]))
        return Outcome(decreasing, discrepancies[-1], None, None,
                       "discrepancies by ratio: " + ", ".join(f"{d:.3e}" for d in discrepancies))

    checks.run("discrepancy_decreasing", monotone)
    checks.run(
        "discrepancy_at_largest_ratio",
        lambda: below(sweep.get()[-1]["discrepancy"], 1e-2, "relative position discrepancy after the run"),
    )


# ---------------------------------------------------------------- berry_loop


def _connection_loop_integral(model: DipoleSpinModel, radius: float, band: int, actions, points: int = 256) -> float:
    # −∮A·dq from the connection, via the geometric part of the angle rate
    total = 0.0
    for k in range(points):
        angle = 2.0 * math.pi * k / points
        q = radius * np.array([math.cos(angle), math.sin(angle)])
        q_dot = 2.0 * math.pi * radius * np.array([-math.sin(angle), math.cos(angle)])
        energy = float(model.band_energies(q)[band])
        total += (angle_rate(model, q, q_dot, actions, band) - energy / model.hbar) / points
    return total


def run_berry_loop(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    model = DipoleSpinModel.from_params(cfg.model, cfg.potential.trap_ratio)
    radius_si = cfg.geometry.loop_radius or cfg.model.d / 10.0
    radius = radius_si / cfg.model.d
    ratio = cfg.numerics.timescale_ratio or DEFAULT_RATIO
    records = []
    for label in ("+", "-"):
        band = model.band_of(label)
        path = LoopPath.circle(radius, band)
        forward = Attempt(lambda p=path: berry_phase_loop(model, p, cfg.numerics.loop_tolerance))
        backward = Attempt(lambda p=path: berry_phase_loop(model, p.reversed(), cfg.numerics.loop_tolerance))
        prediction = dipole_loop_prediction(model, radius, band)
        actions = np.eye(2)[band]
        name = "plus" if label == "+" else "minus"

        checks.run(
            f"loop_phase_{name}",
            lambda f=forward, pr=prediction: within_absolute(f.get().phase, pr, 1e-4, "loop phase vs ∓½Ω (rad)"),
        )
        checks.run(
            f"loop_reversal_{name}",
            lambda f=forward, b=backward: Outcome(
                b.get().total == -f.get().total, b.get().total, -f.get().total, 0.0, "reversed loop total (rad)"
            ),
        )
        checks.run(
            f"connection_integral_{name}",
            lambda f=forward, b=band, a=actions: within_absolute(
                _connection_loop_integral(model, radius, b, a), f.get().total, 1e-6, "−∮A·dq vs loop phase (rad)"
            ),
        )
        period = ratio * 2.0 * math.pi / model.fast_frequency(np.array([radius, 0.0]))
        checks.run(
            f"dynamic_phase_extraction_{name}",
            lambda f=forward, b=band, T=period: within_absolute(
                adiabatic_loop_phase(model, radius, T, b), f.get().phase, 1e-2,
                f"phase read off the driven evolution (period {T:.4g} model units)",
            ),
        )
        if forward.error is None:
            phase = forward.get()
            records.append(
                {
                    "loop_radius": radius_si,
                    "band": label,
                    "phase": phase.phase,
                    "solid_angle_prediction": prediction,
                    "difference": phase.phase - prediction,
                    "winding": phase.winding,
                    "resolved": phase.resolved,
                    "points": phase.points,
                    "solid_angle": solid_angle(model, radius),
                }
            )

    ctx.writer.json("berry_loop.json", records)


# ---------------------------------------------------------------- curvature_map


def run_curvature_map(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    model = DipoleSpinModel.from_params(cfg.model, cfg.potential.trap_ratio)
    units = model.units
    extent = (cfg.geometry.grid_extent or 3.0 * cfg.model.d) / cfg.model.d
    axis = np.linspace(-extent, extent, cfg.geometry.grid_size)
    actions = _actions(_spin_amplitudes(cfg, model))
    imbalance = actions[model.band_of("+")] - actions[model.band_of("-")]

    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    closed = model.orientation * dipole_band_curvature(xx**2 + yy**2) * imbalance
    numeric = Attempt(lambda: curvature_grid(model, axis, axis, actions, delta=cfg.numerics.plaquette))

    def deviation() -> float:
        scale = float(np.max(np.abs(closed)))
        return float(np.max(np.abs(numeric.get() - closed))) / (scale if scale > 0 else 1.0)

    if numeric.error is None:
        ctx.writer.csv(
            "curvature_map.csv",
            pd.DataFrame(
                {
                    "x": xx.ravel() * units.length,
                    "y": yy.ravel() * units.length,
                    "B_curvature": numeric.get().ravel() * units.curvature,
                    "curvature_closed_form": closed.ravel() * units.curvature,
                }
            ),
        )
        ctx.writer.json(
            "curvature_map_stats.json",
            {
                "grid_size": cfg.geometry.grid_size,
                "grid_extent": extent * units.length,
                "max_relative_deviation": deviation(),
                "max_abs_curvature": float(np.max(np.abs(closed))) * units.curvature,
            },
        )

    checks.run("closed_form_agreement", lambda: below(deviation(), 1e-6, "max |numeric − closed| / max |closed|"))


# ---------------------------------------------------------------- adiabatic_sweep


@dataclass(frozen=True)
class _ConservationJob:
    params: ModelParams
    trap_ratio: float
    ratio: float
    steps: int
    samples: int
    steps_per_fast_period: int


def _conservation_run(job: _ConservationJob):
    model = DipoleSpinModel.scaled(job.params, job.ratio, job.trap_ratio)
    q0 = np.array([0.5, 0.0])
    v0 = np.array([0.0, 0.5]) * model.slow_frequency()
    dt = default_step(model, q0, job.steps_per_fast_period)
    duration = job.steps * dt
    times = np.linspace(0.0, duration, job.samples)
    return model, integrate(model, hybrid_state(model, q0, v0), duration, times, dt=dt)


def run_adiabatic_sweep(ctx: ScenarioContext) -> None:
    cfg, checks = ctx.cfg, ctx.checks
    sweep = Attempt(lambda: _parallel_map(_compare_dynamics, _ratio_jobs(cfg, 1.0), cfg.numerics.workers))
    if sweep.error is None:
        ctx.writer.csv("adiabatic_sweep.csv", _summary_frame(sweep.get()))
        for row in sweep.get():
            if row["ratio"] >= 1e3:
                checks.run(
                    f"action_drift_R{row['ratio']:g}",
                    lambda r=row: below(r["max_action_drift"], 1e-3, "max |Iₙ(t) − Iₙ(0)| (units of ħ)"),
                )
    else:
        checks.run("action_drift", lambda: below(sweep.get()[0]["max_action_drift"], 1e-3))

    job = _ConservationJob(
        params=cfg.model,
        trap_ratio=cfg.potential.trap_ratio,
        ratio=cfg.numerics.timescale_ratio or DEFAULT_RATIO,
        steps=cfg.numerics.conservation_steps,
        samples=cfg.numerics.samples,
        steps_per_fast_period=cfg.numerics.steps_per_fast_period,
    )
    conservation = Attempt(lambda: _conservation_run(job))
    if conservation.error is None:
        model, trajectory = conservation.get()
        ctx.writer.csv("conservation.csv", trajectory.to_frame(model.units))

    def energy_drift() -> float:
        trajectory = conservation.get()[1]
        return float(np.max(np.abs(trajectory.energy - trajectory.energy[0])) / abs(trajectory.energy[0]))

    checks.run(
        "norm_drift",
        lambda: below(float(np.max(np.abs(conservation.get()[1].norm - 1.0))), 1e-10, "max |‖ψ‖ − 1|"),
    )
    checks.run("energy_drift", lambda: below(energy_drift(), 1e-8, "max relative energy change"))

    def effective_energy_drift() -> Outcome:
        model = _run_model(cfg, job.ratio)
        period = 2.0 * math.pi / model.slow_frequency()
        initial = EffectiveState([0.5, 0.0], [0.0, 0.5 * model.slow_frequency()], [0.0, 1.0])
        trajectory = integrate_effective(
            model, initial, 4.0 * period, np.linspace(0.0, 4.0 * period, cfg.numerics.samples), dt=period / 4096
        )
        drift = float(np.max(np.abs(trajectory.energy - trajectory.energy[0])) / abs(trajectory.energy[0]))
        return below(drift, 1e-8, "relative effective-energy change with ℬ ≠ 0")

    checks.run("effective_energy_conservation", effective_energy_drift)


SCENARIOS: dict[ScenarioName, Callable[[ScenarioContext], None]] = {
    ScenarioName.REPRODUCE_PAPER: run_reproduce_paper,
    ScenarioName.SYMMETRY_BREAK: run_symmetry_break,
    ScenarioName.FREQUENCY_SPLIT: run_frequency_split,
    ScenarioName.FULL_VS_EFFECTIVE: run_full_vs_effective,
    ScenarioName.BERRY_LOOP: run_berry_loop,
    ScenarioName.CURVATURE_MAP: run_curvature_map,
    ScenarioName.ADIABATIC_SWEEP: run_adiabatic_sweep,
}


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[Path] = None) -> RunManifest:
    """
    Run one scenario, write its artifacts and then its manifest.

    Args:
        cfg: Validated scenario configuration
        out_dir: Output directory; defaults to cfg.output_dir

    Returns:
        RunManifest with one record per executed check
    """
    writer = ArtifactWriter(Path(out_dir) if out_dir is not None else cfg.output_dir)
    checks = CheckRunner()
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()

    SCENARIOS[cfg.scenario](ScenarioContext(cfg, writer, checks))

    manifest = RunManifest(
        scenario=cfg.scenario.value,
        config=cfg.model_dump(mode="json"),
        code_version=__version__,
        started_at=started.isoformat(),
        finished_at=datetime.now(timezone.utc).isoformat(),
        wall_clock_seconds=time.perf_counter() - clock,
        checks=checks.records,
        artifacts=list(writer.written),
    )
    writer.json("manifest.json", manifest.model_dump(mode="json"))
    return manifest
