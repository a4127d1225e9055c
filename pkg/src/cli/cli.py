"""CLI interface for hybrid Berry-force scenarios."""

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from src.cli.scenarios import run_scenario
from src.config import ScenarioConfig, ScenarioName, load_config
from src.errors import ConfigParseError, ConfigValidationError

OUT_DIR_ENV = "HYBRIDBERRY_OUT_DIR"

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Simulate quantum-classical hybrids and the Berry-phase force on the slow particle"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run the scenario described by a config file")
    run_parser.add_argument("config", type=Path, help="Path to a scenario YAML file")
    run_parser.add_argument("--out", type=Path, help="Output directory (overrides config and environment)")

    reproduce_parser = subparsers.add_parser(
        "reproduce", help="Reproduce the reference numbers with the default parameter set"
    )
    reproduce_parser.add_argument("--out", type=Path, help="Output directory")

    validate_parser = subparsers.add_parser("validate", help="Validate a config file without running it")
    validate_parser.add_argument("config", type=Path, help="Path to a scenario YAML file")
    return parser


def _load(path: Path) -> Optional[ScenarioConfig]:
    try:
        return load_config(path)
    except (ConfigParseError, ConfigValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return None


def _print_settings(cfg: ScenarioConfig, out_dir: Path) -> None:
    model = cfg.model
    print(f"Scenario: {cfg.scenario.value}")
    print("=" * 60)
    print(f"Output directory: {out_dir}")
    print(f"mu0*m_F: {model.mu0_mF:.6g} T·m³   mu: {model.mu:.6g} J/T")
    print(f"d: {model.d:.6g} m   mass: {model.mass:.6g} kg")
    ratio = cfg.numerics.timescale_ratio
    print(f"Timescale ratio: {'SI mass' if ratio is None else f'{ratio:g}'}")
    if cfg.potential.trap_ratio:
        print(f"Trap ratio: {cfg.potential.trap_ratio:g}")
    print("=" * 60)
    print()


def main(argv: Optional[list[str]] = None) -> int:
    """Run scenarios from the command line."""
    load_dotenv()
    args = _build_parser().parse_args(argv)

    if args.command == "validate":
        cfg = _load(args.config)
        if cfg is None:
            return EXIT_CONFIG_ERROR
        print(f"✓ {args.config} is a valid {cfg.scenario.value} config")
        return EXIT_OK

    if args.command == "run":
        cfg = _load(args.config)
        if cfg is None:
            return EXIT_CONFIG_ERROR
    else:
        cfg = ScenarioConfig(scenario=ScenarioName.REPRODUCE_PAPER)

    env_out = os.environ.get(OUT_DIR_ENV)
    out_dir = args.out or (Path(env_out) if env_out else cfg.output_dir)

    _print_settings(cfg, out_dir)

    try:
        manifest = run_scenario(cfg, out_dir)
    except OSError as e:
        print(f"Error: could not write artifacts: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    print("\nCheck Results:")
    print("-" * 60)

    if manifest.passed:
        print(f"\n✓ Passed ({len(manifest.passed)}):")
        for check in manifest.passed:
            print(f"  - {check.name}: {check.measured:.6g} ({check.detail})" if check.measured is not None
                  else f"  - {check.name}")

    if manifest.failed:
        print(f"\n✗ Failed ({len(manifest.failed)}):")
        for check in manifest.failed:
            reason = f"[{check.error_code}] {check.detail}" if check.error_code else check.detail
            measured = f"{check.measured:.6g} " if check.measured is not None else ""
            print(f"  - {check.name}: {measured}{reason}")

    print("\n" + "=" * 60)
    print(
        f"Summary: {len(manifest.passed)} passed, {len(manifest.failed)} failed, "
        f"{len(manifest.artifacts) + 1} files in {out_dir} ({manifest.wall_clock_seconds:.1f} s)"
    )
    print("=" * 60)

    return EXIT_CHECKS_FAILED if manifest.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
