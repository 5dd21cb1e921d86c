"""Command-line front end: audit, recover, sweep, transform and bands."""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from fourier_haar.errors import CapacityError, ConfigError, ParameterError, SizeError
from fourier_haar.experiments.config import ExperimentConfig
from fourier_haar.experiments.orchestrator import ExperimentOrchestrator
from fourier_haar.transforms import dft_forward, dft_inverse, haar_forward, haar_inverse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CAPACITY = 2

TRANSFORMS = {
    "haar": lambda x: haar_forward(x).values,
    "ihaar": haar_inverse,
    "dft": dft_forward,
    "idft": dft_inverse,
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Experiment config (.json, .yaml or .yml)")
    common.add_argument("--seed", type=int, help="Base seed (overrides config base_seed)")
    common.add_argument("--out", type=str, help="Output directory (overrides config output_dir)")
    common.add_argument("--threads", type=int, help="Parallel workers (overrides config max_workers)")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="fourier-haar",
        description="Multilevel Fourier sampling of Haar-sparse signals: audits and recovery experiments",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("audit", parents=[common], help="Coherence profile and recovery condition checks")
    subparsers.add_parser("recover", parents=[common], help="Seeded recovery trials")
    subparsers.add_parser("sweep", parents=[common], help="Success rate across allocation constants")
    subparsers.add_parser("bands", parents=[common], help="Print the bands and the drawn frequency set")

    transform = subparsers.add_parser("transform", parents=[common], help="One-shot Haar or DFT of a CSV vector")
    transform.add_argument("--input", type=Path, required=True, help="CSV vector, one 're' or 're,im' per line")
    transform.add_argument("--op", choices=sorted(TRANSFORMS), default="haar", help="Transform to apply")
    transform.add_argument("--output", type=Path, help="Output CSV (defaults to stdout)")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Loads the config file (or defaults) and applies the CLI overrides."""
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig.get_default_config()
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.threads is not None:
        overrides["max_workers"] = args.threads
    if overrides:
        config = ExperimentConfig(**{**config.model_dump(), **overrides})
    return config


def read_vector(path: Path) -> np.ndarray:
    """
    Reads a CSV vector with one value per line, either 're' or 're,im'.

    Raises:
        ConfigError: On a malformed line.
    """
    values = []
    with open(path, "r", newline="") as f:
        for line_number, row in enumerate(csv.reader(f), 1):
            cells = [cell.strip() for cell in row if cell.strip()]
            if not cells:
                continue
            try:
                if len(cells) == 1:
                    values.append(complex(float(cells[0]), 0.0))
                elif len(cells) == 2:
                    values.append(complex(float(cells[0]), float(cells[1])))
                else:
                    raise ValueError(f"expected 1 or 2 columns, got {len(cells)}")
            except ValueError as e:
                raise ConfigError(f"{path}:{line_number}: {e}") from e
    return np.asarray(values, dtype=complex)


def write_vector(values: np.ndarray, path: Optional[Path]) -> None:
    """Writes a complex vector as 're,im' rows to path, or stdout when path is None."""
    handle = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(handle)
        for value in np.asarray(values, dtype=complex):
            writer.writerow([repr(float(value.real)), repr(float(value.imag))])
    finally:
        if path:
            handle.close()


def run_transform(args: argparse.Namespace) -> None:
    values = read_vector(args.input)
    result = TRANSFORMS[args.op](values)
    write_vector(result, args.output)
    if args.output:
        logger.info(f"Wrote {args.op} of {len(values)} values to {args.output}")


def run_command(args: argparse.Namespace) -> None:
    if args.command == "transform":
        run_transform(args)
        return

    config = load_config(args)
    orchestrator = ExperimentOrchestrator(config)

    if args.command == "audit":
        audit = orchestrator.audit()
        print(json.dumps({"passed": audit["passed"], "budgets": audit["budgets"]}))
    elif args.command == "recover":
        print(json.dumps(orchestrator.recover()["metrics"], sort_keys=True))
    elif args.command == "sweep":
        print(json.dumps(orchestrator.sweep(), sort_keys=True))
    elif args.command == "bands":
        plan = orchestrator.bands()
        payload = {
            "bands": [band.tolist() for band in plan.bands],
            "m": plan.m,
            "omega": plan.omega,
            "seed": plan.seed,
        }
        print(json.dumps(payload))


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point. Returns 0 on success, 1 on configuration or input errors and
    2 when a computation exceeds a capacity limit.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )

    try:
        run_command(args)
    except CapacityError as e:
        logger.error(f"Capacity exceeded: {e}")
        return EXIT_CAPACITY
    except (ConfigError, ValidationError, ParameterError, SizeError, FileNotFoundError) as e:
        logger.error(f"Invalid configuration or input: {e}")
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
