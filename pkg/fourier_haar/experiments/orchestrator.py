import csv
import json
import logging
import platform
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pydantic
import scipy

from fourier_haar.analysis import (
    allocation_implies_condition_i,
    band_sine_bounds,
    block_norm_constant,
    check_conditions,
    coherence_decay_constant,
    compute_profile,
    entry_decay_constant,
    error_bound_terms,
    geometric_band_sum,
    relative_sparsity_bound,
)
from fourier_haar.evaluation import EvaluationResult, RecoveryMetrics, TrialRecord
from fourier_haar.experiments.config import ExperimentConfig
from fourier_haar.levels import random_sparse_in_levels, sigma_km
from fourier_haar.sampling import (
    BandPlan,
    SamplingMode,
    allocate_budgets,
    build_bands,
    derive_seed,
    make_plan,
)
from fourier_haar.solvers.base import RecoveryProblem
from fourier_haar.solvers.noise import add_noise
from fourier_haar.solvers.primal_dual import PrimalDualSolver
from fourier_haar.transforms import BuildMode, MeasurementOperator, build_U, haar_inverse

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "trial_index",
    "seed",
    "sampling_mode",
    "c_alloc",
    "total_m",
    "budgets",
    "relative_error",
    "sigma_km",
    "iterations",
    "converged",
    "error",
]

# sub-stream keys under a trial seed
_SIGNAL_STREAM, _PLAN_STREAM, _NOISE_STREAM = 0, 1, 2


class ExperimentOrchestrator:
    """Runs seeded recovery trials, allocation sweeps and coherence audits."""

    def __init__(
        self,
        config: Optional[ExperimentConfig] = None,
        output_dir: Optional[str] = None,
        max_workers: Optional[int] = None,
    ):
        """
        Initializes the ExperimentOrchestrator.

        Args:
            config: Experiment configuration; defaults are used when omitted.
            output_dir: Overrides config.output_dir.
            max_workers: Overrides config.max_workers.
        """
        self.config = config or ExperimentConfig.get_default_config()
        self.output_dir = Path(output_dir or self.config.output_dir)
        self.max_workers = max_workers or self.config.max_workers
        self.wall_times: Dict[str, float] = {}

        self.output_dir.mkdir(parents=True, exist_ok=True)

    # ------------------------------------------------------------------
    # Trials
    # ------------------------------------------------------------------

    def _run_trial(
        self, trial_index: int, c_alloc: float, sampling_mode: SamplingMode
    ) -> TrialRecord:
        """
        Runs one recovery trial: signal, plan, measurements, noise, solve.

        Failures are captured on the returned record.
        """
        config = self.config
        seed = derive_seed(config.base_seed, trial_index)
        start_time = time.time()

        try:
            k = config.sparsity
            c = random_sparse_in_levels(
                k, derive_seed(seed, _SIGNAL_STREAM), config.magnitude_law
            )
            x = haar_inverse(c)

            plan = make_plan(
                k, config.allocation(c_alloc), config.n, derive_seed(seed, _PLAN_STREAM), sampling_mode
            )
            operator = MeasurementOperator.from_plan(plan)
            clean = operator.forward(c.values)
            eta = config.noise_bound(float(np.linalg.norm(clean)))
            y = add_noise(clean, eta, derive_seed(seed, _NOISE_STREAM))

            result = PrimalDualSolver(config.solver).solve(
                RecoveryProblem(y=y, eta=eta, operator=operator)
            )
            return TrialRecord(
                trial_index=trial_index,
                seed=seed,
                budgets=plan.m,
                total_m=plan.total_m,
                relative_error=RecoveryMetrics.relative_error(x, result.x_hat),
                sigma_km=sigma_km(c, k),
                iterations=result.iterations,
                converged=result.converged,
                wall_time=time.time() - start_time,
                c_alloc=c_alloc,
                sampling_mode=sampling_mode,
            )

        except Exception as e:
            logger.error(f"Trial {trial_index} failed: {e}")
            return TrialRecord(
                trial_index=trial_index,
                seed=seed,
                wall_time=time.time() - start_time,
                c_alloc=c_alloc,
                sampling_mode=sampling_mode,
                error=str(e),
            )

    def run_trials(
        self, c_alloc: float, sampling_mode: Optional[SamplingMode] = None
    ) -> List[TrialRecord]:
        """
        Runs config.trials trials in parallel and returns them sorted by index.

        Trial seeds depend only on the base seed and the trial index, so the
        records do not depend on the number of workers.
        """
        sampling_mode = SamplingMode(sampling_mode or self.config.sampling_mode)
        records = []
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {
                executor.submit(self._run_trial, i, c_alloc, sampling_mode): i
                for i in range(self.config.trials)
            }
            for future in as_completed(futures):
                record = future.result()
                records.append(record)
                logger.debug(
                    f"Trial {record.trial_index} done: error {record.relative_error}, "
                    f"{record.iterations} iterations"
                )

        records.sort(key=lambda r: r.trial_index)
        logger.info(
            f"Finished {len(records)} trials (c_alloc = {c_alloc}, {sampling_mode.value})"
        )
        return records

    def recover(self) -> Dict[str, Any]:
        """
        Runs the recovery trials of the configuration and saves them.

        Writes config.json, trials.csv, summary.json and metadata.json.

        Returns:
            The summary dictionary.
        """
        start_time = time.time()
        config = self.config
        evaluation = EvaluationResult(
            {"c_alloc": config.c_alloc, "sampling_mode": config.sampling_mode.value},
            threshold=config.success_threshold,
        )
        for record in self.run_trials(config.c_alloc):
            evaluation.add_record(record)

        summary = evaluation.get_summary()
        summary["n"] = config.n
        summary["k"] = list(config.k)
        summary.update(self._sampling_summary(evaluation.records))

        config.to_json(self.output_dir / "config.json")
        self._write_trials(self.output_dir / "trials.csv", evaluation.records)
        self._save_json(self.output_dir / "summary.json", summary)
        self.wall_times["recover"] = time.time() - start_time
        self._save_metadata(evaluation.records)
        return summary

    def _sampling_summary(self, records: Sequence[TrialRecord]) -> Dict[str, Any]:
        """
        Budgets the trials ran with. Multilevel trials all use the allocated
        budgets; uniform-global trials share only the total, so their per-band
        counts are reported as means over the completed trials.
        """
        config = self.config
        allocated = allocate_budgets(config.sparsity, config.allocation(), config.n)
        counts = [record.budgets for record in records if record.error is None]
        return {
            "allocated_budgets": allocated,
            "budgets": allocated if config.sampling_mode == SamplingMode.MULTILEVEL else None,
            "mean_band_counts": np.mean(counts, axis=0).tolist() if counts else None,
            "total_m": int(sum(allocated)),
        }

    def sweep(self) -> Dict[str, Any]:
        """
        Runs the trials once per value of c_alloc_sweep.

        Writes config.json, sweep.csv, sweep_trials.csv, sweep_summary.json and
        metadata.json. Success is expected to grow with c_alloc; the
        monotonicity is reported, not enforced.
        """
        start_time = time.time()
        config = self.config
        rows: List[Dict[str, Any]] = []
        all_records: List[TrialRecord] = []

        for c_alloc in config.c_alloc_sweep:
            records = self.run_trials(c_alloc)
            metrics = RecoveryMetrics.summarize(records, config.success_threshold)
            budgets = allocate_budgets(config.sparsity, config.allocation(c_alloc), config.n)
            rows.append(
                {
                    "c_alloc": c_alloc,
                    "total_m": int(sum(budgets)),
                    "success_rate": metrics["success_rate"],
                    "median_error": metrics["median_error"],
                }
            )
            all_records.extend(records)

        ordered = sorted(rows, key=lambda row: row["c_alloc"])
        rates = [row["success_rate"] for row in ordered]
        monotone = all(a <= b for a, b in zip(rates, rates[1:]))
        if not monotone:
            logger.info("Success rate is not monotone in c_alloc for this sweep")

        config.to_json(self.output_dir / "config.json")
        self._write_rows(
            self.output_dir / "sweep.csv", ["c_alloc", "total_m", "success_rate", "median_error"], rows
        )
        self._write_trials(self.output_dir / "sweep_trials.csv", all_records)
        summary = {"rows": rows, "monotone_success": monotone}
        self._save_json(self.output_dir / "sweep_summary.json", summary)
        self.wall_times["sweep"] = time.time() - start_time
        self._save_metadata(all_records)
        return summary

    # ------------------------------------------------------------------
    # Audit and plans
    # ------------------------------------------------------------------

    def audit(self) -> Dict[str, Any]:
        """
        Builds U, computes the coherence profile and checks both recovery
        conditions for the allocated budgets.

        Writes audit.json, mu_block.csv, mu_local.csv, block_norm.csv,
        config.json and metadata.json.

        Raises:
            CapacityError: If n exceeds the dense limit.
        """
        start_time = time.time()
        config = self.config
        k = config.sparsity

        U = build_U(config.levels, BuildMode.ANALYTIC, dense_limit=config.dense_limit)
        logger.info(f"Built U for n = {config.n}")
        profile = compute_profile(
            U,
            k,
            phases=config.phases,
            work_cap_log2=config.work_cap_log2,
            max_workers=self.max_workers,
        )
        budgets = allocate_budgets(k, config.allocation(), config.n)
        report = check_conditions(
            profile,
            budgets,
            k,
            config.epsilon,
            config.n,
            config.c_test,
            config.search_mode,
            config.lhs_bound,
        )
        logger.info(f"Condition checks {'passed' if report.passed else 'failed'} for budgets {budgets}")

        audit = {
            "n": config.n,
            "k": list(config.k),
            "budgets": budgets,
            "band_sizes": [int(band.shape[0]) for band in build_bands(config.levels.r)],
            "profile": profile.model_dump(mode="json"),
            "sparsity_bound": relative_sparsity_bound(profile.block_norm, k).model_dump(mode="json"),
            "conditions": report.model_dump(mode="json"),
            "passed": report.passed,
            "constants": {
                "coherence_decay": coherence_decay_constant(profile),
                "block_norm": block_norm_constant(profile),
                "entry_decay": entry_decay_constant(U),
                "band_sum": geometric_band_sum(config.levels.r),
                "allocation_ratio": allocation_implies_condition_i(profile, k),
            },
            "band_sine_bounds": band_sine_bounds(config.levels.r),
            "error_bound_terms": error_bound_terms(
                budgets, k.total, config.epsilon, config.n
            ).model_dump(mode="json"),
        }

        config.to_json(self.output_dir / "config.json")
        self._save_json(self.output_dir / "audit.json", audit)
        for name in ("mu_block", "mu_local", "block_norm"):
            self._write_matrix(self.output_dir / f"{name}.csv", getattr(profile, name))
        self.wall_times["audit"] = time.time() - start_time
        self._save_metadata()
        return audit

    def bands(self) -> BandPlan:
        """Draws the plan of the configuration with the base seed and saves band_plan.json."""
        config = self.config
        plan = make_plan(
            config.sparsity, config.allocation(), config.n, config.base_seed, config.sampling_mode
        )
        plan.to_json(self.output_dir / "band_plan.json")
        logger.info(f"Saved band plan to {self.output_dir / 'band_plan.json'}")
        return plan

    # ------------------------------------------------------------------
    # Output helpers
    # ------------------------------------------------------------------

    def _save_json(self, path: Path, payload: Dict[str, Any]) -> None:
        with open(path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
        logger.info(f"Saved {path}")

    def _write_rows(self, path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(columns))
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _format_cell(row.get(key)) for key in columns})
        logger.info(f"Saved {path}")

    def _write_trials(self, path: Path, records: Sequence[TrialRecord]) -> None:
        rows = []
        for record in records:
            row = record.model_dump(mode="json", exclude={"wall_time"})
            row["budgets"] = ";".join(str(m) for m in record.budgets)
            rows.append(row)
        self._write_rows(path, TRIAL_COLUMNS, rows)

    def _write_matrix(self, path: Path, matrix: np.ndarray) -> None:
        rows = [
            {"j": j, "l": l, "value": float(matrix[j, l])}
            for j in range(matrix.shape[0])
            for l in range(matrix.shape[1])
        ]
        self._write_rows(path, ["j", "l", "value"], rows)

    def _save_metadata(self, records: Optional[Sequence[TrialRecord]] = None) -> None:
        """Non-reproducible run information, kept apart from the data files."""
        metadata = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "wall_times": self.wall_times,
            "trial_wall_times": [r.wall_time for r in records or []],
            "max_workers": self.max_workers,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pydantic": pydantic.VERSION,
            },
        }
        self._save_json(self.output_dir / "metadata.json", metadata)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)
