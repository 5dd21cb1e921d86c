from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from fourier_haar.sampling import SamplingMode

DEFAULT_SUCCESS_THRESHOLD = 1e-3


class TrialRecord(BaseModel):
    """
    Outcome of one recovery trial.

    Attributes:
        trial_index: Position of the trial in its batch.
        seed: Per-trial seed derived from the base seed.
        budgets: Per-band sample counts m_j of the plan used.
        total_m: Total number of measurements.
        relative_error: ||x - x_hat||_2 / ||x||_2 (None if the trial failed).
        sigma_km: sigma_{k,M}(Phi^* x)_1 of the test signal.
        iterations: Solver iterations.
        converged: Solver convergence flag.
        wall_time: Seconds spent on the trial (kept out of data files).
        c_alloc: Allocation constant of the configuration.
        sampling_mode: Multilevel or uniform-global.
        error: Error message if the trial raised.
    """

    trial_index: int
    seed: int
    budgets: List[int] = Field(default_factory=list)
    total_m: int = 0
    relative_error: Optional[float] = Field(None, ge=0.0)
    sigma_km: Optional[float] = None
    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0
    c_alloc: float = 0.0
    sampling_mode: SamplingMode = SamplingMode.MULTILEVEL
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None or self.relative_error is None


class RecoveryMetrics:
    """A collection of static methods for scoring recovery trials."""

    @staticmethod
    def relative_error(x: np.ndarray, x_hat: np.ndarray) -> float:
        """
        ||x - x_hat||_2 / ||x||_2, or the absolute error when x = 0.

        Args:
            x: Ground-truth signal.
            x_hat: Recovered signal.
        """
        x, x_hat = np.asarray(x), np.asarray(x_hat)
        reference = np.linalg.norm(x)
        difference = float(np.linalg.norm(x - x_hat))
        return difference / reference if reference > 0 else difference

    @staticmethod
    def is_success(relative_error: Optional[float], threshold: float = DEFAULT_SUCCESS_THRESHOLD) -> bool:
        return relative_error is not None and relative_error <= threshold

    @staticmethod
    def summarize(
        records: List[TrialRecord], threshold: float = DEFAULT_SUCCESS_THRESHOLD
    ) -> Dict[str, Any]:
        """
        Aggregates a batch of trial records.

        Failed trials count as failures in the success rate and are excluded
        from the error quantiles.

        Returns:
            Dictionary with success rate, error quantiles, mean iterations and
            the converged fraction.
        """
        total = len(records)
        errors = np.array([r.relative_error for r in records if not r.failed], dtype=float)
        successes = sum(RecoveryMetrics.is_success(r.relative_error, threshold) for r in records)

        summary: Dict[str, Any] = {
            "trials": total,
            "failed_trials": sum(r.failed for r in records),
            "success_threshold": threshold,
            "success_rate": successes / total if total else 0.0,
            "converged_fraction": sum(r.converged for r in records) / total if total else 0.0,
            "mean_iterations": float(np.mean([r.iterations for r in records])) if total else 0.0,
        }
        if errors.size:
            summary.update(
                {
                    "median_error": float(np.median(errors)),
                    "q25_error": float(np.quantile(errors, 0.25)),
                    "q75_error": float(np.quantile(errors, 0.75)),
                    "q90_error": float(np.quantile(errors, 0.90)),
                    "max_error": float(np.max(errors)),
                }
            )
        else:
            summary.update(
                {key: None for key in ("median_error", "q25_error", "q75_error", "q90_error", "max_error")}
            )
        return summary


class EvaluationResult:
    """
    Collects the trial records of one configuration.

    Attributes:
        config: The configuration that was evaluated.
        records: Trial records, kept sorted by trial index.
    """

    def __init__(self, config: Dict[str, Any], threshold: float = DEFAULT_SUCCESS_THRESHOLD):
        self.config = config
        self.threshold = threshold
        self.records: List[TrialRecord] = []

    def add_record(self, record: TrialRecord):
        self.records.append(record)
        self.records.sort(key=lambda r: r.trial_index)

    def get_summary(self) -> Dict[str, Any]:
        """Returns the configuration together with its aggregated metrics."""
        return {"config": self.config, "metrics": RecoveryMetrics.summarize(self.records, self.threshold)}
