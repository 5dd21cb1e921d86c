import csv
import json
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from fourier_haar.errors import CapacityError
from fourier_haar.experiments import ExperimentConfig, ExperimentOrchestrator
from fourier_haar.sampling import SamplingMode


class TestExperimentOrchestrator(unittest.TestCase):
    def setUp(self):
        """Set up a small configuration and a scratch output directory."""
        self.output_dir = Path(tempfile.mkdtemp(prefix="fourier_haar_test_"))
        self.config = ExperimentConfig(
            n=32,
            k=[1, 1, 1, 1, 1],
            trials=4,
            base_seed=3,
            c_alloc=1.0,
            c_alloc_sweep=[0.0, 100.0],
            eta_relative=0.0,
            output_dir=str(self.output_dir),
        )
        self.orchestrator = ExperimentOrchestrator(self.config, max_workers=2)

    def tearDown(self):
        shutil.rmtree(self.output_dir, ignore_errors=True)

    def _read_csv(self, name):
        with open(self.output_dir / name, newline="") as f:
            return list(csv.DictReader(f))

    def test_initialization(self):
        """Test that the orchestrator picks up overrides and creates the output directory."""
        self.assertEqual(self.orchestrator.output_dir, self.output_dir)
        self.assertEqual(self.orchestrator.max_workers, 2)
        self.assertTrue(self.output_dir.is_dir())

    def test_run_trials_sorted(self):
        records = self.orchestrator.run_trials(1.0)
        self.assertEqual([r.trial_index for r in records], [0, 1, 2, 3])
        for record in records:
            self.assertIsNone(record.error)
            self.assertEqual(record.total_m, sum(record.budgets))
            self.assertEqual(record.sigma_km, 0.0)

    def test_recover_writes_outputs(self):
        summary = self.orchestrator.recover()
        for name in ("config.json", "trials.csv", "summary.json", "metadata.json"):
            self.assertTrue((self.output_dir / name).exists(), name)

        rows = self._read_csv("trials.csv")
        self.assertEqual(len(rows), 4)
        self.assertNotIn("wall_time", rows[0])
        self.assertEqual(rows[0]["sampling_mode"], "multilevel")
        self.assertEqual(summary["metrics"]["trials"], 4)
        self.assertEqual(summary["n"], 32)

        with open(self.output_dir / "metadata.json") as f:
            metadata = json.load(f)
        self.assertIn("timestamp", metadata)
        self.assertEqual(len(metadata["trial_wall_times"]), 4)

    def test_full_sampling_is_exact(self):
        self.orchestrator.config = self.config.model_copy(update={"c_alloc": 100.0})
        summary = self.orchestrator.recover()
        self.assertEqual(summary["budgets"], [2, 2, 4, 8, 16])
        self.assertEqual(summary["allocated_budgets"], [2, 2, 4, 8, 16])
        self.assertEqual(summary["mean_band_counts"], [2.0, 2.0, 4.0, 8.0, 16.0])
        self.assertEqual(summary["total_m"], 32)
        self.assertLessEqual(summary["metrics"]["max_error"], 1e-8)
        self.assertEqual(summary["metrics"]["success_rate"], 1.0)

    def test_serial_and_parallel_outputs_identical(self):
        parallel_dir = self.output_dir / "parallel"
        serial_dir = self.output_dir / "serial"
        ExperimentOrchestrator(self.config, output_dir=str(parallel_dir), max_workers=4).recover()
        ExperimentOrchestrator(self.config, output_dir=str(serial_dir), max_workers=1).recover()
        for name in ("config.json", "trials.csv", "summary.json"):
            self.assertEqual(
                (parallel_dir / name).read_bytes(), (serial_dir / name).read_bytes(), name
            )

    def test_uniform_global_keeps_total(self):
        multilevel = self.orchestrator.run_trials(0.5, SamplingMode.MULTILEVEL)
        uniform = self.orchestrator.run_trials(0.5, SamplingMode.UNIFORM_GLOBAL)
        for a, b in zip(multilevel, uniform):
            self.assertEqual(a.total_m, b.total_m)
            self.assertEqual(b.sampling_mode, SamplingMode.UNIFORM_GLOBAL)

    def test_uniform_global_summary(self):
        """Uniform-global runs report the shared total, not per-band budgets."""
        self.orchestrator.config = self.config.model_copy(update={"sampling_mode": SamplingMode.UNIFORM_GLOBAL})
        summary = self.orchestrator.recover()
        self.assertIsNone(summary["budgets"])
        self.assertEqual(summary["total_m"], sum(summary["allocated_budgets"]))
        self.assertEqual(len(summary["mean_band_counts"]), 5)
        self.assertAlmostEqual(sum(summary["mean_band_counts"]), summary["total_m"])
        rows = self._read_csv("trials.csv")
        self.assertTrue(all(row["sampling_mode"] == "uniform_global" for row in rows))

    def test_failed_trials_are_recorded(self):
        with patch(
            "fourier_haar.experiments.orchestrator.PrimalDualSolver.solve",
            side_effect=RuntimeError("solver exploded"),
        ):
            summary = self.orchestrator.recover()
        self.assertEqual(summary["metrics"]["failed_trials"], 4)
        self.assertEqual(summary["metrics"]["success_rate"], 0.0)
        rows = self._read_csv("trials.csv")
        self.assertTrue(all(row["error"] == "solver exploded" for row in rows))
        self.assertTrue(all(row["relative_error"] == "" for row in rows))

    def test_sweep(self):
        summary = self.orchestrator.sweep()
        rows = self._read_csv("sweep.csv")
        self.assertEqual([float(row["c_alloc"]) for row in rows], [0.0, 100.0])
        self.assertEqual(int(rows[0]["total_m"]), 5)
        self.assertEqual(int(rows[1]["total_m"]), 32)
        self.assertEqual(float(rows[1]["success_rate"]), 1.0)
        self.assertTrue(summary["monotone_success"])
        self.assertEqual(len(self._read_csv("sweep_trials.csv")), 8)

    def test_audit(self):
        config = ExperimentConfig(n=8, k=[1, 1, 1], output_dir=str(self.output_dir))
        audit = ExperimentOrchestrator(config).audit()
        self.assertEqual(audit["band_sizes"], [2, 2, 4])
        self.assertTrue(audit["profile"]["K_exact"])
        for name in ("audit.json", "mu_block.csv", "mu_local.csv", "block_norm.csv"):
            self.assertTrue((self.output_dir / name).exists(), name)
        self.assertEqual(len(self._read_csv("mu_local.csv")), 9)
        self.assertEqual(audit["conditions"]["condition_ii"]["lhs_bound_source"], "decay_law")

    def test_audit_with_given_bound(self):
        config = ExperimentConfig(n=8, k=[1, 1, 1], lhs_bound=1e-9, output_dir=str(self.output_dir))
        audit = ExperimentOrchestrator(config).audit()
        condition_ii = audit["conditions"]["condition_ii"]
        self.assertEqual(condition_ii["lhs_bound_source"], "given")
        self.assertEqual(condition_ii["lhs_bound"], 1e-9)
        self.assertFalse(condition_ii["passed"])
        self.assertFalse(audit["passed"])

    def test_audit_trivial_dimension(self):
        config = ExperimentConfig(n=2, k=[1], output_dir=str(self.output_dir))
        audit = ExperimentOrchestrator(config).audit()
        self.assertTrue(audit["passed"])
        self.assertEqual(audit["budgets"], [1])

    def test_audit_repeatable(self):
        config = ExperimentConfig(n=8, k=[1, 1, 1], output_dir=str(self.output_dir / "a"))
        ExperimentOrchestrator(config).audit()
        ExperimentOrchestrator(config, output_dir=str(self.output_dir / "b")).audit()
        for name in ("audit.json", "mu_block.csv", "block_norm.csv"):
            self.assertEqual(
                (self.output_dir / "a" / name).read_bytes(),
                (self.output_dir / "b" / name).read_bytes(),
            )

    def test_audit_dense_limit(self):
        config = ExperimentConfig(n=64, k=[1] * 6, dense_limit=32, output_dir=str(self.output_dir))
        with self.assertRaises(CapacityError):
            ExperimentOrchestrator(config).audit()

    def test_bands(self):
        plan = self.orchestrator.bands()
        self.assertTrue((self.output_dir / "band_plan.json").exists())
        self.assertEqual(plan.seed, 3)
        self.assertEqual(plan.total_m, sum(plan.m))


if __name__ == "__main__":
    unittest.main()
