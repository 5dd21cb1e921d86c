"""
Unit tests for the experiment configuration and the recovery metrics.
"""
import json

import pytest
import yaml
from pydantic import ValidationError

from fourier_haar.errors import ConfigError
from fourier_haar.evaluation import EvaluationResult, RecoveryMetrics, TrialRecord
from fourier_haar.experiments.config import ExperimentConfig
from fourier_haar.sampling import SamplingMode


class TestExperimentConfig:
    """Test cases for ExperimentConfig."""

    def test_defaults(self):
        config = ExperimentConfig.get_default_config()
        assert config.n == 256
        assert config.k == [2, 2, 3, 4, 4, 3, 2, 1]
        assert config.trials == 50
        assert config.success_threshold == 1e-3
        assert config.sampling_mode == SamplingMode.MULTILEVEL
        assert config.sparsity.total == 21

    def test_non_dyadic_n(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(n=100, k=[1] * 7)

    def test_pattern_length(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(n=16, k=[1, 1, 1])

    def test_pattern_exceeds_level(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(n=8, k=[3, 1, 1])

    @pytest.mark.parametrize("field, value", [("trials", 0), ("epsilon", 0.9), ("c_alloc_sweep", [])])
    def test_invalid_fields(self, field, value):
        with pytest.raises(ValidationError):
            ExperimentConfig(**{field: value})

    def test_noise_bound(self):
        assert ExperimentConfig(eta_relative=1e-3).noise_bound(2.0) == pytest.approx(2e-3)
        assert ExperimentConfig(eta=0.5).noise_bound(2.0) == 0.5

    def test_allocation_override(self):
        config = ExperimentConfig(c_alloc=0.5)
        assert config.allocation().c_alloc == 0.5
        assert config.allocation(2.0).c_alloc == 2.0

    def test_json_round_trip(self, tmp_path):
        config = ExperimentConfig(n=16, k=[1, 1, 1, 1], trials=3, base_seed=9)
        path = config.to_json(tmp_path / "config.json")
        assert ExperimentConfig.from_file(path) == config

    def test_yaml_round_trip(self, tmp_path):
        config = ExperimentConfig(n=32, k=[1, 1, 1, 1, 1], sampling_mode="uniform_global")
        config.to_yaml(tmp_path / "config.yaml")
        loaded = ExperimentConfig.from_file(tmp_path / "config.yaml")
        assert loaded.sampling_mode == SamplingMode.UNIFORM_GLOBAL
        assert loaded == config

    def test_partial_file_uses_defaults(self, tmp_path):
        path = tmp_path / "partial.yml"
        path.write_text(yaml.safe_dump({"n": 8, "k": [1, 1, 1]}))
        config = ExperimentConfig.from_file(path)
        assert config.trials == 50
        assert config.solver.tau == 0.99

    def test_empty_yaml(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert ExperimentConfig.from_file(path) == ExperimentConfig()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ExperimentConfig.from_file(tmp_path / "missing.json")

    def test_unknown_suffix(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("n = 8")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file(path)

    @pytest.mark.parametrize("name, text", [("list.json", "[1, 2]"), ("list.yaml", "- 1\n- 2\n"), ("scalar.yml", "8\n")])
    def test_top_level_must_be_a_mapping(self, tmp_path, name, text):
        path = tmp_path / name
        path.write_text(text)
        with pytest.raises(ConfigError, match="mapping"):
            ExperimentConfig.from_file(path)

    def test_lhs_bound(self):
        assert ExperimentConfig().lhs_bound is None
        assert ExperimentConfig(lhs_bound=2.5).lhs_bound == 2.5
        for value in (0.0, -1.0):
            with pytest.raises(ValidationError):
                ExperimentConfig(lhs_bound=value)

    def test_json_is_sorted(self, tmp_path):
        path = ExperimentConfig().to_json(tmp_path / "config.json")
        keys = list(json.loads(path.read_text()))
        assert keys == sorted(keys)


class TestRecoveryMetrics:
    """Test cases for RecoveryMetrics and EvaluationResult."""

    def test_relative_error(self):
        assert RecoveryMetrics.relative_error([3.0, 4.0], [3.0, 4.0]) == 0.0
        assert RecoveryMetrics.relative_error([3.0, 4.0], [0.0, 0.0]) == pytest.approx(1.0)
        assert RecoveryMetrics.relative_error([0.0, 0.0], [0.0, 2.0]) == pytest.approx(2.0)

    def test_is_success(self):
        assert RecoveryMetrics.is_success(1e-3)
        assert not RecoveryMetrics.is_success(2e-3)
        assert not RecoveryMetrics.is_success(None)

    def test_summarize(self):
        records = [
            TrialRecord(trial_index=i, seed=i, relative_error=error, iterations=10, converged=True)
            for i, error in enumerate([1e-6, 1e-5, 1e-2, 1e-4])
        ]
        records.append(TrialRecord(trial_index=4, seed=4, error="boom"))
        summary = RecoveryMetrics.summarize(records)
        assert summary["trials"] == 5
        assert summary["failed_trials"] == 1
        assert summary["success_rate"] == pytest.approx(3 / 5)
        assert summary["converged_fraction"] == pytest.approx(4 / 5)
        assert summary["median_error"] == pytest.approx((1e-5 + 1e-4) / 2)
        assert summary["max_error"] == pytest.approx(1e-2)

    def test_summarize_all_failed(self):
        summary = RecoveryMetrics.summarize([TrialRecord(trial_index=0, seed=0, error="x")])
        assert summary["success_rate"] == 0.0
        assert summary["median_error"] is None

    def test_negative_error_rejected(self):
        with pytest.raises(ValidationError):
            TrialRecord(trial_index=0, seed=0, relative_error=-1.0)

    def test_evaluation_result_sorted(self):
        evaluation = EvaluationResult({"c_alloc": 1.0})
        for index in (2, 0, 1):
            evaluation.add_record(TrialRecord(trial_index=index, seed=index, relative_error=0.0))
        assert [r.trial_index for r in evaluation.records] == [0, 1, 2]
        summary = evaluation.get_summary()
        assert summary["config"] == {"c_alloc": 1.0}
        assert summary["metrics"]["success_rate"] == 1.0
