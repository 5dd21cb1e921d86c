"""
Unit tests for the command-line front end.
"""
import json

import numpy as np
import pytest

from fourier_haar.cli import EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, build_parser, load_config, main, read_vector
from fourier_haar.errors import ConfigError
from fourier_haar.experiments.config import ExperimentConfig


@pytest.fixture
def small_config(tmp_path):
    """Fixture writing a small YAML experiment config."""
    path = tmp_path / "config.yaml"
    ExperimentConfig(n=16, k=[1, 1, 1, 1], trials=2, eta_relative=0.0, c_alloc_sweep=[100.0]).to_yaml(path)
    return path


class TestParser:
    """Test cases for argument parsing and config overrides."""

    def test_overrides(self, small_config, tmp_path):
        args = build_parser().parse_args(
            ["recover", "--config", str(small_config), "--seed", "11", "--out", str(tmp_path / "o"), "--threads", "3"]
        )
        config = load_config(args)
        assert config.base_seed == 11
        assert config.max_workers == 3
        assert config.output_dir == str(tmp_path / "o")
        assert config.n == 16

    def test_defaults_without_config(self):
        config = load_config(build_parser().parse_args(["bands"]))
        assert config == ExperimentConfig.get_default_config()

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestCommands:
    """Test cases for the subcommands."""

    def test_recover(self, small_config, tmp_path, capsys):
        out = tmp_path / "recover"
        assert main(["recover", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
        assert (out / "trials.csv").exists()
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["trials"] == 2

    def test_sweep(self, small_config, tmp_path, capsys):
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["rows"][0]["success_rate"] == 1.0
        assert (out / "sweep.csv").exists()

    def test_audit(self, tmp_path, capsys):
        config = tmp_path / "audit.json"
        ExperimentConfig(n=8, k=[1, 1, 1]).to_json(config)
        assert main(["audit", "--config", str(config), "--out", str(tmp_path / "audit")]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert set(printed) == {"passed", "budgets"}
        assert (tmp_path / "audit" / "audit.json").exists()

    def test_audit_capacity_exit_code(self, tmp_path):
        config = tmp_path / "big.json"
        ExperimentConfig(n=64, k=[1] * 6, dense_limit=16).to_json(config)
        assert main(["audit", "--config", str(config), "--out", str(tmp_path / "big")]) == EXIT_CAPACITY

    def test_bands(self, small_config, tmp_path, capsys):
        assert main(["bands", "--config", str(small_config), "--out", str(tmp_path / "b"), "--seed", "4"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["bands"][0] == [0, 1]
        assert payload["seed"] == 4
        assert len(payload["omega"]) == sum(payload["m"])

    def test_missing_config(self, tmp_path):
        assert main(["recover", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 12}))
        assert main(["recover", "--config", str(path)]) == EXIT_CONFIG

    def test_non_mapping_config(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text(json.dumps([16, 32]))
        assert main(["audit", "--config", str(path)]) == EXIT_CONFIG


class TestTransformCommand:
    """Test cases for the one-shot transform subcommand."""

    def test_haar_to_file(self, tmp_path):
        source = tmp_path / "x.csv"
        source.write_text("1\n1\n-1\n-1\n")
        target = tmp_path / "c.csv"
        assert main(["transform", "--input", str(source), "--op", "haar", "--output", str(target)]) == EXIT_OK
        np.testing.assert_allclose(read_vector(target), [0, 2, 0, 0], atol=1e-15)

    def test_dft_round_trip_through_files(self, tmp_path):
        source = tmp_path / "x.csv"
        source.write_text("1,0\n0,1\n2,0\n0,0\n")
        spectrum = tmp_path / "y.csv"
        back = tmp_path / "x2.csv"
        assert main(["transform", "--input", str(source), "--op", "dft", "--output", str(spectrum)]) == EXIT_OK
        assert main(["transform", "--input", str(spectrum), "--op", "idft", "--output", str(back)]) == EXIT_OK
        np.testing.assert_allclose(read_vector(back), [1, 1j, 2, 0], atol=1e-12)

    def test_stdout(self, tmp_path, capsys):
        source = tmp_path / "x.csv"
        source.write_text("2\n0\n")
        assert main(["transform", "--input", str(source), "--op", "ihaar"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2

    def test_bad_length(self, tmp_path):
        source = tmp_path / "x.csv"
        source.write_text("1\n2\n3\n")
        assert main(["transform", "--input", str(source)]) == EXIT_CONFIG

    def test_malformed_line(self, tmp_path):
        source = tmp_path / "x.csv"
        source.write_text("1\nabc\n")
        with pytest.raises(ConfigError):
            read_vector(source)
        assert main(["transform", "--input", str(source)]) == EXIT_CONFIG
