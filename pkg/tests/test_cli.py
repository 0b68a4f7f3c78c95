"""Integration tests for the hyperstab command line."""

import json
from pathlib import Path
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from hyperstab import __version__
from hyperstab.cli import app
from hyperstab.errors import VerificationFailure
from hyperstab.experiments import EntropyVectorCheck


@pytest.fixture
def runner():
    """Create a CLI test runner."""
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Defaults only: no user config files or HYPERSTAB_* variables."""
    monkeypatch.setattr(Path, "home", lambda: tmp_path / "home")
    monkeypatch.chdir(tmp_path)
    for var in ("HYPERSTAB_MAX_QUDITS", "HYPERSTAB_ORACLE_MAX_DIMENSION", "HYPERSTAB_JOBS"):
        monkeypatch.delenv(var, raising=False)


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestMincut:
    def test_table(self, runner, h1_file):
        result = runner.invoke(app, ["mincut", str(h1_file)])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert "{}  0  1" in lines
        assert "{c}  1  2" in lines
        assert "{a,b}  1  2" in lines
        assert "symmetric and submodular" in result.stdout

    def test_unknown_terminal(self, runner, tmp_path):
        path = _write(tmp_path, "bad.json", {"vertices": ["a", "b"], "edges": [], "terminals": ["q"]})
        result = runner.invoke(app, ["mincut", str(path)])
        assert result.exit_code == 2
        assert "Error:" in result.stdout

    def test_syntax_error(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        result = runner.invoke(app, ["mincut", str(path)])
        assert result.exit_code == 2

    def test_too_many_vertices(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("HYPERSTAB_MAX_VERTICES", "3")
        path = _write(tmp_path, "h.json", {
            "vertices": ["a", "b", "c", "o"],
            "edges": [{"vertices": ["a", "b", "o"]}, {"vertices": ["o", "c"]}],
            "terminals": ["a", "b", "c"],
        })
        result = runner.invoke(app, ["mincut", str(path)])
        assert result.exit_code == 3


class TestCut:
    def test_value(self, runner, h1_file):
        result = runner.invoke(app, ["cut", str(h1_file), "a", "c"])
        assert result.exit_code == 0
        assert result.stdout.strip() == "2"

    def test_empty_set(self, runner, h1_file):
        result = runner.invoke(app, ["cut", str(h1_file)])
        assert result.stdout.strip() == "0"

    def test_unknown_vertex(self, runner, h1_file):
        result = runner.invoke(app, ["cut", str(h1_file), "zz"])
        assert result.exit_code == 2


class TestSimulate:
    @pytest.mark.parametrize("jobs", ["2", "4", "8"])
    def test_reports_are_reproducible(self, runner, h1_file, tmp_path, jobs):
        args = ["simulate", str(h1_file), "-r", "2", "-r", "1", "-n", "20", "--no-progress"]
        first = runner.invoke(app, args + ["-o", str(tmp_path / "one"), "-j", "1"])
        second = runner.invoke(app, args + ["-o", str(tmp_path / "two"), "-j", jobs])
        assert first.exit_code == 0, first.stdout
        assert second.exit_code == 0, second.stdout
        for name in ("h1.report.json", "h1.moments.r1.csv", "h1.moments.r2.csv",
                     "h1.concentration.csv", "h1.summary.md"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()
        assert "r=1:" in first.stdout and "r=2:" in first.stdout

    def test_zero_trials_rejected(self, runner, h1_file):
        result = runner.invoke(app, ["simulate", str(h1_file), "--trials", "0"])
        assert result.exit_code == 2

    def test_bad_prime(self, runner, h1_file):
        result = runner.invoke(app, ["simulate", str(h1_file), "-p", "4", "--no-progress"])
        assert result.exit_code == 2
        assert "prime" in result.stdout

    def test_missing_input(self, runner, tmp_path):
        result = runner.invoke(app, ["simulate", str(tmp_path / "none.json")])
        assert result.exit_code == 2


class TestMoments:
    def test_tables(self, runner, h1_file, tmp_path):
        result = runner.invoke(app, [
            "moments", str(h1_file), "-n", "30", "-j", "1", "--no-progress",
            "-o", str(tmp_path / "m"), "--max-z", "100",
        ])
        assert result.exit_code == 0, result.stdout
        assert "r = 1" in result.stdout
        assert (tmp_path / "m" / "h1.moments.r1.csv").exists()

    def test_z_threshold_fails(self, runner, h1_file, tmp_path):
        result = runner.invoke(app, [
            "moments", str(h1_file), "-n", "30", "-j", "1", "--no-progress",
            "-o", str(tmp_path / "m"), "--max-z", "0",
        ])
        assert result.exit_code == 1
        assert "Error: largest |z|" in result.stdout


class TestOracleCheck:
    def test_agreement(self, runner, h1_file):
        result = runner.invoke(
            app, ["oracle-check", str(h1_file), "-n", "10", "-j", "1", "--no-progress"]
        )
        assert result.exit_code == 0, result.stdout
        assert "10 trials agree" in result.stdout

    def test_corrupted_entropy_fails(self, runner, h1_file):
        result = runner.invoke(
            app,
            ["oracle-check", str(h1_file), "-n", "5", "-j", "1", "--no-progress", "--corrupt-entropy"],
        )
        assert result.exit_code == 1
        assert "Error: disagreement at seed" in result.stdout
        assert "S_1 of []" in result.stdout

    def test_haar_estimate(self, runner, h1_file):
        result = runner.invoke(
            app, ["oracle-check", str(h1_file), "-n", "20", "-j", "1", "--no-progress", "--haar"]
        )
        assert result.exit_code == 0, result.stdout
        assert "Haar projections" in result.stdout

    def test_too_many_qudits(self, runner, tmp_path):
        path = _write(tmp_path, "wide.json", {
            "vertices": ["a", "b"],
            "edges": [{"vertices": ["a", "b"], "weight": 15}],
            "terminals": ["a", "b"],
        })
        result = runner.invoke(app, ["oracle-check", str(path), "-n", "1", "--no-progress"])
        assert result.exit_code == 3


class TestVerify:
    def test_passes(self, runner, h1_file):
        result = runner.invoke(
            app, ["verify", str(h1_file), "-n", "30", "-r", "1", "-r", "3", "-j", "1", "--no-progress"]
        )
        assert result.exit_code == 0, result.stdout
        assert "all checks passed" in result.stdout

    def test_failing_vector_exits_with_verification_code(self, runner, h1_file):
        failing = EntropyVectorCheck(checked=3, violations=1, failing_seeds=(42,))
        with patch("hyperstab.cli.verify_entropy_vector", return_value=failing):
            result = runner.invoke(
                app, ["verify", str(h1_file), "-n", "3", "-j", "1", "--no-progress"]
            )
        assert result.exit_code == VerificationFailure.exit_code == 1
        assert "first failing seed 42" in result.stdout


class TestConfigAndVersion:
    def test_example(self, runner):
        result = runner.invoke(app, ["config", "--example"])
        assert result.exit_code == 0
        assert "[hyperstab]" in result.stdout

    def test_effective_settings(self, runner):
        result = runner.invoke(app, ["config"])
        assert result.exit_code == 0
        assert "max_vertices" in result.stdout

    def test_version(self, runner):
        result = runner.invoke(app, ["version"])
        assert __version__ in result.stdout
