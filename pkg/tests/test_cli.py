"""Tests for the qosc command line."""

import json

import pytest
from click.testing import CliRunner

from app.cli import cli


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


# ============== Spectrum Tests ==============


class TestSpectrumCommand:
    """Tests for `qosc spectrum` and `qosc locate`."""

    def test_spectrum_json(self, runner):
        """x_{1/2}(0) = 1.5 at q = 2 on an explicit window."""
        result = runner.invoke(cli, ["spectrum", "--q", "2", "--b", "0.5", "--rmin", "-3", "--rmax", "3"])
        assert result.exit_code == 0, result.output
        document = json.loads(result.stdout)
        assert document["schema_version"] == "1"
        assert document["command"] == "spectrum"
        assert document["window"] == [-3, 3]
        point = next(p for p in document["points"] if p["r"] == 0)
        assert point["x"] == pytest.approx(1.5, rel=1e-15)

    def test_spectrum_csv(self, runner):
        """CSV output starts with the documented header."""
        result = runner.invoke(
            cli, ["spectrum", "--q", "2", "--b", "0.7", "--rmin", "-2", "--rmax", "2", "--format", "csv"]
        )
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert lines[0] == "r,x,m_r,value_re,value_im"
        assert len(lines) == 6

    def test_spectrum_to_file(self, runner, tmp_path):
        """--output writes the document instead of printing it."""
        target = tmp_path / "spectrum.json"
        result = runner.invoke(
            cli, ["spectrum", "--q", "2", "--b", "0.5", "--rmin", "0", "--rmax", "1", "--output", str(target)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(target.read_text())["b"] == 0.5

    def test_invalid_q_exits_2(self, runner):
        """q <= 1 is an argument error with a JSON error on stderr."""
        result = runner.invoke(cli, ["spectrum", "--q", "0.5", "--b", "0.7"])
        assert result.exit_code == 2
        error = json.loads(result.stderr.strip().splitlines()[-1])
        assert error["code"] == "VALIDATION_INVALID_PARAMETER"

    def test_half_window_exits_2(self, runner):
        """Giving only one window bound is rejected."""
        result = runner.invoke(cli, ["spectrum", "--q", "2", "--b", "0.5", "--rmin", "-3"])
        assert result.exit_code == 2

    def test_locate_zero(self, runner):
        """x0 = 0 lies on b = 1/q at r = -1."""
        result = runner.invoke(cli, ["locate", "--q", "2", "--x0", "0"])
        assert result.exit_code == 0, result.output
        document = json.loads(result.stdout)
        assert document["b"] == 0.5
        assert document["r"] == -1


# ============== Oscillator Tests ==============


class TestOscillatorCommands:
    """Tests for `qosc hamiltonian`, `qosc polys` and `qosc eigenfunction`."""

    def test_hamiltonian(self, runner):
        """E_n = (q^n (q+1) - 2)/(2(q-1)): 1/2 and 2 at q = 2."""
        result = runner.invoke(cli, ["hamiltonian", "--q", "2", "--n-max", "3"])
        assert result.exit_code == 0, result.output
        levels = json.loads(result.stdout)["levels"]
        assert [level["n"] for level in levels] == [0, 1, 2, 3]
        assert levels[0]["energy"] == pytest.approx(0.5)
        assert levels[1]["energy"] == pytest.approx(2.0)

    def test_polys_default_convention(self, runner):
        """P_1(x) = -x with the default sign convention."""
        result = runner.invoke(cli, ["polys", "--q", "2", "--x", "0.9", "--n-max", "2"])
        assert result.exit_code == 0, result.output
        values = json.loads(result.stdout)["values"]
        assert values[1]["value"] == pytest.approx(-0.9)

    def test_eigenfunction(self, runner):
        """Product and series agree at each requested y."""
        result = runner.invoke(cli, ["eigenfunction", "--q", "2", "--x", "0.5", "--y", "0.3", "--y", "-0.3"])
        assert result.exit_code == 0, result.output
        points = json.loads(result.stdout)["points"]
        assert len(points) == 2
        assert all(point["deviation"] < 1e-10 for point in points)


# ============== Verdict Tests ==============


class TestVerdictCommand:
    """Tests for `qosc verdict`."""

    @pytest.mark.parametrize(
        "args, expected",
        [
            (["--q", "2"], "NotSelfAdjoint"),
            (["--q", "0.5"], "SelfAdjointBounded"),
            (["--q", "2", "--undeformed"], "SelfAdjointCarleman"),
        ],
    )
    def test_verdicts(self, runner, args, expected):
        result = runner.invoke(cli, ["verdict", *args])
        assert result.exit_code == 0, result.output
        assert json.loads(result.stdout)["verdict"] == expected


# ============== Transform and Verify Tests ==============


class TestTransformCommand:
    """Tests for `qosc transform` and `qosc verify`."""

    def test_transform_small_window(self, runner):
        """An explicit window gives one entry per (r', r)."""
        result = runner.invoke(
            cli,
            ["transform", "--q", "2", "--b", "0.5", "--bprime", "0.7", "--rmin", "-2", "--rmax", "2", "--validate", "1"],
        )
        assert result.exit_code == 0, result.output
        document = json.loads(result.stdout)
        assert document["matrix"] == "F"
        assert len(document["entries"]) == 25

    def test_verify_selected_check(self, runner):
        """A passing run exits 0 and reports the gate plus the selected check."""
        result = runner.invoke(cli, ["verify", "--q", "2", "--b", "0.5", "--check", "total_mass"])
        assert result.exit_code == 0, result.output
        document = json.loads(result.stdout)
        assert document["passed"] is True
        assert [check["name"] for check in document["checks"]] == ["evaluator_gate", "total_mass"]
