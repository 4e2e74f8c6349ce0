"""Tests for the CLI module."""

import json
import os
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from dist_cospectra.algebra import fraction_rows
from dist_cospectra.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_VERIFICATION, app
from dist_cospectra.inputs import InputLoader
from dist_cospectra.switching import build_similarity


@pytest.fixture
def cli_runner():
    """Create a CLI runner for testing."""
    return CliRunner()


@pytest.fixture
def fx(fixtures_dir):
    """Path of a fixture file as a string."""
    return lambda name: str(fixtures_dir / name)


@pytest.fixture
def write_file(temp_dir):
    """Write text to a file in the temporary directory."""

    def write(name, text):
        path = os.path.join(temp_dir, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    return write


def _json(result):
    return json.loads(result.stdout)


def test_dist_command_json(cli_runner, fx):
    """Test the distance matrix of a path."""
    result = cli_runner.invoke(app, ["dist", fx("p3.g6"), "--json"])
    assert result.exit_code == 0
    data = _json(result)
    assert data["distances"] == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
    assert data["diameter"] == 2
    assert data["connected"] is True
    assert data["graph6"] == "Bg"


def test_dist_command_disconnected(cli_runner, write_file):
    """Test infinite distances in JSON and table output."""
    path = write_file("two.edges", "3; 1 2")
    data = _json(cli_runner.invoke(app, ["dist", path, "--json"]))
    assert data["distances"][0][2] is None
    assert data["connected"] is False
    result = cli_runner.invoke(app, ["dist", path])
    assert result.exit_code == 0
    assert "inf" in result.stdout


def test_dist_command_missing_file(cli_runner):
    """Test a graph file that does not exist."""
    result = cli_runner.invoke(app, ["dist", "/nonexistent/graph.g6"])
    assert result.exit_code == EXIT_INPUT
    assert "ERROR:" in result.stdout


def test_charpoly_command(cli_runner, fx):
    """Test the default, adjacency and evaluated char polys."""
    result = cli_runner.invoke(app, ["charpoly", fx("p2.g6")])
    assert result.exit_code == 0
    assert result.stdout.strip() == "x^2 - 2*x + 1 - q^2"
    adjacency = _json(cli_runner.invoke(app, ["charpoly", fx("p2.g6"), "--adjacency", "--json"]))
    assert adjacency == {"graph6": "A_", "matrix": "adjacency", "charpoly": "x^2 - 1"}
    assert cli_runner.invoke(app, ["charpoly", fx("p3.g6"), "--q", "1/2"]).exit_code == 0
    assert cli_runner.invoke(app, ["charpoly", fx("p3.g6"), "--symbolic-f"]).exit_code == 0


def test_charpoly_command_rejects_two_modes(cli_runner, fx):
    """Test conflicting matrix choices."""
    result = cli_runner.invoke(app, ["charpoly", fx("p2.g6"), "--q", "1/2", "--distance"])
    assert result.exit_code == EXIT_INPUT


def test_cospectral_command(cli_runner, fx):
    """Test positive and negative verdicts and their exit codes."""
    result = cli_runner.invoke(app, ["cospectral", fx("fig3-g1.edges"), fx("fig3-g2.edges")])
    assert result.exit_code == 0
    assert "COSPECTRAL" in result.stdout
    generalized = cli_runner.invoke(
        app, ["cospectral", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--generalized", "--json"]
    )
    assert _json(generalized) == {"matrix": "D_f", "cospectral": True}

    negative = cli_runner.invoke(app, ["cospectral", fx("p3.g6"), fx("k3.edges"), "--locus", "--json"])
    assert negative.exit_code == EXIT_VERIFICATION
    data = _json(negative)
    assert data["cospectral"] is False
    assert data["locus"]["gcd"] == "q^3 - q^2"
    at_one = cli_runner.invoke(app, ["cospectral", fx("p3.g6"), fx("k3.edges"), "--q", "1"])
    assert at_one.exit_code == 0


def test_cospectral_command_size_mismatch(cli_runner, fx):
    """Test graphs of different orders."""
    result = cli_runner.invoke(app, ["cospectral", fx("p2.g6"), fx("p3.g6")])
    assert result.exit_code == EXIT_INPUT


def test_qlocus_command(cli_runner, fx):
    """Test the q-locus in both output modes."""
    data = _json(cli_runner.invoke(app, ["qlocus", fx("p3.g6"), fx("k3.edges"), "--json"]))
    assert data["rational_roots"] == ["0", "1"]
    result = cli_runner.invoke(app, ["qlocus", fx("fig3-g1.edges"), fx("fig3-g2.edges")])
    assert result.exit_code == 0
    assert "every q" in result.stdout


def test_switch_command(cli_runner, fx, temp_dir):
    """Test switching, certifying and writing the result."""
    output = os.path.join(temp_dir, "switched.edges")
    result = cli_runner.invoke(
        app,
        ["switch", fx("fig3-g1.edges"), "-c", fx("fig3.cfg"), "--certify", "-o", output, "--json"],
    )
    assert result.exit_code == 0
    data = _json(result)
    assert data["certified"] is True
    assert [lv["level"] for lv in data["certificate"]["levels"]] == [0, 1, 2]
    loader = InputLoader()
    assert loader.load_graph(output) == loader.load_graph(fx("fig3-g2.edges"))


def test_switch_command_invalid_config(cli_runner, fx):
    """Test a configuration that breaks a condition."""
    result = cli_runner.invoke(app, ["switch", fx("fig1-a.edges"), "--config", fx("fig1.cfg")])
    assert result.exit_code == EXIT_VERIFICATION
    assert "ERROR:" in result.stdout


def test_switch_command_bad_config_text(cli_runner, fx):
    """Test configuration text that does not parse."""
    result = cli_runner.invoke(app, ["switch", fx("fig3-g1.edges"), "-c", "A {4,5}"])
    assert result.exit_code == EXIT_INPUT


def test_match_command(cli_runner, fx):
    """Test found, not found and exhausted searches."""
    found = cli_runner.invoke(app, ["match", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--json"])
    assert found.exit_code == 0
    data = _json(found)
    assert data["config_text"].startswith("A: ")
    assert "config" not in data

    none = cli_runner.invoke(app, ["match", fx("p3.g6"), fx("k3.edges")])
    assert none.exit_code == EXIT_VERIFICATION

    exhausted = cli_runner.invoke(
        app, ["match", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--time-ms", "0"]
    )
    assert exhausted.exit_code == EXIT_BUDGET
    assert "BUDGET EXHAUSTED" in exhausted.stdout

    as_json = cli_runner.invoke(
        app, ["match", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--time-ms", "0", "--json"]
    )
    assert as_json.exit_code == EXIT_BUDGET
    assert _json(as_json)["exhausted"] is True


def test_match_command_bad_sizes(cli_runner, fx):
    """Test part sizes that are not integers."""
    result = cli_runner.invoke(
        app, ["match", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--part-sizes", "2,x"]
    )
    assert result.exit_code == EXIT_INPUT


def test_family_command(cli_runner):
    """Test generating and verifying a family member."""
    result = cli_runner.invoke(app, ["family", "fig5", "--n", "9", "--verify", "--json"])
    assert result.exit_code == 0
    data = _json(result)
    assert data["passed"] is True
    assert data["G"]["n"] == 9 and data["H"]["n"] == 9
    assert data["verdict"]["unit_interval_roots"] == ["1/2"]
    assert cli_runner.invoke(app, ["family", "fig6", "--n", "8"]).exit_code == 0


def test_family_command_errors(cli_runner):
    """Test unknown names and small orders."""
    assert cli_runner.invoke(app, ["family", "fig7", "--n", "9"]).exit_code == EXIT_INPUT
    assert cli_runner.invoke(app, ["family", "fig5", "--n", "7"]).exit_code == EXIT_INPUT


def test_coalesce_command(cli_runner, fx):
    """Test gluing a triangle onto the part of the 11-vertex pair."""
    result = cli_runner.invoke(
        app,
        [
            "coalesce",
            fx("fig4-g1.edges"),
            fx("fig4-g2.edges"),
            "--config",
            fx("fig4.cfg"),
            "--part",
            "1",
            "--glue",
            fx("k3.edges"),
            "--root",
            "1",
            "--json",
        ],
    )
    assert result.exit_code == 0
    data = _json(result)
    assert data["certified"] is True
    assert data["charpolys_equal"] is True
    assert data["first"]["n"] == 19


def test_verify_qsample_command(cli_runner, fx, load_config, write_file):
    """Test a certified and a refuted similarity matrix."""
    s = build_similarity(load_config("fig3.cfg")).matrix()
    rows = [[str(v) for v in row] for row in fraction_rows(s)]
    sim = write_file("s.json", json.dumps({"matrix": rows}))
    args = ["verify-qsample", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--sim", sim]

    result = cli_runner.invoke(app, args + ["--q", "1/2,1/3", "--scan", "--json"])
    assert result.exit_code == 0
    data = _json(result)
    assert data["status"] == "certified"
    assert data["scan"]["successes"] == ["1/2", "1/3"]

    identity = [[int(i == j) for j in range(7)] for i in range(7)]
    refuted = cli_runner.invoke(
        app, args[:3] + ["--sim", write_file("i.json", json.dumps(identity)), "--q", "1/2"]
    )
    assert refuted.exit_code == EXIT_VERIFICATION
    assert "REFUTED" in refuted.stdout


def test_verify_qsample_command_singular(cli_runner, fx, write_file):
    """Test a singular similarity matrix."""
    ones = write_file("ones.json", json.dumps([[1] * 7 for _ in range(7)]))
    result = cli_runner.invoke(
        app, ["verify-qsample", fx("fig3-g1.edges"), fx("fig3-g2.edges"), "--sim", ones, "--q", "1/2"]
    )
    assert result.exit_code == EXIT_VERIFICATION


def test_survey_command(cli_runner, temp_dir):
    """Test a small survey end to end."""
    out = os.path.join(temp_dir, "report")
    result = cli_runner.invoke(
        app,
        [
            "survey",
            "--n",
            "4",
            "--out",
            out,
            "--db",
            os.path.join(temp_dir, "db.json"),
            "--log-file",
            os.path.join(temp_dir, "run.log"),
            "--extra-q",
            "1/2, generic",
            "--json",
        ],
    )
    assert result.exit_code == 0
    data = _json(result)
    assert data["row"]["graphs"] == 6
    assert data["reference"]["has_reference"] is False
    with open(os.path.join(out, "summary.json")) as f:
        summary = json.load(f)
    assert summary["extra_q"][0] == "1/2"
    assert len(summary["extra_q"]) == 2
    assert os.path.exists(os.path.join(out, "pairs.csv"))


def test_survey_command_needs_a_source(cli_runner, temp_dir):
    """Test a survey without --n or --graph6."""
    result = cli_runner.invoke(app, ["survey", "--out", temp_dir])
    assert result.exit_code == EXIT_INPUT


def test_survey_command_rejects_trivial_extra_q(cli_runner, temp_dir):
    """Test an extra q at which every pair is cospectral."""
    result = cli_runner.invoke(app, ["survey", "--n", "3", "--out", temp_dir, "--extra-q", "1"])
    assert result.exit_code == EXIT_INPUT


@patch("dist_cospectra.survey.CospectralSurvey.run")
def test_survey_command_unexpected_error(mock_run, cli_runner, temp_dir):
    """Test that an unexpected failure exits with code 1."""
    mock_run.side_effect = RuntimeError("worker crashed")
    result = cli_runner.invoke(
        app,
        [
            "survey",
            "--n",
            "3",
            "--out",
            temp_dir,
            "--db",
            os.path.join(temp_dir, "db.json"),
            "--log-file",
            os.path.join(temp_dir, "run.log"),
        ],
    )
    assert result.exit_code == 1
    assert "worker crashed" in result.stdout
    mock_run.assert_called_once()


def test_verify_reference_command(cli_runner, write_file):
    """Test the bundled and a broken reference table."""
    result = cli_runner.invoke(app, ["verify-reference"])
    assert result.exit_code == 0
    assert "VALID:" in result.stdout
    assert _json(cli_runner.invoke(app, ["verify-reference", "--json"]))["valid"] is True
    broken = write_file("broken.json", json.dumps({"metadata": {}, "rows": {}}))
    assert cli_runner.invoke(app, ["verify-reference", broken]).exit_code == EXIT_INPUT
    missing = cli_runner.invoke(app, ["verify-reference", "/nonexistent/table.json"])
    assert missing.exit_code == EXIT_INPUT


def test_enumerate_command(cli_runner):
    """Test graph6 output of the enumeration."""
    result = cli_runner.invoke(app, ["enumerate", "4"])
    assert result.exit_code == 0
    assert len(result.stdout.split()) == 6
    data = _json(cli_runner.invoke(app, ["enumerate", "3", "--json"]))
    assert len(data["graph6"]) == 2 and "Bw" in data["graph6"]
    assert cli_runner.invoke(app, ["enumerate", "9"]).exit_code == EXIT_INPUT
