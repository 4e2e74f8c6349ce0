"""Tests for the run logging module."""

import os

from dist_cospectra.audit import RunLogger


def _read(run_logger):
    with open(run_logger.log_path, "r") as f:
        return f.read()


def test_run_logger_initialization(temp_log_path):
    """Test run logger initialization."""
    run_logger = RunLogger(temp_log_path)
    assert run_logger is not None
    assert run_logger.log_path == temp_log_path
    assert os.path.exists(temp_log_path)
    assert "Run logging initialized" in _read(run_logger)


def test_run_logger_default_initialization(temp_dir):
    """Test run logger initialization with default path."""
    original_home = os.environ.get("HOME")

    try:
        os.environ["HOME"] = temp_dir

        run_logger = RunLogger()
        log_dir = os.path.join(temp_dir, ".dist_cospectra", "logs")
        assert os.path.isdir(log_dir)

        log_files = [f for f in os.listdir(log_dir) if f.startswith("run_")]
        assert len(log_files) > 0
        assert run_logger.log_path == os.path.join(log_dir, log_files[0])
    finally:
        if original_home:
            os.environ["HOME"] = original_home


def test_log_survey_start(run_logger):
    """Test logging survey start with its settings."""
    run_logger.log_survey_start("internal", 7, {"seed": 11, "samples": 3})
    content = _read(run_logger)
    assert "Starting survey of internal (n=7)" in content
    assert '"seed": 11' in content


def test_log_pipeline_milestones(run_logger):
    """Test fingerprint, bucket and pair messages."""
    run_logger.log_fingerprints(853, 3, 1.25)
    run_logger.log_buckets(12, 3)
    run_logger.log_pair("FCpb?", "FCpdG", True, False)
    run_logger.log_match("FCpb?", "FCpdG", True, 12.5)
    content = _read(run_logger)
    assert "Fingerprinted 853 graphs at 3 sample points in 1.25s" in content
    assert "12 fingerprint buckets with more than one graph (largest 3)" in content
    assert "dq_all_q=True df=False" in content
    assert "construction found in 12.5 ms" in content


def test_log_collision_is_a_warning(run_logger):
    """Test logging a fingerprint collision."""
    run_logger.log_collision("Bg", "Bw")
    content = _read(run_logger)
    assert "WARNING | Fingerprint collision between Bg and Bw" in content


def test_log_survey_complete(run_logger):
    """Test logging the finished row."""
    row = {"n": 7, "dq_pairs": 11, "df_pairs": 10, "construction_pairs": 10}
    run_logger.log_survey_complete(row, 4.0)
    run_logger.log_report("/tmp/out")
    content = _read(run_logger)
    assert "Survey complete in 4.00s" in content
    assert "n=7: 11 D_q pairs, 10 D_f pairs, 10 following the construction" in content
    assert "Report written to /tmp/out" in content


def test_log_error(run_logger):
    """Test logging errors."""
    try:
        raise ValueError("Test error")
    except Exception as e:
        run_logger.log_error("survey", e)

    assert "Error during survey: Test error" in _read(run_logger)


def test_get_log_path(run_logger):
    """Test getting log path."""
    log_path = run_logger.get_log_path()
    assert log_path == run_logger.log_path
    assert os.path.exists(log_path)
