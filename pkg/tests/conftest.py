"""Test configuration for pytest.

This file contains pytest fixtures, configuration, and hooks that are
shared across all test files.
"""

import os
import tempfile
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent.parent / "fixtures"


# Register custom markers
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers",
        "integration: mark a test as an integration test that tests multiple components together",
    )
    config.addinivalue_line(
        "markers", "slow: mark a test that takes minutes (full n = 7 survey, exhaustive sweeps)"
    )


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdirname:
        yield tmpdirname


@pytest.fixture
def temp_log_path(temp_dir):
    """Create a temporary log file path."""
    return os.path.join(temp_dir, "test_run.log")


@pytest.fixture
def temp_db_path(temp_dir):
    """Create a temporary database path."""
    return os.path.join(temp_dir, "test_surveys.json")


@pytest.fixture
def storage(temp_db_path):
    """Create a storage instance for testing."""
    from dist_cospectra.storage import SurveyStorage

    storage = SurveyStorage(db_path=temp_db_path)
    yield storage
    storage.close()


@pytest.fixture
def run_logger():
    """Create a run logger writing to a temporary file."""
    from dist_cospectra.audit import RunLogger

    with tempfile.TemporaryDirectory() as tmpdirname:
        log_path = os.path.join(tmpdirname, "run.log")
        yield RunLogger(log_path=log_path)


@pytest.fixture
def fixtures_dir():
    """Directory holding the worked-example fixtures."""
    return FIXTURES


@pytest.fixture
def load_fixture():
    """Load a fixture graph by file name."""
    from dist_cospectra.inputs import InputLoader

    loader = InputLoader()

    def load(name):
        return loader.load_graph(str(FIXTURES / name))

    return load


@pytest.fixture
def load_config():
    """Load a fixture configuration by file name."""
    from dist_cospectra.inputs import InputLoader

    loader = InputLoader()

    def load(name):
        return loader.load_config(str(FIXTURES / name))

    return load


@pytest.fixture
def fig3(load_fixture, load_config):
    """The 7-vertex pair with a single 4-vertex part."""
    return load_fixture("fig3-g1.edges"), load_fixture("fig3-g2.edges"), load_config("fig3.cfg")


@pytest.fixture
def fig2(load_fixture, load_config):
    """The 18-vertex three-part pair of diameter 5."""
    return load_fixture("fig2-g1.edges"), load_fixture("fig2-g2.edges"), load_config("fig2.cfg")


@pytest.fixture
def fig4(load_fixture, load_config):
    """The 11-vertex base pair used for coalescing."""
    return load_fixture("fig4-g1.edges"), load_fixture("fig4-g2.edges"), load_config("fig4.cfg")


@pytest.fixture
def reference_path():
    """The bundled reference table."""
    return str(Path(__file__).parent.parent / "reference" / "table1.json")
