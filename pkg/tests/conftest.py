import os
from pathlib import Path

import pytest

from heurikappa.cli import main

PUBLISHED_ENV = "HEURIKAPPA_PUBLISHED_DATASET"

_criteria: dict[int, tuple[str, str]] = {}


def published_root():
    env = os.environ.get(PUBLISHED_ENV)
    root = Path(env) if env else Path(__file__).parent / "data" / "published"
    return root if root.is_dir() else None


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test decides")


def pytest_runtest_logreport(report):
    item_marker = getattr(report, "criterion", None)
    if item_marker is None:
        return
    n, title = item_marker
    if report.when == "call" or report.outcome != "passed":
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if n not in _criteria or _criteria[n][0] == "PASS":
            _criteria[n] = (verdict, title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        verdict, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}")


@pytest.fixture(scope="session")
def mock_root(tmp_path_factory):
    """30 sites x 3 sessions from the mock backend, 15 severity faults."""
    root = tmp_path_factory.mktemp("mock") / "results"
    assert main(["mock-run", "--root", str(root), "--inject-faults", "15", "--seed", "7"], environ={}) == 0
    return root


@pytest.fixture(scope="session")
def clean_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("clean") / "results"
    assert main(["mock-run", "--root", str(root), "--seed", "3"], environ={}) == 0
    return root
