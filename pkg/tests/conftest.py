import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow scale tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running scale tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    reports = []
    for outcome in ("passed", "failed", "error"):
        reports.extend(terminalreporter.stats.get(outcome, []))
    acceptance = {}
    for report in reports:
        nodeid = getattr(report, "nodeid", "")
        if "test_acceptance.py::test_c" not in nodeid or report.when != "call":
            continue
        name = nodeid.split("::")[-1].split("[")[0]
        acceptance[name] = report.outcome
    if not acceptance:
        return
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        CRITERIA = {}
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(acceptance):
        key = name.split("_")[1]
        label = CRITERIA.get(key, name)
        status = "PASS" if acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
