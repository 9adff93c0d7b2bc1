import numpy as np
import pytest

from tdes_ecb import TripleKey, triple_schedule

KEY3 = bytes.fromhex("0123456789abcdef23456789abcdef01456789abcdef0123")


@pytest.fixture(scope="session")
def key3() -> TripleKey:
    return TripleKey.from_bytes(KEY3)


@pytest.fixture(scope="session")
def ts3(key3):
    return triple_schedule(key3)


@pytest.fixture
def rng():
    return np.random.default_rng(20110101)


# One summary line per acceptance criterion, whatever the verbosity.
_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    num, title = marker
    if report.when == "call" or report.outcome != "passed":
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            outcome += f" ({report.longrepr[2]})"
        details = [str(v) for k, v in report.user_properties if k == "detail"]
        if details:
            outcome += " | " + "; ".join(details)
        _criteria[num] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result()._criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, outcome = _criteria[num]
        terminalreporter.write_line(f"[{num}] {title}: {outcome}")
