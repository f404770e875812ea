import numpy as np
import pytest

from scunet.data import synth_toy_dataset

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): one headline acceptance criterion")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    # record once per test: the call phase, or setup if it never got that far
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        detail = dict(item.user_properties).get("detail", "")
        item.config.stash[_ACCEPTANCE].append((marker.args[0], status, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in rows:
        terminalreporter.write_line(f"{status:<4}  {name}" + (f"  ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def toy_tracks():
    return synth_toy_dataset(0, 2, 2, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
