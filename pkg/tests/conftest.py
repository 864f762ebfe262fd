import pytest

from vanya.data import generate_synthetic
from vanya.training import TrainConfig

ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ACCEPTANCE[number] = (title, report.outcome.upper() if report.outcome != "passed" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, outcome = ACCEPTANCE[number]
        status = "PASS" if outcome == "PASS" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")


@pytest.fixture(scope="session")
def synth():
    return generate_synthetic()


@pytest.fixture(scope="session")
def quick_config():
    """Small network and short schedules for fast functional tests."""
    return TrainConfig(hidden=8, steps=6000, pretrain_epochs=30, finetune_epochs=30, lr=1e-2)
