import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported as a PASS/FAIL line")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.rep_call = report
