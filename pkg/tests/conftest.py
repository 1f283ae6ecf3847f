import re

import pytest

# criterion name -> list of outcomes of its parametrized cases
_acceptance: dict[str, list[bool]] = {}


def _criterion(name: str) -> str:
    return re.sub(r"\[.*\]$", "", name)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if not item.module.__name__.endswith("test_acceptance"):
        return
    if report.when == "call" or report.failed:
        _acceptance.setdefault(_criterion(item.name), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        ok = all(_acceptance[name])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name.removeprefix('test_')}")
