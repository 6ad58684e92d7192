from __future__ import annotations

import re

_RESULTS: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)_", report.nodeid)
    if m is None or report.when not in ("setup", "call"):
        return
    n = int(m.group(1))
    if report.failed or report.when == "call":
        _RESULTS[n] = _RESULTS.get(n, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_RESULTS):
            terminalreporter.write_line(f"criterion {n}: {'PASS' if _RESULTS[n] else 'FAIL'}")
