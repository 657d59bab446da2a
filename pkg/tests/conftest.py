import re

_outcomes: dict[int, str] = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed:
        if report.failed:
            _outcomes[n] = "FAIL"
        elif report.passed:
            _outcomes.setdefault(n, "PASS")
        elif report.skipped:
            _outcomes[n] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        status = _outcomes.get(n, "NOT RUN")
        terminalreporter.write_line(f"criterion {n}: {status}  {CRITERIA[n]}")
