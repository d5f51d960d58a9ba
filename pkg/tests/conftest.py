import sys


def pytest_terminal_summary(terminalreporter):
    # repeat the acceptance PASS/FAIL lines, which pytest otherwise captures
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
