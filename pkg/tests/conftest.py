import sys


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance suite's one-line-per-criterion report."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
