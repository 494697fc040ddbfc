"""Shared pytest hooks: replay acceptance verdicts after the run."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] != "test_acceptance":
            continue
        verdicts = getattr(module, "VERDICTS", None)
        if verdicts:
            terminalreporter.section("acceptance gate")
            for line in verdicts:
                terminalreporter.write_line(line)
