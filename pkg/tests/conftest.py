import re

import numpy as np
import pytest

from snnad.data import TimeSeries


def make_series(values, labels=None, spacing=300.0):
    values = np.asarray(values, dtype=float)
    timestamps = spacing * np.arange(len(values))
    return TimeSeries(timestamps, values, labels)


@pytest.fixture
def sine_series():
    t = np.arange(2000)
    return make_series(np.sin(2 * np.pi * t / 50))


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION.search(getattr(report, "nodeid", ""))
            if match is None:
                continue
            number = int(match.group(1))
            name = match.group(2).replace("_", " ")
            outcome = "PASS" if status == "passed" else "FAIL"
            lines[number] = f"criterion {number:2d} ({name}): {outcome}"
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
