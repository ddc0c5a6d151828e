import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsmreg import problems  # noqa: E402


@pytest.fixture(scope="session")
def hilbert10_instance():
    y = problems.exact_profile("sqrt", 10)
    return problems.make_instance(problems.hilbert(10), y, problems.NoiseSpec(0.01, 7), "hilbert-sqrt")


@pytest.fixture(scope="session")
def hilbert100_instance():
    y = problems.exact_profile("sqrt", 100)
    return problems.make_instance(problems.hilbert(100), y, problems.NoiseSpec(0.01, 0), "hilbert-sqrt")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
