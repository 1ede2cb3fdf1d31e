import math

import pytest

from toto import reference
from toto.model import ProblemSpec
from toto.solver import SolverConfig, enumerate_candidates

CASE_IDS = ["sqrt3-u2=1", "sqrt3-u2=6.5", "8-u2=1", "8-u2=4"]

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def bench_specs():
    return [ProblemSpec(g, reference.U1, u2) for g, u2 in reference.CASES]


@pytest.fixture(scope="session")
def bench_candidates(bench_specs):
    return [enumerate_candidates(spec, SolverConfig()) for spec in bench_specs]


@pytest.fixture
def sqrt3():
    return math.sqrt(3.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
