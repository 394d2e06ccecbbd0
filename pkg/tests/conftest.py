import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from lpmink import build_measure

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

SQRT3 = np.sqrt(3.0)

# filled by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def square(alpha=2.0):
    U = [[1, 0], [0, 1], [-1, 0], [0, -1]]
    return build_measure(2, U, [alpha] * 4)


def triangle(alpha=2 * SQRT3):
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    return build_measure(2, np.column_stack([np.cos(ang), np.sin(ang)]), [alpha] * 3)


def cube(alpha=4.0):
    I = np.eye(3)
    return build_measure(3, np.vstack([I, -I]), [alpha] * 6)


def tetrahedron(alpha=1.0):
    T = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / SQRT3
    return build_measure(3, T, [alpha] * 4)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def load_shipped(name):
    return json.loads((INSTANCES / f"{name}.json").read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
