from __future__ import annotations

import numpy as np
import pytest

from causametrics.harmonic import HarmonicModel, reduce
from causametrics.process import state_process_matrix
from causametrics.tensor import maximally_mixed


def model(p, d=2, kind="product"):
    return HarmonicModel.from_probabilities(p, d, kind)


@pytest.fixture
def w1():
    return reduce(model([1, 0, 0]))


@pytest.fixture
def w2():
    return reduce(model([0, 1, 0]))


@pytest.fixture
def w3():
    return reduce(model([0, 0, 1]))


@pytest.fixture
def w_product():
    rho = np.kron(maximally_mixed(2), np.diag([1.0, 0.0]))
    return state_process_matrix(rho, 2, 2)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
