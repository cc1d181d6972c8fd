import os
import random
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hosim.dataset import SimplexDataset, load_dataset  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIG1 = os.path.join(ROOT, "fixtures", "fig1")
FIG1_SIMPLICES = [[1, 2, 3, 4], [1, 3, 5], [1, 2, 6], [1, 7, 8], [1, 5], [1, 8], [5, 8], [2, 3]]


def make_dataset(simplices, times=None, n_nodes=None) -> SimplexDataset:
    times = range(len(simplices)) if times is None else times
    return SimplexDataset.from_simplices(zip(simplices, times), n_nodes=n_nodes)


@pytest.fixture
def fig1():
    return load_dataset(FIG1)


@pytest.fixture
def pyrng():
    return random.Random(12345)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_simplices(rng: np.random.Generator, n: int, count: int, sizes=(2, 3, 4)):
    return [rng.choice(n, size=int(rng.choice(sizes)), replace=False).tolist() for _ in range(count)]


# criterion lines reported by test_acceptance, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
