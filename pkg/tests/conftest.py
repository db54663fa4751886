import numpy as np
import pytest

from frnn_emotion.dataset import VectorDataset


def random_dataset(rng, n=None, dim=None, n_classes=4):
    """Small labeled set with every class present."""
    n = n if n is not None else int(rng.integers(n_classes, 51))
    dim = dim if dim is not None else int(rng.integers(2, 6))
    labels = np.concatenate([np.arange(n_classes), rng.integers(0, n_classes, n - n_classes)])
    labels = rng.permutation(labels)
    x = rng.normal(size=(n, dim))
    x[np.linalg.norm(x, axis=1) < 1e-6] += 1.0
    return VectorDataset(dim, [f"i{i}" for i in range(n)], x, labels)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# -- acceptance reporting ------------------------------------------------------
# test_acceptance.py appends one line per criterion; they are printed in the
# terminal summary so they show up even when output capture is on.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
