import numpy as np
import pytest

from frnn_emotion import kernels
from frnn_emotion.frnn import FrnnConfig, weight_tables

BACKENDS = sorted(kernels.BACKENDS)


def _case(rng, q, n, k, schemes):
    sim = rng.uniform(size=(q, n))
    labels = rng.permutation(np.arange(n) % 4).astype(np.int64)
    cfg = FrnnConfig(k, *schemes)
    up, lo = weight_tables(cfg)
    return sim, labels, cfg, up, lo


@pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")
@pytest.mark.parametrize("schemes", [("add", "add"), ("strict", "exp"), ("invadd", "mean")])
@pytest.mark.parametrize("k", [1, 3, 23, 200])
def test_backends_agree(rng, schemes, k):
    sim, labels, cfg, up, lo = _case(rng, 17, 90, k, schemes)
    a = kernels.BACKENDS["compiled"](sim, labels, 4, k, up, lo)
    b = kernels.BACKENDS["python"](sim, labels, 4, k, up, lo)
    np.testing.assert_allclose(a[0], b[0], atol=1e-13)
    np.testing.assert_allclose(a[1], b[1], atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_ties_in_similarity(backend):
    # all similarities equal: every multiset is constant, so OWA returns that constant
    sim = np.full((3, 12), 0.75)
    labels = np.arange(12, dtype=np.int64) % 4
    up, lo = weight_tables(FrnnConfig(5, "exp", "invadd"))
    lower, upper = kernels.BACKENDS[backend](sim, labels, 4, 5, up, lo)
    np.testing.assert_allclose(upper, 0.75, atol=1e-15)
    np.testing.assert_allclose(lower, 0.25, atol=1e-15)


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_query_block(backend):
    up, lo = weight_tables(FrnnConfig(3))
    lower, upper = kernels.BACKENDS[backend](np.zeros((0, 8)), np.arange(8, dtype=np.int64) % 4,
                                             4, 3, up, lo)
    assert lower.shape == upper.shape == (0, 4)


def test_backend_name():
    assert kernels.BACKEND in kernels.BACKENDS
