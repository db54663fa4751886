"""FRNN-OWA classifier.

For a query ``y`` and class ``C``::

    upper(C) = OWA_upper{ R(x, y) : x in the k nearest neighbours of y within C }
    lower(C) = OWA_lower{ 1 - R(x, y) : x in the k nearest neighbours of y outside C }

with ``R`` the rescaled cosine similarity. The predicted class maximises
``lower + upper``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dataset import LABELS, N_CLASSES, DataError, VectorDataset
from .owa import Bound, OwaScheme, weight_table
from .similarity import normalize_rows, similarity_matrix

# Query rows per kernel call; bounds the similarity block held in memory.
CHUNK = 512
# Class scores closer than this are treated as equal.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class FrnnConfig:
    k: int
    lower_scheme: OwaScheme = OwaScheme.ADD
    upper_scheme: OwaScheme = OwaScheme.ADD

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "lower_scheme", OwaScheme(self.lower_scheme))
        object.__setattr__(self, "upper_scheme", OwaScheme(self.upper_scheme))


@dataclass(frozen=True)
class ClassScores:
    lower: np.ndarray
    upper: np.ndarray

    @property
    def mean_membership(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    @property
    def confidence(self) -> np.ndarray:
        return normalize_confidence(self.mean_membership)


def normalize_confidence(mean_membership) -> np.ndarray:
    """Divide each class score by the sum over classes (row-wise)."""
    mm = np.asarray(mean_membership, dtype=np.float64)
    total = mm.sum(axis=-1, keepdims=True)
    if np.any(~(total > 0)):
        raise ValueError("cannot normalize all-zero memberships")
    return mm / total


def argmax_lowest(scores, tol: float = TIE_TOL) -> np.ndarray:
    """Row-wise argmax; ties go to the lowest label.

    Scores within ``tol`` of the row maximum count as tied, so that rounding
    noise in the OWA sums (weights adding up to 1 +- 1 ulp) cannot decide.
    """
    s = np.asarray(scores, dtype=np.float64)
    top = s.max(axis=-1, keepdims=True)
    return np.argmax(s >= top - tol, axis=-1)


@dataclass(frozen=True)
class FrnnModel:
    """Fitted (lazy) model: unit-normalised training vectors and their labels."""

    config: FrnnConfig
    dimension: int
    unit_vectors: np.ndarray
    labels: np.ndarray
    ids: tuple = ()
    _tables: tuple = field(default=(), repr=False, compare=False)

    @property
    def pools(self) -> dict[int, np.ndarray]:
        return {c: self.unit_vectors[self.labels == c] for c in LABELS}

    def memberships(self, queries, threads: int = 1, unit: bool = False):
        """``(lower, upper)`` arrays of shape ``(n_queries, 4)``."""
        q = np.asarray(queries, dtype=np.float64)
        if q.ndim == 1:
            q = q[None, :]
        if q.shape[1] != self.dimension:
            raise ValueError(f"query dimension {q.shape[1]} != model dimension {self.dimension}")
        if not unit:
            q = normalize_rows(q)
        return memberships_from_similarity_blocks(
            lambda lo, hi: similarity_matrix(q[lo:hi], self.unit_vectors, normalized=True),
            len(q), self.labels, self.config, threads=threads, tables=self._tables)

    def approximations(self, y) -> ClassScores:
        lower, upper = self.memberships(y)
        return ClassScores(lower[0], upper[0])

    def predict(self, y) -> int:
        s = self.approximations(y)
        return int(argmax_lowest(s.lower + s.upper))

    def predict_batch(self, queries, threads: int = 1) -> np.ndarray:
        lower, upper = self.memberships(queries, threads=threads)
        return argmax_lowest(lower + upper)

    def confidence_vector(self, y) -> np.ndarray:
        return self.approximations(y).confidence


def weight_tables(cfg: FrnnConfig):
    return (weight_table(cfg.upper_scheme, Bound.UPPER, cfg.k),
            weight_table(cfg.lower_scheme, Bound.LOWER, cfg.k))


def memberships_from_similarity(sim, labels, cfg: FrnnConfig, tables=()):
    """Kernel call on a precomputed ``(q, n)`` similarity block."""
    upper_w, lower_w = tables or weight_tables(cfg)
    lower, upper = kernels.owa_memberships(sim, labels, N_CLASSES, cfg.k, upper_w, lower_w)
    # weight sums may exceed 1 by an ulp
    np.clip(lower, 0.0, 1.0, out=lower)
    np.clip(upper, 0.0, 1.0, out=upper)
    return lower, upper


def memberships_from_similarity_blocks(block, n_queries, labels, cfg, threads=1, tables=()):
    """Evaluate query chunks, possibly on a thread pool; output order is fixed."""
    tables = tables or weight_tables(cfg)
    bounds = [(lo, min(lo + CHUNK, n_queries)) for lo in range(0, n_queries, CHUNK)]

    def run(b):
        return memberships_from_similarity(block(*b), labels, cfg, tables)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    if not parts:
        return np.zeros((0, N_CLASSES)), np.zeros((0, N_CLASSES))
    return (np.vstack([p[0] for p in parts]), np.vstack([p[1] for p in parts]))


def fit(ds: VectorDataset, cfg: FrnnConfig) -> FrnnModel:
    labels = np.asarray(ds.labels, dtype=np.int64)
    for c in LABELS:
        if not np.any(labels == c):
            raise DataError(f"no training instance with label {c}")
    if np.any((labels < 0) | (labels >= N_CLASSES)):
        raise DataError("training labels must lie in 0..3")
    unit = normalize_rows(ds.vectors)
    unit.setflags(write=False)
    labels = labels.copy()
    labels.setflags(write=False)
    return FrnnModel(cfg, ds.dimension, unit, labels, tuple(ds.ids), weight_tables(cfg))
