"""Scoring and cross-validation."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .dataset import EMOTIONS, N_CLASSES, DataError, VectorDataset
from .frnn import FrnnConfig, fit, memberships_from_similarity, weight_tables
from .similarity import normalize_rows, similarity_matrix

N_FOLDS = 5


class UndefinedCorrelation(ValueError):
    pass


def pcc(x, y) -> float:
    """Pearson correlation coefficient of two equal-length vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"pcc needs equal-length vectors, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValueError("pcc needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if not (sxx > 0 and syy > 0):
        raise UndefinedCorrelation("undefined correlation: constant vector")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def safe_pcc(x, y) -> float:
    """pcc, with an undefined correlation scored as -inf."""
    try:
        return pcc(x, y)
    except UndefinedCorrelation:
        return -math.inf


@dataclass(frozen=True)
class FoldAssignment:
    seed: int
    fold_of: np.ndarray
    n_folds: int = N_FOLDS

    def test_index(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == f)

    def train_index(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != f)

    def splits(self):
        for f in range(self.n_folds):
            yield self.train_index(f), self.test_index(f)


def make_folds(data, seed: int, n_folds: int = N_FOLDS) -> FoldAssignment:
    """Stratified fold assignment.

    Within each label the instances are permuted by a PCG64 generator seeded
    with ``(seed, label)`` and dealt round-robin, continuing the deal where
    the previous label stopped so total fold sizes also differ by at most one.
    """
    labels = np.asarray(data.labels if isinstance(data, VectorDataset) else data, dtype=np.int64)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    fold_of = np.full(labels.size, -1, dtype=np.int64)
    offset = 0
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        if members.size < n_folds:
            raise DataError(f"class {label} has {members.size} instances, fewer than {n_folds} folds")
        rng = np.random.Generator(np.random.PCG64([seed, int(label)]))
        members = rng.permutation(members)
        fold_of[members] = (offset + np.arange(members.size)) % n_folds
        offset = (offset + members.size) % n_folds
    return FoldAssignment(seed, fold_of, n_folds)


@dataclass(frozen=True)
class ScoreReport:
    per_fold: tuple
    mean_pcc: float
    config: str = ""

    @classmethod
    def from_folds(cls, per_fold: Sequence[float], config: str = ""):
        per_fold = tuple(float(s) for s in per_fold)
        mean = -math.inf if any(math.isinf(s) for s in per_fold) else float(np.mean(per_fold))
        return cls(per_fold, mean, config)

    def tsv_row(self) -> str:
        return "\t".join([self.config] + [fmt(s) for s in self.per_fold] + [fmt(self.mean_pcc)])


def fmt(x: float) -> str:
    return "-inf" if x == -math.inf else f"{x:.6f}"


Predictor = Callable[[np.ndarray, np.ndarray], np.ndarray]


def fold_scores(truth, predictions, folds: FoldAssignment) -> list[float]:
    """Per-fold pcc of out-of-fold predictions; undefined folds score -inf."""
    truth = np.asarray(truth, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    scores = []
    for f in range(folds.n_folds):
        test = folds.test_index(f)
        s = safe_pcc(truth[test], predictions[test])
        if s == -math.inf:
            warnings.warn(f"fold {f}: correlation undefined, scored -inf", RuntimeWarning, stacklevel=2)
        scores.append(s)
    return scores


def cross_validate(pipeline: Predictor, data, folds: FoldAssignment, config: str = "") -> ScoreReport:
    """``pipeline(train_index, test_index)`` returns predictions for the test
    instances, trained on the train instances only."""
    labels = np.asarray(data.labels if isinstance(data, VectorDataset) else data, dtype=np.float64)
    predictions = np.full(labels.size, np.nan)
    for train, test in folds.splits():
        predictions[test] = np.asarray(pipeline(train, test), dtype=np.float64)
    return ScoreReport.from_folds(fold_scores(labels, predictions, folds), config)


def frnn_pipeline(ds: VectorDataset, cfg: FrnnConfig, threads: int = 1) -> Predictor:
    def run(train, test):
        model = fit(ds.subset(train), cfg)
        return model.predict_batch(ds.vectors[test], threads=threads)
    return run


def out_of_fold_memberships(ds: VectorDataset, configs: Sequence[FrnnConfig], folds: FoldAssignment,
                            threads: int = 1) -> list[tuple[np.ndarray, np.ndarray]]:
    """Out-of-fold ``(lower, upper)`` memberships for each config.

    The test-by-train similarity block of a fold is computed once and shared
    by all configs.
    """
    unit = normalize_rows(ds.vectors)
    labels = ds.labels
    tables = [weight_tables(cfg) for cfg in configs]
    out = [(np.zeros((len(ds), N_CLASSES)), np.zeros((len(ds), N_CLASSES))) for _ in configs]

    def run_fold(f):
        train, test = folds.train_index(f), folds.test_index(f)
        sim = similarity_matrix(unit[test], unit[train], normalized=True)
        return test, [memberships_from_similarity(sim, labels[train], cfg, tab)
                      for cfg, tab in zip(configs, tables)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_fold, range(folds.n_folds)))
    else:
        results = [run_fold(f) for f in range(folds.n_folds)]
    for test, per_cfg in results:
        for (lower, upper), (lo, up) in zip(out, per_cfg):
            lower[test] = lo
            upper[test] = up
    return out


def t_test_two_sided(a, b) -> float:
    """Welch two-sample t-test p-value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("t-test needs at least two values per sample")
    va = float(np.var(a, ddof=1)) / a.size
    vb = float(np.var(b, ddof=1)) / b.size
    se2 = va + vb
    if not se2 > 0:
        raise ValueError("t-test undefined: both samples have zero variance")
    t = (float(np.mean(a)) - float(np.mean(b))) / math.sqrt(se2)
    df = se2 * se2 / (va * va / (a.size - 1) + vb * vb / (b.size - 1))
    # P(|T| >= |t|) for Student t with df degrees of freedom
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def average_emotions(scores: Mapping[str, float]) -> float:
    missing = [e for e in EMOTIONS if e not in scores]
    extra = [e for e in scores if e not in EMOTIONS]
    if missing or extra:
        raise ValueError(f"need scores for exactly {EMOTIONS}; missing {missing}, unexpected {extra}")
    return float(sum(scores[e] for e in EMOTIONS) / len(EMOTIONS))
