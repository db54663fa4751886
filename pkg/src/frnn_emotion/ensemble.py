"""Combining FRNN-OWA models built on different embeddings.

Member outputs are carried as mean memberships ``(lower + upper) / 2`` with
shape ``(n_models, n_instances, 4)``. Everything else (predicted labels,
confidence scores, rescaled probabilities) is derived from them.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .dataset import N_CLASSES
from .evaluation import FoldAssignment, ScoreReport, fold_scores
from .frnn import ClassScores, argmax_lowest, normalize_confidence

MAX_LABEL = N_CLASSES - 1
CLASS_VALUES = np.arange(N_CLASSES, dtype=np.float64)
# Default alpha search grid: 0.002, 0.004, ..., 0.100
DEFAULT_ALPHA_GRID = tuple(round(0.002 * i, 3) for i in range(1, 51))


class Voting(str, Enum):
    MAJORITY = "majority"
    MEAN = "mean"
    ROUNDED_MEAN = "rounded_mean"
    MEDIAN = "median"
    MAX = "max"
    MIN = "min"
    CS_MAJORITY = "cs_majority"
    CS_WA = "cs_wa"
    CS_WA_ROUNDED = "cs_wa_rounded"
    RESCALED_WA = "rescaled_wa"
    RESCALED_WA_ROUNDED = "rescaled_wa_rounded"

    @property
    def needs_alpha(self) -> bool:
        return self in (Voting.RESCALED_WA, Voting.RESCALED_WA_ROUNDED)

    @property
    def label_level(self) -> bool:
        return self in LABEL_LEVEL


LABEL_LEVEL = (Voting.MAJORITY, Voting.MEAN, Voting.ROUNDED_MEAN, Voting.MEDIAN,
               Voting.MAX, Voting.MIN)


class RescaleInput(str, Enum):
    """Scores fed to the softmax rescaling: raw mean memberships or
    per-model normalised confidence scores."""

    RAW = "raw"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class ModelOutput:
    model_id: str
    predicted_label: int
    confidence: np.ndarray
    mean_membership: np.ndarray

    @classmethod
    def from_mean_membership(cls, model_id: str, mean_membership) -> "ModelOutput":
        mm = np.asarray(mean_membership, dtype=np.float64)
        return cls(model_id, int(argmax_lowest(mm)), normalize_confidence(mm), mm)

    @classmethod
    def from_scores(cls, model_id: str, scores: ClassScores) -> "ModelOutput":
        return cls.from_mean_membership(model_id, scores.mean_membership)


@dataclass(frozen=True)
class EnsembleConfig:
    members: tuple
    voting: Voting = Voting.MEAN
    alpha: float | None = None
    weights: Mapping[str, float] = field(default_factory=dict)
    rescale_input: RescaleInput = RescaleInput.RAW

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "voting", Voting(self.voting))
        object.__setattr__(self, "rescale_input", RescaleInput(self.rescale_input))
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("ensemble members must be distinct")
        if self.voting.needs_alpha:
            if self.alpha is None:
                raise ValueError(f"voting {self.voting.value} requires alpha")
            _check_alpha(self.alpha)
        elif self.alpha is not None:
            raise ValueError(f"voting {self.voting.value} takes no alpha")
        for m, w in self.weights.items():
            if m not in self.members or not w >= 0:
                raise ValueError(f"bad weight {w!r} for member {m!r}")

    def weight_vector(self) -> np.ndarray:
        return np.array([float(self.weights.get(m, 1.0)) for m in self.members])


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def round_half_up(x):
    """Nearest label, halves rounded up, clamped to 0..3."""
    return np.clip(np.floor(np.asarray(x, dtype=np.float64) + 0.5), 0, MAX_LABEL)


# -- batch rules -------------------------------------------------------------

def label_vote(labels, kind, weights=None) -> np.ndarray:
    """Label-level voting over axis 0 of an ``(n_models, n)`` label array."""
    kind = Voting(kind)
    labels = np.asarray(labels, dtype=np.float64)
    if labels.ndim == 1:
        labels = labels[:, None]
    if labels.shape[0] == 0:
        raise ValueError("no model outputs to vote on")
    w = np.ones(labels.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    if kind is Voting.MAJORITY:
        onehot = labels[..., None] == CLASS_VALUES
        counts = np.einsum("m,mnc->nc", w, onehot.astype(np.float64))
        return argmax_lowest(counts).astype(np.float64)
    if kind in (Voting.MEAN, Voting.ROUNDED_MEAN):
        if not w.sum() > 0:
            raise ValueError("ensemble weights sum to zero")
        mean = w @ labels / w.sum()
        return round_half_up(mean) if kind is Voting.ROUNDED_MEAN else mean
    if kind is Voting.MEDIAN:
        return np.median(labels, axis=0)
    if kind is Voting.MAX:
        return labels.max(axis=0)
    if kind is Voting.MIN:
        return labels.min(axis=0)
    raise ValueError(f"{kind.value} is not a label-level voting function")


def cs_majority_batch(confidence) -> np.ndarray:
    """Label with the highest summed confidence; ``confidence`` is ``(m, n, 4)``."""
    return argmax_lowest(np.asarray(confidence).sum(axis=0)).astype(np.float64)


def cs_weighted_average_batch(confidence, rounded: bool = False) -> np.ndarray:
    """Each model's predicted label weighted by its confidence in that label."""
    conf = np.asarray(confidence, dtype=np.float64)
    labels = argmax_lowest(conf)
    c = np.take_along_axis(conf, labels[..., None], axis=-1)[..., 0]
    total = c.sum(axis=0)
    if np.any(~(total > 0)):
        raise ValueError("confidence weights sum to zero")
    # clip: c*3/c can land one ulp above 3
    out = np.clip((c * labels).sum(axis=0) / total, 0.0, MAX_LABEL)
    return round_half_up(out) if rounded else out


def rescale_batch(scores, alpha: float) -> np.ndarray:
    """Temperature softmax over classes of the summed, 0.5-centred scores.

    ``scores`` is ``(m, n, 4)``; returns ``(n, 4)`` probabilities.
    """
    _check_alpha(alpha)
    s = np.asarray(scores, dtype=np.float64)
    z = (s - 0.5).sum(axis=0) / alpha
    z -= z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def rescaled_wa_batch(scores, alpha: float, rounded: bool = False) -> np.ndarray:
    probs = rescale_batch(scores, alpha)
    out = np.clip(probs @ CLASS_VALUES, 0.0, MAX_LABEL)
    return round_half_up(out) if rounded else out


def combine(mean_memberships, voting, alpha=None, weights=None,
            rescale_input=RescaleInput.RAW) -> np.ndarray:
    """Ensemble prediction for every instance from ``(m, n, 4)`` mean memberships."""
    voting = Voting(voting)
    mm = np.asarray(mean_memberships, dtype=np.float64)
    if mm.ndim == 2:
        mm = mm[:, None, :]
    if mm.shape[0] == 0:
        raise ValueError("no model outputs to vote on")
    if voting.label_level:
        return label_vote(argmax_lowest(mm), voting, weights)
    if voting.needs_alpha:
        scores = mm if RescaleInput(rescale_input) is RescaleInput.RAW else normalize_confidence(mm)
        return rescaled_wa_batch(scores, alpha, rounded=voting is Voting.RESCALED_WA_ROUNDED)
    conf = normalize_confidence(mm)
    if voting is Voting.CS_MAJORITY:
        return cs_majority_batch(conf)
    return cs_weighted_average_batch(conf, rounded=voting is Voting.CS_WA_ROUNDED)


def ensemble_predict(cfg: EnsembleConfig, mean_memberships: Mapping[str, np.ndarray]) -> np.ndarray:
    mm = np.stack([mean_memberships[m] for m in cfg.members])
    return combine(mm, cfg.voting, cfg.alpha, cfg.weight_vector(), cfg.rescale_input)


# -- single-instance API ----------------------------------------------------

def _labels_of(outputs) -> np.ndarray:
    return np.array([o.predicted_label if isinstance(o, ModelOutput) else o for o in outputs],
                    dtype=np.float64)


def _require(outputs):
    if len(outputs) == 0:
        raise ValueError("no model outputs to vote on")


def vote_labels(outputs: Sequence, kind, weights=None) -> float:
    """Label-level vote over model outputs (or bare labels)."""
    _require(outputs)
    return float(label_vote(_labels_of(outputs), kind, weights)[0])


def cs_majority(outputs: Sequence[ModelOutput]) -> int:
    _require(outputs)
    conf = np.stack([o.confidence for o in outputs])[:, None, :]
    return int(cs_majority_batch(conf)[0])


def cs_weighted_average(outputs: Sequence[ModelOutput], rounded: bool = False) -> float:
    """Predicted labels weighted by each model's confidence in its own label."""
    _require(outputs)
    labels = np.array([o.predicted_label for o in outputs], dtype=np.float64)
    c = np.array([o.confidence[o.predicted_label] for o in outputs], dtype=np.float64)
    if not c.sum() > 0:
        raise ValueError("confidence weights sum to zero")
    out = min(float(MAX_LABEL), float(c @ labels / c.sum()))
    return float(round_half_up(out)) if rounded else out


def _scores(outputs, rescale_input):
    key = "mean_membership" if RescaleInput(rescale_input) is RescaleInput.RAW else "confidence"
    return np.stack([getattr(o, key) for o in outputs])[:, None, :]


def rescale_confidences(outputs: Sequence[ModelOutput], alpha: float,
                        rescale_input=RescaleInput.RAW) -> np.ndarray:
    _require(outputs)
    return rescale_batch(_scores(outputs, rescale_input), alpha)[0]


def rescaled_wa_predict(outputs: Sequence[ModelOutput], alpha: float, rounded: bool = False,
                        rescale_input=RescaleInput.RAW) -> float:
    _require(outputs)
    return float(rescaled_wa_batch(_scores(outputs, rescale_input), alpha, rounded)[0])


# -- tuning ------------------------------------------------------------------

def score_ensemble(cfg: EnsembleConfig, mean_memberships: Mapping[str, np.ndarray], labels,
                   folds: FoldAssignment, digest: str = "") -> ScoreReport:
    """Cross-validated score from out-of-fold member memberships."""
    preds = ensemble_predict(cfg, mean_memberships)
    return ScoreReport.from_folds(fold_scores(labels, preds, folds), digest)


def tune_alpha(members: Sequence[str], mean_memberships: Mapping[str, np.ndarray], labels,
               folds: FoldAssignment, grid: Sequence[float] = DEFAULT_ALPHA_GRID,
               rounded: bool = False, rescale_input=RescaleInput.RAW) -> tuple[float, float]:
    """Grid value maximising cross-validated pcc; ties go to the smaller alpha."""
    if len(grid) == 0:
        raise ValueError("empty alpha grid")
    for a in grid:
        _check_alpha(a)
    voting = Voting.RESCALED_WA_ROUNDED if rounded else Voting.RESCALED_WA
    best_alpha, best = None, -math.inf
    for alpha in sorted(grid):
        cfg = EnsembleConfig(tuple(members), voting, alpha, rescale_input=rescale_input)
        score = score_ensemble(cfg, mean_memberships, labels, folds).mean_pcc
        if best_alpha is None or score > best:
            best_alpha, best = alpha, score
    return best_alpha, best


def candidate_subsets(candidates: Sequence[str]):
    """Non-empty subsets, smallest first, lexicographic within a size."""
    ordered = sorted(candidates)
    for size in range(1, len(ordered) + 1):
        yield from itertools.combinations(ordered, size)


def select_models(candidates: Sequence[str], mean_memberships: Mapping[str, np.ndarray], labels,
                  folds: FoldAssignment, voting=Voting.RESCALED_WA_ROUNDED, alpha=None,
                  rescale_input=RescaleInput.RAW, threads: int = 1) -> tuple[tuple, float]:
    """Exhaustive search for the member subset with the best cross-validated pcc.

    Ties go to the smaller subset, then to the lexicographically first one.
    """
    if not candidates:
        raise ValueError("no candidate models")
    if len(set(candidates)) != len(candidates):
        raise ValueError("candidate models must be distinct")
    if len(candidates) > 16:
        raise ValueError("exhaustive subset search supports at most 16 candidates")
    voting = Voting(voting)
    subsets = list(candidate_subsets(candidates))

    def run(subset):
        cfg = EnsembleConfig(subset, voting, alpha if voting.needs_alpha else None,
                             rescale_input=rescale_input)
        return score_ensemble(cfg, mean_memberships, labels, folds).mean_pcc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(run, subsets))
    else:
        scores = [run(s) for s in subsets]
    best = max(range(len(subsets)), key=lambda i: (scores[i], -i))
    return subsets[best], scores[best]
