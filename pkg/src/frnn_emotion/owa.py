"""Ordered weighted averaging: weight families and aggregation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class OwaScheme(str, Enum):
    STRICT = "strict"
    EXP = "exp"
    ADD = "add"
    INVADD = "invadd"
    MEAN = "mean"


class Bound(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class OwaWeights:
    weights: np.ndarray
    bound: Bound
    scheme: OwaScheme

    def __len__(self):
        return len(self.weights)


def _upper_weights(scheme: OwaScheme, p: int) -> np.ndarray:
    i = np.arange(1, p + 1, dtype=np.float64)
    if scheme is OwaScheme.STRICT:
        w = np.zeros(p)
        w[0] = 1.0
        return w
    if scheme is OwaScheme.EXP:
        # 2^(p-i) / (2^p - 1), rewritten so large p does not overflow
        return np.exp2(-i) / -math.expm1(-p * math.log(2.0))
    if scheme is OwaScheme.ADD:
        return 2.0 * (p + 1 - i) / (p * (p + 1))
    if scheme is OwaScheme.INVADD:
        harmonic = np.sum(1.0 / i)
        return 1.0 / (i * harmonic)
    if scheme is OwaScheme.MEAN:
        return np.full(p, 1.0 / p)
    raise ValueError(f"unknown OWA scheme {scheme!r}")


def make_weights(scheme, bound, p: int) -> OwaWeights:
    """Weight vector of length ``p``.

    Upper weights are non-increasing (emphasis on the largest values), lower
    weights are their reverse.
    """
    scheme, bound = OwaScheme(scheme), Bound(bound)
    if p < 1:
        raise ValueError(f"OWA weight length must be >= 1, got {p}")
    w = _upper_weights(scheme, p)
    if bound is Bound.LOWER:
        w = w[::-1].copy()
    w.setflags(write=False)
    return OwaWeights(w, bound, scheme)


def weight_table(scheme, bound, kmax: int) -> np.ndarray:
    """Row ``p`` holds the length-``p`` weights, zero padded to ``kmax``."""
    table = np.zeros((kmax + 1, kmax))
    for p in range(1, kmax + 1):
        table[p, :p] = make_weights(scheme, bound, p).weights
    return table


def owa_aggregate(values, weights) -> float:
    """Sum of ``w_i`` times the i-th largest value."""
    w = weights.weights if isinstance(weights, OwaWeights) else np.asarray(weights, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size != w.size:
        raise ValueError(f"{v.size} values for {w.size} weights")
    return float(np.dot(w, np.sort(v)[::-1]))


def default_k(n: int) -> int:
    """sqrt(n)/2 rounded half away from zero, at least 1."""
    if n < 1:
        raise ValueError("dataset size must be positive")
    return max(1, math.floor(math.sqrt(n) / 2 + 0.5))
