"""Cosine similarity rescaled to [0, 1] and exact nearest-neighbour search."""
from __future__ import annotations

import numpy as np


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    aa, bb = float(np.dot(a, a)), float(np.dot(b, b))
    if not (aa > 0 and bb > 0):
        raise ValueError("cosine undefined for a zero-norm vector")
    c = float(np.dot(a, b)) / np.sqrt(aa * bb)
    return min(1.0, max(-1.0, c))


def cos_similarity(a, b) -> float:
    return (1.0 + cosine(a, b)) / 2.0


def normalize_rows(mat) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    norms = np.sqrt(np.einsum("ij,ij->i", mat, mat))
    if np.any(~(norms > 0)):
        raise ValueError("cosine undefined for a zero-norm vector")
    return mat / norms[:, None]


def similarity_matrix(queries, pool, normalized: bool = False) -> np.ndarray:
    """Rescaled cosine similarity of every query row to every pool row."""
    if not normalized:
        queries = normalize_rows(queries)
        pool = normalize_rows(pool)
    sim = queries @ pool.T
    sim += 1.0
    sim *= 0.5
    np.clip(sim, 0.0, 1.0, out=sim)
    return sim


def k_nearest(query, pool, k: int) -> list[tuple[int, float]]:
    """The ``min(k, len(pool))`` most similar pool entries, most similar first.

    ``pool`` is a sequence of ``(index, vector)`` pairs. Equal similarities are
    ordered by index.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(pool) == 0:
        raise ValueError("empty pool")
    indices = np.array([idx for idx, _ in pool])
    sims = similarity_matrix(np.asarray(query, dtype=np.float64),
                             np.array([vec for _, vec in pool], dtype=np.float64))[0]
    order = np.lexsort((indices, -sims))[:k]
    return [(int(indices[j]), float(sims[j])) for j in order]


def knn_batch(queries, pool, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise top-``k`` pool positions and similarities; ties to lower position."""
    sim = similarity_matrix(queries, pool)
    k = min(k, sim.shape[1])
    order = np.argsort(-sim, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(sim, order, axis=1)
