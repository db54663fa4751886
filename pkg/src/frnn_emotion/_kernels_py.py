"""NumPy implementation of the per-class top-k OWA kernel (fallback)."""
import numpy as np


def _top_desc(sim: np.ndarray, p: int) -> np.ndarray:
    m = sim.shape[1]
    if p < m:
        sim = np.partition(sim, m - p, axis=1)[:, m - p:]
    return -np.sort(-sim, axis=1)


def owa_memberships(sim, labels, n_classes, k, upper_w, lower_w):
    """Lower and upper approximation memberships for every query row.

    Same contract as the compiled kernel.
    """
    sim = np.asarray(sim, dtype=np.float64)
    labels = np.asarray(labels)
    if k < 1:
        raise ValueError("k must be >= 1")
    if upper_w.shape[0] <= k or lower_w.shape[0] <= k:
        raise ValueError("weight tables must cover lengths up to k")
    if labels.shape[0] != sim.shape[1]:
        raise ValueError("one label per pool column required")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(f"labels outside 0..{n_classes - 1}")
    q = sim.shape[0]
    lower = np.zeros((q, n_classes))
    upper = np.zeros((q, n_classes))
    for c in range(n_classes):
        inside = labels == c
        p = min(k, int(inside.sum()))
        if p:
            upper[:, c] = _top_desc(sim[:, inside], p) @ upper_w[p, :p]
        p = min(k, int((~inside).sum()))
        if p:
            nearest = _top_desc(sim[:, ~inside], p)
            # 1 - R sorted descending is the reversed similarity order
            lower[:, c] = (1.0 - nearest[:, ::-1]) @ lower_w[p, :p]
    return lower, upper
