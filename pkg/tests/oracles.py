"""Slow, independent reference implementations used by the tests.

Nothing here imports frnn_emotion. Everything is plain Python loops over
lists so that a bug in the vectorised code cannot hide in a shared helper.
"""
import math
from fractions import Fraction
from functools import lru_cache

N_CLASSES = 4


def cosine(a, b):
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    return dot / (na * nb)


def rescaled_similarity(a, b):
    r = (1.0 + cosine(a, b)) / 2.0
    return min(1.0, max(0.0, r))


def _harmonic(p):
    return sum(Fraction(1, i) for i in range(1, p + 1))


@lru_cache(maxsize=None)
def owa_weights(scheme, bound, p):
    """Weights written out position by position for each bound.

    The lower vectors are typed in directly rather than obtained by
    reversing the upper ones, so the reversal property is actually tested.
    """
    out = []
    for i in range(1, p + 1):
        j = i if bound == "upper" else p + 1 - i   # rank from the large end
        if scheme == "strict":
            w = Fraction(1 if j == 1 else 0)
        elif scheme == "mean":
            w = Fraction(1, p)
        elif scheme == "add":
            w = Fraction(2 * (p + 1 - j), p * (p + 1))
        elif scheme == "invadd":
            w = Fraction(1, j) / _harmonic(p)
        elif scheme == "exp":
            w = Fraction(2 ** (p - j), 2 ** p - 1)
        else:
            raise ValueError(scheme)
        out.append(w)
    return tuple(out)


def owa(values, scheme, bound):
    vals = sorted(values, reverse=True)
    w = owa_weights(scheme, bound, len(vals))
    return math.fsum(float(wi) * v for wi, v in zip(w, vals))


def _owa_exact(values, scheme, bound):
    vals = sorted(values, reverse=True)
    return sum((w * v for w, v in zip(owa_weights(scheme, bound, len(vals)), vals)), Fraction(0))


def memberships_from_sims(sims, labels, k, lower_scheme, upper_scheme):
    """Exact (Fraction) lower and upper memberships from one query's similarities.

    Float similarities are exact rationals, so everything after them is done
    without rounding and ties between classes are real ties.
    """
    return (class_memberships(sims, labels, k, lower_scheme, "lower"),
            class_memberships(sims, labels, k, upper_scheme, "upper"))


def class_memberships(sims, labels, k, scheme, bound):
    """One bound's exact memberships for all classes."""
    sims = [Fraction(s) for s in sims]
    out = []
    for c in range(N_CLASSES):
        if bound == "upper":
            inside = sorted((s for s, lab in zip(sims, labels) if lab == c), reverse=True)
            out.append(_owa_exact(inside[:k], scheme, "upper"))
        else:
            outside = sorted((s for s, lab in zip(sims, labels) if lab != c), reverse=True)
            out.append(_owa_exact([1 - s for s in outside[:k]], scheme, "lower"))
    return out


def argmax_first(values):
    best = 0
    for c in range(1, len(values)):
        if values[c] > values[best]:
            best = c
    return best


def frnn_memberships(train_x, train_y, y, k, lower_scheme, upper_scheme):
    """(lower, upper) float lists for query y, straight from the definitions."""
    sims = [rescaled_similarity(x, y) for x in train_x]
    lower, upper = memberships_from_sims(sims, train_y, k, lower_scheme, upper_scheme)
    return [float(v) for v in lower], [float(v) for v in upper]


def frnn_predict(train_x, train_y, y, k, lower_scheme, upper_scheme):
    sims = [rescaled_similarity(x, y) for x in train_x]
    lower, upper = memberships_from_sims(sims, train_y, k, lower_scheme, upper_scheme)
    return argmax_first([lo + up for lo, up in zip(lower, upper)])


def pcc(x, y):
    """Textbook two-pass Pearson correlation."""
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def softmax_rescale(score_rows, alpha):
    """score_rows: one list of 4 class scores per model."""
    z = [math.fsum(row[i] - 0.5 for row in score_rows) / alpha for i in range(N_CLASSES)]
    top = max(z)
    e = [math.exp(v - top) for v in z]
    t = math.fsum(e)
    return [v / t for v in e]


def rescaled_wa(score_rows, alpha, rounded=False):
    c = softmax_rescale(score_rows, alpha)
    v = math.fsum(i * ci for i, ci in enumerate(c))
    if rounded:
        v = float(min(3, max(0, math.floor(v + 0.5))))
    return v


def cv_score(truth, predictions, fold_of, n_folds=5):
    """Mean per-fold pcc; a constant fold gives -inf."""
    scores = []
    for f in range(n_folds):
        t = [truth[i] for i in range(len(truth)) if fold_of[i] == f]
        p = [predictions[i] for i in range(len(truth)) if fold_of[i] == f]
        if len(set(t)) < 2 or len(set(p)) < 2:
            return -math.inf
        scores.append(pcc(t, p))
    return math.fsum(scores) / n_folds
