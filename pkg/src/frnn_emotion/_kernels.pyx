# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-class top-k selection and OWA aggregation.

Each query row is scanned once; a descending buffer of the k largest
similarities is kept per class. The complement of a class is served by
merging the other classes' buffers, since the k largest values of a union
are among the k largest of each part.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _insert(double* buf, Py_ssize_t* cnt, Py_ssize_t k, double v) noexcept nogil:
    cdef Py_ssize_t j = cnt[0]
    if j == k:
        if v <= buf[k - 1]:
            return
        j = k - 1
    else:
        cnt[0] += 1
    while j > 0 and buf[j - 1] < v:
        buf[j] = buf[j - 1]
        j -= 1
    buf[j] = v


cdef void _rows(const double[:, ::1] sim, const long[::1] labels, Py_ssize_t n_classes,
                Py_ssize_t k, const double[:, ::1] upper_w, const double[:, ::1] lower_w,
                double[:, ::1] lower, double[:, ::1] upper,
                double* top, Py_ssize_t* cnt, double* merged, Py_ssize_t* ptr) noexcept nogil:
    cdef Py_ssize_t q = sim.shape[0], n = sim.shape[1]
    cdef Py_ssize_t i, j, c, o, t, p, best
    cdef double acc, v, bv
    for i in range(q):
        for c in range(n_classes):
            cnt[c] = 0
        for j in range(n):
            c = labels[j]
            _insert(top + c * k, cnt + c, k, sim[i, j])
        for c in range(n_classes):
            p = cnt[c]
            acc = 0.0
            for t in range(p):
                acc = acc + upper_w[p, t] * top[c * k + t]
            upper[i, c] = acc
            # k largest similarities outside class c, descending
            for o in range(n_classes):
                ptr[o] = 0
            p = 0
            while p < k:
                best = -1
                bv = 0.0
                for o in range(n_classes):
                    if o == c or ptr[o] >= cnt[o]:
                        continue
                    v = top[o * k + ptr[o]]
                    if best < 0 or v > bv:
                        best = o
                        bv = v
                if best < 0:
                    break
                merged[p] = bv
                ptr[best] += 1
                p += 1
            acc = 0.0
            for t in range(p):
                acc = acc + lower_w[p, t] * (1.0 - merged[p - 1 - t])
            lower[i, c] = acc


def owa_memberships(sim, labels, Py_ssize_t n_classes, Py_ssize_t k, upper_w, lower_w):
    """Lower and upper approximation memberships for every query row.

    ``sim`` is ``(q, n)`` similarities to the training pool, ``labels`` the
    pool classes, ``upper_w``/``lower_w`` weight tables whose row ``p`` holds
    the length-``p`` OWA weights.
    """
    cdef const double[:, ::1] s = np.ascontiguousarray(sim, dtype=np.float64)
    cdef const long[::1] lab = np.ascontiguousarray(labels, dtype=np.int_)
    cdef const double[:, ::1] uw = np.ascontiguousarray(upper_w, dtype=np.float64)
    cdef const double[:, ::1] lw = np.ascontiguousarray(lower_w, dtype=np.float64)
    if k < 1:
        raise ValueError("k must be >= 1")
    if uw.shape[0] <= k or lw.shape[0] <= k:
        raise ValueError("weight tables must cover lengths up to k")
    if lab.shape[0] != s.shape[1]:
        raise ValueError("one label per pool column required")
    lower_np = np.zeros((s.shape[0], n_classes))
    upper_np = np.zeros((s.shape[0], n_classes))
    cdef double[:, ::1] lo = lower_np
    cdef double[:, ::1] up = upper_np
    cdef Py_ssize_t j
    for j in range(lab.shape[0]):
        if lab[j] < 0 or lab[j] >= n_classes:
            raise ValueError(f"label {lab[j]} outside 0..{n_classes - 1}")
    cdef double* top = <double*> malloc(n_classes * k * sizeof(double))
    cdef double* merged = <double*> malloc(k * sizeof(double))
    cdef Py_ssize_t* cnt = <Py_ssize_t*> malloc(n_classes * sizeof(Py_ssize_t))
    cdef Py_ssize_t* ptr = <Py_ssize_t*> malloc(n_classes * sizeof(Py_ssize_t))
    if top == NULL or merged == NULL or cnt == NULL or ptr == NULL:
        free(top); free(merged); free(cnt); free(ptr)
        raise MemoryError()
    try:
        with nogil:
            _rows(s, lab, n_classes, k, uw, lw, lo, up, top, cnt, merged, ptr)
    finally:
        free(top); free(merged); free(cnt); free(ptr)
    return lower_np, upper_np
