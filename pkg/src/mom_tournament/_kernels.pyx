# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled all-pairs tournament kernels.

Mirrors ``_kernels_py`` operation for operation; see that module for the
arithmetic contract. Inner loops run without the GIL so that trials can be
evaluated on worker threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"


cdef double _select(double* a, Py_ssize_t n, Py_ssize_t kth) noexcept nogil:
    # Hoare quickselect; returns the kth smallest, permuting a in place.
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j
    cdef double pivot, tmp
    while lo < hi:
        pivot = a[(lo + hi) // 2]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]; a[i] = a[j]; a[j] = tmp
                i += 1
                j -= 1
        if kth <= j:
            hi = j
        elif kth >= i:
            lo = i
        else:
            break
    return a[kth]


def block_means(values, Py_ssize_t block_size):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t k = v.shape[0] // block_size, j, i
    cdef double s
    out = np.empty(k)
    cdef double[::1] o = out
    with nogil:
        for j in range(k):
            s = 0.0
            for i in range(j * block_size, (j + 1) * block_size):
                s = s + v[i]
            o[j] = s / block_size
    return out


def med_of_means(values, Py_ssize_t block_size):
    cdef double[::1] means = block_means(values, block_size)
    cdef Py_ssize_t k = means.shape[0]
    cdef double res
    with nogil:
        res = _select(&means[0], k, (k - 1) // 2)
    return res


def column_med_of_means(mat, Py_ssize_t block_size):
    cdef const double[:, ::1] m = np.ascontiguousarray(mat, dtype=np.float64)
    cdef Py_ssize_t n = m.shape[0], K = m.shape[1]
    cdef Py_ssize_t k = n // block_size, c, j, i
    cdef double s
    out = np.empty(K)
    cdef double[::1] o = out
    cdef double* buf = <double*> malloc(k * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for c in range(K):
                for j in range(k):
                    s = 0.0
                    for i in range(j * block_size, (j + 1) * block_size):
                        s = s + m[i, c]
                    buf[j] = s / block_size
                o[c] = _select(buf, k, (k - 1) // 2)
    finally:
        free(buf)
    return out


def phi_matrix(pred, Py_ssize_t ell):
    cdef const double[:, ::1] p = np.ascontiguousarray(pred, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], K = p.shape[1]
    cdef Py_ssize_t k = n // ell, a, b, j, i
    cdef double s, med
    out = np.zeros((K, K))
    cdef double[:, ::1] o = out
    cdef double* buf = <double*> malloc(k * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for a in range(K - 1):
                for b in range(a + 1, K):
                    for j in range(k):
                        s = 0.0
                        for i in range(j * ell, (j + 1) * ell):
                            s = s + fabs(p[i, a] - p[i, b])
                        buf[j] = s / ell
                    med = _select(buf, k, (k - 1) // 2)
                    o[a, b] = med
                    o[b, a] = med
    finally:
        free(buf)
    return out


def match_tallies(pred, y, Py_ssize_t block_size, Py_ssize_t n_blocks):
    cdef const double[:, ::1] p = np.ascontiguousarray(pred, dtype=np.float64)
    cdef const double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t K = p.shape[1], n_used = n_blocks * block_size
    cdef Py_ssize_t a, b, j, i
    cdef double s, ra, rb
    loss_arr = np.empty((n_used, K))
    cdef double[:, ::1] loss = loss_arr
    wins = np.zeros((K, K), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] w = wins
    with nogil:
        for i in range(n_used):
            for a in range(K):
                ra = p[i, a] - yy[i]
                loss[i, a] = ra * ra
        for a in range(K - 1):
            for b in range(a + 1, K):
                for j in range(n_blocks):
                    s = 0.0
                    for i in range(j * block_size, (j + 1) * block_size):
                        s = s + (loss[i, b] - loss[i, a])
                    if s > 0:
                        w[a, b] += 1
                    elif s < 0:
                        w[b, a] += 1
    return wins


def home_tallies(pred, y, Py_ssize_t block_size, Py_ssize_t n_blocks, double threshold):
    cdef const double[:, ::1] p = np.ascontiguousarray(pred, dtype=np.float64)
    cdef const double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t K = p.shape[1]
    cdef Py_ssize_t f, h, j, i
    cdef double s, scale = 2.0 / block_size
    cnt = np.zeros((K, K), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] c = cnt
    with nogil:
        for f in range(K):
            for h in range(K):
                if h == f:
                    continue
                for j in range(n_blocks):
                    s = 0.0
                    for i in range(j * block_size, (j + 1) * block_size):
                        s = s + (p[i, h] - p[i, f]) * (p[i, f] - yy[i])
                    if scale * s >= threshold:
                        c[f, h] += 1
    return cnt
