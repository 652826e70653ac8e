"""NumPy implementation of the all-pairs tournament kernels.

Used when the compiled extension is unavailable. Both implementations follow
the same arithmetic: per-block sums are accumulated sequentially in index
order (``np.cumsum`` is strictly sequential), block statistics are formed as
``sum / m`` or ``(2 / m) * sum``, and medians take the lower middle order
statistic. The two backends therefore agree bit for bit.

All ``pred`` arguments are ``n x K`` prediction matrices (one column per
candidate) restricted to the rows that the partition uses.
"""

import numpy as np

BACKEND = "python"


def _block_sums(v, block_size, n_blocks):
    # v: (n_blocks*block_size, ...) -> (n_blocks, ...)
    shaped = v[: n_blocks * block_size].reshape((n_blocks, block_size) + v.shape[1:])
    return np.cumsum(shaped, axis=1)[:, -1]


def _lower_median(a, axis=0):
    k = a.shape[axis]
    mid = (k - 1) // 2
    return np.take(np.partition(a, mid, axis=axis), mid, axis=axis)


def block_means(values, block_size):
    values = np.ascontiguousarray(values, dtype=np.float64)
    n_blocks = values.shape[0] // block_size
    return _block_sums(values, block_size, n_blocks) / block_size


def med_of_means(values, block_size):
    return float(_lower_median(block_means(values, block_size)))


def column_med_of_means(mat, block_size):
    """Med_ell of every column of ``mat``."""
    mat = np.ascontiguousarray(mat, dtype=np.float64)
    n_blocks = mat.shape[0] // block_size
    means = _block_sums(mat, block_size, n_blocks) / block_size
    return _lower_median(means, axis=0)


def phi_matrix(pred, ell):
    """``out[a, b] = Med_ell(|pred[:, a] - pred[:, b]|)``."""
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    n, K = pred.shape
    k = n // ell
    out = np.zeros((K, K))
    for a in range(K - 1):
        v = np.abs(pred[: k * ell, a : a + 1] - pred[: k * ell, a + 1 :])
        means = _block_sums(v, ell, k) / ell
        row = _lower_median(means, axis=0)
        out[a, a + 1 :] = row
        out[a + 1 :, a] = row
    return out


def match_tallies(pred, y, block_size, n_blocks):
    """``wins[a, b]`` = blocks on which ``a`` has strictly smaller squared loss.

    The per-block statistic is ``sum_i (loss_b - loss_a)`` over the block,
    i.e. ``m * B_{b,a}(j)``; ``a`` takes the block when it is positive.
    """
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n_used = n_blocks * block_size
    K = pred.shape[1]
    res = pred[:n_used] - y[:n_used, None]
    loss = res * res
    wins = np.zeros((K, K), dtype=np.int64)
    for a in range(K - 1):
        diff = loss[:, a + 1 :] - loss[:, a : a + 1]  # loss_b - loss_a
        s = _block_sums(diff, block_size, n_blocks)
        wins[a, a + 1 :] = np.count_nonzero(s > 0, axis=0)
        wins[a + 1 :, a] = np.count_nonzero(s < 0, axis=0)
    return wins


def home_tallies(pred, y, block_size, n_blocks, threshold):
    """``cnt[f, h]`` = blocks with ``(2/m) sum (p_h - p_f)(p_f - y) >= threshold``."""
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n_used = n_blocks * block_size
    K = pred.shape[1]
    p = pred[:n_used]
    scale = 2.0 / block_size
    cnt = np.zeros((K, K), dtype=np.int64)
    for f in range(K):
        resid = p[:, f : f + 1] - y[:n_used, None]
        prod = (p - p[:, f : f + 1]) * resid
        stat = scale * _block_sums(prod, block_size, n_blocks)
        cnt[f] = np.count_nonzero(stat >= threshold, axis=0)
        cnt[f, f] = 0
    return cnt
