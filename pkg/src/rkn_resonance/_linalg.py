"""Batched dense LU solves and 2x2 helpers.

Everything here operates on stacks of small matrices so that charts can be
evaluated without a Python loop per cell. Results for a given matrix do not
depend on the batch it was computed in.
"""

import numpy as np

# Pivot magnitude below this fraction of its source row's max-norm counts as singular.
# Row-relative rather than matrix-relative: a badly scaled triangular matrix
# such as I + h^2*abar for an explicit method is never flagged.
PIVOT_RTOL = 1e-14


def lu_solve_batched(a, rhs):
    """Solve ``a[k] @ x[k] = rhs[k]`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    a : array, shape (N, s, s)
    rhs : array, shape (N, s, m)

    Returns
    -------
    x : array, shape (N, s, m)
    singular : bool array, shape (N,)
        True where some pivot fell below ``PIVOT_RTOL`` times the max-norm of
        the row of ``a[k]`` it came from. Solutions for those entries are
        garbage.
    """
    a = np.array(a, dtype=np.result_type(a, rhs, float), copy=True)
    b = np.array(rhs, dtype=a.dtype, copy=True)
    n, s, _ = a.shape
    rows = np.arange(n)
    scale = np.abs(a).max(axis=2)
    singular = np.zeros(n, dtype=bool)
    for k in range(s):
        piv = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = piv != k
        if swap.any():
            idx = rows[swap]
            pk = piv[swap]
            tmp = a[idx, k, :].copy()
            a[idx, k, :] = a[idx, pk, :]
            a[idx, pk, :] = tmp
            tmp = b[idx, k, :].copy()
            b[idx, k, :] = b[idx, pk, :]
            b[idx, pk, :] = tmp
            tmp = scale[idx, k].copy()
            scale[idx, k] = scale[idx, pk]
            scale[idx, pk] = tmp
        pivot = a[:, k, k]
        bad = np.abs(pivot) <= PIVOT_RTOL * scale[:, k]
        singular |= bad
        pivot = np.where(bad, 1.0, pivot)
        for i in range(k + 1, s):
            f = a[:, i, k] / pivot
            a[:, i, k:] -= f[:, None] * a[:, k, k:]
            b[:, i, :] -= f[:, None] * b[:, k, :]
    diag = np.where(singular[:, None], 1.0, a[:, np.arange(s), np.arange(s)])
    x = np.empty_like(b)
    for i in range(s - 1, -1, -1):
        acc = b[:, i, :].copy()
        for j in range(i + 1, s):
            acc -= a[:, i, j][:, None] * x[:, j, :]
        x[:, i, :] = acc / diag[:, i][:, None]
    return x, singular


def matmul2(a, b):
    """Product of stacks of 2x2 matrices, written out entrywise."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out


def trace2(m):
    return m[..., 0, 0] + m[..., 1, 1]


def det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def spectral_radius2(m):
    """Largest eigenvalue modulus of a (stack of) real 2x2 matrices."""
    half_tr = 0.5 * trace2(m)
    det = det2(m)
    disc = half_tr * half_tr - det
    root = np.sqrt(np.abs(disc))
    real_case = np.maximum(np.abs(half_tr + root), np.abs(half_tr - root))
    complex_case = np.sqrt(np.abs(det))
    return np.where(disc >= 0, real_case, complex_case)
