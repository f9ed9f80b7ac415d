"""Pure-Python/numpy fallback for the Sturm kernel.

Counts are vectorized over the bisection midpoints of all requested
eigenvalues at once; the recurrence over matrix rows stays a Python loop.
"""
import numpy as np


def _counts(d, e2, x, pivmin):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = d[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    c = (q < 0.0).astype(np.int64)
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        c += q < 0.0
    return c


def sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues strictly below ``x``."""
    d = np.ascontiguousarray(d, dtype=float)
    e2 = np.ascontiguousarray(e2, dtype=float)
    return int(_counts(d, e2, x, pivmin)[0])


def bisect_eigenvalues(d, e2, kmin, kmax, lo, hi, rtol, atol, pivmin, maxiter=400):
    """Eigenvalues ``kmin .. kmax-1`` (ascending) by simultaneous bisection."""
    d = np.ascontiguousarray(d, dtype=float)
    e2 = np.ascontiguousarray(e2, dtype=float)
    idx = np.arange(kmin, kmax)
    a = np.full(idx.shape, float(lo))
    b = np.full(idx.shape, float(hi))
    for _ in range(maxiter):
        width = b - a
        active = (width > rtol * np.maximum(np.abs(a), np.abs(b))) & (width > atol)
        m = a + 0.5 * width
        active &= (m > a) & (m < b)
        if not active.any():
            break
        c = _counts(d, e2, m[active], pivmin)
        upper = c > idx[active]
        am, bm = a[active], b[active]
        bm[upper] = m[active][upper]
        am[~upper] = m[active][~upper]
        a[active], b[active] = am, bm
    return a + 0.5 * (b - a)
