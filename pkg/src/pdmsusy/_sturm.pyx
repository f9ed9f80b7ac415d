# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Sturm-sequence counting and bisection for symmetric tridiagonal matrices."""
import numpy as np

from libc.math cimport fabs


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2, double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t i, n = d.shape[0], c = 0
    cdef double q = d[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        c += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            c += 1
    return c


def sturm_count(d, e2, double x, double pivmin):
    """Number of eigenvalues strictly below ``x``."""
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(e2, dtype=np.float64)
    return int(_count(dv, ev, x, pivmin))


def bisect_eigenvalues(d, e2, Py_ssize_t kmin, Py_ssize_t kmax, double lo, double hi,
                       double rtol, double atol, double pivmin, int maxiter=400):
    """Eigenvalues ``kmin .. kmax-1`` (ascending) by bisection on Sturm counts."""
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(e2, dtype=np.float64)
    cdef Py_ssize_t j, it
    cdef double a, b, m, width
    out = np.empty(kmax - kmin, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for j in range(kmin, kmax):
            a = lo
            b = hi
            for it in range(maxiter):
                width = b - a
                if width <= rtol * (fabs(a) if fabs(a) > fabs(b) else fabs(b)) or width <= atol:
                    break
                m = a + 0.5 * width
                if m <= a or m >= b:
                    break
                if _count(dv, ev, m, pivmin) > j:
                    b = m
                else:
                    a = m
            ov[j - kmin] = a + 0.5 * (b - a)
            # eigenvalue j+1 is >= eigenvalue j
            lo = a
    return out
