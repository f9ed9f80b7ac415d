import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from pdmsusy import sturm

BACKENDS = sorted(sturm.BACKENDS)


def _random_system(seed, n):
    rng = np.random.default_rng(seed)
    return rng.normal(size=n) * 3.0, rng.normal(size=n - 1)


def test_compiled_backend_is_built():
    assert "cython" in sturm.BACKENDS and sturm.BACKEND == "cython"


@pytest.mark.parametrize("backend", BACKENDS)
def test_two_by_two(backend):
    impl = sturm.BACKENDS[backend]
    d, e = np.array([2.0, 2.0]), np.array([-1.0])
    vals = impl.bisect_eigenvalues(d, e**2, 0, 2, 0.0, 4.0, 1e-15, 1e-15, 1e-300)
    assert np.allclose(vals, [1.0, 3.0], rtol=0, atol=1e-14)
    assert [impl.sturm_count(d, e**2, x, 1e-300) for x in (0.5, 2.0, 3.5)] == [0, 1, 2]


@pytest.mark.parametrize("backend", BACKENDS)
@given(st.integers(0, 10_000), st.integers(2, 60))
def test_counts_match_lapack(backend, seed, n):
    d, e = _random_system(seed, n)
    ref = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    impl = sturm.BACKENDS[backend]
    for x in np.linspace(ref[0] - 1, ref[-1] + 1, 9):
        assert impl.sturm_count(d, e**2, float(x), 1e-300) == int(np.sum(ref < x))


@pytest.mark.parametrize("backend", BACKENDS)
def test_bisection_matches_lapack(backend):
    d, e = _random_system(3, 400)
    impl = sturm.BACKENDS[backend]
    lo = float(np.min(d) - 2 * np.max(np.abs(e)) - 1)
    hi = float(np.max(d) + 2 * np.max(np.abs(e)) + 1)
    ours = impl.bisect_eigenvalues(d, e**2, 3, 12, lo, hi, 1e-14, 1e-14, 1e-300)
    ref = oracles.tridiagonal_eigenvalues(d, e, 12)[3:]
    assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend available")
    d, e = _random_system(11, 1000)
    args = (d, e**2, 0, 20, -30.0, 30.0, 1e-14, 1e-14, 1e-300)
    a, b = (np.asarray(sturm.BACKENDS[k].bisect_eigenvalues(*args)) for k in BACKENDS)
    assert np.max(np.abs(a - b)) <= 1e-12
