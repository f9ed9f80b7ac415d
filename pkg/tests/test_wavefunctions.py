import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import Polynomial
from scipy.special import eval_gegenbauer

import oracles
from pdmsusy import ACTIVE_MODELS, get_model
from pdmsusy.wavefunctions import (
    assemble_psi,
    build_wavefunction,
    integrating_factor_log,
    integrating_factor_quad,
    log_abs_poly,
    overlap,
    phi_n,
    polynomial,
)

pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def _levels(model, p, cap=3):
    count = model.bound_state_count(p)
    return cap if math.isinf(count) else min(cap, int(count))


def test_box_first_polynomial():
    a = 0.5
    P = polynomial(get_model("box").track({"alpha": a}, 2), 1)
    assert np.allclose(P.coef, [0.0, 3 * (1 + a)], rtol=1e-15, atol=0)


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_polynomial_degree_is_level(model):
    p = model.validate({})
    tr = model.track(p, 6)
    for n in range(5):
        assert polynomial(tr, n).degree() == n


def test_phi_n_examples():
    tr = get_model("box").track({"alpha": 0.5}, 3)
    assert phi_n(1, 0, 0.4, tr) == 1.0
    assert phi_n(1, 1, math.pi / 4, tr) == pytest.approx(4.5, rel=1e-15)
    x = np.array([-0.3, 0.2])
    assert np.allclose(phi_n(1, 1, x, tr), 4.5 * np.tan(x), rtol=1e-15)


def test_log_abs_poly_survives_large_arguments():
    P = Polynomial([1.0, 0.0, 2.0])
    logv, sign = log_abs_poly(P, np.array([1e200, -3.0, 0.5]))
    assert logv[0] == pytest.approx(math.log(2) + 400 * math.log(10), rel=1e-15)
    assert logv[1] == pytest.approx(math.log(19.0), rel=1e-15) and np.all(sign == 1)


@pytest.mark.parametrize("n", range(5))
def test_undeformed_box_polynomials_are_gegenbauer(n):
    # at alpha = 0, P_n(tan x) is proportional to C_n^1(sin x) sec^n x
    P = polynomial(get_model("box").track({"alpha": 0.0}, 6), n)
    x = np.linspace(-1.2, 1.2, 10)
    ours = P(np.tan(x))
    ref = eval_gegenbauer(n, 1, np.sin(x)) / np.cos(x) ** n
    k = int(np.argmax(np.abs(ref)))
    scale = ours[k] / ref[k]
    assert np.max(np.abs(ours - scale * ref)) <= 1e-8 * np.max(np.abs(ours))


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_closed_form_integrating_factor_matches_quadrature(model):
    rng = np.random.default_rng(7)
    p = model.validate({})
    d = model.deformation(p)
    lo, hi = model.domain.truncated(4.0)
    x = np.sort(rng.uniform(lo, hi, 50))
    tr = model.track(p, 3)
    for n in range(2):
        anchor = build_wavefunction(tr, n, d).anchor
        ours = integrating_factor_log(tr, n, x, anchor)
        ref = integrating_factor_quad(tr, n, d, x, anchor)
        assert np.max(np.abs(ours - ref) / np.maximum(1.0, np.abs(ref))) <= 1e-9


@pytest.mark.parametrize("model_id", ["box", "trig_pt", "hyperbolic_pt"])
def test_assembled_psi_matches_closed_form(model_id):
    m = get_model(model_id)
    p = m.validate({})
    lo, hi = m.domain.truncated(4.0)
    x = np.linspace(lo, hi, 52)[1:-1]
    for n in range(3):
        wf = build_wavefunction(m.track(p, n + 1), n, m.deformation(p))
        ratio = m.closed_form_wavefunction(p, n, x, wf.P) / wf(x)
        assert np.ptp(ratio) <= 1e-8 * abs(np.mean(ratio))


@pytest.mark.parametrize("n", [0, 1])
def test_box_states_solve_the_deformed_equation(n):
    p = {"alpha": 0.5}
    psi = oracles.closed_form_psi_symbolic("box", p, n)
    E = get_model("box").spectrum(p, n)
    assert oracles.hamiltonian_residual("box", p, n, psi, E, [-1.3, -0.4, 0.1, 0.9, 1.45]) <= 1e-12


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_gates_nodes_and_orthogonality(model):
    p = model.validate({})
    k = _levels(model, p)
    bundles = [assemble_psi(model, p, n) for n in range(k)]
    for n, b in enumerate(bundles):
        assert b.l2_ok and b.hermiticity_ok, (model.id, n)
        assert b.nodes == n
        assert b.norm > 0
    for i in range(k):
        for j in range(i):
            assert abs(overlap(bundles[i], bundles[j])) <= 1e-6


def test_deformed_hyperbolic_fails_hermiticity_only():
    m = get_model("hyperbolic_pt")
    for n in range(4):
        b = assemble_psi(m, {"A": 2.0, "alpha": 0.5}, n)
        assert b.l2_ok and not b.hermiticity_ok
        assert min(b.boundary_values) > 1e-3


def test_undeformed_hyperbolic_sech_states_pass():
    m = get_model("hyperbolic_pt")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m.validate({"A": 2.0, "alpha": 0.0})
    for n in range(2):
        b = assemble_psi(m, {"A": 2.0, "alpha": 0.0}, n)
        assert b.l2_ok and b.hermiticity_ok and b.nodes == n
    ground = assemble_psi(m, {"A": 2.0, "alpha": 0.0}, 0)
    x = ground.x
    ratio = ground.psi / np.cosh(x) ** -2
    assert np.ptp(ratio) <= 1e-10 * abs(ratio[0])


def test_threshold_level_has_flat_tail():
    b = assemble_psi(get_model("hyperbolic_pt"), {"A": 2.0, "alpha": 0.0}, 2)
    assert not b.l2_ok and not b.hermiticity_ok
    assert b.boundary_values == pytest.approx((1.0, 1.0), rel=1e-9)


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_measure_identity(model):
    # int |psi|^2 dx equals the flat-coordinate integral int chi^2 du with chi = sqrt(f) psi
    p = model.validate({})
    if _levels(model, p) == 0:
        pytest.skip("no bound states")
    b = assemble_psi(model, p, 0)
    if b.u_interval is None:
        pytest.skip("finite domain: no change of variable")
    from scipy import integrate

    # exp-type phi overflows past |x| ~ 709; the density is long negligible by then
    lo, hi = max(b.interval[0], -700.0), min(b.interval[1], 700.0)
    # geometric pieces: some tails decay only like a power of x
    mid = 0.5 * (lo + hi) if math.isfinite(lo) and hi - lo < 2.0 else (0.0 if lo < 0.0 else lo + 1.0)
    cuts = [lo] + [mid - 2.0**k for k in range(40, -1, -1) if mid - 2.0**k > lo] + [mid]
    cuts += [mid + 2.0**k for k in range(41) if mid + 2.0**k < hi] + [hi]
    f = lambda t: b.wavefunction(t) ** 2
    direct = sum(integrate.quad(f, a, c, epsabs=0.0, epsrel=1e-12, limit=500)[0] for a, c in zip(cuts, cuts[1:]))
    assert direct == pytest.approx(b.norm, rel=1e-8)


@given(st.floats(1e-9, 1e-5))
def test_box_ground_state_tends_to_cosine(alpha):
    b = assemble_psi(get_model("box"), {"alpha": alpha}, 0)
    ratio = b.psi / np.cos(b.x)
    assert np.ptp(ratio) <= 10 * alpha * abs(ratio[0])


def test_beyond_count_is_allowed_and_formal():
    m = get_model("coulomb")
    p = m.validate({})
    b = assemble_psi(m, p, 3)
    assert not b.l2_ok
    assert b.energy == pytest.approx(m.formal_energy(p, 3), rel=1e-15)
