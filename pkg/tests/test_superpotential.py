import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles
from pdmsusy import ACTIVE_MODELS, get_model
from pdmsusy.deformation import Interval
from pdmsusy.errors import ConstructionError, DomainError
from pdmsusy.superpotential import (
    LambdaSet,
    PhiSpec,
    PrimedConstants,
    basis_eval,
    build_deforming,
    deformation_term_coefficients,
    eval_phi,
    eval_phi_prime,
    eval_W,
    eval_W_prime,
)

HALF = Interval(-math.pi / 2, math.pi / 2)
LINE = Interval(-math.inf, math.inf)
TAN = PhiSpec(1, np.tan, HALF, A=1.0, B=0.0, C=1.0, name="tan")
TANH = PhiSpec(1, np.tanh, LINE, A=-1.0, B=0.0, C=1.0, name="tanh")
LINEAR2 = PhiSpec(2, lambda x: np.asarray(x, dtype=float), Interval(0, math.inf), A=0.0, B=1.0, name="x")


def test_phi_examples():
    assert eval_phi(TAN, 0.0) == 0.0
    assert eval_phi_prime(TAN, math.pi / 4) == pytest.approx(2.0, rel=1e-15)
    assert np.all(eval_phi_prime(LINEAR2, np.array([0.5, 2.0, 7.0])) == 1.0)


def test_superpotential_examples():
    assert eval_W(1, LambdaSet(2.0, 0.0), TAN, math.pi / 4) == pytest.approx(2.0, rel=1e-15)
    assert np.all(eval_W(1, LambdaSet(0.0, 0.0), TAN, np.linspace(-1, 1, 7)) == 0.0)
    assert eval_W(2, LambdaSet(1.0, -1.0), LINEAR2, 2.0) == pytest.approx(1.5, rel=1e-15)


def test_superpotential_derivative_examples():
    assert eval_W_prime(1, LambdaSet(1.0, 0.0), TAN, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert np.all(eval_W_prime(1, LambdaSet(0.0, 0.3), TAN, np.linspace(-1, 1, 7)) == 0.0)
    assert eval_W_prime(2, LambdaSet(1.0, -1.0), LINEAR2, 2.0) == pytest.approx(1.25, rel=1e-15)


def test_class2_pole_is_an_error():
    spec = PhiSpec(2, lambda x: np.asarray(x, dtype=float), LINE, A=0.0, B=1.0)
    with pytest.raises(DomainError):
        eval_W(2, LambdaSet(1.0, 1.0), spec, 0.0)


@given(st.floats(-1.5, 1.5))
def test_derivative_is_not_a_difference_quotient(x):
    lam = LambdaSet(1.3, -0.4)
    h = 1e-6
    fd = (eval_W(1, lam, TAN, x + h) - eval_W(1, lam, TAN, x - h)) / (2 * h)
    assert eval_W_prime(1, lam, TAN, x) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_build_deforming_examples():
    x = np.linspace(-1.5, 1.5, 101)
    g = build_deforming(1, TAN, PrimedConstants(A=0.4), {"alpha": 0.4}).g(x)
    assert np.max(np.abs(g - 0.4 * np.sin(x) ** 2)) <= 1e-12
    g = build_deforming(1, TANH, PrimedConstants(A=0.3)).g(np.linspace(-5, 5, 101))
    xs = np.linspace(-5, 5, 101)
    assert np.max(np.abs(g - 0.3 * np.sinh(xs) ** 2) / np.maximum(1.0, 0.3 * np.sinh(xs) ** 2)) <= 1e-12
    assert np.all(build_deforming(1, TAN, PrimedConstants()).g(x) == 0.0)


def test_build_deforming_rejects_mismatched_class():
    with pytest.raises(ConstructionError):
        build_deforming(2, TAN, PrimedConstants(A=0.1))


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_phi_ode_residual(model):
    for p in oracles.SWEEPS[model.id]:
        spec = model.binding(p).phi
        lo, hi = model.domain.truncated(8.0)
        x = np.linspace(lo, hi, 1002)[1:-1]
        y = np.asarray(spec.phi(x), dtype=float)
        if spec.dphi is not None:
            dphi = np.asarray(spec.dphi(x), dtype=float)
        else:  # complex-step derivative, exact to rounding
            dphi = np.imag(spec.phi(x + 1e-30j)) / 1e-30
        rhs = spec.rhs(y)
        assert np.max(np.abs(dphi - rhs) / np.maximum(1.0, np.abs(rhs))) <= 1e-12


@pytest.mark.parametrize("model", ACTIVE_MODELS, ids=lambda m: m.id)
def test_class_deforming_function_matches_model(model):
    for p in oracles.SWEEPS[model.id]:
        b = model.binding(p)
        built = build_deforming(b.class_tag, b.phi, b.primed)
        stated = model.deformation(p)
        lo, hi = model.domain.truncated(8.0)
        x = np.linspace(lo, hi, 1002)[1:-1]
        # derivatives go through phi' and phi'', which lose a few digits next to poles of phi
        pairs = ((built.g, stated.g, 1e-12), (built.g_prime, stated.g_prime, 1e-10), (built.g_second, stated.g_second, 1e-10))
        for ours, ref, tol in pairs:
            r = ref(x)
            assert np.max(np.abs(ours(x) - r) / np.maximum(1.0, np.abs(r))) <= tol


Y = sp.Symbol("y")


def _symbolic_gwp(class_tag, c, pr, lam, mu):
    """Expansion of g W' (times y^2 for class 2, times the radicand for class 3) as a polynomial in y."""
    A, B, C, D = c
    Ap, Bp, Cp, Dp = pr
    if class_tag == 1:
        g = (Ap * Y**2 + Bp * Y + Cp) / (A * Y**2 + B * Y + C)
        wp = lam * (A * Y**2 + B * Y + C)
        return sp.Poly(sp.cancel(g * wp), Y), (2, 1, 0)
    if class_tag == 2:
        g = (Ap * Y**2 + Bp) / (A * Y**2 + B)
        wp = sp.diff(lam * Y + mu / Y, Y) * (A * Y**2 + B)
        return sp.Poly(sp.cancel(g * wp * Y**2), Y), (4, 2, 0)
    rad = A * Y**2 + B
    g = (Cp * Y + Dp) / (C * Y + D)
    wp = sp.diff((lam * Y + mu) / sp.sqrt(rad), Y) * (C * Y + D) * sp.sqrt(rad)
    return sp.Poly(sp.cancel(sp.simplify(g * wp * rad)), Y), (2, 1, 0)


small = st.integers(-4, 4).filter(lambda v: v != 0)


@given(st.sampled_from([1, 2, 3]), st.tuples(small, small, small, small), st.tuples(small, small, small, small),
       small, small)
def test_deformation_term_stays_in_class_basis(class_tag, consts, primed, lam, mu):
    poly, powers = _symbolic_gwp(class_tag, consts, primed, sp.Integer(lam), sp.Integer(mu))
    expected = [float(poly.coeff_monomial(Y**k)) for k in powers]
    assert poly.degree() <= powers[0]
    spec = PhiSpec(class_tag, np.tan, HALF, *map(float, consts))
    ours = deformation_term_coefficients(class_tag, LambdaSet(lam, mu), spec, PrimedConstants(*map(float, primed)))
    assert np.allclose(ours, expected, rtol=0, atol=1e-12)


@given(st.floats(0.2, 1.2))
def test_basis_evaluation_reproduces_product(x):
    model = get_model("scarf1")
    p = model.validate({})
    b = model.binding(p)
    lam = LambdaSet(1.7, -0.6)
    coeffs = deformation_term_coefficients(3, lam, b.phi, b.primed)
    y = float(b.phi.phi(np.array([x]))[0])
    g = float(model.deformation(p).g(np.array([x]))[0])
    direct = g * eval_W_prime(3, lam, b.phi, x)
    assert float(basis_eval(3, coeffs, b.phi, y)) == pytest.approx(direct, rel=1e-12, abs=1e-12)
