"""The three translation-shape-invariant superpotential classes.

Every class is described by a base function ``phi`` closed under a
first-order ODE, a superpotential ``W(lam, mu; x)`` built from it, and a
deforming function ``g`` built from primed constants so that ``g W'``
stays inside the class function basis:

=====  ==========================  ===========================  ===============================
class  W                           phi'                         g
=====  ==========================  ===========================  ===============================
1      lam*phi + mu                A phi^2 + B phi + C          (A'phi^2+B'phi+C')/(A phi^2+B phi+C)
2      lam*phi + mu/phi            A phi^2 + B                  (A'phi^2+B')/(A phi^2+B)
3      (lam*phi+mu)/sqrt(Aphi^2+B)  (C phi + D) sqrt(A phi^2+B)  (C'phi+D')/(C phi+D)
=====  ==========================  ===========================  ===============================
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from numpy.polynomial import Polynomial

from .deformation import DeformationSpec, Interval
from .errors import ConstructionError, DomainError

#: Names of the functions each class expands ``W^2``, ``f W'`` and ``V_eff`` in.
#: For class 3 the expansion is of the numerator over ``A phi^2 + B``.
CLASS_BASIS = {
    1: ("phi^2", "phi", "1"),
    2: ("phi^2", "1", "phi^-2"),
    3: ("phi^2", "phi", "1"),
}


@dataclass(frozen=True)
class PhiSpec:
    """Closed-form base function ``phi`` and the constants of its ODE.

    ``dphi`` is an optional analytic derivative in ``x``; when given it is
    used for evaluating ``W'`` (it stays accurate where the ODE right-hand
    side cancels catastrophically, e.g. ``1 - tanh(x)**2`` at large ``x``).
    """

    class_tag: int
    phi: Callable[[np.ndarray], np.ndarray]
    domain: Interval
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0
    dphi: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "phi"

    def __post_init__(self):
        if self.class_tag not in (1, 2, 3):
            raise ConstructionError(f"unknown class {self.class_tag}")

    def rhs(self, y):
        """Right-hand side of the closure ODE as a function of ``phi``."""
        y = np.asarray(y, dtype=float)
        if self.class_tag == 1:
            return self.A * y * y + self.B * y + self.C
        if self.class_tag == 2:
            return self.A * y * y + self.B
        return (self.C * y + self.D) * np.sqrt(self.A * y * y + self.B)

    def rhs_dphi(self, y):
        """d(rhs)/d(phi), needed for phi''."""
        y = np.asarray(y, dtype=float)
        if self.class_tag == 1:
            return 2.0 * self.A * y + self.B
        if self.class_tag == 2:
            return 2.0 * self.A * y
        r = np.sqrt(self.A * y * y + self.B)
        return self.C * r + (self.C * y + self.D) * self.A * y / r

    def radicand(self, y):
        y = np.asarray(y, dtype=float)
        return self.A * y * y + self.B


@dataclass(frozen=True)
class LambdaSet:
    lam: float
    mu: float = 0.0

    def __iter__(self):
        return iter((self.lam, self.mu))


@dataclass(frozen=True)
class PrimedConstants:
    """Deformation constants ``A', B', C', D'`` evaluated at fixed ``alpha``."""

    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.A == self.B == self.C == self.D == 0.0


def barred(phi_spec: PhiSpec, primed: PrimedConstants) -> tuple[float, float, float, float]:
    """Sums ``(A+A', B+B', C+C', D+D')`` that appear once ``f`` multiplies ``phi'``."""
    return (
        phi_spec.A + primed.A,
        phi_spec.B + primed.B,
        phi_spec.C + primed.C,
        phi_spec.D + primed.D,
    )


def _phi_values(spec: PhiSpec, x):
    x = spec.domain.require(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return x, np.asarray(spec.phi(x), dtype=float)


def _out(x, value):
    return float(value) if np.ndim(x) == 0 else np.asarray(value)


def eval_phi(spec: PhiSpec, x):
    _, y = _phi_values(spec, x)
    return _out(x, y)


def eval_phi_prime(spec: PhiSpec, x):
    """``phi'(x)`` from the closure ODE, never from a difference quotient."""
    _, y = _phi_values(spec, x)
    return _out(x, spec.rhs(y))


def _dphi(spec: PhiSpec, x, y):
    if spec.dphi is not None:
        return np.asarray(spec.dphi(x), dtype=float)
    return spec.rhs(y)


def _check_class_point(class_tag: int, spec: PhiSpec, y):
    if class_tag == 2 and np.any(y == 0.0):
        raise DomainError("class-2 superpotential has a pole where phi = 0")
    if class_tag == 3 and np.any(spec.radicand(y) <= 0.0):
        raise DomainError("class-3 radicand A phi^2 + B is not positive")


def W_of_phi(class_tag: int, lam: LambdaSet, spec: PhiSpec, y):
    y = np.asarray(y, dtype=float)
    if class_tag == 1:
        return lam.lam * y + lam.mu
    if class_tag == 2:
        return lam.lam * y + lam.mu / y
    return (lam.lam * y + lam.mu) / np.sqrt(spec.radicand(y))


def dW_dphi(class_tag: int, lam: LambdaSet, spec: PhiSpec, y):
    y = np.asarray(y, dtype=float)
    if class_tag == 1:
        return np.full_like(y, lam.lam)
    if class_tag == 2:
        return lam.lam - lam.mu / (y * y)
    r2 = spec.radicand(y)
    return (lam.lam * spec.B - spec.A * lam.mu * y) / (r2 * np.sqrt(r2))


def eval_W(class_tag: int, lam: LambdaSet, phi_spec: PhiSpec, x):
    """Superpotential of the given class at ``x``."""
    _, y = _phi_values(phi_spec, x)
    _check_class_point(class_tag, phi_spec, y)
    return _out(x, W_of_phi(class_tag, lam, phi_spec, y))


def eval_W_prime(class_tag: int, lam: LambdaSet, phi_spec: PhiSpec, x):
    """``dW/dx`` by the chain rule through ``phi``."""
    xa, y = _phi_values(phi_spec, x)
    _check_class_point(class_tag, phi_spec, y)
    return _out(x, dW_dphi(class_tag, lam, phi_spec, y) * _dphi(phi_spec, xa, y))


# -- deforming function -----------------------------------------------------

def _cancel_common_roots(num: Polynomial, den: Polynomial, tol: float = 1e-10):
    """Divide out linear factors shared by ``num`` and ``den``.

    Keeps ``g`` evaluable where both vanish, e.g. Coulomb
    ``(-alpha phi)/(-phi^2)``.
    """
    num, den = num.trim(), den.trim()
    if den.degree() < 1 or num.degree() < 1:
        return num, den
    for r in den.roots():
        if abs(r.imag) > tol:
            continue
        r = float(r.real)
        scale = max(1.0, float(np.max(np.abs(num.coef))))
        if num.degree() >= 1 and abs(num(r)) <= tol * scale * max(1.0, abs(r)) ** num.degree():
            factor = Polynomial([-r, 1.0])
            num = (num // factor).trim()
            den = (den // factor).trim()
            if num.degree() < 1 or den.degree() < 1:
                break
    return num, den


def deforming_rational_denominator(class_tag: int, phi_spec: PhiSpec) -> Polynomial:
    """Denominator of ``g`` before common factors are cancelled."""
    if class_tag == 1:
        return Polynomial([phi_spec.C, phi_spec.B, phi_spec.A]).trim()
    if class_tag == 2:
        return Polynomial([phi_spec.B, 0.0, phi_spec.A]).trim()
    return Polynomial([phi_spec.D, phi_spec.C]).trim()


def deforming_rational(class_tag: int, phi_spec: PhiSpec, primed: PrimedConstants):
    """Numerator and denominator of ``g`` as polynomials in ``phi``."""
    if class_tag == 1:
        num = Polynomial([primed.C, primed.B, primed.A])
        den = Polynomial([phi_spec.C, phi_spec.B, phi_spec.A])
    elif class_tag == 2:
        num = Polynomial([primed.B, 0.0, primed.A])
        den = Polynomial([phi_spec.B, 0.0, phi_spec.A])
    else:
        num = Polynomial([primed.D, primed.C])
        den = Polynomial([phi_spec.D, phi_spec.C])
    if np.all(den.coef == 0.0):
        raise ConstructionError("denominator of g vanishes identically")
    return _cancel_common_roots(num, den)


def build_deforming(
    class_tag: int,
    phi_spec: PhiSpec,
    primed: PrimedConstants,
    alpha: Mapping[str, float] | None = None,
) -> DeformationSpec:
    """Class-consistent deforming function ``g`` with analytic ``g'``, ``g''``.

    Derivatives follow from ``g = G(phi)``: ``g' = G' phi'`` and
    ``g'' = G'' phi'^2 + G' phi''`` with ``phi'' = rhs'(phi) phi'``.
    """
    if class_tag != phi_spec.class_tag:
        raise ConstructionError("class tag does not match the phi definition")
    num, den = deforming_rational(class_tag, phi_spec, primed)
    lo, hi = phi_spec.domain.truncated(8.0)
    probe = np.linspace(lo, hi, 403)[1:-1]
    with np.errstate(all="ignore"):
        dvals = den(np.asarray(phi_spec.phi(probe), dtype=float))
    finite = dvals[np.isfinite(dvals)]
    if finite.size and (np.any(finite == 0.0) or (finite.min() < 0.0 < finite.max())):
        raise ConstructionError("denominator of g vanishes inside the domain")

    # Classes 1 and 2 divide by phi' itself; with an analytic phi' this
    # avoids the cancellation in e.g. 1 - tanh^2.
    full_den = deforming_rational_denominator(class_tag, phi_spec)
    use_dphi = (class_tag in (1, 2) and phi_spec.dphi is not None
                and full_den.degree() >= 1 and den.degree() == full_den.degree())
    dnum, dden = num.deriv(), den.deriv()
    ddnum, ddden = dnum.deriv(), dden.deriv()

    def den_at(x, y):
        if not use_dphi:
            return den(y)
        return np.asarray(phi_spec.dphi(x), dtype=float) * (den.coef[-1] / full_den.coef[-1])

    def phi_and_prime(x):
        x = np.asarray(x, dtype=float)
        y = np.asarray(phi_spec.phi(x), dtype=float)
        return x, y, _dphi(phi_spec, x, y)

    def g(x):
        x, y, _ = phi_and_prime(x)
        return num(y) / den_at(x, y)

    def g_prime(x):
        x, y, p = phi_and_prime(x)
        d = den_at(x, y)
        return (dnum(y) * d - num(y) * dden(y)) / (d * d) * p

    def g_second(x):
        x, y, p = phi_and_prime(x)
        d = den_at(x, y)
        top = dnum(y) * d - num(y) * dden(y)
        dtop = ddnum(y) * d - num(y) * ddden(y)
        G1 = top / (d * d)
        G2 = (dtop * d - 2.0 * dden(y) * top) / (d ** 3)
        return G2 * p * p + G1 * phi_spec.rhs_dphi(y) * p

    return DeformationSpec(
        g, g_prime, g_second, phi_spec.domain, dict(alpha or {}), name=f"class{class_tag}:{phi_spec.name}"
    )


def deformation_term_coefficients(
    class_tag: int, lam: LambdaSet, phi_spec: PhiSpec, primed: PrimedConstants
) -> tuple[float, float, float]:
    """Coefficients of ``g W'`` in :data:`CLASS_BASIS`.

    This is the property that makes the deformed problem solvable: the
    extra term only contains functions the undeformed problem already has.
    """
    lm, mu = lam.lam, lam.mu
    if class_tag == 1:
        return (lm * primed.A, lm * primed.B, lm * primed.C)
    if class_tag == 2:
        return (lm * primed.A, lm * primed.B - mu * primed.A, -mu * primed.B)
    A, B = phi_spec.A, phi_spec.B
    return (-A * mu * primed.C, lm * B * primed.C - A * mu * primed.D, lm * B * primed.D)


def basis_eval(class_tag: int, coeffs, phi_spec: PhiSpec, y):
    """Evaluate an expansion in :data:`CLASS_BASIS` at ``phi = y``."""
    c0, c1, c2 = coeffs
    y = np.asarray(y, dtype=float)
    if class_tag == 1:
        return c0 * y * y + c1 * y + c2
    if class_tag == 2:
        return c0 * y * y + c1 + c2 / (y * y)
    return (c0 * y * y + c1 * y + c2) / phi_spec.radicand(y)
