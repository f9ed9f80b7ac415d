"""Bound-state wavefunctions from the shape-invariance track.

The ladder ``psi_n = A+(lam_0) ... A+(lam_{n-1}) psi_0(lam_n)`` gives

    psi_n = f^{-1/2} phi_n exp(-int W(lam_n)/f dx),
    phi_{n+1}(lam) = -f phi_n'(lam_1) + [W(lam_{n+1}) + W(lam)] phi_n(lam_1),

where ``lam_k`` is the k-th entry of the track started at ``lam``.  In the
class variable ``phi_n`` is a polynomial ``P_n`` times a fixed prefactor:

=====  ============  ===============================
class  y             phi_n
=====  ============  ===============================
1      phi           P_n(y)
2      phi^-2        phi^n P_n(y)
3      phi           (A phi^2 + B)^{-n/2} P_n(y)
=====  ============  ===============================

``int W/f dx`` is a rational integral in ``phi`` and is done in closed form
by partial fractions; an adaptive-quadrature oracle is kept alongside.
Everything is evaluated in log space so that the factors may individually
overflow without harm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .deformation import DeformationSpec
from .errors import ConstructionError, InconclusiveLimitError, QuadratureError, TransformSingularityError
from .si_engine import SIParameterTrack
from .superpotential import LambdaSet, PhiSpec, W_of_phi

HERMITICITY_TOL = 1e-8
TAIL_FRACTION = 1e-14


# -- polynomial recurrence ----------------------------------------------------------

def _poly(*coef) -> Polynomial:
    return Polynomial(np.asarray(coef, dtype=float))


def poly_step(
    class_tag: int,
    n: int,
    P_shifted: Polynomial,
    lam: LambdaSet,
    lam_top: LambdaSet,
    phi_spec: PhiSpec,
    barred_constants,
) -> Polynomial:
    """``P_{n+1}`` at ``lam`` from ``P_n`` at the shifted parameters ``lam_1``.

    ``lam_top`` is ``lam_{n+1}`` counted from ``lam``; ``barred_constants``
    are ``(A+A', B+B', C+C', D+D')``.
    """
    Ab, Bb, Cb, Db = barred_constants
    P = Polynomial(P_shifted.coef)
    dP = P.deriv()
    lsum, msum = lam_top.lam + lam.lam, lam_top.mu + lam.mu
    if class_tag == 1:
        out = -_poly(Cb, Bb, Ab) * dP + _poly(msum, lsum) * P
    elif class_tag == 2:
        out = _poly(0.0, 2 * Ab, 2 * Bb) * dP + _poly(lsum - n * Ab, msum - n * Bb) * P
    elif class_tag == 3:
        A, B = phi_spec.A, phi_spec.B
        out = _poly(Db, Cb) * (-_poly(B, 0.0, A) * dP + _poly(0.0, n * A) * P) + _poly(msum, lsum) * P
    else:
        raise ConstructionError(f"unknown class {class_tag}")
    out = out.trim(tol=0.0)
    if out.degree() != n + 1 or out.coef[-1] == 0.0:
        raise ConstructionError(f"recurrence produced degree {out.degree()}, expected {n + 1}")
    return out


def poly_table(track: SIParameterTrack, n: int) -> list[list[Polynomial]]:
    """``table[k][m] = P_m`` at ``lam_k`` for ``k + m <= n``.

    The recurrence only needs the track from ``lam_0`` to ``lam_n``, since
    each step is autonomous in the parameters.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if len(track) < n + 1:
        raise ValueError(f"track of length {len(track)} is too short for level {n}")
    tag = track.binding.class_tag
    bars = track.binding.barred
    lams = track.lambda_seq
    table = [[Polynomial([1.0])] for _ in range(n + 1)]
    for m in range(n):  # build P_{m+1}^{(k)} from P_m^{(k+1)}
        for k in range(n - m):
            table[k].append(poly_step(tag, m, table[k + 1][m], lams[k], lams[k + m + 1], track.binding.phi, bars))
    return table


def polynomial(track: SIParameterTrack, n: int) -> Polynomial:
    """``P_n`` at the track's starting parameters."""
    return poly_table(track, n)[0][n]


def _phi_values(phi_spec: PhiSpec, x):
    with np.errstate(all="ignore"):
        return np.asarray(phi_spec.phi(np.asarray(x, dtype=float)), dtype=float)


def transform_variable(class_tag: int, phi_spec: PhiSpec, x):
    """The polynomial variable ``y`` at ``x``."""
    p = _phi_values(phi_spec, x)
    if class_tag == 2:
        if np.any(p == 0.0):
            raise TransformSingularityError("y = phi^-2 is singular where phi = 0")
        return 1.0 / (p * p)
    if class_tag == 3 and np.any(phi_spec.radicand(p) < 0.0):
        raise TransformSingularityError("A phi^2 + B must be positive")
    return p


def log_abs_poly(P: Polynomial, y):
    """``(log|P(y)|, sign P(y))`` without overflow for large ``|y|``."""
    y = np.asarray(y, dtype=float)
    c = P.coef
    deg = c.size - 1
    big = np.abs(y) > 1.0
    with np.errstate(all="ignore"):
        small_val = np.polynomial.polynomial.polyval(np.where(big, 0.0, y), c)
        z = np.where(big, 1.0 / y, 0.0)
        rev = np.polynomial.polynomial.polyval(z, c[::-1])  # P(y) / y^deg
        big_log = np.log(np.abs(rev)) + deg * np.log(np.abs(np.where(big, y, 1.0)))
        big_sign = np.sign(rev) * np.sign(np.where(big, y, 1.0)) ** deg
        logv = np.where(big, big_log, np.log(np.abs(small_val)))
        sign = np.where(big, big_sign, np.sign(small_val))
    return logv, sign


def log_phi_n(class_tag: int, n: int, P: Polynomial, phi_spec: PhiSpec, x):
    """``(log|phi_n|, sign phi_n)`` at ``x``."""
    p = _phi_values(phi_spec, x)
    y = transform_variable(class_tag, phi_spec, x)
    logv, sign = log_abs_poly(P, y)
    with np.errstate(divide="ignore"):
        if class_tag == 2:
            logv = logv + n * np.log(np.abs(p))
            sign = sign * np.sign(p) ** n
        elif class_tag == 3:
            if phi_spec.dphi is not None:
                rad = _ode_factor_value(3, phi_spec, np.asarray(x, dtype=float), p)
            else:
                rad = phi_spec.radicand(p)
            logv = logv - 0.5 * n * np.log(rad)
    return logv, sign


def phi_n(class_tag: int, n: int, x, track: SIParameterTrack):
    """``phi_n`` at ``x`` for the track's starting parameters."""
    P = polynomial(track, n)
    logv, sign = log_phi_n(class_tag, n, P, track.binding.phi, x)
    out = sign * np.exp(logv)
    return float(out) if np.ndim(x) == 0 else out


# -- integrating factor -----------------------------------------------------------------

@dataclass(frozen=True)
class RationalAntiderivative:
    """Real antiderivative of ``num/den`` on an interval free of real poles.

    ``den`` is given by its factors so that repeated roots are detected
    from exact discriminants rather than from numerical root clustering.
    """

    poly_part: Polynomial
    simple: tuple[tuple[complex, complex], ...]  # (root, residue): residue*log(y-root)
    double: tuple[tuple[complex, complex], ...]  # (root, a2): -a2/(y-root)

    def __call__(self, y, differences=None):
        """Evaluate at ``y``; ``differences`` maps a root to accurate ``y - root`` values."""
        y = np.asarray(y, dtype=float)
        differences = differences or {}
        out = self.poly_part(y).astype(complex)

        def diff(r):
            return np.asarray(differences.get(r, y - r), dtype=complex)

        with np.errstate(divide="ignore", invalid="ignore"):
            # a zero coefficient drops its term, so 0 * log(0) never appears
            for r, c in self.simple:
                if c != 0:
                    out = out + c * np.log(diff(r))
            for r, a in self.double:
                if a != 0:
                    out = out - a / diff(r)
        return out.real


def _factor_roots(factor: Polynomial) -> list[complex]:
    c = factor.trim(tol=0.0).coef
    if c.size <= 1:
        return []
    if c.size == 2:
        return [complex(-c[0] / c[1])]
    if c.size == 3:
        a, b, cc = c[2], c[1], c[0]
        disc = b * b - 4 * a * cc
        if disc == 0.0:
            r = complex(-b / (2 * a))
            return [r, r]
        s = np.sqrt(complex(disc))
        # numerically stable pair
        q = -0.5 * (b + (s if b >= 0 else -s))
        return [q / a, cc / q] if q != 0 else [s / (2 * a), -s / (2 * a)]
    return list(np.roots(c[::-1]).astype(complex))


def rational_antiderivative(num: Polynomial, factors) -> RationalAntiderivative:
    den = Polynomial([1.0])
    roots: list[complex] = []
    for fac in factors:
        den = den * fac
        roots.extend(_factor_roots(fac))
    den = den.trim(tol=0.0)
    lead = den.coef[-1]
    quo, rem = divmod(num, den) if den.degree() >= 1 else (num / lead, Polynomial([0.0]))
    poly_part = quo.integ()
    # group equal roots
    groups: list[list[complex]] = []
    for r in roots:
        for g in groups:
            if abs(g[0] - r) <= 1e-14 * max(1.0, abs(r)):
                g.append(r)
                break
        else:
            groups.append([r])
    if any(len(g) > 2 for g in groups):
        raise ConstructionError("roots of multiplicity > 2 are not supported")
    rem_c = rem.coef.astype(complex)
    remv = lambda z: np.polyval(rem_c[::-1], z)
    simple, double = [], []
    for g in groups:
        r = g[0]
        rest = Polynomial([lead])
        for other in groups:
            if other is not g:
                for o in other:
                    rest = rest * Polynomial([-o, 1.0])
        if len(g) == 1:
            simple.append((r, remv(r) / rest(r)))
        else:
            # rem/den = a1/(y-r) + a2/(y-r)^2 + ...,  with den = (y-r)^2 rest
            drem = Polynomial(rem_c).deriv()
            a2 = remv(r) / rest(r)
            a1 = (drem(r) * rest(r) - remv(r) * rest.deriv()(r)) / rest(r) ** 2
            simple.append((r, a1))
            double.append((r, a2))
    return RationalAntiderivative(Polynomial(poly_part.coef.real if np.iscomplexobj(poly_part.coef) else poly_part.coef),
                                  tuple(simple), tuple(double))


def w_over_f_rational(class_tag: int, lam: LambdaSet, phi_spec: PhiSpec, barred_constants):
    """``(num, factors)`` with ``W/f dx = num/prod(factors) dphi``."""
    Ab, Bb, Cb, Db = barred_constants
    lm, mu = lam.lam, lam.mu
    if class_tag == 1:
        return _poly(mu, lm), [_poly(Cb, Bb, Ab)]
    if class_tag == 2:
        return _poly(mu, 0.0, lm), [_poly(0.0, 1.0), _poly(Bb, 0.0, Ab)]
    return _poly(mu, lm), [_poly(Db, Cb), _poly(phi_spec.B, 0.0, phi_spec.A)]


def _ode_factor(class_tag: int, spec: PhiSpec) -> Polynomial:
    """Polynomial whose value at ``phi`` is known accurately from ``phi'``."""
    if class_tag == 1:
        return _poly(spec.C, spec.B, spec.A)
    return _poly(spec.B, 0.0, spec.A)


def _ode_factor_value(class_tag: int, spec: PhiSpec, x, y):
    d = np.asarray(spec.dphi(x), dtype=float)
    if class_tag == 3:
        d = d / (spec.C * y + spec.D)
        return d * d
    return d


def _accurate_differences(class_tag: int, spec: PhiSpec, F: RationalAntiderivative, x, y):
    """``y - r`` for roots ``r`` that ``phi`` can approach asymptotically.

    Such roots are fixed points of the closure ODE (zeros of its right-hand
    side).  Near them ``y - r`` cancels catastrophically (``coth x - 1`` at
    large ``x``), so it is recovered as ``R(y)/(lead * prod(y - s))`` from
    the analytic ``phi'``.
    """
    if spec.dphi is None:
        return {}
    R = _ode_factor(class_tag, spec).trim(tol=0.0)
    if R.degree() < 1:
        return {}
    roots = _factor_roots(R)
    lead = R.coef[-1]
    out = {}
    with np.errstate(all="ignore"):
        value = None
        for r, _ in F.simple + F.double:
            match = [i for i, s in enumerate(roots) if abs(s - r) <= 1e-12 * max(1.0, abs(r))]
            if not match or abs(complex(r).imag) > 0:
                continue
            if value is None:
                value = _ode_factor_value(class_tag, spec, x, y)
            others = [s for i, s in enumerate(roots) if i != match[0]]
            denom = lead * np.prod([y - s.real for s in others], axis=0) if others else lead
            accurate = value / denom
            naive = y - r.real
            closest = np.ones_like(y, dtype=bool)
            for s in others:
                closest &= np.abs(naive) <= np.abs(y - s.real)
            out[r] = np.where(closest & np.isfinite(accurate), accurate, naive)
    return out


def antiderivative_for(track: SIParameterTrack, n: int) -> RationalAntiderivative:
    """Closed-form ``int W(lam_n)/f dx`` as a function of ``phi``."""
    b = track.binding
    num, factors = w_over_f_rational(b.class_tag, track.lambda_seq[n], b.phi, b.barred)
    return rational_antiderivative(num, factors)


def integrating_factor_log(track: SIParameterTrack, n: int, x, anchor: float,
                           antiderivative: RationalAntiderivative | None = None):
    """``-int_anchor^x W(lam_n)/f`` in closed form."""
    b = track.binding
    F = antiderivative if antiderivative is not None else antiderivative_for(track, n)
    x = np.asarray(x, dtype=float)
    x0 = np.array([anchor])
    y = _phi_values(b.phi, x)
    y0 = _phi_values(b.phi, x0)
    F_x = F(y, _accurate_differences(b.class_tag, b.phi, F, x, y))
    F_0 = F(y0, _accurate_differences(b.class_tag, b.phi, F, x0, y0))[0]
    return -(F_x - F_0)


def integrating_factor(track: SIParameterTrack, n: int, x, anchor: float = 0.0):
    out = np.exp(integrating_factor_log(track, n, x, anchor))
    return float(out) if np.ndim(x) == 0 else out


def integrating_factor_quad(track: SIParameterTrack, n: int, deformation: DeformationSpec, x, anchor: float,
                            rtol: float = 1e-10):
    """Quadrature oracle for :func:`integrating_factor_log`."""
    b = track.binding
    lam = track.lambda_seq[n]

    def integrand(t):
        tt = np.array([t])
        y = _phi_values(b.phi, tt)
        return float(W_of_phi(b.class_tag, lam, b.phi, y)[0] / deformation.f(tt)[0])

    out = []
    for xi in np.atleast_1d(np.asarray(x, dtype=float)):
        val, err = integrate.quad(integrand, anchor, xi, epsabs=0.0, epsrel=rtol, limit=200)
        if not math.isfinite(val) or err > 100 * rtol * max(1.0, abs(val)):
            raise QuadratureError(f"quadrature did not converge at x={xi}")
        out.append(-val)
    return np.asarray(out)


def log_f(deformation: DeformationSpec, x):
    x = np.asarray(x, dtype=float)
    if deformation.log_f is not None:
        return np.asarray(deformation.log_f(x), dtype=float)
    with np.errstate(all="ignore"):
        return np.log(np.asarray(deformation.f(x), dtype=float))


# -- assembled wavefunctions -----------------------------------------------------------

@dataclass(frozen=True)
class Wavefunction:
    """Callable ``psi_n`` (unnormalized, scaled so that its peak is about 1)."""

    class_tag: int
    n: int
    P: Polynomial
    track: SIParameterTrack
    deformation: DeformationSpec
    anchor: float
    log_scale: float = 0.0
    antiderivative: RationalAntiderivative | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.antiderivative is None:
            object.__setattr__(self, "antiderivative", antiderivative_for(self.track, self.n))

    def log_abs(self, x):
        x = np.asarray(x, dtype=float)
        logp, sign = log_phi_n(self.class_tag, self.n, self.P, self.track.binding.phi, x)
        logf = log_f(self.deformation, x)
        factor = integrating_factor_log(self.track, self.n, x, self.anchor, self.antiderivative)
        with np.errstate(invalid="ignore"):
            return logp - 0.5 * logf + factor - self.log_scale, sign

    def __call__(self, x):
        with np.errstate(all="ignore"):
            la, sign = self.log_abs(x)
            out = sign * np.exp(la)
        out = np.where(np.isfinite(la) | (la == -np.inf), out, np.nan)
        return float(out) if np.ndim(x) == 0 else out

    def log_density_f(self, x):
        """``log(|psi|^2 f)``."""
        la, _ = self.log_abs(x)
        return 2.0 * la + log_f(self.deformation, x)


@dataclass(frozen=True)
class WavefunctionBundle:
    n: int
    energy: float | None
    x: np.ndarray
    psi: np.ndarray
    norm: float
    l2_ok: bool
    hermiticity_ok: bool
    boundary_values: tuple[float, float]
    interval: tuple[float, float]
    truncation_radius: float | None
    nodes: int
    wavefunction: Wavefunction = field(repr=False)
    cmap: object = field(default=None, repr=False)  # CoordinateMap on infinite domains
    u_interval: tuple[float, float] | None = None

    def normalized(self):
        return self.psi / math.sqrt(self.norm)


def _anchor(domain) -> float:
    lo, hi = domain.lo, domain.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0
    return 0.0


def _outward(anchor, end, count=4000, max_dist=1e4):
    """Points from ``anchor`` towards ``end`` (geometric if ``end`` is infinite)."""
    if math.isfinite(end):
        d = abs(end - anchor)
        t = 1.0 - np.geomspace(1.0, 1e-12, count)  # dense near the end
        return anchor + np.sign(end - anchor) * d * np.concatenate(([0.0], t[1:]))
    return anchor + math.copysign(1.0, end) * np.concatenate(([0.0], np.geomspace(1e-3, max_dist, count)))


def _truncation(wf: Wavefunction, domain, peak_log: float):
    """Cut infinite ends where ``|psi|^2`` stays below ``TAIL_FRACTION`` of its peak."""
    anchor = wf.anchor
    cuts = []
    for end in (domain.lo, domain.hi):
        if math.isfinite(end):
            cuts.append(end)
            continue
        xs = _outward(anchor, end)
        la, _ = wf.log_abs(xs)
        above = np.nonzero(2 * la >= 2 * peak_log + math.log(TAIL_FRACTION))[0]
        idx = int(above[-1]) + 1 if above.size else 1
        cuts.append(float(xs[min(idx, xs.size - 1)]))
    return tuple(cuts)


def _interior_grid(lo, hi, count):
    k = np.arange(count)
    t = np.cos(np.pi * (2 * k + 1) / (2 * count))[::-1]
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def _peak_log(wf: Wavefunction, domain):
    lo, hi = domain.truncated(40.0)
    xs = _interior_grid(lo, hi, 4001)
    la, _ = wf.log_abs(xs)
    la = la[np.isfinite(la)]
    return float(np.max(la))


def _sign_changes(values) -> int:
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _neville(ts, vals):
    """Diagonal of the Neville tableau for extrapolation to ``t = 0``."""
    ts = list(ts)
    T = [list(vals)]
    diag = [vals[0]]
    for j in range(1, len(ts)):
        prev = T[-1]
        row = []
        for i in range(len(prev) - 1):
            t0, t1 = ts[i], ts[i + j]
            row.append((t0 * prev[i + 1] - t1 * prev[i]) / (t0 - t1))
        T.append(row)
        diag.append(row[0] if False else row[-1])
    return diag


def boundary_limit(wf: Wavefunction, domain, end: float, start: float, tol: float):
    """Extrapolated ``lim |psi|^2 f`` at ``end`` along a geometric approach.

    Finite ends use ``t = |x - end|``; infinite ends use ``t = 1/|x|``.
    """
    if math.isfinite(end):
        d0 = abs(end - start)
        ts = d0 * 0.5 ** np.arange(1, 10)
        xs = end - np.sign(end - start) * ts
    else:
        x0 = max(abs(start), 8.0)
        xs = math.copysign(1.0, end) * np.geomspace(x0, max(2 * x0, 256.0), 9)
        ts = 1.0 / np.abs(xs)
    with np.errstate(all="ignore"):
        q = np.exp(wf.log_density_f(xs))
    q = np.where(np.isnan(q), np.inf, q)
    if np.any(np.isinf(q)):
        return math.inf
    diag = _neville(ts[-5:], q[-5:])
    est = float(diag[-1])
    spread = max(abs(d - est) for d in diag[-3:])
    if spread > tol and spread > 1e-3 * abs(est):
        raise InconclusiveLimitError(f"boundary extrapolants oscillate (spread {spread:.3e})")
    return abs(est)


def hermiticity_boundary_check(bundle: WavefunctionBundle, domain, tol: float = HERMITICITY_TOL):
    """True iff both limits of ``|psi|^2 f`` are at most ``tol`` times the interior maximum."""
    wf = bundle.wavefunction
    lo, hi = bundle.interval
    xs = _interior_grid(lo, hi, 4001)
    interior = float(np.max(np.exp(wf.log_density_f(xs)[np.isfinite(wf.log_density_f(xs))])))
    thresh = tol * interior
    starts = _approach_starts(domain, bundle.interval)
    limits = (
        boundary_limit(wf, domain, domain.lo, starts[0], thresh),
        boundary_limit(wf, domain, domain.hi, starts[1], thresh),
    )
    return all(v <= thresh for v in limits), limits


def _approach_starts(domain, interval):
    """Where the boundary approach starts: 5% of the span (at most 0.1) from a finite end."""
    lo, hi = interval
    d0 = min(0.05 * (hi - lo), 0.1)
    s_lo = domain.lo + d0 if math.isfinite(domain.lo) else lo
    s_hi = domain.hi - d0 if math.isfinite(domain.hi) else hi
    return s_lo, s_hi


def _l2_end_ok(wf: Wavefunction, domain, end: float, cut: float, total: float) -> bool:
    """Pieces of ``int |psi|^2`` over halving distances must shrink towards ``end``."""
    if math.isfinite(end):
        ref = _anchor(domain)
        ds = abs(end - ref) * 0.5 ** np.arange(3, 12)
        pts = end - np.sign(end - ref) * ds
    else:
        pts = math.copysign(1.0, end) * max(abs(cut), 1.0) * 2.0 ** np.arange(0, 5)
    pieces = []
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(lambda t: float(wf(np.array([t]))[0]) ** 2, a, b, limit=200)
        pieces.append(abs(val))
    pieces = np.array(pieces)
    if not np.all(np.isfinite(pieces)):
        return False
    return not (pieces[-1] > 1e-6 * total and not pieces[-1] < 0.75 * pieces[-2])


def _l2_check(wf: Wavefunction, domain, interval, total: float) -> bool:
    """Tail pieces of ``int |psi|^2`` must shrink towards each end."""
    return all(_l2_end_ok(wf, domain, end, cut, total) for end, cut in zip((domain.lo, domain.hi), interval))


def build_wavefunction(track: SIParameterTrack, n: int, deformation: DeformationSpec) -> Wavefunction:
    P = polynomial(track, n)
    anchor = _anchor(deformation.domain)
    wf = Wavefunction(track.binding.class_tag, n, P, track, deformation, anchor)
    peak = _peak_log(wf, deformation.domain)
    return Wavefunction(track.binding.class_tag, n, P, track, deformation, anchor, peak, wf.antiderivative)


def assemble_psi(model, params, n: int, grid: int = 801, track: SIParameterTrack | None = None) -> WavefunctionBundle:
    """Sample ``psi_n`` and run both physicality gates.

    Levels beyond the model's count are allowed (useful to probe rejected
    levels); ``energy`` is then the formal value. On domains with an
    infinite end the work is done in the flat coordinate ``u = int dx/f``,
    where ``|psi|^2 f`` of a bound state decays exponentially even when it
    decays only like a small power of ``x``.
    """
    p = model.validate(params)
    deformation = model.deformation(p)
    if track is None:
        track = model.track(p, n + 1)
    wf = build_wavefunction(track, n, deformation)
    dom = deformation.domain
    energy = model.formal_energy(p, n)
    if not dom.finite:
        from .numeric import map_coordinate

        cmap = map_coordinate(deformation, model.coordinate_forms(p))
        return _assemble_u(wf, dom, cmap, n, energy, grid)
    interval = _truncation(wf, dom, 0.0)
    xs = _interior_grid(interval[0], interval[1], grid)
    psi = wf(xs)
    norm = _integrate_product(wf, wf, interval)
    l2_ok = bool(math.isfinite(norm) and norm > 0 and _l2_check(wf, dom, interval, norm))
    dense = wf(np.linspace(interval[0], interval[1], 20003)[1:-1])
    nodes = _sign_changes(dense)
    stub = WavefunctionBundle(n, None, xs, psi, norm, l2_ok, False, (math.nan, math.nan), interval, None, nodes, wf)
    herm_ok, limits = hermiticity_boundary_check(stub, dom)
    return WavefunctionBundle(n, energy, xs, psi, norm, l2_ok, bool(herm_ok), tuple(float(v) for v in limits),
                              interval, None, nodes, wf)


# -- flat-coordinate path for infinite domains ---------------------------------------------

def _log_chi2(wf: Wavefunction, cmap, u):
    """``log(|psi|^2 f)`` at ``x(u)``, i.e. the log of the flat density ``chi^2``."""
    with np.errstate(all="ignore"):
        return wf.log_density_f(cmap.x_of_u(np.asarray(u, dtype=float)))


def _u_outward(u_ref, u_end, count=4000, max_span=1e4):
    """Points from ``u_ref`` towards ``u_end``; geometric, dense near a finite end."""
    if math.isfinite(u_end):
        t = 1.0 - np.geomspace(1.0, 1e-12, count)
        return u_ref + (u_end - u_ref) * np.concatenate(([0.0], t[1:]))
    return u_ref + math.copysign(1.0, u_end) * np.concatenate(([0.0], np.geomspace(1e-3, max_span, count)))


def _finite_x(cmap, u):
    """``u`` points whose ``x(u)`` is representable (the map can overflow long before ``u`` does)."""
    with np.errstate(all="ignore"):
        keep = np.isfinite(cmap.x_of_u(u))
    return u[keep]


def _u_truncation(wf: Wavefunction, cmap, u_ref: float):
    """Cuts where ``chi^2`` stays below ``TAIL_FRACTION`` of its peak (finite ``u`` ends are kept)."""
    rays = [_finite_x(cmap, _u_outward(u_ref, end)) for end in cmap.u_range]
    logs = [_log_chi2(wf, cmap, r) for r in rays]
    peak = max(float(np.max(l[np.isfinite(l)])) for l in logs)
    cuts = []
    for end, r, l in zip(cmap.u_range, rays, logs):
        if math.isfinite(end):
            cuts.append(float(end))
            continue
        above = np.nonzero(l >= peak + math.log(TAIL_FRACTION))[0]
        idx = int(above[-1]) + 1 if above.size else 1
        cuts.append(float(r[min(idx, r.size - 1)]))
    return (cuts[0], cuts[1]), peak


def _u_end_limit(wf: Wavefunction, cmap, u_end: float, u_cut: float, u_ref: float, tol: float):
    """``lim chi^2`` at an end whose ``x`` is infinite.

    A finite ``u`` end is approached geometrically and extrapolated; at an
    infinite ``u`` end ``log chi^2`` must fall (limit 0) or rise (limit inf)
    steadily beyond the cut.
    """
    if math.isfinite(u_end):
        d0 = min(0.05 * abs(u_end - u_ref), 0.1)
        ts = d0 * 0.5 ** np.arange(1, 10)
        us = u_end - math.copysign(1.0, u_end - u_ref) * ts
        with np.errstate(all="ignore"):
            q = np.exp(_log_chi2(wf, cmap, us))
        q = np.where(np.isnan(q), np.inf, q)
        if np.any(np.isinf(q)):
            return math.inf
        diag = _neville(ts[-5:], q[-5:])
        est = float(diag[-1])
        spread = max(abs(d - est) for d in diag[-3:])
        if spread > tol and spread > 1e-3 * abs(est):
            raise InconclusiveLimitError(f"boundary extrapolants oscillate (spread {spread:.3e})")
        return abs(est)
    sign = math.copysign(1.0, u_end)
    span = max(abs(u_cut - u_ref), 1.0)
    us = _finite_x(cmap, u_cut + sign * np.linspace(0.0, span, 9))
    if us.size < 3:
        # the cut sits at the edge of representable x: judge the trend on the way in
        us = _finite_x(cmap, u_cut - sign * np.linspace(0.5 * abs(u_cut - u_ref), 0.0, 9))
    if us.size < 3:
        raise InconclusiveLimitError("no representable x beyond the truncation point")
    la = _log_chi2(wf, cmap, us)
    if np.any(np.isnan(la)):
        raise InconclusiveLimitError("density not evaluable beyond the truncation point")
    if la[-1] == -math.inf and np.all(la[1:] <= la[:-1]):
        return 0.0  # underflowed on the way down
    if la[-1] == math.inf and np.all(la[1:] >= la[:-1]):
        return math.inf  # overflowed on the way up
    slope = np.diff(la)
    if np.all(slope < 0.0):
        return 0.0
    if np.all(slope > 0.0):
        return math.inf
    if np.all(np.isfinite(la)) and np.ptp(la) <= 1e-9 * max(1.0, float(np.max(np.abs(la)))):
        return float(np.exp(la[-1]))  # flat tail: a nonzero constant
    raise InconclusiveLimitError("density neither decays nor grows beyond the truncation point")


def _assemble_u(wf: Wavefunction, dom, cmap, n: int, energy: float, grid: int) -> WavefunctionBundle:
    u_ref = float(cmap.u_of_x(np.array([wf.anchor]))[0])
    u_int, peak = _u_truncation(wf, cmap, u_ref)
    with np.errstate(all="ignore"):
        x_cut = cmap.x_of_u(np.array(u_int))
    # a finite u end of an infinite x end is kept whole: the interval reaches the end itself
    x_int = tuple(float(xe) if math.isfinite(ue) else float(xc)
                  for xe, ue, xc in zip((dom.lo, dom.hi), cmap.u_range, x_cut))
    radius = None
    cut_ends = [xv for xv, e in zip(x_int, cmap.u_range) if not math.isfinite(e)]
    if cut_ends:
        radius = max(abs(v) for v in cut_ends)

    us = _interior_grid(u_int[0], u_int[1], grid)
    xs = cmap.x_of_u(us)
    psi = wf(xs)
    norm = _integrate_u(wf, wf, cmap, u_int)
    dense = wf(cmap.x_of_u(np.linspace(u_int[0], u_int[1], 20003)[1:-1]))
    nodes = _sign_changes(dense)

    la = _log_chi2(wf, cmap, _interior_grid(u_int[0], u_int[1], 4001))
    thresh = HERMITICITY_TOL * math.exp(float(np.max(la[np.isfinite(la)])))
    limits, l2_parts = [], []
    for k, (x_end, u_end) in enumerate(zip((dom.lo, dom.hi), cmap.u_range)):
        if math.isfinite(x_end):
            start = _approach_starts(dom, x_int)[k]
            limits.append(boundary_limit(wf, dom, x_end, start, thresh))
            l2_parts.append(_l2_end_ok(wf, dom, x_end, x_int[k], norm))
        else:
            lim = _u_end_limit(wf, cmap, u_end, u_int[k], u_ref, thresh)
            limits.append(lim)
            # int |psi|^2 dx = int chi^2 du: finite on a finite u range when chi^2
            # stays bounded, and on an infinite one when chi^2 decays
            l2_parts.append(math.isfinite(lim) and (math.isfinite(u_end) or lim == 0.0))
    l2_ok = bool(math.isfinite(norm) and norm > 0 and all(l2_parts))
    herm_ok = all(v <= thresh for v in limits)
    return WavefunctionBundle(n, energy, xs, psi, norm, l2_ok, bool(herm_ok), tuple(float(v) for v in limits),
                              x_int, radius, nodes, wf, cmap, u_int)


def _integrate_u(fa: Wavefunction, fb: Wavefunction, cmap, u_interval):
    """``int fa fb dx = int fa fb f du``, products formed in log space."""
    lo, hi = u_interval
    pad = 1e-12 * (hi - lo)

    def integrand(u):
        x = cmap.x_of_u(np.array([u]))
        la, sa = fa.log_abs(x)
        lb, sb = fb.log_abs(x)
        with np.errstate(all="ignore"):
            v = sa * sb * np.exp(la + lb + log_f(fa.deformation, x))
        return float(v[0]) if np.isfinite(v[0]) else 0.0

    val, _ = integrate.quad(integrand, lo + pad, hi - pad, epsabs=0.0, epsrel=1e-11, limit=2000)
    return val


def overlap(a: WavefunctionBundle, b: WavefunctionBundle) -> float:
    """``int psi_a psi_b dx / sqrt(norm_a norm_b)`` over the common interval."""
    fa, fb = a.wavefunction, b.wavefunction
    if a.u_interval is not None and b.u_interval is not None:
        lo = max(a.u_interval[0], b.u_interval[0])
        hi = min(a.u_interval[1], b.u_interval[1])
        return _integrate_u(fa, fb, a.cmap, (lo, hi)) / math.sqrt(a.norm * b.norm)
    lo = max(a.interval[0], b.interval[0])
    hi = min(a.interval[1], b.interval[1])
    return _integrate_product(fa, fb, (lo, hi)) / math.sqrt(a.norm * b.norm)


def _integrate_product(fa, fb, interval):
    """``int fa fb dx``; finite ends are pulled in by 1e-12 of the span so
    the integrand is never evaluated exactly on a wall."""
    lo, hi = interval
    pad = 1e-12 * (hi - lo)
    val, _ = integrate.quad(lambda t: float(fa(np.array([t]))[0] * fb(np.array([t]))[0]), lo + pad, hi - pad,
                            epsabs=0.0, epsrel=1e-11, limit=1000)
    return val
