"""Mass / deforming-function layer.

The PDM Schrodinger equation with von Roos ordering is rewritten with
``M = f**-2`` and ``f = 1 + g`` as a deformed equation

    [-(sqrt(f) d/dx sqrt(f))**2 + V_eff] psi = E psi,

where the ordering ambiguity is moved into ``V_eff = V + Vt`` with
``Vt = rho*f*f'' + sigma*f'**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .errors import DomainError, PositivityError

ArrayFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Interval:
    """Real interval with endpoint flags; endpoints may be +-inf."""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo_ok = x >= self.lo if self.lo_closed else x > self.lo
        hi_ok = x <= self.hi if self.hi_closed else x < self.hi
        return lo_ok & hi_ok

    def require(self, x, what="x"):
        x = np.asarray(x, dtype=float)
        if not np.all(self.contains(x)):
            bad = x[~self.contains(x)] if x.ndim else x
            raise DomainError(f"{what}={np.ravel(bad)[0]!r} outside {self}")
        return x

    def truncated(self, radius: float = 20.0) -> tuple[float, float]:
        """Finite stand-in: infinite ends are replaced by +-radius."""
        lo = self.lo if math.isfinite(self.lo) else -radius
        hi = self.hi if math.isfinite(self.hi) else radius
        return lo, hi

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def compactify(x, interval: Interval) -> np.ndarray:
    """Map the interval onto (-1, 1); used by numeric code only."""
    x = np.asarray(x, dtype=float)
    lo, hi = interval.lo, interval.hi
    if interval.finite:
        return (2.0 * x - lo - hi) / (hi - lo)
    if math.isinf(lo) and math.isinf(hi):
        return np.tanh(x)
    if math.isinf(hi):
        return 1.0 - 2.0 / (1.0 + (x - lo))
    return -1.0 + 2.0 / (1.0 + (hi - x))


class AmbiguityCoefficients(NamedTuple):
    rho: float
    sigma: float


def ambiguity_coefficients(xi: float, zeta: float) -> AmbiguityCoefficients:
    """Return ``(rho, sigma)`` for the ordering parameters ``xi, zeta``."""
    rho = 0.5 * (1.0 - xi - zeta)
    sigma = (0.5 - xi) * (0.5 - zeta)
    return AmbiguityCoefficients(rho, sigma)


@dataclass(frozen=True)
class AmbiguityParams:
    """von Roos ordering parameters in the ``f``-form, ``xi + eta + zeta = 2``."""

    xi: float = 0.0
    zeta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.zeta)):
            raise ValueError("ambiguity parameters must be finite")

    @property
    def eta(self) -> float:
        return 2.0 - self.xi - self.zeta

    @property
    def rho(self) -> float:
        return ambiguity_coefficients(self.xi, self.zeta).rho

    @property
    def sigma(self) -> float:
        return ambiguity_coefficients(self.xi, self.zeta).sigma


@dataclass(frozen=True)
class DeformationSpec:
    """Deforming function ``g`` with analytic first and second derivatives.

    ``g``, ``g_prime`` and ``g_second`` take a numpy array of points and
    return an array of the same shape.  ``log_f`` may be supplied for
    domains where ``1 + g`` overflows, ``f_direct`` where forming
    ``1 + g`` cancels (``f`` tending to zero at an infinite end).
    """

    g: ArrayFunc
    g_prime: ArrayFunc
    g_second: ArrayFunc
    domain: Interval
    alpha_params: Mapping[str, float] = field(default_factory=dict)
    name: str = "g"
    log_f: ArrayFunc | None = None
    f_direct: ArrayFunc | None = None

    def f(self, x):
        if self.f_direct is not None:
            return self.f_direct(x)
        return 1.0 + self.g(x)

    def f_prime(self, x):
        return self.g_prime(x)

    def f_second(self, x):
        return self.g_second(x)


def undeformed(domain: Interval) -> DeformationSpec:
    """``g == 0``: the constant-mass case."""
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return DeformationSpec(zero, zero, zero, domain, {}, name="0")


def _scalar_or_array(x, value):
    value = np.asarray(value, dtype=float)
    return float(value) if np.ndim(x) == 0 else value


def eval_f(spec: DeformationSpec, x):
    """``f = 1 + g`` at ``x``; raises :class:`DomainError` outside the domain."""
    x = spec.domain.require(x)
    return _scalar_or_array(x, spec.f(x))


def eval_f_derivatives(spec: DeformationSpec, x):
    """``(f, f', f'')`` at ``x``."""
    x = spec.domain.require(x)
    return tuple(_scalar_or_array(x, v) for v in (spec.f(x), spec.f_prime(x), spec.f_second(x)))


def mass_profile(spec: DeformationSpec, x):
    """Dimensionless mass ``M = f**-2``."""
    f = np.asarray(eval_f(spec, x))
    if np.any(f <= 0.0):
        raise PositivityError(f"f <= 0 at x={np.ravel(np.asarray(x))[np.argmax(np.ravel(f) <= 0)]!r}")
    return _scalar_or_array(x, f ** -2.0)


def v_tilde_generic(spec: DeformationSpec, rho: float, sigma: float, x):
    """Ordering correction ``rho f f'' + sigma f'**2`` from the analytic derivatives."""
    f, fp, fpp = (np.asarray(v) for v in eval_f_derivatives(spec, x))
    return _scalar_or_array(x, rho * f * fpp + sigma * fp * fp)


@dataclass(frozen=True)
class EffectivePotentialSpec:
    v_eff: ArrayFunc
    params_b: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x):
        return self.v_eff(np.asarray(x, dtype=float))


class InitialPotential(NamedTuple):
    value: float | np.ndarray
    provenance: dict


def recover_initial_potential(
    v_eff: EffectivePotentialSpec,
    spec: DeformationSpec,
    amb: AmbiguityParams,
    x,
) -> InitialPotential:
    """Potential entering the PDM equation, ``V = V_eff - Vt``.

    The provenance records the full parameter set ``a = (b, alpha, xi)``.
    """
    x = spec.domain.require(x)
    vt = np.asarray(v_tilde_generic(spec, amb.rho, amb.sigma, x))
    value = _scalar_or_array(x, np.asarray(v_eff(x)) - vt)
    provenance = {
        "b": dict(v_eff.params_b),
        "alpha": dict(spec.alpha_params),
        "xi": {"xi": amb.xi, "eta": amb.eta, "zeta": amb.zeta},
    }
    return InitialPotential(value, provenance)


@dataclass(frozen=True)
class PositivityVerdict:
    ok: bool
    x_star: float | None = None
    f_value: float | None = None
    f_min: float | None = None

    def __bool__(self):
        return self.ok


def _endpoint_limit(spec: DeformationSpec, end: float, inward: float) -> float:
    """Limit of f at an endpoint.

    Finite endpoints: the closed form is evaluated at the endpoint itself.
    Infinite endpoints: f is followed along |x| = 10, 40, 160, 640 and
    the last finite value is taken (overflow means the limit is +inf).
    """
    with np.errstate(all="ignore"):
        if math.isfinite(end):
            val = float(spec.f(np.array([end]))[0])
            if not math.isfinite(val):
                val = float(spec.f(np.array([end + inward * 1e-9]))[0])
            return val
        seq = [float(spec.f(np.array([math.copysign(r, end)]))[0]) for r in (10.0, 40.0, 160.0, 640.0)]
    finite = [v for v in seq if math.isfinite(v)]
    if len(finite) < len(seq) and (not finite or finite[-1] > 0):
        return math.inf
    return finite[-1] if finite else math.nan


def check_positivity(spec: DeformationSpec, samples: int = 10_000) -> PositivityVerdict:
    """Check ``f > 0`` on the open interior plus its endpoint limits.

    A zero limit exactly at an endpoint is accepted (``f`` positive on
    the open interval), a negative one is not.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    dom = spec.domain
    if dom.finite:
        t = (np.arange(samples) + 0.5) / samples
        x = dom.lo + t * dom.length
    else:
        s = (np.arange(samples) + 0.5) / samples
        if math.isinf(dom.lo) and math.isinf(dom.hi):
            x = np.arctanh(2.0 * s - 1.0) * 8.0
        elif math.isinf(dom.hi):
            x = dom.lo + 8.0 * s / (1.0 - s)
        else:
            x = dom.hi - 8.0 * (1.0 - s) / s
    with np.errstate(all="ignore"):
        f = spec.f(x)
        bad = ~(f > 0.0)
        if spec.log_f is not None:  # f underflowing to 0 is still positive
            bad &= ~np.isfinite(spec.log_f(x))
    if np.any(bad):
        i = int(np.argmax(bad))
        return PositivityVerdict(False, float(x[i]), float(f[i]), float(np.nanmin(f)))
    f_min = float(np.min(f))
    for end, inward in ((dom.lo, 1.0), (dom.hi, -1.0)):
        lim = _endpoint_limit(spec, end, inward)
        if lim < 0.0 or math.isnan(lim):
            return PositivityVerdict(False, end, lim, min(f_min, lim))
        f_min = min(f_min, lim)
    return PositivityVerdict(True, f_min=f_min)
