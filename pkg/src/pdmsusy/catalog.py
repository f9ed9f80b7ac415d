"""Registry of the solvable deformed models.

Each :class:`PotentialModel` bundles the effective potential, the
deforming function (with analytic derivatives), parameter windows, the
closed-form spectrum and bound-state-count rule, the ordering correction
``Vt``, the class binding used by the shape-invariance engine, and a
closed-form coordinate map ``u = int dx/f`` for the numerical oracle.

Models are looked up with :func:`get_model`; all of them are immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .deformation import AmbiguityParams, DeformationSpec, EffectivePotentialSpec, Interval
from .errors import NoSuchLevelError, ParameterError
from .si_engine import (
    ClassBinding,
    SIParameterTrack,
    SpectrumResult,
    build_track,
    initial_parameters,
)
from .superpotential import PhiSpec, PrimedConstants

INFINITE = math.inf
PI = math.pi


@dataclass(frozen=True)
class Window:
    """One stated parameter window.

    ``deformation_only`` windows are skipped at the undeformed point (all
    deformation parameters zero), which is always admitted as the
    constant-mass limit.
    """

    text: str
    check: Callable[[Mapping[str, float]], bool]
    deformation_only: bool = False

    @property
    def symbolic(self) -> str:
        """``text`` with Greek letters, superscript squares and relation signs."""
        out = self.text
        for ascii_, sym in (("alpha", "α"), ("beta", "β"), ("e2", "e²"), ("^2", "²"), (">=", "≥"), ("<=", "≤"),
                            ("!=", "≠")):
            out = out.replace(ascii_, sym)
        return out


@dataclass(frozen=True)
class CoordinateForms:
    u_of_x: Callable[[np.ndarray], np.ndarray]
    x_of_u: Callable[[np.ndarray], np.ndarray]
    u_range: tuple[float, float]


@dataclass(frozen=True)
class ExcludedModel:
    id: str
    title: str
    reason: str  # "no_positive_f" | "no_bound_states"
    note: str

    active = False

    def descriptor(self) -> dict:
        return {"id": self.id, "title": self.title, "active": False, "reason": self.reason, "note": self.note}


@dataclass(frozen=True)
class PotentialModel:
    id: str
    title: str
    domain: Interval
    param_names: tuple[str, ...]
    deformation_names: tuple[str, ...]
    defaults: Mapping[str, float]
    windows: tuple[Window, ...]
    count_kind: str  # "infinite" | "finite" | "zero" | "conditional"
    v_eff_text: str
    g_text: str
    _v_eff: Callable
    _g: Callable  # params -> (g, g', g'')
    _binding: Callable  # params -> ClassBinding
    _v_coeffs: Callable  # params -> class-basis coefficients of V_eff
    branch: tuple[int, ...]
    _energy: Callable  # (params, n) -> closed-form E_n
    _count: Callable  # params -> int | inf
    _v_tilde: Callable  # (params, rho, sigma, x) -> Vt
    _coords: Callable | None = None  # params -> CoordinateForms
    _derived: Callable | None = None  # params -> dict of Delta-type quantities
    _threshold: Callable | None = None  # params -> continuum threshold or None
    _closed_psi: Callable | None = None  # (params, n, x, P_n) -> closed-form psi_n
    _f: Callable | None = None  # params -> (f, log f) evaluated without forming 1 + g
    notes: str = ""

    active = True

    # -- parameters --------------------------------------------------------
    def validate(self, params: Mapping[str, float] | None = None) -> dict:
        """Merge with defaults, reject unknown names and out-of-window values."""
        params = dict(params or {})
        unknown = sorted(set(params) - set(self.param_names))
        if unknown:
            raise ParameterError(
                f"unknown parameter(s) {', '.join(unknown)} for model {self.id}; "
                f"expected {', '.join(self.param_names)}"
            )
        full = {k: float(params.get(k, self.defaults[k])) for k in self.param_names}
        for k, v in full.items():
            if not math.isfinite(v):
                raise ParameterError(f"parameter {k} must be finite")
        undeformed = self.is_undeformed(full)
        for w in self.windows:
            if w.deformation_only and undeformed:
                continue
            if not w.check(full):
                raise ParameterError(f"{self.id}: parameters violate window '{w.text}' ({w.symbolic})", window=w.text)
        return full

    def is_undeformed(self, params: Mapping[str, float]) -> bool:
        return all(params[k] == 0.0 for k in self.deformation_names)

    # -- building blocks -------------------------------------------------------
    def v_eff(self, params, x):
        p = self.validate(params)
        return self._v_eff(p, np.asarray(x, dtype=float))

    def effective_potential(self, params) -> EffectivePotentialSpec:
        p = self.validate(params)
        b = {k: v for k, v in p.items() if k not in self.deformation_names}
        return EffectivePotentialSpec(lambda x, p=p: self._v_eff(p, np.asarray(x, dtype=float)), b)

    def deformation(self, params) -> DeformationSpec:
        p = self.validate(params)
        g, gp, gpp = self._g(p)
        alpha = {k: p[k] for k in self.deformation_names}
        f, logf = self._f(p) if self._f else (None, None)
        return DeformationSpec(g, gp, gpp, self.domain, alpha, name=self.g_text, log_f=logf, f_direct=f)

    def binding(self, params) -> ClassBinding:
        return self._binding(self.validate(params))

    def v_coefficients(self, params):
        return self._v_coeffs(self.validate(params))

    def derived(self, params) -> dict:
        p = self.validate(params)
        return dict(self._derived(p)) if self._derived else {}

    def continuum_threshold(self, params):
        p = self.validate(params)
        return self._threshold(p) if self._threshold else None

    def coordinate_forms(self, params) -> CoordinateForms | None:
        p = self.validate(params)
        return self._coords(p) if self._coords else None

    # -- spectrum ----------------------------------------------------------------
    def track(self, params, length: int) -> SIParameterTrack:
        """Shape-invariance track solved from the basis coefficients of ``V_eff``."""
        p = self.validate(params)
        binding = self._binding(p)
        lam0, eps0 = initial_parameters(binding, self._v_coeffs(p), self.branch)
        return build_track(binding, lam0, eps0, length, origin={"model": self.id, "params": p})

    def bound_state_count(self, params):
        return self._count(self.validate(params))

    def formal_energy(self, params, n: int) -> float:
        """Closed-form ``E_n`` regardless of whether level ``n`` is physical."""
        if n < 0:
            raise NoSuchLevelError("level index must be >= 0")
        return float(self._energy(self.validate(params), n))

    def spectrum(self, params, n: int) -> float:
        p = self.validate(params)
        count = self._count(p)
        if n < 0 or n >= count:
            raise NoSuchLevelError(f"{self.id}: level {n} requested, bound-state count is {_fmt_count(count)}")
        return float(self._energy(p, n))

    def spectrum_result(self, params, levels: int) -> SpectrumResult:
        p = self.validate(params)
        count = self._count(p)
        k = int(min(levels, count))
        energies = tuple(float(self._energy(p, n)) for n in range(k))
        return SpectrumResult(energies, count, {"model": self.id, "params": p, **self.derived(p)})

    def v_tilde(self, params, amb: AmbiguityParams, x):
        p = self.validate(params)
        x = self.domain.require(x)
        out = self._v_tilde(p, amb.rho, amb.sigma, x)
        return float(out) if np.ndim(x) == 0 else np.asarray(out)

    def closed_form_wavefunction(self, params, n, x, poly):
        if self._closed_psi is None:
            return None
        return self._closed_psi(self.validate(params), n, np.asarray(x, dtype=float), poly)

    def descriptor(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "active": True,
            "domain": str(self.domain),
            "parameters": list(self.param_names),
            "deformation_parameters": list(self.deformation_names),
            "defaults": dict(self.defaults),
            "windows": [w.text for w in self.windows],
            "count_rule": self.count_kind,
            "v_eff": self.v_eff_text,
            "g": self.g_text,
            "class": self._binding(dict(self.defaults)).class_tag,
        }


def _fmt_count(count):
    return "infinite" if math.isinf(count) else str(int(count))


def _const(value):
    return lambda x: np.full_like(np.asarray(x, dtype=float), value)


# -- particle in a box / trigonometric Poschl-Teller -----------------------------

_HALF_PI = Interval(-PI / 2, PI / 2)


def _sin2_g(p):
    a = p["alpha"]
    return (
        lambda x: a * np.sin(x) ** 2,
        lambda x: a * np.sin(2 * x),
        lambda x: 2 * a * np.cos(2 * x),
    )


def _tan_binding(p):
    phi = PhiSpec(1, np.tan, _HALF_PI, A=1.0, B=0.0, C=1.0, dphi=lambda x: 1.0 / np.cos(x) ** 2, name="tan")
    return ClassBinding(phi, PrimedConstants(A=p["alpha"]))


def _sin2_vtilde(p, rho, sigma, x):
    a = p["alpha"]
    c = np.cos(2 * x)
    return -(rho + sigma) * a * a * c * c + rho * a * (2 + a) * c + sigma * a * a


def _sin2_coords(p):
    s = math.sqrt(1.0 + p["alpha"])
    return CoordinateForms(
        lambda x: np.arctan(s * np.tan(x)) / s,
        lambda u: np.arctan2(np.sin(s * u), s * np.cos(s * u)),
        (-PI / (2 * s), PI / (2 * s)),
    )


def _trig_lambda(p):
    a, A = p["alpha"], p["A"]
    delta = math.sqrt((1 + a) ** 2 + 4 * A * (A - 1))
    return 0.5 * (1 + a + delta), delta


def _log_cos_prefactor(x, power_cos, power_f, a):
    return np.cos(x) ** power_cos * (1 + a * np.sin(x) ** 2) ** power_f


BOX = PotentialModel(
    id="box",
    title="particle in a box",
    domain=_HALF_PI,
    param_names=("alpha",),
    deformation_names=("alpha",),
    defaults={"alpha": 0.5},
    windows=(Window("-1 < alpha != 0", lambda p: p["alpha"] > -1.0, deformation_only=True),),
    count_kind="infinite",
    v_eff_text="0 on (-pi/2, pi/2), infinite walls",
    g_text="alpha sin^2 x",
    _v_eff=lambda p, x: np.zeros_like(x),
    _g=_sin2_g,
    _binding=_tan_binding,
    _v_coeffs=lambda p: (0.0, 0.0, 0.0),
    branch=(1,),
    _energy=lambda p, n: (1 + p["alpha"]) * (n + 1) ** 2,
    _count=lambda p: INFINITE,
    _v_tilde=_sin2_vtilde,
    _coords=_sin2_coords,
    _closed_psi=lambda p, n, x, P: _log_cos_prefactor(x, n + 1, -(n + 2) / 2, p["alpha"]) * P(np.tan(x)),
)

TRIG_PT = PotentialModel(
    id="trig_pt",
    title="trigonometric Poschl-Teller",
    domain=_HALF_PI,
    param_names=("A", "alpha"),
    deformation_names=("alpha",),
    defaults={"A": 2.0, "alpha": 0.3},
    windows=(
        Window("A > 1", lambda p: p["A"] > 1.0),
        Window("-1 < alpha != 0", lambda p: p["alpha"] > -1.0, deformation_only=True),
    ),
    count_kind="infinite",
    v_eff_text="A(A-1) sec^2 x",
    g_text="alpha sin^2 x",
    _v_eff=lambda p, x: p["A"] * (p["A"] - 1) / np.cos(x) ** 2,
    _g=_sin2_g,
    _binding=_tan_binding,
    _v_coeffs=lambda p: (p["A"] * (p["A"] - 1), 0.0, p["A"] * (p["A"] - 1)),
    branch=(1,),
    _energy=lambda p, n: (_trig_lambda(p)[0] + n) ** 2 - p["alpha"] * (_trig_lambda(p)[0] - n * n),
    _count=lambda p: INFINITE,
    _v_tilde=_sin2_vtilde,
    _coords=_sin2_coords,
    _derived=lambda p: {"lambda": _trig_lambda(p)[0], "Delta": _trig_lambda(p)[1]},
    _closed_psi=lambda p, n, x, P: _log_cos_prefactor(
        x,
        _trig_lambda(p)[0] / (1 + p["alpha"]) + n,
        -0.5 * (_trig_lambda(p)[0] / (1 + p["alpha"]) + n + 1),
        p["alpha"],
    )
    * P(np.tan(x)),
)


# -- hyperbolic Poschl-Teller ----------------------------------------------------

_REAL_LINE = Interval(-math.inf, math.inf)


def _zero_g():
    """``g = 0`` and its derivatives, exact even where a scaled ``g`` would be ``0 * inf``."""
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return zero, zero, zero


def _hyp_lambda(p):
    a, A = p["alpha"], p["A"]
    delta = math.sqrt((1 - a) ** 2 + 4 * A * (A + 1))
    return 0.5 * (a - 1 + delta), delta


def _hyp_energy(p, n):
    # The second printed form; the first printed form carries -alpha(lam + n^2)
    # but only +alpha(lam + n^2) agrees with it (and with the track).
    lam = _hyp_lambda(p)[0]
    return -((lam - n) ** 2) + p["alpha"] * (lam + n * n)


def _hyp_count(p):
    if p["alpha"] != 0.0:
        return 0
    return int(math.ceil(p["A"]))


def _hyp_coords(p):
    a = p["alpha"]
    if a == 0.0:
        return CoordinateForms(lambda x: np.asarray(x, dtype=float), lambda u: np.asarray(u, dtype=float), (-math.inf, math.inf))
    s = math.sqrt(1.0 - a)
    return CoordinateForms(
        lambda x: np.arctanh(s * np.tanh(x)) / s,
        lambda u: np.arctanh(np.clip(np.tanh(s * np.asarray(u, dtype=float)) / s, -1.0, 1.0)),
        (-math.atanh(s) / s, math.atanh(s) / s),
    )


def _hyp_f(p):
    """``f = 1 + alpha sinh^2 x`` and its log, finite where ``sinh^2`` overflows."""
    a = p["alpha"]
    if a == 0.0:
        return (lambda x: np.ones_like(np.asarray(x, dtype=float)), lambda x: np.zeros_like(np.asarray(x, dtype=float)))

    def logf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            s2 = np.sinh(x) ** 2
        far = math.log(a / 4) + 2 * np.abs(x)  # alpha sinh^2 x ~ alpha e^{2|x|} / 4
        return np.where(np.isfinite(s2), np.log1p(a * np.where(np.isfinite(s2), s2, 0.0)), far)

    return (lambda x: 1 + a * np.sinh(np.asarray(x, dtype=float)) ** 2, logf)


def _hyp_closed_psi(p, n, x, P):
    lam, a = _hyp_lambda(p)[0], p["alpha"]
    q = lam / (1 - a)
    return np.cosh(x) ** -(q - n) * (1 + a * np.sinh(x) ** 2) ** (0.5 * (q - n - 1)) * P(np.tanh(x))


HYPERBOLIC_PT = PotentialModel(
    id="hyperbolic_pt",
    title="hyperbolic Poschl-Teller",
    domain=_REAL_LINE,
    param_names=("A", "alpha"),
    deformation_names=("alpha",),
    defaults={"A": 2.0, "alpha": 0.5},
    windows=(
        Window("A > 0", lambda p: p["A"] > 0.0),
        Window("0 < alpha < 1", lambda p: 0.0 < p["alpha"] < 1.0, deformation_only=True),
    ),
    count_kind="zero",
    v_eff_text="-A(A+1) sech^2 x",
    g_text="alpha sinh^2 x",
    _v_eff=lambda p, x: -p["A"] * (p["A"] + 1) / np.cosh(x) ** 2,
    _g=lambda p: _zero_g() if p["alpha"] == 0.0 else (
        lambda x: p["alpha"] * np.sinh(x) ** 2,
        lambda x: p["alpha"] * np.sinh(2 * x),
        lambda x: 2 * p["alpha"] * np.cosh(2 * x),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, np.tanh, _REAL_LINE, A=-1.0, B=0.0, C=1.0, dphi=lambda x: 1.0 / np.cosh(x) ** 2, name="tanh"),
        PrimedConstants(A=p["alpha"]),
    ),
    _v_coeffs=lambda p: (p["A"] * (p["A"] + 1), 0.0, -p["A"] * (p["A"] + 1)),
    branch=(1,),
    _energy=_hyp_energy,
    _count=_hyp_count,
    _v_tilde=lambda p, rho, sigma, x: (
        rho * (1 + p["alpha"] * np.sinh(x) ** 2) * 2 * p["alpha"] * np.cosh(2 * x)
        + sigma * (p["alpha"] * np.sinh(2 * x)) ** 2
    ),
    _coords=_hyp_coords,
    _derived=lambda p: {"lambda": _hyp_lambda(p)[0], "Delta": _hyp_lambda(p)[1]},
    # V_eff -> 0 at both ends; a level below 0 is what "bound" refers to here
    _threshold=lambda p: 0.0,
    _closed_psi=_hyp_closed_psi,
    _f=_hyp_f,
    notes="deformed levels violate |psi|^2 f -> 0 at +-infinity",
)


# -- shifted oscillator ------------------------------------------------------------

def _shift_energy(p, n):
    w, b, a, be = p["omega"], p["b"], p["alpha"], p["beta"]
    d = math.sqrt(w * w + a * a)
    frac = (((2 * n + 1) * d + (2 * n * n + 2 * n + 1) * a) * be - b * w) / (d + (2 * n + 1) * a)
    return (n + 0.5) * d + (n * n + n + 0.5) * a + b * b - frac * frac


def _shift_coords(p):
    a, be = p["alpha"], p["beta"]
    if a == 0.0 and be == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (-math.inf, math.inf))
    k = math.sqrt(a - be * be)
    off = math.atan(be / k)
    return CoordinateForms(
        lambda x: (np.arctan((a * np.asarray(x) + be) / k) - off) / k,
        lambda u: (k * np.tan(k * np.asarray(u) + off) - be) / a,
        ((-PI / 2 - off) / k, (PI / 2 - off) / k),
    )


SHIFTED_OSC = PotentialModel(
    id="shifted_osc",
    title="shifted oscillator",
    domain=_REAL_LINE,
    param_names=("omega", "b", "alpha", "beta"),
    deformation_names=("alpha", "beta"),
    defaults={"omega": 2.0, "b": 0.5, "alpha": 0.3, "beta": 0.2},
    windows=(
        Window("omega > 0", lambda p: p["omega"] > 0.0),
        Window("alpha > beta^2 >= 0", lambda p: p["alpha"] > p["beta"] ** 2, deformation_only=True),
    ),
    count_kind="infinite",
    v_eff_text="(1/4) omega^2 (x - 2b/omega)^2",
    g_text="alpha x^2 + 2 beta x",
    _v_eff=lambda p, x: 0.25 * p["omega"] ** 2 * (x - 2 * p["b"] / p["omega"]) ** 2,
    _g=lambda p: (
        lambda x: p["alpha"] * x * x + 2 * p["beta"] * x,
        lambda x: 2 * p["alpha"] * x + 2 * p["beta"],
        _const(2 * p["alpha"]),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, lambda x: np.asarray(x) * 1.0, _REAL_LINE, A=0.0, B=0.0, C=1.0, name="x"),
        PrimedConstants(A=p["alpha"], B=2 * p["beta"]),
    ),
    _v_coeffs=lambda p: (0.25 * p["omega"] ** 2, -p["b"] * p["omega"], p["b"] ** 2),
    branch=(1,),
    _energy=_shift_energy,
    _count=lambda p: INFINITE,
    _v_tilde=lambda p, rho, sigma, x: (
        2 * (rho + 2 * sigma) * p["alpha"] * x * (p["alpha"] * x + 2 * p["beta"])
        + 2 * rho * p["alpha"]
        + 4 * sigma * p["beta"] ** 2
    ),
    _coords=_shift_coords,
    _derived=lambda p: {"Delta": math.sqrt(p["omega"] ** 2 + p["alpha"] ** 2)},
)


# -- three-dimensional oscillator -------------------------------------------------

_HALF_LINE = Interval(0.0, math.inf)


def _osc3_energy(p, n):
    w, l, a = p["omega"], p["l"], p["alpha"]
    d = math.sqrt(w * w + a * a)
    return d * (2 * n + l + 1.5) + a * (2 * (n + l + 1) * (2 * n + 1) + 0.5)


def _osc3_coords(p):
    a = p["alpha"]
    if a == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (0.0, math.inf))
    s = math.sqrt(a)
    return CoordinateForms(
        lambda x: np.arctan(s * np.asarray(x)) / s,
        lambda u: np.tan(s * np.asarray(u)) / s,
        (0.0, PI / (2 * s)),
    )


OSC3D = PotentialModel(
    id="osc3d",
    title="three-dimensional oscillator",
    domain=_HALF_LINE,
    param_names=("omega", "l", "alpha"),
    deformation_names=("alpha",),
    defaults={"omega": 2.0, "l": 1.0, "alpha": 0.3},
    windows=(
        Window("omega > 0", lambda p: p["omega"] > 0.0),
        Window("l >= 0", lambda p: p["l"] >= 0.0),
        Window("alpha > 0", lambda p: p["alpha"] > 0.0, deformation_only=True),
    ),
    count_kind="infinite",
    v_eff_text="(1/4) omega^2 x^2 + l(l+1)/x^2",
    g_text="alpha x^2",
    _v_eff=lambda p, x: 0.25 * p["omega"] ** 2 * x * x + p["l"] * (p["l"] + 1) / (x * x),
    _g=lambda p: (
        lambda x: p["alpha"] * x * x,
        lambda x: 2 * p["alpha"] * x,
        _const(2 * p["alpha"]),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(2, lambda x: np.asarray(x) * 1.0, _HALF_LINE, A=0.0, B=1.0, name="x"),
        PrimedConstants(A=p["alpha"]),
    ),
    _v_coeffs=lambda p: (0.25 * p["omega"] ** 2, 0.0, p["l"] * (p["l"] + 1)),
    branch=(1, -1),
    _energy=_osc3_energy,
    _count=lambda p: INFINITE,
    _v_tilde=lambda p, rho, sigma, x: 2 * (rho + 2 * sigma) * p["alpha"] ** 2 * x * x + 2 * rho * p["alpha"],
    _coords=_osc3_coords,
    _derived=lambda p: {"Delta": math.sqrt(p["omega"] ** 2 + p["alpha"] ** 2)},
)


# -- Coulomb -------------------------------------------------------------------------

def _coulomb_energy(p, n):
    e2, l, a = p["e2"], p["l"], p["alpha"]
    return -(((e2 - a * (n * n + (l + 1) * (2 * n + 1))) / (2 * (n + l + 1))) ** 2)


def _coulomb_count(p):
    e2, l, a = p["e2"], p["l"], p["alpha"]
    if a == 0.0:
        return INFINITE
    bound = e2 / a
    n = 0
    # strict inequality as printed; the left side grows with n
    while n * n + (l + 1) * (2 * n + 1) < bound:
        n += 1
    return n


def _coulomb_coords(p):
    a = p["alpha"]
    if a == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (0.0, math.inf))
    return CoordinateForms(
        lambda x: np.log1p(a * np.asarray(x)) / a,
        lambda u: np.expm1(a * np.asarray(u)) / a,
        (0.0, math.inf),
    )


COULOMB = PotentialModel(
    id="coulomb",
    title="Coulomb",
    domain=_HALF_LINE,
    param_names=("e2", "l", "alpha"),
    deformation_names=("alpha",),
    defaults={"e2": 1.0, "l": 0.0, "alpha": 0.1},
    windows=(
        Window("e2 > 0", lambda p: p["e2"] > 0.0),
        Window("l >= 0", lambda p: p["l"] >= 0.0),
        Window("alpha > 0", lambda p: p["alpha"] > 0.0, deformation_only=True),
    ),
    count_kind="conditional",
    v_eff_text="-e^2/x + l(l+1)/x^2",
    g_text="alpha x",
    _v_eff=lambda p, x: -p["e2"] / x + p["l"] * (p["l"] + 1) / (x * x),
    _g=lambda p: (
        lambda x: p["alpha"] * np.asarray(x, dtype=float),
        _const(p["alpha"]),
        _const(0.0),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, lambda x: 1.0 / np.asarray(x, dtype=float), _HALF_LINE, A=-1.0, B=0.0, C=0.0,
                dphi=lambda x: -1.0 / np.asarray(x, dtype=float) ** 2, name="1/x"),
        PrimedConstants(B=-p["alpha"]),
    ),
    _v_coeffs=lambda p: (p["l"] * (p["l"] + 1), -p["e2"], 0.0),
    branch=(-1,),
    _energy=_coulomb_energy,
    _count=_coulomb_count,
    _v_tilde=lambda p, rho, sigma, x: np.full_like(np.asarray(x, dtype=float), sigma * p["alpha"] ** 2),
    _coords=_coulomb_coords,
    _threshold=lambda p: 0.0,
)


# -- Morse -----------------------------------------------------------------------------

def _morse_energy(p, n):
    A, B, a = p["A"], p["B"], p["alpha"]
    d = math.sqrt(4 * B * B + a * a)
    num = 2 * B * (2 * A + 1) - ((2 * n + 1) * d + (2 * n * n + 2 * n + 1) * a)
    return -0.25 * (num / (d + (2 * n + 1) * a)) ** 2


def morse_alpha_max(A: float, B: float, n: int) -> float:
    """Largest deformation for which Morse level ``n`` is still bound."""
    if n == 0:
        return 4 * A * (A + 1) * B / (2 * A + 1)
    m = 2 * n * n * (n + 1) ** 2
    return (
        B * (2 * A + 1) * (2 * n * n + 2 * n + 1) / m
        - B * (2 * n + 1) * math.sqrt((2 * A + 1) ** 2 + 4 * n * n * (n + 1) ** 2) / m
    )


def _morse_count(p):
    A, B, a = p["A"], p["B"], p["alpha"]
    below_A = [n for n in range(int(math.ceil(A))) if n < A]
    if a == 0.0:
        return len(below_A)
    if a >= morse_alpha_max(A, B, 0):
        return 0
    ok = [n for n in below_A if a < morse_alpha_max(A, B, n)]
    return (max(ok) + 1) if ok else 0


def _morse_coords(p):
    a = p["alpha"]
    if a == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (-math.inf, math.inf))
    la = math.log(a)
    return CoordinateForms(
        lambda x: np.logaddexp(np.asarray(x, dtype=float), la),
        lambda u: np.asarray(u) + np.log1p(-np.minimum(a * np.exp(-np.asarray(u, dtype=float)), 1.0)),
        (la, math.inf),
    )


MORSE = PotentialModel(
    id="morse",
    title="Morse",
    domain=_REAL_LINE,
    param_names=("A", "B", "alpha"),
    deformation_names=("alpha",),
    defaults={"A": 3.0, "B": 2.0, "alpha": 0.3},
    windows=(
        Window("A > 0", lambda p: p["A"] > 0.0),
        Window("B > 0", lambda p: p["B"] > 0.0),
        Window("alpha > 0", lambda p: p["alpha"] > 0.0, deformation_only=True),
    ),
    count_kind="finite",
    v_eff_text="B^2 e^{-2x} - B(2A+1) e^{-x}",
    g_text="alpha e^{-x}",
    _v_eff=lambda p, x: p["B"] ** 2 * np.exp(-2 * x) - p["B"] * (2 * p["A"] + 1) * np.exp(-x),
    _g=lambda p: (
        lambda x: p["alpha"] * np.exp(-x),
        lambda x: -p["alpha"] * np.exp(-x),
        lambda x: p["alpha"] * np.exp(-x),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, lambda x: np.exp(-np.asarray(x, dtype=float)), _REAL_LINE, A=0.0, B=-1.0, C=0.0,
                dphi=lambda x: -np.exp(-np.asarray(x, dtype=float)), name="exp(-x)"),
        PrimedConstants(A=-p["alpha"]),
    ),
    _v_coeffs=lambda p: (p["B"] ** 2, -p["B"] * (2 * p["A"] + 1), 0.0),
    branch=(-1,),
    _energy=_morse_energy,
    _count=_morse_count,
    _v_tilde=lambda p, rho, sigma, x: (rho + sigma) * p["alpha"] ** 2 * np.exp(-2 * x) + rho * p["alpha"] * np.exp(-x),
    _coords=_morse_coords,
    _derived=lambda p: {"Delta": math.sqrt(4 * p["B"] ** 2 + p["alpha"] ** 2)},
    _threshold=lambda p: 0.0,
)


# -- Eckart -----------------------------------------------------------------------------

def _eckart_energy(p, n):
    A, B, a = p["A"], p["B"], p["alpha"]
    k = (2 * n + 1) * A + n * n
    return -((A + n) ** 2) - ((B - 0.5 * a * k) / (A + n)) ** 2 - a * k


def _eckart_count(p):
    A, B, a = p["A"], p["B"], p["alpha"]
    if a == -2.0:
        return INFINITE
    bound = (2 * B + a * A * (A - 1)) / (2 + a)
    n = 0
    while (A + n) ** 2 < bound:
        n += 1
    return n


def _eckart_coords(p):
    a = p["alpha"]
    hi_, lo_ = 1 + a / 2, a / 2  # f = hi_ - lo_ e^{-2x}
    if a == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (0.0, math.inf))
    if a == -2.0:
        return CoordinateForms(
            lambda x: 0.5 * np.expm1(2 * np.asarray(x)),
            lambda u: 0.5 * np.log1p(2 * np.asarray(u)),
            (0.0, math.inf),
        )
    return CoordinateForms(
        lambda x: np.asarray(x) / hi_ + np.log(hi_ - lo_ * np.exp(-2 * np.asarray(x))) / (2 * hi_),
        lambda u: hi_ * np.asarray(u) - 0.5 * math.log(hi_) + 0.5 * np.log1p(lo_ * np.exp(-2 * hi_ * np.asarray(u))),
        (0.0, math.inf),
    )


def _eckart_f(p):
    hi_, lo_ = 1 + p["alpha"] / 2, p["alpha"] / 2
    if hi_ == 0.0:  # alpha = -2: f = e^{-2x}
        return (lambda x: np.exp(-2 * np.asarray(x, dtype=float)), lambda x: -2 * np.asarray(x, dtype=float))
    f = lambda x: hi_ - lo_ * np.exp(-2 * np.asarray(x, dtype=float))
    return f, lambda x: np.log(f(x))


ECKART = PotentialModel(
    id="eckart",
    title="Eckart",
    domain=_HALF_LINE,
    param_names=("A", "B", "alpha"),
    deformation_names=("alpha",),
    defaults={"A": 2.0, "B": 6.0, "alpha": 0.5},
    windows=(
        Window("A >= 3/2", lambda p: p["A"] >= 1.5),
        Window("B > A^2", lambda p: p["B"] > p["A"] ** 2),
        Window("-2 <= alpha != 0", lambda p: p["alpha"] >= -2.0, deformation_only=True),
    ),
    count_kind="conditional",
    v_eff_text="A(A-1) csch^2 x - 2B coth x",
    g_text="alpha e^{-x} sinh x",
    _v_eff=lambda p, x: p["A"] * (p["A"] - 1) / np.sinh(x) ** 2 - 2 * p["B"] / np.tanh(x),
    _g=lambda p: (
        lambda x: 0.5 * p["alpha"] * -np.expm1(-2 * np.asarray(x, dtype=float)),
        lambda x: p["alpha"] * np.exp(-2 * np.asarray(x, dtype=float)),
        lambda x: -2 * p["alpha"] * np.exp(-2 * np.asarray(x, dtype=float)),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, lambda x: 1.0 / np.tanh(x), _HALF_LINE, A=-1.0, B=0.0, C=1.0,
                dphi=lambda x: -1.0 / np.sinh(x) ** 2, name="coth"),
        PrimedConstants(B=-p["alpha"], C=p["alpha"]),
    ),
    _v_coeffs=lambda p: (p["A"] * (p["A"] - 1), -2 * p["B"], -p["A"] * (p["A"] - 1)),
    branch=(-1,),
    _energy=_eckart_energy,
    _count=_eckart_count,
    _v_tilde=lambda p, rho, sigma, x: (
        (rho + sigma) * p["alpha"] ** 2 * np.exp(-4 * x) - rho * p["alpha"] * (2 + p["alpha"]) * np.exp(-2 * x)
    ),
    _coords=_eckart_coords,
    _threshold=lambda p: -2 * p["B"],
    _f=_eckart_f,
)


# -- Scarf I -------------------------------------------------------------------------------

def _scarf_deltas(p):
    A, B, a = p["A"], p["B"], p["alpha"]
    dp = math.sqrt(0.25 * (1 - a) ** 2 + (A + B) * (A + B - 1))
    dm = math.sqrt(0.25 * (1 + a) ** 2 + (A - B) * (A - B - 1))
    return dp, dm


def _scarf_energy(p, n):
    # Leading term taken as +1/4(...)^2: the printed -1/4 makes every level
    # negative and contradicts (A+n)^2 at alpha = 0.
    a = p["alpha"]
    dp, dm = _scarf_deltas(p)
    return 0.25 * (2 * n + 1 + dp + dm) ** 2 + a * (n + 0.5) * (dp - dm) - a * a * (n * n + n + 0.5)


def _scarf_coords(p):
    a = p["alpha"]
    if a == 0.0:
        ident = lambda x: np.asarray(x, dtype=float)
        return CoordinateForms(ident, ident, (-PI / 2, PI / 2))
    k = math.sqrt(1 - a * a)
    U = lambda x: (2 / k) * np.arctan((np.tan(np.asarray(x) / 2) + a) / k)
    u0 = float(U(0.0))
    return CoordinateForms(
        lambda x: U(x) - u0,
        lambda u: 2 * np.arctan(k * np.tan(k * (np.asarray(u) + u0) / 2) - a),
        (float(U(-PI / 2)) - u0, float(U(PI / 2)) - u0),
    )


SCARF1 = PotentialModel(
    id="scarf1",
    title="Scarf I",
    domain=_HALF_PI,
    param_names=("A", "B", "alpha"),
    deformation_names=("alpha",),
    defaults={"A": 3.0, "B": 1.0, "alpha": 0.4},
    windows=(
        Window("0 < B < A - 1", lambda p: 0.0 < p["B"] < p["A"] - 1.0),
        Window("0 < |alpha| < 1", lambda p: 0.0 < abs(p["alpha"]) < 1.0, deformation_only=True),
    ),
    count_kind="infinite",
    v_eff_text="(B^2 + A^2 - A) sec^2 x - B(2A-1) tan x sec x",
    g_text="alpha sin x",
    _v_eff=lambda p, x: (
        (p["B"] ** 2 + p["A"] ** 2 - p["A"]) / np.cos(x) ** 2 - p["B"] * (2 * p["A"] - 1) * np.tan(x) / np.cos(x)
    ),
    _g=lambda p: (
        lambda x: p["alpha"] * np.sin(x),
        lambda x: p["alpha"] * np.cos(x),
        lambda x: -p["alpha"] * np.sin(x),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(3, np.sin, _HALF_PI, A=-1.0, B=1.0, C=0.0, D=1.0, dphi=np.cos, name="sin"),
        PrimedConstants(C=p["alpha"]),
    ),
    _v_coeffs=lambda p: (0.0, -p["B"] * (2 * p["A"] - 1), p["B"] ** 2 + p["A"] ** 2 - p["A"]),
    branch=(1, 1),
    _energy=_scarf_energy,
    _count=lambda p: INFINITE,
    _v_tilde=lambda p, rho, sigma, x: (
        -(rho + sigma) * p["alpha"] ** 2 * np.sin(x) ** 2 - rho * p["alpha"] * np.sin(x) + sigma * p["alpha"] ** 2
    ),
    _coords=_scarf_coords,
    _derived=lambda p: dict(zip(("Delta_plus", "Delta_minus"), _scarf_deltas(p))),
)


# -- Rosen-Morse I -------------------------------------------------------------------------

_ZERO_PI = Interval(0.0, PI)


def _rm1_energy(p, n):
    A, B, a, be = p["A"], p["B"], p["alpha"], p["beta"]
    k = (2 * n + 1) * A + n * n
    return (A + n) ** 2 - ((B + 0.5 * a * k) / (A + n)) ** 2 + be * k


def _rm1_coords(p):
    a, be = p["alpha"], p["beta"]
    k = math.sqrt(4 * (1 + be) - a * a)
    U = lambda x: -(2 / k) * np.arctan((2 / np.tan(np.asarray(x)) + a) / k)
    u0 = float(U(PI / 2))

    def x_of_u(u):
        cot = (k * np.tan(-k * (np.asarray(u) + u0) / 2) - a) / 2
        return PI / 2 - np.arctan(cot)

    return CoordinateForms(lambda x: U(x) - u0, x_of_u, (-(PI / k) - u0, (PI / k) - u0))


def _rm1_vtilde(p, rho, sigma, x):
    a, be = p["alpha"], p["beta"]
    return (
        (rho + sigma) * (0.5 * (a * a - be * be) * np.cos(4 * x) + a * be * np.sin(4 * x))
        + rho * (2 + be) * (-a * np.sin(2 * x) + be * np.cos(2 * x))
        + (-rho + sigma) * 0.5 * (a * a + be * be)
    )


ROSEN_MORSE1 = PotentialModel(
    id="rosen_morse1",
    title="Rosen-Morse I",
    domain=_ZERO_PI,
    param_names=("A", "B", "alpha", "beta"),
    deformation_names=("alpha", "beta"),
    defaults={"A": 2.0, "B": 0.7, "alpha": 0.3, "beta": 0.2},
    windows=(
        Window("A >= 3/2", lambda p: p["A"] >= 1.5),
        Window("beta > -1", lambda p: p["beta"] > -1.0, deformation_only=True),
        Window("|alpha|/2 < sqrt(1+beta)", lambda p: p["beta"] > -1.0 and abs(p["alpha"]) / 2 < math.sqrt(1 + p["beta"]),
               deformation_only=True),
    ),
    count_kind="infinite",
    v_eff_text="A(A-1) csc^2 x + 2B cot x",
    g_text="sin x (alpha cos x + beta sin x)",
    _v_eff=lambda p, x: p["A"] * (p["A"] - 1) / np.sin(x) ** 2 + 2 * p["B"] / np.tan(x),
    _g=lambda p: (
        lambda x: np.sin(x) * (p["alpha"] * np.cos(x) + p["beta"] * np.sin(x)),
        lambda x: p["alpha"] * np.cos(2 * x) + p["beta"] * np.sin(2 * x),
        lambda x: -2 * p["alpha"] * np.sin(2 * x) + 2 * p["beta"] * np.cos(2 * x),
    ),
    _binding=lambda p: ClassBinding(
        PhiSpec(1, lambda x: 1.0 / np.tan(x), _ZERO_PI, A=-1.0, B=0.0, C=-1.0,
                dphi=lambda x: -1.0 / np.sin(x) ** 2, name="cot"),
        PrimedConstants(B=-p["alpha"], C=-p["beta"]),
    ),
    _v_coeffs=lambda p: (p["A"] * (p["A"] - 1), 2 * p["B"], p["A"] * (p["A"] - 1)),
    branch=(-1,),
    _energy=_rm1_energy,
    _count=lambda p: INFINITE,
    _v_tilde=_rm1_vtilde,
    _coords=_rm1_coords,
)


ACTIVE_MODELS: tuple[PotentialModel, ...] = (
    BOX, TRIG_PT, HYPERBOLIC_PT, SHIFTED_OSC, OSC3D, COULOMB, MORSE, ECKART, SCARF1, ROSEN_MORSE1,
)

EXCLUDED_MODELS: tuple[ExcludedModel, ...] = (
    ExcludedModel("scarf2", "Scarf II", "no_positive_f",
                  "no nontrivial parameter values keep the deforming function positive"),
    ExcludedModel("rosen_morse2", "Rosen-Morse II", "no_bound_states",
                  "the deformed problem has no bound state"),
    ExcludedModel("gen_poschl_teller", "generalized Poschl-Teller", "no_bound_states",
                  "the deformed problem has no bound state"),
)

_REGISTRY = {m.id: m for m in ACTIVE_MODELS}


def list_models():
    """All descriptors in fixed order: ten active models, then three excluded ones."""
    return ACTIVE_MODELS + EXCLUDED_MODELS


def get_model(model_id: str) -> PotentialModel:
    try:
        return _REGISTRY[model_id]
    except KeyError:
        excluded = {m.id: m for m in EXCLUDED_MODELS}
        if model_id in excluded:
            m = excluded[model_id]
            raise ParameterError(f"model {model_id} is excluded ({m.reason}): {m.note}") from None
        raise ParameterError(f"unknown model {model_id!r}; known: {', '.join(_REGISTRY)}") from None


def spectrum(model: PotentialModel, params, n: int) -> float:
    return model.spectrum(params, n)


def bound_state_count(model: PotentialModel, params):
    return model.bound_state_count(params)


def v_tilde(model: PotentialModel, params, amb: AmbiguityParams, x):
    return model.v_tilde(params, amb, x)
