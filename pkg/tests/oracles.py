"""Independent reference computations used by the test suite.

Nothing here imports the package's own closed forms: energies are
re-typed from the model formulas, derivatives come from sympy, counts are
enumerated directly and eigenvalues come from LAPACK or from shooting in
the original coordinate.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
import sympy as sp
from scipy import integrate, linalg, optimize

# -- parameter sweeps (five window-respecting points per model) ---------------

SWEEPS = {
    "box": [{"alpha": a} for a in (-0.5, -0.2, 0.3, 0.5, 1.5)],
    "trig_pt": [{"A": A, "alpha": a} for A, a in ((2, 0.3), (1.5, -0.4), (3, 0.8), (2.5, 0.1), (4, -0.7))],
    "hyperbolic_pt": [{"A": A, "alpha": a} for A, a in ((2, 0.5), (1, 0.2), (3, 0.9), (1.5, 0.1), (2.5, 0.7))],
    "shifted_osc": [
        {"omega": w, "b": b, "alpha": a, "beta": be}
        for w, b, a, be in ((2, 0.5, 0.3, 0.2), (1, 0, 0.5, 0), (3, -1, 1, 0.5), (1.5, 0.7, 0.1, -0.3), (2.5, 2, 2, 1))
    ],
    "osc3d": [{"omega": w, "l": l, "alpha": a} for w, l, a in ((2, 1, 0.3), (1, 0, 0.5), (3, 2, 1), (1.5, 0.5, 0.1), (2, 3, 2))],
    "coulomb": [
        {"e2": e, "l": l, "alpha": a} for e, l, a in ((1, 0, 0.1), (1, 0, 0.05), (2, 1, 0.1), (3, 0.5, 0.2), (1, 2, 0.02))
    ],
    "morse": [{"A": A, "B": B, "alpha": a} for A, B, a in ((3, 2, 0.3), (2.5, 1, 0.5), (4, 3, 1), (1.5, 2, 0.2), (5, 1, 0.05))],
    "eckart": [{"A": A, "B": B, "alpha": a} for A, B, a in ((2, 6, 0.5), (2, 6, -2), (1.5, 3, -1), (3, 10, 1), (2.5, 7, -0.5))],
    "scarf1": [{"A": A, "B": B, "alpha": a} for A, B, a in ((3, 1, 0.4), (4, 2, -0.5), (2.5, 1, 0.9), (5, 1, 0.2), (3.5, 2, -0.8))],
    "rosen_morse1": [
        {"A": A, "B": B, "alpha": a, "beta": be}
        for A, B, a, be in ((2, 0.7, 0.3, 0.2), (1.5, 0, 0.5, 0), (3, 2, -0.8, 0.5), (2.5, -1, 1, -0.2), (4, 3, 0.2, 1))
    ],
}

AMBIGUITIES = [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0), (-0.3, 0.7), (0.25, -1.0)]


# -- closed-form deformed energies -----------------------------------------------

def energy(model_id: str, p: dict, n: int) -> float:
    a = p.get("alpha", 0.0)
    if model_id == "box":
        return (1 + a) * (n + 1) ** 2
    if model_id == "trig_pt":
        d = math.sqrt((1 + a) ** 2 + 4 * p["A"] * (p["A"] - 1))
        lam = 0.5 * (1 + a + d)
        return (lam + n) ** 2 - a * (lam - n * n)
    if model_id == "hyperbolic_pt":
        d = math.sqrt((1 - a) ** 2 + 4 * p["A"] * (p["A"] + 1))
        # second printed form; the first carries the opposite sign of alpha (lam + n^2)
        return -((0.5 * (d - 1) - n) ** 2) + a * n * (n + 1) + 0.25 * a * a
    if model_id == "shifted_osc":
        w, b, be = p["omega"], p["b"], p["beta"]
        d = math.sqrt(w * w + a * a)
        k = (2 * n + 1) * d + (2 * n * n + 2 * n + 1) * a
        return (n + 0.5) * d + (n * n + n + 0.5) * a + b * b - ((k * be - b * w) / (d + (2 * n + 1) * a)) ** 2
    if model_id == "osc3d":
        w, l = p["omega"], p["l"]
        d = math.sqrt(w * w + a * a)
        return d * (2 * n + l + 1.5) + a * (2 * (n + l + 1) * (2 * n + 1) + 0.5)
    if model_id == "coulomb":
        e2, l = p["e2"], p["l"]
        return -(((e2 - a * (n * n + (l + 1) * (2 * n + 1))) / (2 * (n + l + 1))) ** 2)
    if model_id == "morse":
        A, B = p["A"], p["B"]
        d = math.sqrt(4 * B * B + a * a)
        return -0.25 * ((2 * B * (2 * A + 1) - ((2 * n + 1) * d + (2 * n * n + 2 * n + 1) * a)) / (d + (2 * n + 1) * a)) ** 2
    if model_id == "eckart":
        A, B = p["A"], p["B"]
        k = (2 * n + 1) * A + n * n
        return -((A + n) ** 2) - ((B - 0.5 * a * k) / (A + n)) ** 2 - a * k
    if model_id == "scarf1":
        A, B = p["A"], p["B"]
        dp = math.sqrt(0.25 * (1 - a) ** 2 + (A + B) * (A + B - 1))
        dm = math.sqrt(0.25 * (1 + a) ** 2 + (A - B) * (A - B - 1))
        # leading sign +1/4: the only choice that reduces to (A+n)^2 at alpha = 0
        return 0.25 * (2 * n + 1 + dp + dm) ** 2 + a * (n + 0.5) * (dp - dm) - a * a * (n * n + n + 0.5)
    if model_id == "rosen_morse1":
        A, B, be = p["A"], p["B"], p["beta"]
        k = (2 * n + 1) * A + n * n
        return (A + n) ** 2 - ((B + 0.5 * a * k) / (A + n)) ** 2 + be * k
    raise KeyError(model_id)


def undeformed_energy(model_id: str, p: dict, n: int) -> float:
    """Constant-mass spectra."""
    if model_id == "box":
        return (n + 1.0) ** 2
    if model_id in ("trig_pt", "scarf1"):
        return (p["A"] + n) ** 2
    if model_id == "hyperbolic_pt":
        return -((p["A"] - n) ** 2)
    if model_id == "shifted_osc":
        return p["omega"] * (n + 0.5)
    if model_id == "osc3d":
        return p["omega"] * (2 * n + p["l"] + 1.5)
    if model_id == "coulomb":
        return -((p["e2"] / (2 * (n + p["l"] + 1))) ** 2)
    if model_id == "morse":
        return -((p["A"] - n) ** 2)
    if model_id == "eckart":
        return -((p["A"] + n) ** 2) - (p["B"] / (p["A"] + n)) ** 2
    if model_id == "rosen_morse1":
        return (p["A"] + n) ** 2 - (p["B"] / (p["A"] + n)) ** 2
    raise KeyError(model_id)


# -- bound-state counts by enumeration -----------------------------------------------

def coulomb_count(e2, l, alpha, n_cap=10_000):
    return sum(1 for n in range(n_cap) if n * n + (l + 1) * (2 * n + 1) < e2 / alpha)


def eckart_count(A, B, alpha, n_cap=10_000):
    if alpha == -2:
        return math.inf
    bound = (2 * B + alpha * A * (A - 1)) / (2 + alpha)
    return sum(1 for n in range(n_cap) if (A + n) ** 2 < bound)


def morse_alpha_max_root(A, B, n):
    """Deformation at which the numerator of E_n changes sign, found by root bracketing."""
    num = lambda a: 2 * B * (2 * A + 1) - ((2 * n + 1) * math.sqrt(4 * B * B + a * a) + (2 * n * n + 2 * n + 1) * a)
    if num(0.0) <= 0:
        return 0.0
    hi = 1.0
    while num(hi) > 0:
        hi *= 2
    return optimize.brentq(num, 0.0, hi, xtol=1e-14, rtol=1e-14)


def morse_count(A, B, alpha):
    """Largest n below A whose numerator is still positive, plus one."""
    admissible = [n for n in range(int(math.ceil(A))) if n < A and alpha < morse_alpha_max_root(A, B, n)]
    return max(admissible) + 1 if admissible else 0


# -- symbolic deforming functions and effective potentials -------------------------

X = sp.Symbol("x", real=True)


def g_symbolic(model_id: str, p: dict):
    a = sp.nsimplify(p.get("alpha", 0.0))
    if model_id in ("box", "trig_pt"):
        return a * sp.sin(X) ** 2
    if model_id == "hyperbolic_pt":
        return a * sp.sinh(X) ** 2
    if model_id == "shifted_osc":
        return a * X**2 + 2 * sp.nsimplify(p["beta"]) * X
    if model_id == "osc3d":
        return a * X**2
    if model_id == "coulomb":
        return a * X
    if model_id == "morse":
        return a * sp.exp(-X)
    if model_id == "eckart":
        return a * sp.exp(-X) * sp.sinh(X)
    if model_id == "scarf1":
        return a * sp.sin(X)
    if model_id == "rosen_morse1":
        return sp.sin(X) * (a * sp.cos(X) + sp.nsimplify(p["beta"]) * sp.sin(X))
    raise KeyError(model_id)


def v_tilde_symbolic(model_id: str, p: dict, rho: float, sigma: float, exact: bool = False):
    """``rho f f'' + sigma f'^2`` as a numpy-callable built from sympy derivatives.

    With ``exact`` the expression is evaluated in 40-digit arithmetic at the
    given float points and rounded once, so the result is correctly rounded.
    """
    f = 1 + g_symbolic(model_id, p)
    expr = sp.nsimplify(rho) * f * sp.diff(f, X, 2) + sp.nsimplify(sigma) * sp.diff(f, X) ** 2
    if not exact:
        return sp.lambdify(X, expr, "numpy")
    fn = sp.lambdify(X, expr, "mpmath")

    def evaluate(x):
        with mpmath.workdps(40):
            return np.array([float(fn(mpmath.mpf(float(t)))) for t in np.atleast_1d(x)])

    return evaluate


def g_derivatives_symbolic(model_id: str, p: dict):
    g = g_symbolic(model_id, p)
    return tuple(sp.lambdify(X, sp.diff(g, X, k), "numpy") for k in range(3))


def v_eff_symbolic(model_id: str, p: dict):
    q = {k: sp.nsimplify(v) for k, v in p.items()}
    if model_id == "box":
        return sp.Integer(0)
    if model_id == "trig_pt":
        return q["A"] * (q["A"] - 1) / sp.cos(X) ** 2
    if model_id == "hyperbolic_pt":
        return -q["A"] * (q["A"] + 1) / sp.cosh(X) ** 2
    raise KeyError(model_id)


def hamiltonian_residual(model_id: str, p: dict, n: int, psi_expr, E: float, points, digits: int = 40):
    """``|H psi - E psi| / max|psi|`` at ``points``, in exact derivatives and high precision.

    ``H psi = -sqrt(f) (f (sqrt(f) psi)')' + V_eff psi``.
    """
    f = 1 + g_symbolic(model_id, p)
    chi = sp.sqrt(f) * psi_expr
    h_psi = -sp.sqrt(f) * sp.diff(f * sp.diff(chi, X), X) + v_eff_symbolic(model_id, p) * psi_expr
    res = h_psi - sp.nsimplify(E) * psi_expr
    vals = [abs(sp.N(res.subs(X, sp.nsimplify(t)), digits)) for t in points]
    scale = max(abs(sp.N(psi_expr.subs(X, sp.nsimplify(t)), digits)) for t in points)
    return float(max(vals) / scale)


def closed_form_psi_symbolic(model_id: str, p: dict, n: int):
    """Closed-form box ground and first excited state (P_0 = 1, P_1 = 3(1+a) y)."""
    a = sp.nsimplify(p["alpha"])
    if model_id == "box":
        P = {0: sp.Integer(1), 1: 3 * (1 + a) * sp.tan(X)}[n]
        return sp.cos(X) ** (n + 1) / (1 + a * sp.sin(X) ** 2) ** sp.Rational(n + 2, 2) * P
    raise KeyError(model_id)


# -- numerical references ----------------------------------------------------------

def tridiagonal_eigenvalues(diag, off, k):
    """Lowest ``k`` eigenvalues from LAPACK."""
    return linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1))


def _shoot(f, fp, v, energy, x_end, parity):
    """Integrate chi = sqrt(f) psi with state (chi, f chi') from x=0 outward."""

    def rhs(x, y):
        fx = f(x)
        return [y[1] / fx, (v(x) - energy) * y[0] / fx]

    y0 = [1.0, 0.0] if parity == 0 else [0.0, 1.0]
    sol = integrate.solve_ivp(rhs, (0.0, x_end), y0, method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[0, -1]


def hyperbolic_bound_states(A, alpha, e_lo=None, x_end=14.0, samples=400):
    """Eigenvalues below 0 of the deformed hyperbolic problem, by shooting in x.

    Dirichlet for chi at a far point: f grows like exp(2|x|) so the flat
    coordinate has finite length and chi is pinned to zero there.
    """
    f = lambda x: 1.0 + alpha * math.sinh(x) ** 2
    v = lambda x: -A * (A + 1) / math.cosh(x) ** 2
    e_lo = -A * (A + 1) if e_lo is None else e_lo
    roots = []
    for parity in (0, 1):
        es = np.linspace(e_lo, -1e-6, samples)
        vals = [_shoot(f, None, v, e, x_end, parity) for e in es]
        for (e0, v0), (e1, v1) in zip(zip(es, vals), zip(es[1:], vals[1:])):
            if v0 * v1 < 0:
                roots.append(optimize.brentq(lambda e: _shoot(f, None, v, e, x_end, parity), e0, e1, xtol=1e-12))
    return sorted(roots)
