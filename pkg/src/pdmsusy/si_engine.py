"""Deformed shape-invariance solver.

The factorization ``H_i = A+(lam_i) A-(lam_i) + sum_{j<=i} eps_j`` with
``A+- = -+ sqrt(f) d/dx sqrt(f) + W`` is solved by coefficient matching:
both sides of

    W(lam_i)^2 + f W'(lam_i) = W(lam_{i+1})^2 - f W'(lam_{i+1}) + eps_{i+1}

are expanded in the finite class basis and the resulting algebraic system
is solved exactly.  All arithmetic here is on coefficients; functions of
``x`` only enter the residual checks.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .deformation import DeformationSpec, Interval
from .errors import SIAmbiguityError, SIUnsolvableError, SIViolationError
from .superpotential import (
    LambdaSet,
    PhiSpec,
    PrimedConstants,
    W_of_phi,
    barred,
    dW_dphi,
)

#: Tolerance for the pointwise identities (scaled by the size of the terms).
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class ClassBinding:
    """A base function together with the deformation's primed constants."""

    phi: PhiSpec
    primed: PrimedConstants = PrimedConstants()

    @property
    def class_tag(self) -> int:
        return self.phi.class_tag

    @property
    def barred(self):
        return barred(self.phi, self.primed)


@dataclass(frozen=True)
class SIParameterTrack:
    """Parameter sets ``lam_i`` and increments ``eps_i`` for ``i = 0..len-1``."""

    lambda_seq: tuple[LambdaSet, ...]
    epsilon_seq: tuple[float, ...]
    binding: ClassBinding
    origin: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.lambda_seq)

    def shifted(self, k: int) -> "SIParameterTrack":
        """Track that starts at ``lam_k`` (the steps are autonomous)."""
        return SIParameterTrack(self.lambda_seq[k:], self.epsilon_seq[k:], self.binding, self.origin)

    @property
    def energies(self) -> np.ndarray:
        return np.cumsum(self.epsilon_seq)


@dataclass(frozen=True)
class SpectrumResult:
    energies: tuple[float, ...]
    count: int | float
    provenance: dict = field(default_factory=dict)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.count)


# -- algebra -----------------------------------------------------------------

def _real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)):
        raise SIUnsolvableError(f"{what} has no real solution")
    return z.real


def _quadratic_root(b: float, c: float, branch: int) -> float:
    """Root of ``t^2 - b t - c = 0`` with ``t = (b + branch*sqrt(b^2 + 4c))/2``."""
    disc = b * b + 4.0 * c
    if disc < 0.0:
        if disc > -1e-12 * max(1.0, b * b):
            disc = 0.0
        else:
            raise SIUnsolvableError("initial shape-invariance quadratic has no real root")
    return 0.5 * (b + branch * math.sqrt(disc))


def _class3_kappas(A: float, B: float):
    k = cmath.sqrt(-A * B)
    if k == 0:
        raise SIUnsolvableError("class-3 system degenerates when A*B = 0")
    return (k, -k), cmath.sqrt(B)


def initial_parameters(binding: ClassBinding, v_coeffs: Sequence[float], branch=(1, 1)):
    """Solve ``V_eff = W^2 - f W' + eps_0`` for ``(lam_0, mu_0)`` and ``eps_0``.

    ``v_coeffs`` are the coefficients of ``V_eff`` in the class basis and
    ``branch`` picks the sign of the square root in each quadratic (the
    physical choice depends on the orientation of ``phi``).
    """
    tag = binding.class_tag
    Ab, Bb, Cb, Db = binding.barred
    c_first, c_mid, c_last = (float(c) for c in v_coeffs)
    if tag == 1:
        # phi^2: lam^2 - Ab lam ; phi: 2 lam mu - Bb lam ; 1: mu^2 - Cb lam + eps
        lam = _quadratic_root(Ab, c_first, branch[0])
        if lam == 0.0:
            raise SIAmbiguityError("lam_0 = 0 leaves mu_0 undetermined")
        mu = (c_mid + lam * Bb) / (2.0 * lam)
        eps = c_last - mu * mu + lam * Cb
        return LambdaSet(lam, mu), eps
    if tag == 2:
        # phi^2: lam^2 - Ab lam ; 1: 2 lam mu - lam Bb + mu Ab + eps ; phi^-2: mu^2 + Bb mu
        lam = _quadratic_root(Ab, c_first, branch[0])
        mu = _quadratic_root(-Bb, c_last, branch[1])
        eps = c_mid - 2.0 * lam * mu + lam * Bb - mu * Ab
        return LambdaSet(lam, mu), eps
    A, B = binding.phi.A, binding.phi.B
    kappas, sqB = _class3_kappas(A, B)
    s = []
    for kappa, sign in zip(kappas, branch):
        r = sqB * (kappa * Cb - A * Db)
        c = B * c_first - A * c_last + kappa * c_mid
        s.append((r + sign * cmath.sqrt(r * r + 4.0 * c)) / 2.0)
    lam, mu = _class3_unpack(s, kappas[0], sqB)
    if B != 0.0:
        eps = (c_last - mu * mu + lam * B * Db) / B
    else:
        eps = (c_first - lam * lam - A * Cb * mu) / A
    return LambdaSet(lam, mu), eps


def _class3_unpack(s, kappa, sqB):
    lam = (s[0] + s[1]) / (2.0 * sqB)
    mu = (s[0] - s[1]) * sqB / (2.0 * kappa)
    return _real(lam, "class-3 lam"), _real(mu, "class-3 mu")


def parameter_step(class_tag: int, lam_i: LambdaSet, constants: PhiSpec, primed: PrimedConstants):
    """One shape-invariance step ``lam_i -> (lam_{i+1}, eps_{i+1})``.

    The ``phi^2`` equation factors as ``(lam' + lam)(lam' - lam - (A+A')) = 0``
    (class 1 and 2).  The translation root ``lam' = lam + A + A'`` is kept;
    the reflection root ``-lam`` reproduces the same Hamiltonian and carries
    no new level.
    """
    Ab, Bb, Cb, Db = barred(constants, primed)
    lm, mu = lam_i.lam, lam_i.mu
    if class_tag == 1:
        lm1 = lm + Ab
        rhs = 2.0 * lm * mu + Bb * (lm + lm1)
        if lm1 == 0.0:
            if abs(rhs) > 1e-14:
                raise SIUnsolvableError("phi-coefficient equation inconsistent at lam = 0")
            if mu != 0.0 or Bb != 0.0:
                raise SIAmbiguityError("lam_{i+1} = 0 leaves mu_{i+1} undetermined")
            mu1 = 0.0  # parity-symmetric track: mu stays 0 for every deformation
        else:
            mu1 = rhs / (2.0 * lm1)
        eps = mu * mu - mu1 * mu1 + Cb * (lm + lm1)
        return LambdaSet(lm1, mu1), eps
    if class_tag == 2:
        lm1 = lm + Ab
        mu1 = mu - Bb
        eps = 2.0 * (lm * mu - lm1 * mu1) + Bb * (lm + lm1) - Ab * (mu + mu1)
        return LambdaSet(lm1, mu1), eps
    if class_tag != 3:
        raise SIUnsolvableError(f"unknown class {class_tag}")
    A, B = constants.A, constants.B
    kappas, sqB = _class3_kappas(A, B)
    s_next = []
    for kappa in kappas:
        s = sqB * lm + kappa / sqB * mu
        r = sqB * (kappa * Cb - A * Db)
        s_next.append(s + r)
    lm1, mu1 = _class3_unpack(s_next, kappas[0], sqB)
    if B != 0.0:
        eps = (mu * mu - mu1 * mu1 + B * Db * (lm + lm1)) / B
    else:
        eps = (lm * lm - lm1 * lm1 - A * Cb * (mu + mu1)) / A
    return LambdaSet(lm1, mu1), eps


def build_track(binding: ClassBinding, lam0: LambdaSet, eps0: float, length: int, origin=None) -> SIParameterTrack:
    lams, eps = [lam0], [float(eps0)]
    for _ in range(length - 1):
        nxt, e = parameter_step(binding.class_tag, lams[-1], binding.phi, binding.primed)
        lams.append(nxt)
        eps.append(float(e))
    return SIParameterTrack(tuple(lams), tuple(eps), binding, dict(origin or {}))


def energy_from_track(track: SIParameterTrack, n: int) -> float:
    """``E_n = eps_0 + ... + eps_n``."""
    if n < 0 or n >= len(track):
        raise IndexError(f"track has {len(track)} entries, level {n} requested")
    return float(math.fsum(track.epsilon_seq[: n + 1]))


# -- pointwise checks ----------------------------------------------------------

def verification_grid(domain: Interval, n: int = 513, margin: float = 1e-3, radius: float = 20.0) -> np.ndarray:
    """Chebyshev points on the (truncated) domain with a relative end margin."""
    lo, hi = domain.truncated(radius)
    pad = margin * (hi - lo)
    lo, hi = lo + pad, hi - pad
    k = np.arange(n)
    t = np.cos(np.pi * (2 * k + 1) / (2 * n))[::-1]
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def _w_pair(binding: ClassBinding, lam: LambdaSet, x):
    spec = binding.phi
    y = np.asarray(spec.phi(x), dtype=float)
    dphi = spec.dphi(x) if spec.dphi is not None else spec.rhs(y)
    return W_of_phi(binding.class_tag, lam, spec, y), dW_dphi(binding.class_tag, lam, spec, y) * dphi


def epsilon_zero(
    v_eff: Callable,
    W: Callable,
    W_prime: Callable,
    f: Callable,
    grid,
    tol: float = IDENTITY_TOL,
) -> float:
    """Constant ``eps_0 = V_eff - W^2 + f W'``; raises if it is not constant.

    The spread is measured relative to ``max(1, |V_eff| + W^2 + |f W'|)``
    pointwise, since the identity is exact only up to rounding of its terms.
    """
    x = np.asarray(grid, dtype=float)
    v, w, wp, fx = (np.asarray(F(x), dtype=float) for F in (v_eff, W, W_prime, f))
    vals = v - w * w + fx * wp
    scale = np.maximum(1.0, np.abs(v) + w * w + np.abs(fx * wp))
    centre = float(np.median(vals))
    spread = float(np.max(np.abs(vals - centre) / scale))
    if not np.isfinite(spread) or spread > tol:
        raise SIViolationError(f"V_eff - W^2 + f W' is not constant (scaled spread {spread:.3e})")
    return centre


def epsilon_zero_spread(v_eff, W, W_prime, f, grid) -> float:
    x = np.asarray(grid, dtype=float)
    v, w, wp, fx = (np.asarray(F(x), dtype=float) for F in (v_eff, W, W_prime, f))
    vals = v - w * w + fx * wp
    scale = np.maximum(1.0, np.abs(v) + w * w + np.abs(fx * wp))
    return float(np.max(np.abs(vals - np.median(vals)) / scale))


def residual_C2(track: SIParameterTrack, i: int, grid, deformation: DeformationSpec) -> float:
    """Largest scaled residual of the shape-invariance identity between ``i`` and ``i+1``."""
    x = np.asarray(grid, dtype=float)
    f = np.asarray(deformation.f(x), dtype=float)
    w0, wp0 = _w_pair(track.binding, track.lambda_seq[i], x)
    w1, wp1 = _w_pair(track.binding, track.lambda_seq[i + 1], x)
    eps = track.epsilon_seq[i + 1]
    lhs = w0 * w0 + f * wp0
    rhs = w1 * w1 - f * wp1 + eps
    scale = np.maximum(1.0, w0 * w0 + np.abs(f * wp0) + w1 * w1 + np.abs(f * wp1) + abs(eps))
    return float(np.max(np.abs(lhs - rhs) / scale))


def partner_potential(v_eff: Callable, f: Callable, W_prime: Callable, x):
    """Potential of the first SUSY partner, ``V_eff + 2 f W'``."""
    x = np.asarray(x, dtype=float)
    out = np.asarray(v_eff(x)) + 2.0 * np.asarray(f(x)) * np.asarray(W_prime(x))
    return float(out) if out.ndim == 0 else out
