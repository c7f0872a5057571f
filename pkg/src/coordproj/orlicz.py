"""Exponential-moment (psi_p) norms on the uniform finite space.

The psi_p norm of f is the smallest lam > 0 with

    (1/n) sum_i exp(|f(i)|^p / lam^p) <= e.

The left side is continuous and strictly decreasing in lam (for f != 0),
so the norm is the unique root of mean-exp = e and bisection is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InputError, as_vector

_MAX_ITER = 200


@dataclass(frozen=True)
class PsiNormResult:
    value: float
    p: float
    iterations: int
    residual: float


def _log_mean_exp(z: np.ndarray) -> float:
    # shift by the max so the largest exponent is 0; immune to overflow
    m = float(z.max())
    return m + math.log(float(np.mean(np.exp(z - m))))


def psi_norm(f, p: float, tol: float = 1e-10) -> PsiNormResult:
    """psi_p norm by bisection.

    Args:
        f: vector of function values.
        p: Orlicz exponent, p >= 1.
        tol: absolute width of the final bisection bracket on lam.

    Returns:
        PsiNormResult with the norm, iteration count, and the residual
        |mean exp(|f|^p/lam^p) - e| at the returned value.
    """
    v = as_vector(f)
    if v.size == 0:
        raise InputError("DIMENSION", "psi norm needs at least one value")
    if p < 1:
        raise InputError("BAD_EXPONENT", f"exponent must satisfy p >= 1, got {p}")
    if tol <= 0:
        raise InputError("BAD_INPUT", "tolerance must be positive")

    a = np.abs(v)
    peak = float(a.max())
    if peak == 0.0:
        return PsiNormResult(0.0, float(p), 0, 0.0)

    n = v.size
    log_fill = math.log(n * (math.e - 1.0) + 1.0)

    def excess(lam: float) -> float:
        return _log_mean_exp((a / lam) ** p) - 1.0

    # the one-spike closed form scales the lower bracket; 1e-3 / 1e3 padding
    lo = 1e-3 * peak / log_fill ** (1.0 / p)
    hi = 1e3 * peak
    guard = 0
    while excess(lo) <= 0.0 and guard < 60:
        lo *= 0.5
        guard += 1
    while excess(hi) > 0.0 and guard < 120:
        hi *= 2.0
        guard += 1

    iterations = 0
    while hi - lo > tol and iterations < _MAX_ITER:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    lam = 0.5 * (lo + hi)
    residual = abs(math.exp(_log_mean_exp((a / lam) ** p)) - math.e)
    return PsiNormResult(lam, float(p), iterations, residual)


def psi_power_identity_check(a, p: float, tol: float = 1e-8) -> bool:
    """Check psi_p(a)^p == psi_1(|a|^p) within tol.

    The p-th power of the psi_p norm of a equals the psi_1 norm of the
    vector of p-th powers; both sides are computed independently.
    """
    v = as_vector(a)
    lhs = psi_norm(v, p, tol=min(1e-12, tol * 1e-2)).value ** p
    rhs = psi_norm(np.abs(v) ** p, 1.0, tol=min(1e-12, tol * 1e-2)).value
    return abs(lhs - rhs) <= tol


def tail_to_psi2_bound(a: float) -> float:
    """Tail-decay constant to psi_2 bound.

    If the empirical measure of {|f| > t} is at most exp(1 - t^2/a^2) for
    all t > 0 with a >= 1, then the psi_2 norm of f is at most 2a.
    """
    if not np.isfinite(a) or a < 1.0:
        raise InputError("BAD_CONSTANT", f"tail constant must be >= 1, got {a}")
    return 2.0 * float(a)
