"""Bernoulli coordinate selectors and their deviation tails.

delta_1..delta_n are i.i.d. {0,1} selectors with mean delta; the random
subset sigma keeps the coordinates with delta_i = 1.  The centered linear
statistic  Z = sum_i (delta_i - delta) a_i  has a product-form moment
generating function, so its Chernoff bound can be computed exactly, and
for structured weight vectors the tail itself is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CoordinateSubset, InputError, RngStream, as_vector
from .orlicz import psi_norm

# fixed MC chunk size (in scalar draws) so results are bit-reproducible
_CHUNK_SCALARS = 4_000_000


@dataclass(frozen=True)
class SelectorDraw:
    delta: float
    outcomes: np.ndarray
    subset: CoordinateSubset


def _check_delta(delta: float) -> float:
    if not (0.0 < delta <= 1.0):
        raise InputError("BAD_DELTA", f"selector mean must lie in (0, 1], got {delta}")
    return float(delta)


def draw_selectors(n: int, delta: float, rng: RngStream) -> SelectorDraw:
    """One draw of n independent mean-delta selectors."""
    delta = _check_delta(delta)
    if n < 1:
        raise InputError("DIMENSION", "need at least one coordinate")
    gen = rng.generator()
    outcomes = (gen.random(n) < delta).astype(np.int8)
    outcomes.setflags(write=False)
    return SelectorDraw(delta, outcomes, CoordinateSubset.from_mask(outcomes == 1))


def exact_log_mgf(a, delta: float, lam: float) -> float:
    """log E exp(lam * Z) for Z = sum (delta_i - delta) a_i, computed exactly.

    Each factor is (1-delta) e^(-lam delta a_i) + delta e^(lam (1-delta) a_i);
    the product is accumulated in log space.
    """
    v = as_vector(a)
    delta = _check_delta(delta)
    if not np.isfinite(lam):
        raise InputError("BAD_INPUT", "lambda must be finite")
    with np.errstate(divide="ignore"):
        log_q = math.log1p(-delta) if delta < 1.0 else -math.inf
        term0 = log_q - lam * delta * v
        term1 = math.log(delta) + lam * (1.0 - delta) * v
    return float(np.logaddexp(term0, term1).sum())


def exact_mgf(a, delta: float, lam: float) -> float:
    return float(np.exp(exact_log_mgf(a, delta, lam)))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def chernoff_tail_bound(a, delta: float, t: float) -> float:
    """inf over lam > 0 of exp(-lam t delta n) E exp(lam Z), never above 1.

    The exponent is convex in lam; the infimum is located on a logarithmic
    grid over [1e-4, 1e4] and polished by golden-section search between the
    bracketing grid neighbours.
    """
    v = as_vector(a)
    delta = _check_delta(delta)
    if t <= 0:
        raise InputError("BAD_INPUT", f"threshold scale t must be positive, got {t}")
    tau = t * delta * v.size

    def objective(lam: float) -> float:
        return -lam * tau + exact_log_mgf(v, delta, lam)

    grid = np.geomspace(1e-4, 1e4, 161)
    vals = np.array([objective(l) for l in grid])
    k = int(np.argmin(vals))
    lo = math.log(grid[max(k - 1, 0)])
    hi = math.log(grid[min(k + 1, grid.size - 1)])

    # golden-section on log lambda
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = objective(math.exp(x1))
    f2 = objective(math.exp(x2))
    for _ in range(80):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = objective(math.exp(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = objective(math.exp(x2))
    best = min(float(vals[k]), f1, f2)
    return min(1.0, math.exp(best))


def _binom_tail_at_least(n: int, p: float, k0: int) -> float:
    """P{Bin(n, p) >= k0} by direct log-space summation."""
    if k0 <= 0:
        return 1.0
    if k0 > n:
        return 0.0
    if p >= 1.0:
        return 1.0
    if p <= 0.0:
        return 0.0
    k = np.arange(k0, n + 1, dtype=float)
    log_pmf = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(x + 1) for x in k])
        - np.array([math.lgamma(n - x + 1) for x in k])
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    return float(min(1.0, np.exp(log_pmf).sum()))


def exact_tail_probability(a, delta: float, threshold: float) -> float | None:
    """P{Z > threshold} exactly, where tractable; None otherwise.

    Covered cases: all nonzero weights equal to one positive value (the
    statistic reduces to a scaled centered binomial), and n <= 20 (full
    enumeration of selector outcomes).
    """
    v = as_vector(a)
    delta = _check_delta(delta)
    if delta == 1.0:
        return 1.0 if 0.0 > threshold else 0.0
    nz = v[v != 0.0]
    if nz.size == 0:
        return 1.0 if 0.0 > threshold else 0.0

    uniq = np.unique(nz)
    if uniq.size == 1 and uniq[0] > 0:
        h = float(uniq[0])
        s = int(nz.size)
        x = threshold / h + delta * s
        k0 = math.floor(x) + 1
        return _binom_tail_at_least(s, delta, k0)

    if v.size <= 20:
        n = v.size
        ids = np.arange(2**n, dtype=np.uint32)
        masks = ((ids[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.uint8)
        sums = masks @ v - delta * v.sum()
        k = masks.sum(axis=1).astype(float)
        probs = np.exp(k * math.log(delta) + (n - k) * math.log1p(-delta))
        return float(probs[sums > threshold].sum())

    return None


@dataclass(frozen=True)
class TailExperimentReport:
    t: float
    delta: float
    n: int
    trials: int
    empirical_prob: float
    two_sided_prob: float
    chernoff_bound: float
    exact_prob: float | None
    fitted_c: float | None
    psi1: float
    flags: tuple[str, ...]


def tail_experiment(a, delta: float, t: float, trials: int, rng: RngStream) -> TailExperimentReport:
    """Monte-Carlo tail frequency of Z > t delta n against its certificates.

    Reports the one- and two-sided frequencies, the exact Chernoff bound,
    the exact probability when the weight vector admits one, and the
    constant c fitted to exp(-c t^2 delta n / M^2) with M the psi_1 norm.
    """
    v = as_vector(a)
    delta = _check_delta(delta)
    if trials < 1:
        raise InputError("BAD_INPUT", "need at least one trial")
    if t <= 0:
        raise InputError("BAD_INPUT", "threshold scale t must be positive")
    m_psi = psi_norm(v, 1.0).value
    if m_psi == 0.0:
        raise InputError("BAD_INPUT", "weight vector must be nonzero")

    n = v.size
    tau = t * delta * n
    flags: list[str] = []
    if delta > 0.5:
        flags.append("DELTA_ABOVE_HALF")
    if t >= m_psi / 2.0:
        flags.append("T_EXCEEDS_HALF_M")

    gen = rng.generator()
    shift = delta * v.sum()
    chunk_rows = max(1, _CHUNK_SCALARS // n)
    pos = 0
    two = 0
    done = 0
    while done < trials:
        rows = min(chunk_rows, trials - done)
        z = (gen.random((rows, n)) < delta) @ v - shift
        pos += int((z > tau).sum())
        two += int((np.abs(z) > tau).sum())
        done += rows

    empirical = pos / trials
    two_sided = two / trials
    exact = exact_tail_probability(v, delta, tau)
    bound = chernoff_tail_bound(v, delta, t)

    if empirical > 0.0:
        fitted_c = -math.log(empirical) * m_psi**2 / (t**2 * delta * n)
    else:
        fitted_c = None
        flags.append("UNRESOLVED_TAIL")

    return TailExperimentReport(
        t=float(t),
        delta=delta,
        n=n,
        trials=trials,
        empirical_prob=empirical,
        two_sided_prob=two_sided,
        chernoff_bound=bound,
        exact_prob=exact,
        fitted_c=fitted_c,
        psi1=m_psi,
        flags=tuple(flags),
    )


def almost_isometry_experiment(f, delta: float, eps: float, trials: int, rng: RngStream) -> float:
    """Fraction of selector draws where the normalized projection of f
    lands within (1 +/- eps) of its full norm.  Empty draws count as failures.
    """
    v = as_vector(f)
    delta = _check_delta(delta)
    if not (0.0 < eps < 1.0):
        raise InputError("BAD_EPSILON", f"eps must lie in (0, 1), got {eps}")
    if trials < 1:
        raise InputError("BAD_INPUT", "need at least one trial")
    sq = v**2
    full = math.sqrt(float(sq.mean()))
    if full == 0.0:
        raise InputError("BAD_INPUT", "vector must be nonzero")

    n = v.size
    lo2 = ((1.0 - eps) * full) ** 2
    hi2 = ((1.0 + eps) * full) ** 2
    gen = rng.generator()
    chunk_rows = max(1, _CHUNK_SCALARS // n)
    hits = 0
    done = 0
    while done < trials:
        rows = min(chunk_rows, trials - done)
        mask = gen.random((rows, n)) < delta
        k = mask.sum(axis=1)
        nonempty = k > 0
        mean_sq = np.zeros(rows)
        mean_sq[nonempty] = (mask[nonempty] @ sq) / k[nonempty]
        hits += int(np.count_nonzero(nonempty & (mean_sq >= lo2) & (mean_sq <= hi2)))
        done += rows
    return hits / trials
