"""Monte-Carlo complexity estimates for function classes.

Gaussian and Rademacher averages, the projected-sup parameter ell_k,
the growth threshold t(F, eps), minimum-over-signs vector balancing,
and an entropy-integral audit that ties the Gaussian average of a
bounded class to its shattering dimension profile.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    CoordinateSubset,
    FittedConstant,
    FunctionClass,
    InputError,
    RngStream,
    SizeCapError,
    as_vector,
    banach_norm,
    digest_inputs,
)
from .shatter import vc_dimension

__all__ = [
    "ComplexityEstimate",
    "SignMinimumResult",
    "TParameterResult",
    "TypeComparisonRow",
    "TypeInfratypeReport",
    "EntropyIntegralAudit",
    "gaussian_complexity",
    "rademacher_complexity",
    "ell_parameter",
    "t_parameter",
    "min_sign_norm",
    "type_infratype_report",
    "entropy_integral_audit",
    "fit_gaussian_rademacher_ratio",
]

_MIN_TRIALS = 100
_EXHAUSTIVE_TUPLE_CAP = 100_000
_EXACT_SIGN_CAP = 24
_SIGN_CHUNK = 1 << 16
# rows per weight block; fixed function of the shape so reruns chunk alike
_BLOCK_SCALARS = 2_000_000


@dataclass(frozen=True)
class ComplexityEstimate:
    """Monte-Carlo estimate of a weighted-supremum average."""

    mean: float
    std_error: float
    trials: int
    kind: str
    method: str = "monte-carlo"
    support: Optional[tuple] = None


@dataclass(frozen=True)
class SignMinimumResult:
    """Minimum over sign choices of the norm of a signed vector sum."""

    value: float
    signs: tuple
    method: str


@dataclass(frozen=True)
class TParameterResult:
    """Largest tested cardinality whose ell estimate clears eps * k."""

    value: int
    capped: bool
    epsilon: float
    kind: str
    per_k: tuple = ()


@dataclass(frozen=True)
class TypeComparisonRow:
    lam: float
    subset_size: int
    m_emp: float
    c_emp: float
    min_sign_method: str


@dataclass(frozen=True)
class TypeInfratypeReport:
    """Gaussian average versus subset min-sign bounds for one vector set."""

    n: int
    norm: object
    gaussian_mean: float
    gaussian_std_error: float
    trials: int
    rows: tuple
    flags: tuple = ()


@dataclass(frozen=True)
class EntropyIntegralAudit:
    """Fitted constant relating a Gaussian average to a dimension integral."""

    constant: FittedConstant
    e_mean: float
    e_std_error: float
    trials: int
    grid: tuple
    vc_curve: tuple
    integral: float
    flags: tuple = ()


def _check_trials(trials):
    if int(trials) != trials or trials < _MIN_TRIALS:
        raise InputError("BAD_TRIALS", f"trials must be an integer >= {_MIN_TRIALS}, got {trials}")
    return int(trials)


def _draw_weights(gen, rows, cols, kind):
    if kind == "gaussian":
        return gen.standard_normal((rows, cols))
    if kind == "rademacher":
        return gen.integers(0, 2, size=(rows, cols)).astype(np.float64) * 2.0 - 1.0
    raise InputError("BAD_KIND", f"kind must be gaussian or rademacher, got {kind!r}")


def _sup_average(values, trials, gen, kind):
    """Mean and standard error of sup_f |sum_i w_i f(i)| over random weights."""
    m, k = values.shape
    if k == 0 or m == 0:
        return 0.0, 0.0
    rows = max(1, _BLOCK_SCALARS // max(1, m))
    total = 0.0
    total_sq = 0.0
    done = 0
    vt = values.T
    while done < trials:
        r = min(rows, trials - done)
        w = _draw_weights(gen, r, k, kind)
        sups = np.abs(w @ vt).max(axis=1)
        total += float(sups.sum())
        total_sq += float((sups * sups).sum())
        done += r
    mean = total / trials
    if trials > 1:
        var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    else:
        var = 0.0
    return mean, math.sqrt(var / trials)


def _project_columns(F, sigma):
    if sigma is None:
        return F.values
    if not isinstance(sigma, CoordinateSubset):
        raise InputError("BAD_SUBSET", "sigma must be a CoordinateSubset or None")
    if sigma.ambient_n != F.n:
        raise InputError("DIMENSION", f"subset ambient {sigma.ambient_n} != class width {F.n}")
    if sigma.size == 0:
        return F.values[:, :0]
    return F.values[:, list(sigma.zero_based())]


def gaussian_complexity(F, sigma=None, trials=2000, rng=None):
    """Estimates E sup_f |sum_{i in sigma} g_i f(i)| with standard normals.

    Args:
        F: FunctionClass to average over.
        sigma: CoordinateSubset restricting the sum, or None for all coordinates.
        trials: Monte-Carlo sample count, at least 100.
        rng: RngStream supplying the weights.

    Returns:
        ComplexityEstimate with kind "gaussian".
    """
    return _complexity(F, sigma, trials, rng, "gaussian")


def rademacher_complexity(F, sigma=None, trials=2000, rng=None):
    """Same average as gaussian_complexity with uniform +-1 weights."""
    return _complexity(F, sigma, trials, rng, "rademacher")


def _complexity(F, sigma, trials, rng, kind):
    trials = _check_trials(trials)
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    values = _project_columns(F, sigma)
    mean, se = _sup_average(values, trials, rng.generator(), kind)
    return ComplexityEstimate(mean=mean, std_error=se, trials=trials, kind=kind)


def _tuple_weights(gen, trials, k, kind):
    # drawn column-major so the first k columns coincide across nested k
    if kind == "gaussian":
        return gen.standard_normal((k, trials)).T
    return gen.integers(0, 2, size=(k, trials)).T.astype(np.float64) * 2.0 - 1.0


def _tuple_mean(values, tup, weights):
    cols = values[:, list(tup)]
    sups = np.abs(weights @ cols.T).max(axis=1)
    mean = float(sups.mean())
    n = sups.size
    se = float(sups.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return mean, se


def _tuple_mean_exact_signs(values, tup):
    """Exact Rademacher mean over all sign patterns for one tuple."""
    k = len(tup)
    cols = values[:, list(tup)]
    idx = np.arange(1 << k, dtype=np.uint32)
    signs = (((idx[:, None] >> np.arange(k)) & 1) * 2.0 - 1.0)
    sups = np.abs(signs @ cols.T).max(axis=1)
    return float(sups.mean()), 0.0


def ell_parameter(F, k, trials=2000, rng=None, kind="gaussian",
                  exhaustive_cap=_EXHAUSTIVE_TUPLE_CAP, restarts=4, exact_signs=False):
    """Estimates ell_k(F): the largest k-point weighted-sup average.

    The supremum runs over k-tuples of domain points with repetition.
    When the multiset count C(n+k-1, k) is within exhaustive_cap every
    tuple is scored against one shared weight sample; otherwise greedy
    coordinate ascent with restarts is used and the result is a lower
    bound. With exact_signs and kind "rademacher" the per-tuple mean is
    an exact average over all 2^k sign patterns instead of Monte Carlo.

    Returns:
        ComplexityEstimate with method "exhaustive", "exhaustive-exact",
        or "greedy", and support holding the best 1-based tuple.
    """
    trials = _check_trials(trials)
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    if int(k) != k or k < 1:
        raise InputError("BAD_K", f"k must be a positive integer, got {k}")
    k = int(k)
    n = F.n
    if F.m == 0 or n == 0:
        return ComplexityEstimate(0.0, 0.0, trials, kind, method="exhaustive", support=())
    values = F.values
    exact = bool(exact_signs) and kind == "rademacher" and (1 << k) * max(1, F.m) <= 1 << 22

    def score(tup, weights):
        if exact:
            return _tuple_mean_exact_signs(values, tup)
        return _tuple_mean(values, tup, weights)

    if math.comb(n + k - 1, k) <= exhaustive_cap:
        weights = None if exact else _tuple_weights(rng.generator(), trials, k, kind)
        best = None
        for tup in itertools.combinations_with_replacement(range(n), k):
            mean, se = score(tup, weights)
            if best is None or mean > best[0]:
                best = (mean, se, tup)
        method = "exhaustive-exact" if exact else "exhaustive"
        return ComplexityEstimate(best[0], best[1], trials, kind, method=method,
                                  support=tuple(i + 1 for i in best[2]))

    # greedy coordinate ascent from a deterministic start plus random restarts
    gen = rng.generator()
    weights = None if exact else _tuple_weights(rng.substream(0).generator(), trials, k, kind)
    peak = int(np.argmax(np.abs(values).max(axis=0)))
    starts = [tuple([peak] * k)]
    for _ in range(max(0, restarts - 1)):
        starts.append(tuple(sorted(gen.integers(0, n, size=k).tolist())))
    best = None
    for start in starts:
        tup = list(start)
        cur_mean, cur_se = score(tuple(tup), weights)
        improved = True
        while improved:
            improved = False
            for pos in range(k):
                orig = tup[pos]
                for cand in range(n):
                    if cand == orig:
                        continue
                    tup[pos] = cand
                    mean, se = score(tuple(tup), weights)
                    if mean > cur_mean + 1e-12:
                        cur_mean, cur_se = mean, se
                        orig = cand
                        improved = True
                    else:
                        tup[pos] = orig
                tup[pos] = orig
        if best is None or cur_mean > best[0]:
            best = (cur_mean, cur_se, tuple(sorted(tup)))
    return ComplexityEstimate(best[0], best[1], trials, kind, method="greedy",
                              support=tuple(i + 1 for i in best[2]))


def t_parameter(F, eps, k_max, trials=2000, rng=None, kind="gaussian", exact_signs=False):
    """Largest k <= k_max whose ell_k estimate reaches eps * k.

    A k qualifies when mean(ell_k) >= eps * k - std_error, the one
    standard error of slack guarding Monte-Carlo boundary flicker;
    exact sign enumeration carries zero slack. Returns value 0 when no
    k qualifies and sets capped when k = k_max itself qualifies.
    """
    if not (eps > 0.0) or not math.isfinite(eps):
        raise InputError("BAD_EPSILON", f"eps must be positive and finite, got {eps}")
    if int(k_max) != k_max or k_max < 1:
        raise InputError("BAD_K", f"k_max must be a positive integer, got {k_max}")
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    k_max = int(k_max)
    rows = []
    value = 0
    for k in range(1, k_max + 1):
        est = ell_parameter(F, k, trials=trials, rng=rng.substream(k), kind=kind,
                            exact_signs=exact_signs)
        rows.append(est)
        if est.mean >= eps * k - est.std_error:
            value = k
    return TParameterResult(value=value, capped=(value == k_max), epsilon=float(eps),
                            kind=kind, per_k=tuple(rows))


def _stack_unit_rows(vectors):
    rows = [as_vector(v) for v in vectors]
    if not rows:
        raise InputError("EMPTY_INPUT", "at least one vector is required")
    dim = rows[0].size
    for r in rows:
        if r.size != dim:
            raise InputError("DIMENSION", "vectors must share a common dimension")
    return np.vstack(rows)


def _batch_norms(sums, norm):
    if norm == "sup":
        return np.abs(sums).max(axis=1)
    p = float(norm)
    return (np.abs(sums) ** p).sum(axis=1) ** (1.0 / p)


def min_sign_norm(vectors, norm=2.0, mode="exact", rng=None,
                  max_exact=_EXACT_SIGN_CAP, restarts=16):
    """Minimizes ||sum_i eta_i v_i|| over sign choices eta_i = +-1.

    Exact mode enumerates 2^(count-1) patterns, the global sign flip
    being free, and certifies the minimum; it refuses more than
    max_exact vectors. Heuristic mode signs vectors greedily in
    descending norm order, runs single-flip descent, and restarts from
    random orders, so its value is an upper bound on the minimum.

    Returns:
        SignMinimumResult; signs are normalized to signs[0] = +1.
    """
    x = _stack_unit_rows(vectors)
    count = x.shape[0]
    if count == 1:
        return SignMinimumResult(float(banach_norm(x[0], norm)), (1,), mode)
    if mode == "exact":
        if count > max_exact:
            raise SizeCapError(
                f"exact sign search over {count} vectors needs 2^{count - 1} patterns",
                cost_estimate=float(2 ** (count - 1)))
        rest = x[1:]
        bits = np.arange(count - 1)
        best_val = math.inf
        best_idx = 0
        for lo in range(0, 1 << (count - 1), _SIGN_CHUNK):
            hi = min(lo + _SIGN_CHUNK, 1 << (count - 1))
            idx = np.arange(lo, hi, dtype=np.int64)
            signs = ((idx[:, None] >> bits) & 1) * 2.0 - 1.0
            vals = _batch_norms(x[0] + signs @ rest, norm)
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val = float(vals[j])
                best_idx = lo + j
        signs = tuple([1] + [int(((best_idx >> b) & 1) * 2 - 1) for b in range(count - 1)])
        return SignMinimumResult(best_val, signs, "exact")
    if mode != "heuristic":
        raise InputError("BAD_MODE", f"mode must be exact or heuristic, got {mode!r}")
    if rng is None:
        rng = RngStream(0)
    gen = rng.generator()
    row_norms = _batch_norms(x, norm)
    orders = [tuple(np.argsort(-row_norms, kind="stable").tolist())]
    for _ in range(max(0, restarts - 1)):
        orders.append(tuple(gen.permutation(count).tolist()))
    best_val = math.inf
    best_signs = None
    for order in orders:
        signs = np.zeros(count)
        total = np.zeros(x.shape[1])
        for i in order:
            plus = banach_norm(total + x[i], norm)
            minus = banach_norm(total - x[i], norm)
            s = 1.0 if plus <= minus else -1.0
            signs[i] = s
            total = total + s * x[i]
        val = float(banach_norm(total, norm))
        improved = True
        while improved:
            improved = False
            for i in range(count):
                cand = total - 2.0 * signs[i] * x[i]
                cval = float(banach_norm(cand, norm))
                if cval < val - 1e-15:
                    total = cand
                    signs[i] = -signs[i]
                    val = cval
                    improved = True
        if val < best_val:
            best_val = val
            best_signs = signs.copy()
    if best_signs[0] < 0:
        best_signs = -best_signs
    return SignMinimumResult(best_val, tuple(int(s) for s in best_signs), "heuristic")


def type_infratype_report(vectors, norm=2.0, delta_grid=(0.05, 0.1, 0.2),
                          trials=2000, rng=None, subsets_per_size=8,
                          max_exact=_EXACT_SIGN_CAP):
    """Compares the Gaussian norm average against subset sign minima.

    For each lambda in delta_grid, subsets of size floor(lambda * n)
    are sampled and M_emp(lambda) is the running maximum over all
    sampled subsets of size up to lambda * n of min-sign-norm / sqrt(size).
    The implied ratio c_emp = E / (M_emp * sqrt(n / lambda)) is reported
    per lambda, with E the Monte-Carlo mean of ||sum_i g_i v_i||.

    Args:
        vectors: points inside the unit ball of the chosen norm.
        norm: "sup" or a p >= 1 exponent.
        delta_grid: increasing fractions in (0, 1].
        trials: Monte-Carlo sample count for the Gaussian side.
        rng: RngStream; substream 0 drives the weights, substream 1 the subsets.
        subsets_per_size: subsets sampled per grid size.
        max_exact: largest subset solved by exact sign enumeration.
    """
    trials = _check_trials(trials)
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    x = _stack_unit_rows(vectors)
    n = x.shape[0]
    for i in range(n):
        if banach_norm(x[i], norm) > 1.0 + 1e-9:
            raise InputError("BAD_INPUT", f"vector {i + 1} lies outside the unit ball")
    grid = [float(d) for d in delta_grid]
    if not grid or any(not (0.0 < d <= 1.0) for d in grid) or grid != sorted(grid):
        raise InputError("BAD_GRID", "delta_grid must be increasing fractions in (0, 1]")

    gen_w = rng.substream(0).generator()
    done = 0
    total = 0.0
    total_sq = 0.0
    rows_per = max(1, _BLOCK_SCALARS // max(1, x.shape[1]))
    while done < trials:
        r = min(rows_per, trials - done)
        sums = gen_w.standard_normal((r, n)) @ x
        vals = _batch_norms(sums, norm)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += r
    e_mean = total / trials
    var = max(0.0, (total_sq - trials * e_mean * e_mean) / (trials - 1)) if trials > 1 else 0.0
    e_se = math.sqrt(var / trials)

    gen_s = rng.substream(1).generator()
    flags = set()
    rows = []
    running_m = 0.0
    sub_id = 2
    for lam in grid:
        size = max(1, int(math.floor(lam * n)))
        methods = set()
        draws = 1 if size == n else subsets_per_size
        for _ in range(draws):
            idx = np.sort(gen_s.choice(n, size=size, replace=False))
            chosen = [x[i] for i in idx]
            if size <= max_exact:
                res = min_sign_norm(chosen, norm=norm, mode="exact")
            else:
                res = min_sign_norm(chosen, norm=norm, mode="heuristic",
                                    rng=rng.substream(sub_id))
                flags.add("HEURISTIC_MIN_SIGN")
            sub_id += 1
            methods.add(res.method)
            running_m = max(running_m, res.value / math.sqrt(size))
        if running_m > 0.0:
            c_emp = e_mean / (running_m * math.sqrt(n / lam))
        else:
            c_emp = math.inf
            flags.add("ZERO_MIN_SIGN")
        rows.append(TypeComparisonRow(lam=lam, subset_size=size, m_emp=running_m,
                                      c_emp=c_emp,
                                      min_sign_method="+".join(sorted(methods))))
    return TypeInfratypeReport(n=n, norm=norm, gaussian_mean=e_mean,
                               gaussian_std_error=e_se, trials=trials,
                               rows=tuple(rows), flags=tuple(sorted(flags)))


_GRID_FLOOR = 1e-4


def entropy_integral_audit(F, trials=2000, rng=None, grid_points=17):
    """Fits K in E <= K sqrt(n) * integral sqrt(vc(F, t) ln(2/t)) dt.

    E is the Monte-Carlo Gaussian average of the class, the integral
    runs from E/n to 1 by the trapezoid rule on a uniform grid, and
    vc is evaluated exactly at each grid point. Classes must be
    bounded by 1. Flag INTEGRAL_ZERO marks a vanishing dimension
    profile, in which case the fitted value degenerates.
    """
    trials = _check_trials(trials)
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    if int(grid_points) != grid_points or grid_points < 2:
        raise InputError("BAD_GRID", f"grid_points must be an integer >= 2, got {grid_points}")
    if F.m == 0 or F.n == 0:
        raise InputError("BAD_CLASS", "the class must be nonempty")
    if float(np.abs(F.values).max()) > 1.0 + 1e-12:
        raise InputError("BAD_CLASS", "class values must be bounded by 1")
    n = F.n
    est = gaussian_complexity(F, None, trials=trials, rng=rng.substream(0))
    lo = min(max(est.mean / n, _GRID_FLOOR), 1.0 - 1e-6)
    grid = np.linspace(lo, 1.0, int(grid_points))
    vc_curve = []
    for t in grid:
        vc_curve.append(vc_dimension(F, float(t)).dimension)
    vc_arr = np.asarray(vc_curve, dtype=np.float64)
    integrand = np.sqrt(vc_arr * np.log(2.0 / grid))
    integral = float(np.trapezoid(integrand, grid))
    flags = []
    if integral <= 0.0:
        flags.append("INTEGRAL_ZERO")
        value = 0.0 if est.mean == 0.0 else math.inf
    else:
        value = est.mean / (math.sqrt(n) * integral)
    protocol = (
        f"K = E / (sqrt(n) * I) with E the {trials}-trial Gaussian average of the "
        f"class and I the trapezoid integral of sqrt(vc(F, t) ln(2/t)) over "
        f"{int(grid_points)} uniform points on [max(E/n, {_GRID_FLOOR:g}), 1]; "
        f"vc evaluated exactly at each point."
    )
    constant = FittedConstant(
        name="K_complexity", value=value, protocol=protocol,
        inputs_digest=digest_inputs(F.values, trials, int(grid_points)))
    return EntropyIntegralAudit(constant=constant, e_mean=est.mean,
                                e_std_error=est.std_error, trials=trials,
                                grid=tuple(float(t) for t in grid),
                                vc_curve=tuple(int(v) for v in vc_curve),
                                integral=integral, flags=tuple(flags))


def fit_gaussian_rademacher_ratio(classes, trials=2000, rng=None):
    """Smallest Gaussian/Rademacher average ratio over a suite of classes.

    The fitted value is min over classes of gaussian mean / rademacher
    mean, both at the given trial count with separate substreams per
    class. Classes whose Rademacher average is zero are skipped.
    """
    if rng is None:
        raise InputError("BAD_RNG", "an RngStream is required")
    ratios = []
    digests = []
    for j, F in enumerate(classes):
        g = gaussian_complexity(F, None, trials=trials, rng=rng.substream(2 * j))
        r = rademacher_complexity(F, None, trials=trials, rng=rng.substream(2 * j + 1))
        digests.append(F.values)
        if r.mean > 0.0:
            ratios.append(g.mean / r.mean)
    if not ratios:
        raise InputError("BAD_SUITE", "no class had a positive Rademacher average")
    protocol = (
        f"minimum over {len(ratios)} classes of the ratio of {trials}-trial "
        f"Gaussian to Rademacher averages, one substream pair per class."
    )
    return FittedConstant(name="C_gauss_rademacher", value=min(ratios),
                          protocol=protocol, inputs_digest=digest_inputs(*digests))
