"""False-positive rates, bounds, optimizers, and efficiency analysis.

Two evaluation backends. The exact backend works in integer/rational
arithmetic and is authoritative: the alternating sums underneath these
formulas are catastrophically cancellative in floating point once rates
drop below ~1e-15, and interesting configurations reach 1e-43. The
recursive backend is the approximate fast path.

Rates for an m-bit filter storing n items with k hash bits per item:

* standard: f = E[(X/m)^k] with X classic-occupancy over n*k balls.
* classic:  f = E[C(X,k)] / C(m,k) with X committee-occupancy.

Efficiency is -(n/m) * log2 f, bounded by 1 for uniform hashing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction
from math import comb
from typing import NamedTuple, Sequence

from .filters import FilterVariant
from .kernel import log2_fraction, nabla_power, nabla_power_row, stirling2
from .occupancy import classic_mean_variance

__all__ = [
    "FprBounds",
    "FprReport",
    "EfficiencyPoint",
    "OptimalK",
    "OptimizeMode",
    "UndefinedEfficiencyError",
    "InfeasibleError",
    "fpr_standard_exact",
    "fpr_classic_exact",
    "fpr_exact",
    "fpr_recursive",
    "fpr_bounds",
    "fpr_taylor",
    "fpr_report",
    "optimal_k",
    "optimal_k_estimate",
    "n_max_estimate",
    "m_min_estimate",
    "capacity_n_max",
    "size_m_min",
    "efficiency",
    "peak_efficiency",
    "max_efficiency",
    "max_efficiency_closed_form",
    "valley_crossing",
    "valley_residual",
    "intersection_filter_moments",
    "intersection_filter_variance_printed_form",
]

LN2 = math.log(2)


class UndefinedEfficiencyError(ValueError):
    """Efficiency needs a positive false-positive rate (n >= 1)."""


class InfeasibleError(ValueError):
    """No parameter choice can reach the requested false-positive rate."""


# --------------------------------------------------------------------------
# Exact false-positive rates
# --------------------------------------------------------------------------


def fpr_standard_exact(m: int, n: int, k: int) -> Fraction:
    """Exact rate for a standard filter:

        f = (1/m^(n+1)k) * sum_i S(k,i) m_(i) nabla^i[x^(nk)]_m

    i.e. the k-th raw moment of the n*k-ball occupancy number over m^k.
    """
    if m < 1 or k < 1 or n < 0:
        raise ValueError("fpr_standard_exact requires m >= 1, k >= 1, n >= 0")
    top = min(k, m)
    row = nabla_power_row(m, n * k, top)
    num = 0
    ff = 1
    for i in range(top + 1):
        s = stirling2(k, i)
        if s:
            num += s * ff * row[i]
        ff *= m - i
    return Fraction(num, m ** (n * k + k))


def fpr_classic_exact(m: int, n: int, k: int) -> Fraction:
    """Exact rate for a classic filter:

        f = sum_i (-1)^i C(k,i) [C(m-i,k)/C(m,k)]^n

    the k-th normalized backward difference of C(x,k)^n at m.
    """
    if not 1 <= k <= m:
        raise ValueError("fpr_classic_exact requires 1 <= k <= m")
    if n < 0:
        raise ValueError("fpr_classic_exact requires n >= 0")
    if n == 1:
        # nabla^k C(x,k) at m collapses to C(m-k, 0) = 1
        return Fraction(1, comb(m, k))
    num = 0
    sign = 1
    for i in range(k + 1):
        c = comb(m - i, k)
        num += sign * comb(k, i) * (c**n if c else 0 if n else 1)
        sign = -sign
    return Fraction(num, comb(m, k) ** n)


def fpr_exact(m: int, n: int, k: int, variant: FilterVariant) -> Fraction:
    if variant is FilterVariant.STANDARD:
        return fpr_standard_exact(m, n, k)
    return fpr_classic_exact(m, n, k)


# --------------------------------------------------------------------------
# Recursive (approximate) backend
# --------------------------------------------------------------------------


def fpr_recursive(
    m: int, n: int, k: int, variant: FilterVariant, digits: int = 40
) -> float:
    """The two-term recursions, evaluated in fixed-precision decimal.

    Cancellation amplifies relative error by roughly 1/f, so binary doubles
    cannot give 6 significant digits at f ~ 1e-12; 40 decimal digits leave
    a wide margin. Approximate by contract; the exact backend is the
    authority.
    """
    if m < 1 or k < 1 or n < 0:
        raise ValueError("fpr_recursive requires m >= 1, k >= 1, n >= 0")
    if variant is FilterVariant.CLASSIC and k > m:
        raise ValueError("classic variant requires k <= m")
    if n == 0:
        return 0.0
    with localcontext() as ctx:
        ctx.prec = digits
        if variant is FilterVariant.STANDARD:
            return float(_psi_standard(m, n * k, k))
        return float(_rho_classic(m, n, k))


def _psi_standard(m: int, balls: int, k: int) -> Decimal:
    # psi(h, s) = E[(X/s)^h] for X classic-occupancy with `balls` balls;
    # psi(h, s) = psi(h-1, s) - (1 - 1/s)^(balls + h - 1) psi(h-1, s-1).
    level = [Decimal(1) if m - j >= 1 else Decimal(0) for j in range(k + 1)]
    for h in range(1, k + 1):
        nxt = []
        for j in range(k + 1 - h):
            s = m - j
            if s < 1:
                nxt.append(Decimal(0))
            elif s == 1:
                nxt.append(level[j])
            else:
                w = (Decimal(s - 1) / Decimal(s)) ** (balls + h - 1)
                nxt.append(level[j] - w * level[j + 1])
        level = nxt
    return level[0]


def _rho_classic(m: int, n: int, k: int) -> Decimal:
    # rho(r, s) = rho(r-1, s) - ((s-k)/s)^n rho(r-1, s-1), rho(0, s) = 1.
    level = [Decimal(1) if m - j >= k else Decimal(0) for j in range(k + 1)]
    for r in range(1, k + 1):
        nxt = []
        for j in range(k + 1 - r):
            s = m - j
            if s < 1:
                nxt.append(Decimal(0))
            elif s <= k:
                nxt.append(level[j])
            else:
                w = (Decimal(s - k) / Decimal(s)) ** n
                nxt.append(level[j] - w * level[j + 1])
        level = nxt
    return level[0]


# --------------------------------------------------------------------------
# Bounds and approximations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FprBounds:
    """E <= M <= f_standard <= U and L <= f <= U for both variants
    (guaranteed for 1 <= k <= (m-1)/2; returned unflagged outside).

    E is irrational and carried as a float; M, L, U are exact.
    """

    E: float
    M: Fraction
    L: Fraction
    U: Fraction


def fpr_bounds(m: int, n: int, k: int) -> FprBounds:
    if m < 1 or k < 1 or n < 0:
        raise ValueError("fpr_bounds requires m >= 1, k >= 1, n >= 0")
    if n == 0:
        return FprBounds(E=0.0, M=Fraction(0), L=Fraction(0), U=Fraction(0))
    e_val = (-math.expm1(-k * n / m)) ** k
    m_val = (1 - Fraction(m - 1, m) ** (k * n)) ** k
    l_val = Fraction(nabla_power(m, n * k, k), m ** (n * k))
    u_val = (1 - Fraction(max(m - k, 0), m) ** n) ** k if k <= m else Fraction(1)
    return FprBounds(E=e_val, M=m_val, L=l_val, U=u_val)


def fpr_taylor(m: int, n: int, k: int) -> float:
    """Second-order Taylor approximation of the standard rate around the
    mean bit sum: phi(mu) + (sigma^2 / 2) phi''(mu) with phi(x) = (x/m)^k."""
    if m < 1 or k < 1 or n < 0:
        raise ValueError("fpr_taylor requires m >= 1, k >= 1, n >= 0")
    if n == 0:
        return 0.0
    mu, var = classic_mean_variance(m, n * k)
    muf, varf = float(mu), float(var)
    phi = (muf / m) ** k
    if k == 1:
        return phi
    phi2 = k * (k - 1) * muf ** (k - 2) / m**k
    return phi + varf / 2 * phi2


@dataclass(frozen=True)
class FprReport:
    """Everything the analyze command prints for one configuration."""

    m: int
    n: int
    k: int
    variant: FilterVariant
    exact: Fraction
    bounds: FprBounds
    taylor: float
    recursive: float
    log2_exact: float
    efficiency: float


def fpr_report(m: int, n: int, k: int, variant: FilterVariant) -> FprReport:
    exact = fpr_exact(m, n, k, variant)
    log2e = log2_fraction(exact) if exact > 0 else float("-inf")
    eff = -(n / m) * log2e if exact > 0 else 0.0
    return FprReport(
        m=m,
        n=n,
        k=k,
        variant=variant,
        exact=exact,
        bounds=fpr_bounds(m, n, k),
        taylor=fpr_taylor(m, n, k),
        recursive=fpr_recursive(m, n, k, variant),
        log2_exact=log2e,
        efficiency=eff,
    )


# --------------------------------------------------------------------------
# Optimal hash count
# --------------------------------------------------------------------------


class OptimizeMode(Enum):
    EXACT = "exact"
    ESTIMATE = "estimate"


class OptimalK(NamedTuple):
    k: float
    fpr: Fraction | float


def optimal_k_estimate(m: int, n: int) -> OptimalK:
    """The closed-form seed k ~ (m/n) ln 2 and its idealized rate 2^-k."""
    k_est = m / n * LN2
    return OptimalK(k_est, 0.5**k_est)


def optimal_k(
    m: int, n: int, variant: FilterVariant, mode: OptimizeMode = OptimizeMode.EXACT
) -> OptimalK:
    """Hash count minimizing the false-positive rate at fixed (m, n).

    Exact mode scans k = 1..m with exact comparisons, ties toward smaller
    k. Candidates whose rigorous lower bound (Jensen) already exceeds the
    best exact value found are skipped; the bound comparison carries a
    0.5-bit safety margin so float evaluation of the bound cannot change
    the winner.
    """
    if m < 1 or n < 0:
        raise ValueError("optimal_k requires m >= 1 and n >= 0")
    if mode is OptimizeMode.ESTIMATE:
        if n < 1:
            raise ValueError("estimate mode requires n >= 1")
        return optimal_k_estimate(m, n)
    if n == 0:
        return OptimalK(1, Fraction(0))

    def exact(k: int) -> Fraction:
        return fpr_exact(m, n, k, variant)

    seed = min(max(round(m / n * LN2), 1), m)
    cache = {seed: exact(seed)}
    threshold = log2_fraction(cache[seed])
    best_k, best_f = None, None
    for k in range(1, m + 1):
        if k not in cache and _fpr_lower_bound_log2(m, n, k, variant) > threshold + 0.5:
            continue
        f = cache.get(k)
        if f is None:
            f = exact(k)
        if best_f is None or f < best_f:
            best_k, best_f = k, f
            threshold = min(threshold, log2_fraction(f))
    return OptimalK(best_k, best_f)


def _fpr_lower_bound_log2(m: int, n: int, k: int, variant: FilterVariant) -> float:
    """log2 of a proven lower bound on the exact rate (Jensen both times)."""
    if variant is FilterVariant.STANDARD:
        # f_S >= (mu_S/m)^k, mu_S the classic mean with nk balls
        t = n * k * math.log1p(-1.0 / m)
        return k * math.log2(-math.expm1(t))
    # f_C >= C(mu_C, k)/C(m, k); X >= k a.s. and x_(k) is convex there
    if k >= m:
        return 0.0 if k == m else math.inf
    mu = m * -math.expm1(n * math.log1p(-k / m))
    if mu <= k - 1 + 1e-12:
        mu = float(k)  # n = 1 gives mu = k exactly; guard float dust
    total = 0.0
    for i in range(k):
        total += math.log2(mu - i) - math.log2(m - i)
    return total


# --------------------------------------------------------------------------
# Capacity planning
# --------------------------------------------------------------------------


def n_max_estimate(m: int, p: float) -> float:
    """Closed-form seed: n_max ~ -m ln2 / log2 p."""
    _require_rate(p)
    return -m * LN2 / math.log2(p)


def m_min_estimate(n: int, p: float) -> float:
    """Closed-form seed: m_min ~ -n log2 p / ln2."""
    _require_rate(p)
    return -n * math.log2(p) / LN2


def _require_rate(p: float) -> None:
    if not 0 < p < 1:
        raise ValueError("target rate p must satisfy 0 < p < 1")


def capacity_n_max(m: int, p: float, variant: FilterVariant) -> int:
    """Largest n whose optimally-hashed exact rate still meets p.

    The optimal rate increases strictly with n, so a bracketed binary
    search around the closed-form seed suffices.
    """
    _require_rate(p)
    target = Fraction(p)

    def ok(n: int) -> bool:
        return optimal_k(m, n, variant).fpr <= target

    if not ok(1):
        raise InfeasibleError(f"rate {p} unreachable at m={m} even for n=1")
    lo = 1
    hi = max(2, round(n_max_estimate(m, p)))
    while ok(hi):
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def size_m_min(n: int, p: float, variant: FilterVariant) -> int:
    """Smallest m whose optimally-hashed exact rate meets p at fixed n."""
    _require_rate(p)
    if n < 1:
        raise ValueError("size_m_min requires n >= 1")
    target = Fraction(p)

    def ok(m: int) -> bool:
        return optimal_k(m, n, variant).fpr <= target

    hi = max(n, 1, round(m_min_estimate(n, p)))
    while not ok(hi):
        hi *= 2
    lo = 0  # m = 0 is invalid, treated as "not ok"
    probe_lo = hi // 2
    while probe_lo > 0 and ok(probe_lo):
        hi = probe_lo
        probe_lo //= 2
    lo = probe_lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid >= 1 and ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# --------------------------------------------------------------------------
# Efficiency
# --------------------------------------------------------------------------


def efficiency(m: int, n: int, k: int, variant: FilterVariant) -> float:
    """epsilon = -(n/m) log2 f, computed from the exact rate.

    log2 goes through bit lengths, so rates way below double-precision
    underflow still give full-precision efficiencies.
    """
    f = fpr_exact(m, n, k, variant)
    if f == 0:
        raise UndefinedEfficiencyError("efficiency undefined for zero rate (n = 0)")
    if f == 1:
        return 0.0
    return -(n / m) * log2_fraction(f)


@dataclass(frozen=True)
class EfficiencyPoint:
    """A (n, k) location and its efficiency; conjectured marks values that
    rest on an open conjecture rather than a proof."""

    n: int
    k: int
    epsilon: float
    conjectured: bool = False


def peak_efficiency(m: int, k: int, variant: FilterVariant) -> EfficiencyPoint:
    """Best efficiency over the item count n at fixed (m, k).

    Bounded exhaustive scan: the window [1, ~4 m ln2 / k] comfortably
    contains the peak (empirically near (m/k - 1) ln2) and the scan keeps
    extending while the maximum sits on its edge, so no unimodality
    assumption is needed.
    """
    if not 1 <= k <= m:
        raise ValueError("peak_efficiency requires 1 <= k <= m")
    limit = max(8, math.ceil(4 * m * LN2 / k))
    best_n, best_eps = 1, efficiency(m, 1, k, variant)
    n = 2
    while n <= limit:
        eps = efficiency(m, n, k, variant)
        if eps > best_eps:
            best_n, best_eps = n, eps
            if n == limit:
                limit *= 2
        n += 1
    return EfficiencyPoint(n=best_n, k=k, epsilon=best_eps)


def max_efficiency(m: int, variant: FilterVariant) -> EfficiencyPoint:
    """Best efficiency over both n and k at fixed m.

    standard: proven at k = 1 with n ~ 1/log2(m/(m-1)); the exact
    efficiency at the best integer n is returned.
    classic: conjectured at n = 1, k = floor(m/2); efficiency is
    (1/m) log2 C(m, k) exactly, flagged conjectured.
    """
    if m < 2:
        raise ValueError("max_efficiency requires m >= 2")
    if variant is FilterVariant.STANDARD:
        n_real = 1 / math.log2(m / (m - 1))
        candidates = {max(1, math.floor(n_real)), math.ceil(n_real)}
        best = max(
            ((efficiency(m, n, 1, variant), n) for n in candidates),
            key=lambda t: t[0],
        )
        return EfficiencyPoint(n=best[1], k=1, epsilon=best[0])
    k = m // 2
    return EfficiencyPoint(
        n=1, k=k, epsilon=efficiency(m, 1, k, variant), conjectured=True
    )


def max_efficiency_closed_form(m: int, variant: FilterVariant) -> float:
    """The continuous-n closed form the discrete optimum converges to."""
    if variant is FilterVariant.STANDARD:
        return 1 / (m * math.log2(m / (m - 1)))
    return log2_fraction(Fraction(comb(m, m // 2))) / m


# --------------------------------------------------------------------------
# Valley crossings (equal-efficiency points between k and k+1)
# --------------------------------------------------------------------------


def valley_crossing(k: int, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Positive x with (1-e^(-kx))^k = (1-e^(-(k+1)x))^(k+1).

    x = ln z for z the positive root of z^(k+1) - z - 1, found by iterating
    z <- (1+z)^(1/(k+1)); k = 1 gives the golden ratio.
    """
    if k < 1:
        raise ValueError("valley_crossing requires k >= 1")
    z = 1.5
    for _ in range(max_iter):
        z_next = (1 + z) ** (1 / (k + 1))
        if abs(z_next - z) < tol:
            z = z_next
            break
        z = z_next
    return math.log(z)


def valley_residual(k: int, x: float) -> float:
    """Defect of the defining equation at x (0 at a true crossing)."""
    return abs(
        (-math.expm1(-k * x)) ** k - (-math.expm1(-(k + 1) * x)) ** (k + 1)
    )


# --------------------------------------------------------------------------
# Intersections of standard filters
# --------------------------------------------------------------------------


def intersection_filter_moments(
    m: int, k: int, counts: Sequence[int]
) -> tuple[Fraction, Fraction]:
    """(mean, variance) of the bit sum of an AND of standard filters.

    counts holds the item count of each operand filter. The mean is the
    published product formula; the variance comes from the exact first and
    second intersection binomial moments (the published variance display
    adds the squared-mean term that should be subtracted -- see
    intersection_filter_variance_printed_form).
    """
    if m < 1 or k < 1:
        raise ValueError("intersection_filter_moments requires m >= 1, k >= 1")
    if not counts:
        raise ValueError("at least one filter required")
    if any(n_i < 0 for n_i in counts):
        raise ValueError("item counts must be >= 0")
    total = sum(counts) * k
    mean_num = 1
    for n_i in counts:
        mean_num *= m ** (n_i * k) - (m - 1) ** (n_i * k)
    mean = Fraction(mean_num, m ** (total - 1)) if total else Fraction(0)
    b2 = Fraction(comb(m, 2))
    for n_i in counts:
        b2 *= Fraction(nabla_power(m, n_i * k, 2), m ** (n_i * k))
    var = mean + 2 * b2 - mean * mean
    return mean, var


def intersection_filter_variance_printed_form(
    m: int, k: int, counts: Sequence[int]
) -> Fraction:
    """The variance expression as printed in the source corollary.

    Kept for comparison only: at m=2, two single-item k=1 filters it gives
    3/4 where exhaustive enumeration gives 1/4 (a Bernoulli(1/2) bit), so
    the final squared-mean term evidently carries the wrong sign. Not used
    by any analytics path.
    """
    c = len(counts)
    total = sum(counts) * k
    p1 = 1
    p2 = 1
    p3 = 1
    for n_i in counts:
        a = m ** (n_i * k) - (m - 1) ** (n_i * k)
        p1 *= a
        p2 *= m ** (n_i * k) - 2 * (m - 1) ** (n_i * k) + (m - 2) ** (n_i * k)
        p3 *= a * a
    return (
        Fraction((-1) ** c * p1 + (m - 1) * p2, m ** (total - 1))
        + Fraction(p3, m ** (2 * (total - 1)))
    )
