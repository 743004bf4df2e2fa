"""Exact occupancy distributions for uniform and batch ball placements.

Four families, all over m urns:

* classic   -- n balls cast independently and uniformly.
* committee -- n batches of k balls, the balls of a batch landing in k
               distinct urns (k = 1 recovers classic).
* union     -- several departments each casting batches; an urn counts if
               any department hits it.
* intersection -- same setup; an urn counts only if every department hits it.

Everything returns exact rationals. The probability of any fixed set of i
urns being jointly occupied is a normalized i-th backward difference, and
p.m.f.s/moments are assembled from those differences in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from .kernel import (
    binom_poly,
    falling_factorial,
    nabla_power,
    nabla_power_row,
    rho,
    stirling2,
)

__all__ = [
    "MomentKind",
    "CommitteeSpec",
    "classic_pmf",
    "classic_raw_moment",
    "classic_mean_variance",
    "committee_pmf",
    "committee_moment",
    "committee_mean_variance",
    "committee_variance_printed_form",
    "union_pmf",
    "union_moment",
    "intersection_moment",
    "intersection_pmf",
    "intersection_pmf_table",
    "moment_bounds",
]


class MomentKind(Enum):
    """Raw E[X^r], factorial E[X_(r)], or binomial E[C(X,r)] moments."""

    RAW = "raw"
    FACTORIAL = "factorial"
    BINOMIAL = "binomial"


@dataclass(frozen=True)
class CommitteeSpec:
    """Multivariate batch-placement parameters.

    m urns; each department d casts n_d batches of k_d balls. Total balls
    N = sum n_d * k_d.
    """

    m: int
    departments: tuple[tuple[int, int], ...]

    def __init__(self, m: int, departments) -> None:
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "departments", tuple(tuple(d) for d in departments))
        if m < 1:
            raise ValueError("urn count m must be positive")
        if not self.departments:
            raise ValueError("at least one department required")
        for n_d, k_d in self.departments:
            if n_d < 1:
                raise ValueError("batch count n_d must be positive")
            if not 1 <= k_d <= m:
                raise ValueError("batch size k_d must satisfy 1 <= k_d <= m")

    @property
    def total_balls(self) -> int:
        return sum(n_d * k_d for n_d, k_d in self.departments)

    def flat_sizes(self) -> list[int]:
        """Batch sizes with multiplicity, one entry per batch."""
        out: list[int] = []
        for n_d, k_d in self.departments:
            out.extend([k_d] * n_d)
        return out


# --------------------------------------------------------------------------
# Shared difference helpers
# --------------------------------------------------------------------------


def _delta0_binom_product(ks: list[int], i: int) -> int:
    """Delta^i [ prod_l C(x, k_l) ] at x = 0, exact integer."""
    total = 0
    for j in range(i + 1):
        term = comb(i, j)
        for k in ks:
            if term == 0:
                break
            term *= comb(j, k)
        total += ((-1) ** (i - j)) * term
    return total


def _nabla_binom_power_row(m: int, k: int, n: int, r: int) -> list[int]:
    """[nabla^0 .. nabla^r] of C(x,k)^n at x = m, via one difference table."""
    vals = [comb(m - j, k) ** n if m - j >= k else 0 for j in range(r + 1)]
    out = [vals[0]]
    for _ in range(r):
        vals = [vals[j] - vals[j + 1] for j in range(len(vals) - 1)]
        out.append(vals[0])
    return out


# --------------------------------------------------------------------------
# Classic occupancy
# --------------------------------------------------------------------------


def classic_pmf(m: int, n: int, i: int) -> Fraction:
    """P[X = i] for n uniform balls in m urns: S(n,i) * m_(i) / m^n."""
    if m < 1 or n < 0:
        raise ValueError("classic_pmf requires m >= 1 and n >= 0")
    if i < 0 or i > m:
        return Fraction(0)
    return Fraction(stirling2(n, i) * falling_factorial(m, i), m**n)


def classic_raw_moment(m: int, n: int, r: int) -> Fraction:
    """E[X^r] via Stirling inversion of the binomial moments.

    The sum runs to min(r, m) rather than m, which keeps high-precision
    moments cheap even for large m.
    """
    if r < 0:
        raise ValueError("moment order must be >= 0")
    top = min(r, m)
    row = nabla_power_row(m, n, top)
    num = 0
    ff = 1
    for i in range(top + 1):
        num += stirling2(r, i) * ff * row[i]
        ff *= m - i
    return Fraction(num, m**n)


def classic_mean_variance(m: int, n: int) -> tuple[Fraction, Fraction]:
    """Closed-form mean and variance of the classic occupancy number."""
    if m < 1 or n < 0:
        raise ValueError("classic_mean_variance requires m >= 1 and n >= 0")
    a = Fraction(m - 1, m) ** n
    b = Fraction(m - 2, m) ** n
    mean = m * (1 - a)
    var = m * (a - b) - m * m * (a * a - b)
    return mean, var


# --------------------------------------------------------------------------
# Committee occupancy (fixed batch size)
# --------------------------------------------------------------------------


def committee_pmf(m: int, n: int, k: int, i: int) -> Fraction:
    """P[X = i] for n batches of k distinct-urn balls in m urns."""
    if not 1 <= k <= m:
        raise ValueError("committee_pmf requires 1 <= k <= m")
    if n < 0:
        raise ValueError("batch count must be >= 0")
    if i < 0 or i > m:
        return Fraction(0)
    return Fraction(
        comb(m, i) * _delta0_binom_product([k] * n, i), comb(m, k) ** n
    )


def committee_moment(m: int, n: int, k: int, r: int, kind: MomentKind) -> Fraction:
    """r-th moment of the committee occupancy number, in the given kind."""
    if not 1 <= k <= m:
        raise ValueError("committee_moment requires 1 <= k <= m")
    if n < 0 or r < 0:
        raise ValueError("committee_moment requires n >= 0 and r >= 0")
    ks = [k] * n
    if kind is MomentKind.BINOMIAL:
        return comb(m, r) * _rho_or_zero(r, m, ks)
    if kind is MomentKind.FACTORIAL:
        return falling_factorial(m, r) * _rho_or_zero(r, m, ks)
    total = Fraction(0)
    for i in range(min(r, m) + 1):
        s = stirling2(r, i)
        if s:
            total += s * falling_factorial(m, i) * _rho_or_zero(i, m, ks)
    return total


def _rho_or_zero(r: int, m: int, ks: list[int]) -> Fraction:
    # n = 0 casts no balls: occupancy is a point mass at 0, so every
    # difference of order >= 1 vanishes and order 0 is 1.
    if not ks:
        return Fraction(1) if r == 0 else Fraction(0)
    if r > m:
        return Fraction(0)
    return rho(r, m, ks)


def committee_mean_variance(m: int, n: int, k: int) -> tuple[Fraction, Fraction]:
    """Mean (closed form) and variance (from exact binomial moments).

    The variance uses E[X^2] - mu^2 with E[X^2] = mu + 2 E[C(X,2)]; the
    literature's closed form is kept in committee_variance_printed_form for
    comparison because it does not reproduce exact enumerations.
    """
    if not 1 <= k <= m:
        raise ValueError("committee_mean_variance requires 1 <= k <= m")
    if n < 0:
        raise ValueError("batch count must be >= 0")
    mean = m * (1 - Fraction(m - k, m) ** n)
    b2 = committee_moment(m, n, k, 2, MomentKind.BINOMIAL)
    var = mean + 2 * b2 - mean * mean
    return mean, var


def committee_variance_printed_form(m: int, n: int, k: int) -> Fraction:
    """The committee-variance expression as printed in the source lemma.

    Reported for comparison only: at (m, n, k) = (5, 2, 3) it evaluates to
    a negative number while the true variance is 9/25, so the transcription
    cannot be the intended formula.  Do not use for analytics.
    """
    p = Fraction(m - k, m) ** n
    filled = 1 - p
    return m * filled * (1 - m * filled + (m - 1) * Fraction(m - 1 - k, m - 1) ** n)


# --------------------------------------------------------------------------
# Committee union (variable batch sizes, any department split)
# --------------------------------------------------------------------------


def union_pmf(spec: CommitteeSpec, i: int) -> Fraction:
    """P[union occupancy = i]: urns hit by at least one department."""
    if i < 0 or i > spec.m:
        return Fraction(0)
    ks = spec.flat_sizes()
    denom = 1
    for k in ks:
        denom *= comb(spec.m, k)
    return Fraction(comb(spec.m, i) * _delta0_binom_product(ks, i), denom)


def union_moment(spec: CommitteeSpec, r: int, kind: MomentKind) -> Fraction:
    """r-th moment of the union occupancy number, in the given kind."""
    if r < 0:
        raise ValueError("moment order must be >= 0")
    ks = spec.flat_sizes()
    m = spec.m
    if kind is MomentKind.BINOMIAL:
        return comb(m, r) * _rho_or_zero(r, m, ks)
    if kind is MomentKind.FACTORIAL:
        return falling_factorial(m, r) * _rho_or_zero(r, m, ks)
    total = Fraction(0)
    for i in range(min(r, m) + 1):
        s = stirling2(r, i)
        if s:
            total += s * falling_factorial(m, i) * _rho_or_zero(i, m, ks)
    return total


# --------------------------------------------------------------------------
# Committee intersection
# --------------------------------------------------------------------------


def intersection_moment(spec: CommitteeSpec, r: int) -> Fraction:
    """r-th binomial moment E[C(X,r)] of the intersection occupancy.

    Departments are independent, so the joint occupation probability of r
    fixed urns is a product of per-department normalized differences.
    Single-batch departments (all n_d = 1) reduce to a pure binomial ratio.
    """
    if r < 0:
        raise ValueError("moment order must be >= 0")
    if r > spec.m:
        return Fraction(0)
    if r == 0:
        return Fraction(1)
    if all(n_d == 1 for n_d, _ in spec.departments):
        num = 1
        for _, k_d in spec.departments:
            num *= comb(k_d, r)
        c = len(spec.departments)
        return Fraction(num, comb(spec.m, r) ** (c - 1))
    out = Fraction(comb(spec.m, r))
    for n_d, k_d in spec.departments:
        out *= rho(r, spec.m, [k_d] * n_d)
    return out


def intersection_pmf_table(spec: CommitteeSpec) -> list[Fraction]:
    """[P[X = 0], ..., P[X = m]] for the intersection occupancy.

    Inverts the joint occupation probabilities with one inclusion-exclusion
    pass; O(m^2) integer operations after O(m^2) per-department difference
    tables (exact but intended for m up to a few hundred).
    """
    m = spec.m
    rows = [
        _nabla_binom_power_row(m, k_d, n_d, m) for n_d, k_d in spec.departments
    ]
    denom = 1
    for n_d, k_d in spec.departments:
        denom *= comb(m, k_d) ** n_d
    # joint[w] = (unnormalized) P[w fixed urns all fully occupied] * denom
    joint = [1] * (m + 1)
    for w in range(m + 1):
        for row in rows:
            joint[w] *= row[w]
    table = []
    for i in range(m + 1):
        num = 0
        sign = 1
        for j in range(m - i + 1):
            num += sign * comb(m - i, j) * joint[i + j]
            sign = -sign
        table.append(Fraction(comb(m, i) * num, denom))
    return table


def intersection_pmf(spec: CommitteeSpec, i: int) -> Fraction:
    """P[intersection occupancy = i]: urns hit by every department."""
    if i < 0 or i > spec.m:
        return Fraction(0)
    return intersection_pmf_table(spec)[i]


# --------------------------------------------------------------------------
# Moment bounds
# --------------------------------------------------------------------------


def moment_bounds(
    m: int, n: int, k: int, r: int
) -> tuple[Fraction, Fraction, Fraction]:
    """(lower, jensen, upper) bracket for the normalized committee moment.

    With mu the committee mean, the sandwich

        nabla^r[x^(nk)]_m / m^(nk)  <=  C(mu,r)/C(m,r)
            <=  nabla^r[C(x,k)^n]_m / C(m,k)^n  <=  (mu/m)^r

    holds for 0 <= r <= min(k, m-k); other r are rejected.
    """
    if not 1 <= k <= m:
        raise ValueError("moment_bounds requires 1 <= k <= m")
    if n < 0:
        raise ValueError("batch count must be >= 0")
    if not 0 <= r <= min(k, m - k):
        raise ValueError("bounds hold only for 0 <= r <= min(k, m - k)")
    lower = Fraction(nabla_power(m, n * k, r), m ** (n * k))
    mu = m * (1 - Fraction(m - k, m) ** n)
    jensen = binom_poly(mu, r) / comb(m, r)
    upper = (mu / m) ** r
    return lower, jensen, upper
