"""Exact combinatorial primitives: Stirling numbers, falling factorials,
and finite-difference operators over arbitrary-precision rationals.

Alternating sums are accumulated in integer (or exact rational) arithmetic
and divided once at the end, so no cancellation error is possible. All
functions are pure; the memo tables tolerate concurrent readers and
concurrent idempotent fills.
"""

from __future__ import annotations

import math
import threading
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Callable, Sequence, Union

__all__ = [
    "ExactRational",
    "DifferenceKind",
    "Scalar",
    "stirling2",
    "falling_factorial",
    "binom_poly",
    "nabla_power",
    "nabla_power_row",
    "nabla_binom_product",
    "difference",
    "rho",
    "rho_recursive",
    "log2_fraction",
]

# Carrier for all exact probabilities and moments. fractions.Fraction already
# guarantees lowest terms, positive denominator, and value equality.
ExactRational = Fraction

# Integer-valued operators return plain int; anything mixing rationals
# returns Fraction. The two compare and combine exactly.
Scalar = Union[int, Fraction]


class DifferenceKind(Enum):
    """Direction of a finite-difference operator.

    The two are conjugate: the i-th forward difference at a equals the
    i-th backward difference at a+i.
    """

    BACKWARD = "backward"
    FORWARD = "forward"


# --------------------------------------------------------------------------
# Stirling numbers of the second kind
# --------------------------------------------------------------------------

# Row-major table: _STIRLING_ROWS[n][i] == S(n, i) for 0 <= i <= n.
_STIRLING_ROWS: list[list[int]] = [[1]]
_STIRLING_LOCK = threading.Lock()


def stirling2(n: int, i: int) -> int:
    """S(n, i), the number of partitions of an n-set into i nonempty blocks.

    Triangular recurrence S(n,i) = i*S(n-1,i) + S(n-1,i-1); rows are cached.
    Out-of-range arguments (i > n, or i == 0 with n > 0) give 0.
    """
    if n < 0 or i < 0:
        raise ValueError("stirling2 requires n >= 0 and i >= 0")
    if i > n:
        return 0
    if len(_STIRLING_ROWS) <= n:
        with _STIRLING_LOCK:
            while len(_STIRLING_ROWS) <= n:
                prev = _STIRLING_ROWS[-1]
                deg = len(_STIRLING_ROWS)
                row = [0] * (deg + 1)
                for j in range(1, deg):
                    row[j] = j * prev[j] + prev[j - 1]
                row[deg] = 1
                _STIRLING_ROWS.append(row)
    return _STIRLING_ROWS[n][i]


# --------------------------------------------------------------------------
# Falling factorials and generalized binomials
# --------------------------------------------------------------------------


def falling_factorial(x: Scalar, r: int) -> Scalar:
    """x(x-1)...(x-r+1); the empty product (r = 0) is 1.

    Accepts integer or rational x, so generalized binomials with rational
    upper argument come for free.
    """
    if r < 0:
        raise ValueError("falling_factorial requires r >= 0")
    out: Scalar = 1
    for j in range(r):
        out *= x - j
    return out


def binom_poly(x: Scalar, r: int) -> Scalar:
    """Binomial coefficient as the degree-r polynomial x_(r) / r!.

    Defined for any rational (or negative integer) x; needed wherever a
    difference identity is evaluated off the combinatorial lattice and for
    bounds of the form C(mu, r) with rational mu.
    """
    ff = falling_factorial(x, r)
    if isinstance(ff, int):
        q, rem = divmod(ff, math.factorial(r))
        return q if rem == 0 else Fraction(ff, math.factorial(r))
    return ff / math.factorial(r)


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------


def nabla_power(m: Scalar, n: int, r: int) -> Scalar:
    """r-th backward difference of x**n evaluated at x = m.

    Expands to sum_{j=0}^{r} (-1)^j C(r,j) (m-j)^n.  Differences of order
    beyond the degree vanish exactly.
    """
    if n < 0 or r < 0:
        raise ValueError("nabla_power requires n >= 0 and r >= 0")
    if r > n:
        return 0
    total: Scalar = 0
    sign = 1
    for j in range(r + 1):
        total += sign * comb(r, j) * (m - j) ** n
        sign = -sign
    return total


def nabla_power_row(m: int, n: int, r: int) -> list[int]:
    """[nabla^0, nabla^1, ..., nabla^r] of x**n at x = m, as exact integers.

    Built from one difference table, so the whole row costs O(r^2)
    subtractions instead of O(r^2) binomial-weighted products.
    """
    if n < 0 or r < 0:
        raise ValueError("nabla_power_row requires n >= 0 and r >= 0")
    vals = [(m - j) ** n for j in range(r + 1)]
    out = [vals[0]]
    for _ in range(r):
        vals = [vals[j] - vals[j + 1] for j in range(len(vals) - 1)]
        out.append(vals[0])
    return out


def nabla_binom_product(m: int, ks: Sequence[int], r: int) -> int:
    """r-th backward difference of prod_d C(x, k_d) evaluated at x = m.

    A power C(x,k)^n is passed as n repetitions of k.  Exact integer.
    """
    if r < 0:
        raise ValueError("nabla_binom_product requires r >= 0")
    if any(k < 1 for k in ks):
        raise ValueError("batch sizes must be positive")
    if ks and m < max(ks):
        raise ValueError("nabla_binom_product requires m >= max(ks)")
    degree = sum(ks)
    if r > degree:
        return 0
    total = 0
    sign = 1
    for j in range(r + 1):
        term = comb(r, j)
        x = m - j
        for k in ks:
            if term == 0:
                break
            term *= comb(x, k) if x >= 0 else 0
        total += sign * term
        sign = -sign
    return total


def difference(
    f: Callable[[Scalar], Scalar], kind: DifferenceKind, order: int, at: Scalar
) -> Scalar:
    """Apply an order-th forward or backward difference of f at a point.

    Generic (and O(2^order) naive in f evaluations via the binomial
    expansion); meant for cross-checking identities, not hot paths.
    """
    if order < 0:
        raise ValueError("difference order must be >= 0")
    total: Scalar = 0
    if kind is DifferenceKind.BACKWARD:
        for j in range(order + 1):
            total += (-1) ** j * comb(order, j) * f(at - j)
    else:
        for j in range(order + 1):
            total += (-1) ** (order - j) * comb(order, j) * f(at + j)
    return total


# --------------------------------------------------------------------------
# Normalized differences of binomial products
# --------------------------------------------------------------------------


def rho(r: int, s: int, ks: Sequence[int]) -> Fraction:
    """nabla^r [ prod_d C(x,k_d) / C(s,k_d) ] at x = s, by direct sum.

    This is the normalized difference driving every batch-occupancy moment;
    rho(0, s) == 1 and rho(r, s) in [0, 1] for 0 <= r <= s.
    """
    if not ks:
        raise ValueError("rho requires at least one batch size")
    if s < max(ks):
        raise ValueError("rho requires s >= max(ks)")
    denom = 1
    for k in ks:
        denom *= comb(s, k)
    return Fraction(nabla_binom_product(s, ks, r), denom)


def rho_recursive(r: int, s: int, ks: Sequence[int]) -> Fraction:
    """Same value as rho(), via the two-term recursion

        rho(r, s) = rho(r-1, s) - prod_d (1 - k_d/s) * rho(r-1, s-1)

    with rho(0, s) = 1.  Raises if the recursion would need a level below
    s = 0 with nonzero weight (i.e., r > s).
    """
    if not ks:
        raise ValueError("rho_recursive requires at least one batch size")
    if s < max(ks):
        raise ValueError("rho_recursive requires s >= max(ks)")
    if r > s:
        raise ValueError("recursion would step below zero urns with nonzero weight")
    # level[j] = rho(i, s - j) for the current order i; entries with
    # s - j < max(ks) carry zero weight and are kept as exact 0.
    kmax = max(ks)
    level = [Fraction(1) if s - j >= kmax else Fraction(0) for j in range(r + 1)]
    for i in range(1, r + 1):
        nxt = []
        for j in range(r + 1 - i):
            sj = s - j
            w = Fraction(1)
            for k in ks:
                w *= Fraction(sj - k, sj)
            nxt.append(level[j] - w * level[j + 1])
        level = nxt
    return level[0]


# --------------------------------------------------------------------------
# Logarithms of exact rationals
# --------------------------------------------------------------------------


def log2_fraction(q: Scalar) -> float:
    """log2 of a positive rational, accurate to ~1 ulp regardless of scale.

    Works far outside float range (FPRs near 2**-500 are routine here):
    the bit-length difference carries the exponent and a 64-bit mantissa
    quotient carries the fraction.
    """
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log2_fraction requires a positive argument")
    n, d = q.numerator, q.denominator
    sn = n.bit_length() - 64
    sd = d.bit_length() - 64
    mn = n >> sn if sn > 0 else n << -sn
    md = d >> sd if sd > 0 else d << -sd
    return (sn - sd) + math.log2(mn / md)
