"""Parameter estimation for occupancy models.

estimate_n inverts the mean-occupancy formula to recover the batch count
from an observed occupancy (a filter's bit sum); the mvue_* functions are
minimum-variance unbiased estimators for the urn count from a tagged
sample, implemented exactly as published.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .kernel import Scalar, stirling2

__all__ = [
    "Observation",
    "SaturationError",
    "UnsupportedObservationError",
    "estimate_n",
    "mvue_m_committee",
    "mvue_m_classic",
]


class SaturationError(ValueError):
    """Observed occupancy equals the urn count; the estimator diverges."""


class UnsupportedObservationError(ValueError):
    """The estimator's denominator vanishes at this observation."""


@dataclass(frozen=True)
class Observation:
    """An observed occupancy with whatever parameters are known.

    mu is the occupancy (bit sum); m the urn count when known; k the batch
    size; n the batch count when known.
    """

    mu: Fraction
    m: int | None = None
    k: int | None = None
    n: int | None = None

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError("occupancy cannot be negative")
        if self.m is not None and self.mu > self.m:
            raise ValueError("occupancy cannot exceed the urn count")


def estimate_n(m: int, k: int, mu: Scalar) -> float:
    """Method-of-moments / ML estimate of the batch count from occupancy mu.

        n_hat = ln(1 - mu/m) / ln(1 - k/m)

    The log arguments are formed as exact rationals first; mu/m near 1 is
    the sensitive regime and must not lose bits before the log.
    """
    if not 1 <= k <= m:
        raise ValueError("estimate_n requires 1 <= k <= m")
    if mu < 0:
        raise ValueError("occupancy cannot be negative")
    if mu > m:
        raise ValueError("occupancy cannot exceed the urn count")
    if mu == m:
        raise SaturationError("occupancy equals m; the estimate diverges")
    if mu == 0:
        return 0.0
    if k == m:
        # a single batch already fills every urn, so 0 < mu < m cannot occur
        raise UnsupportedObservationError(
            "occupancy strictly between 0 and m is impossible when k = m"
        )
    top = 1 - Fraction(mu) / m
    bot = Fraction(m - k, m)
    return math.log(top) / math.log(bot)


def mvue_m_committee(mu: int, n: int, k: int) -> Fraction:
    """MVUE for the urn count given occupancy mu after n batches of size k.

        m_hat = mu * (1 + Delta^(mu-1)[C(x,k)^n]_0 / Delta^mu[C(x,k)^n]_0)
    """
    if n < 1 or k < 1:
        raise ValueError("mvue_m_committee requires n >= 1 and k >= 1")
    if not k <= mu <= n * k:
        raise ValueError("occupancy must lie in [k, n*k]")
    d_hi = _delta0_binom_power(k, n, mu)
    if d_hi == 0:
        raise UnsupportedObservationError(
            "Delta^mu [C(x,k)^n]_0 = 0; observation not attainable"
        )
    d_lo = _delta0_binom_power(k, n, mu - 1)
    return mu * (1 + Fraction(d_lo, d_hi))


def _delta0_binom_power(k: int, n: int, i: int) -> int:
    total = 0
    for j in range(i + 1):
        total += (-1) ** (i - j) * comb(i, j) * comb(j, k) ** n
    return total


def mvue_m_classic(mu: int, n: int, *, m_exceeds_n: bool) -> Fraction:
    """MVUE for the urn count in the classic model, given occupancy mu.

    Two published branches, selected by the caller's regime knowledge
    (m is the unknown, so the regime cannot be inferred from the data):

        m > n :  mu + S(n, mu-1) / S(n, mu)
        m <= n:  S(n+1, mu) / S(n, mu)
    """
    if n < 1:
        raise ValueError("mvue_m_classic requires n >= 1")
    if not 1 <= mu <= n:
        raise ValueError("occupancy must lie in [1, n]")
    denom = stirling2(n, mu)
    if denom == 0:
        raise UnsupportedObservationError("S(n, mu) = 0; observation not attainable")
    if m_exceeds_n:
        return mu + Fraction(stirling2(n, mu - 1), denom)
    return Fraction(stirling2(n + 1, mu), denom)
