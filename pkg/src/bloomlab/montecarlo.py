"""Randomized verification harness tying live filters to the exact analytics.

Trials are driven by a counter-based element generator keyed by rng_seed and
a distinct prefix byte separates probe elements from inserted elements, so
probes are true negatives by construction and every report is bit-for-bit
reproducible from its TrialConfig. Trials are independent; chunks may be
farmed out to worker processes and merged order-independently.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from scipy.stats import chi2 as _chi2

from .analytics import fpr_exact, optimal_k, optimal_k_estimate, peak_efficiency
from .filters import BloomFilter, FilterParams, FilterVariant
from .occupancy import (
    classic_mean_variance,
    classic_pmf,
    committee_mean_variance,
    committee_pmf,
)

__all__ = [
    "TrialConfig",
    "FprResult",
    "HistogramResult",
    "empirical_fpr",
    "occupancy_histogram",
    "run_trials",
    "ValidationRow",
    "validation_suite",
    "run_validation",
    "validation_csv",
    "validation_summary",
    "ConjectureReport",
    "conjecture_scan",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrialConfig:
    """One simulation setup: filter geometry, items per trial, trial and
    probe counts, and the 64-bit element-generator seed."""

    params: FilterParams
    n: int
    trials: int
    probes: int
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 0 or self.trials < 1 or self.probes < 0:
            raise ValueError("need n >= 0, trials >= 1, probes >= 0")
        if not 0 <= self.rng_seed <= _MASK64:
            raise ValueError("rng_seed must fit in 64 bits")


def _insert_element(seed: int, trial: int, i: int) -> bytes:
    return b"\x00" + struct.pack("<QQQ", seed, trial, i)


def _probe_element(seed: int, trial: int, i: int) -> bytes:
    return b"\x01" + struct.pack("<QQQ", seed, trial, i)


def _run_chunk(config: TrialConfig, start: int, stop: int):
    """(positives, probe_count, bit-sum counter) over trials [start, stop)."""
    positives = 0
    hist: Counter[int] = Counter()
    for trial in range(start, stop):
        filt = BloomFilter(config.params)
        for i in range(config.n):
            filt.insert(_insert_element(config.rng_seed, trial, i))
        hist[filt.bit_sum()] += 1
        for i in range(config.probes):
            if filt.query(_probe_element(config.rng_seed, trial, i)):
                positives += 1
    return positives, (stop - start) * config.probes, hist


def run_trials(config: TrialConfig, workers: int = 1):
    """All trials, optionally on worker processes; merged totals are
    order-independent so the result is deterministic either way."""
    if workers <= 1:
        return _run_chunk(config, 0, config.trials)
    bounds = [
        (config.trials * w // workers, config.trials * (w + 1) // workers)
        for w in range(workers)
    ]
    positives = 0
    probe_count = 0
    hist: Counter[int] = Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for pos, cnt, h in pool.map(
            _run_chunk, [config] * len(bounds), *zip(*bounds)
        ):
            positives += pos
            probe_count += cnt
            hist.update(h)
    return positives, probe_count, hist


@dataclass(frozen=True)
class FprResult:
    rate: float
    std_error: float
    positives: int
    probes: int


def empirical_fpr(config: TrialConfig, workers: int = 1) -> FprResult:
    """Fraction of never-inserted probe elements that query positive,
    with its binomial standard error."""
    if config.trials * config.probes < 1:
        raise ValueError("need at least one probe")
    positives, total, _ = run_trials(config, workers)
    rate = positives / total
    return FprResult(
        rate=rate,
        std_error=math.sqrt(rate * (1 - rate) / total),
        positives=positives,
        probes=total,
    )


def _exact_pmf(params: FilterParams, n: int, i: int) -> Fraction:
    if params.variant is FilterVariant.STANDARD:
        return classic_pmf(params.m, n * params.k, i)
    return committee_pmf(params.m, n, params.k, i)


def _exact_mean_var(params: FilterParams, n: int) -> tuple[Fraction, Fraction]:
    if params.variant is FilterVariant.STANDARD:
        return classic_mean_variance(params.m, n * params.k)
    return committee_mean_variance(params.m, n, params.k)


@dataclass(frozen=True)
class HistogramResult:
    counts: dict[int, int]
    chi_square: float
    dof: int
    p_value: float
    mean: float
    exact_mean: float
    exact_var: float


def occupancy_histogram(config: TrialConfig, workers: int = 1) -> HistogramResult:
    """Per-trial bit-sum tally plus a chi-square fit against the exact law
    (classic with n*k balls for standard filters, batch law for classic)."""
    _, _, hist = run_trials(config, workers)
    m = config.params.m
    expected = [
        config.trials * float(_exact_pmf(config.params, config.n, i))
        for i in range(m + 1)
    ]
    observed = [hist.get(i, 0) for i in range(m + 1)]
    stat, dof = _chi_square_merged(observed, expected)
    if dof < 1:
        p_value = 1.0 if stat == 0 else 0.0
    else:
        p_value = float(_chi2.sf(stat, dof))
    mean_emp = sum(i * c for i, c in hist.items()) / config.trials
    mu, var = _exact_mean_var(config.params, config.n)
    return HistogramResult(
        counts=dict(sorted(hist.items())),
        chi_square=stat,
        dof=dof,
        p_value=p_value,
        mean=mean_emp,
        exact_mean=float(mu),
        exact_var=float(var),
    )


def _chi_square_merged(observed, expected, min_expected: float = 5.0):
    """Pearson statistic after merging adjacent low-expectation bins."""
    bins: list[tuple[float, float]] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            bins.append((acc_o, acc_e))
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if bins:
            last_o, last_e = bins[-1]
            bins[-1] = (last_o + acc_o, last_e + acc_e)
        else:
            bins.append((acc_o, acc_e))
    stat = sum((o - e) ** 2 / e for o, e in bins if e > 0)
    return stat, len(bins) - 1


# --------------------------------------------------------------------------
# Fixed validation suite
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationRow:
    m: int
    n: int
    k: int
    variant: str
    exact: float
    empirical: float
    std_err: float
    z_score: float
    mean_exact: float
    mean_empirical: float
    mean_z: float
    chi2_p: float


def validation_suite(rng_seed: int = 20_240_913) -> list[TrialConfig]:
    """Twelve configurations spanning both variants and m in {16,32,64,128}."""
    shapes = [
        (16, 3, 2),
        (16, 5, 3),
        (32, 8, 3),
        (32, 6, 2),
        (64, 12, 4),
        (128, 24, 4),
    ]
    configs = []
    for m, n, k in shapes:
        for variant in (FilterVariant.STANDARD, FilterVariant.CLASSIC):
            params = FilterParams(m=m, k=k, variant=variant, seed=rng_seed ^ m)
            configs.append(
                TrialConfig(params=params, n=n, trials=10_000, probes=10,
                            rng_seed=rng_seed)
            )
    return configs


def run_validation(
    configs: list[TrialConfig] | None = None, workers: int = 1
) -> list[ValidationRow]:
    """Empirical FPR and bit-sum statistics against the exact values."""
    if configs is None:
        configs = validation_suite()
    rows = []
    for config in configs:
        params, n = config.params, config.n
        positives, total, hist = run_trials(config, workers)
        exact = float(fpr_exact(params.m, n, params.k, params.variant))
        se = math.sqrt(exact * (1 - exact) / total)
        rate = positives / total
        mu, var = _exact_mean_var(params, n)
        mean_emp = sum(i * c for i, c in hist.items()) / config.trials
        mean_se = math.sqrt(float(var) / config.trials)
        expected = [
            config.trials * float(_exact_pmf(params, n, i))
            for i in range(params.m + 1)
        ]
        observed = [hist.get(i, 0) for i in range(params.m + 1)]
        stat, dof = _chi_square_merged(observed, expected)
        p = 1.0 if dof < 1 and stat == 0 else float(_chi2.sf(stat, max(dof, 1)))
        rows.append(
            ValidationRow(
                m=params.m,
                n=n,
                k=params.k,
                variant=params.variant.name.lower(),
                exact=exact,
                empirical=rate,
                std_err=se,
                z_score=(rate - exact) / se if se else 0.0,
                mean_exact=float(mu),
                mean_empirical=mean_emp,
                mean_z=(mean_emp - float(mu)) / mean_se if mean_se else 0.0,
                chi2_p=p,
            )
        )
    return rows


def validation_csv(rows: list[ValidationRow]) -> str:
    lines = ["m,n,k,variant,exact,empirical,std_err,z_score"]
    for r in rows:
        lines.append(
            f"{r.m},{r.n},{r.k},{r.variant},{r.exact:.10g},"
            f"{r.empirical:.10g},{r.std_err:.6g},{r.z_score:+.3f}"
        )
    return "\n".join(lines) + "\n"


def validation_summary(rows: list[ValidationRow]) -> str:
    out = ["configuration            fpr z   mean z   chi2 p"]
    for r in rows:
        tag = f"m={r.m} n={r.n} k={r.k} {r.variant}"
        out.append(
            f"{tag:<24} {r.z_score:+6.2f}  {r.mean_z:+6.2f}   {r.chi2_p:.4f}"
        )
    worst = max(abs(r.z_score) for r in rows)
    out.append(f"worst |z| = {worst:.2f} over {len(rows)} configurations")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Conjecture scanning (reports, never assertions)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderingRow:
    m: int
    n: int
    k_classic: int
    k_classic_max: int
    k_standard: int
    k_standard_max: int
    lower: float
    upper: float
    ok: bool


@dataclass(frozen=True)
class MonotonicityRow:
    m: int
    k: int
    eps_k: float
    eps_next: float
    ok: bool


@dataclass(frozen=True)
class ConjectureReport:
    ordering: list[OrderingRow]
    monotonicity: list[MonotonicityRow]

    @property
    def violations(self) -> int:
        return sum(not r.ok for r in self.ordering) + sum(
            not r.ok for r in self.monotonicity
        )

    def to_csv(self) -> str:
        lines = ["check,m,n_or_k,k_classic,k_standard,lower,upper,ok"]
        for r in self.ordering:
            kc = (
                str(r.k_classic)
                if r.k_classic == r.k_classic_max
                else f"{r.k_classic}-{r.k_classic_max}"
            )
            ks = (
                str(r.k_standard)
                if r.k_standard == r.k_standard_max
                else f"{r.k_standard}-{r.k_standard_max}"
            )
            lines.append(
                f"ordering,{r.m},{r.n},{kc},{ks},"
                f"{r.lower:.4f},{r.upper:.4f},{int(r.ok)}"
            )
        for r in self.monotonicity:
            lines.append(
                f"peak-monotone,{r.m},{r.k},,,{r.eps_k:.6f},{r.eps_next:.6f},"
                f"{int(r.ok)}"
            )
        return "\n".join(lines) + "\n"


def _optimal_k_tie_range(m: int, n: int, variant: FilterVariant) -> tuple[int, int]:
    """Smallest and largest k attaining the optimal exact rate."""
    best = optimal_k(m, n, variant)
    hi = best.k
    while hi + 1 <= m and fpr_exact(m, n, hi + 1, variant) == best.fpr:
        hi += 1
    return best.k, hi


def conjecture_scan(
    m_values,
    n_values,
    k_values=None,
) -> ConjectureReport:
    """Scan the two open conjectures and report every violation found.

    Ordering: m/(2n) <= k*_C <= k*_S <= (m/n) ln2 whenever m/n >= 1/ln2,
    and k*_C = k*_S = 1 otherwise. Peak monotonicity: classic peak
    efficiency increases in k for k <= m/2 - 1 (checked on k_values when
    given). Violations are reported, never raised.
    """
    ordering = []
    for m in m_values:
        for n in n_values:
            kc_lo, kc_hi = _optimal_k_tie_range(m, n, FilterVariant.CLASSIC)
            ks_lo, ks_hi = _optimal_k_tie_range(m, n, FilterVariant.STANDARD)
            if m / n >= 1 / math.log(2):
                lower = m / (2 * n)
                upper = optimal_k_estimate(m, n).k
                # k* is an integer, so the real-valued bracket is read as
                # floor(lower) <= k*_C and k*_S <= ceil(upper); ties get
                # their most favorable representatives
                ok = (
                    math.floor(Fraction(m, 2 * n)) <= kc_hi
                    and kc_lo <= ks_hi
                    and ks_lo <= math.ceil(upper)
                )
            else:
                lower, upper = 1.0, 1.0
                ok = kc_lo == 1 and ks_lo == 1
            ordering.append(
                OrderingRow(m=m, n=n, k_classic=kc_lo, k_classic_max=kc_hi,
                            k_standard=ks_lo, k_standard_max=ks_hi,
                            lower=lower, upper=upper, ok=ok)
            )
    monotonicity = []
    if k_values:
        for m, k in k_values:
            if k < 1 or k > m // 2 - 1:
                continue
            eps_k = peak_efficiency(m, k, FilterVariant.CLASSIC).epsilon
            eps_next = peak_efficiency(m, k + 1, FilterVariant.CLASSIC).epsilon
            monotonicity.append(
                MonotonicityRow(m=m, k=k, eps_k=eps_k, eps_next=eps_next,
                                ok=eps_k < eps_next)
            )
    return ConjectureReport(ordering=ordering, monotonicity=monotonicity)
