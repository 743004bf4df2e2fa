"""Command-line front end.

Subcommands: analyze, optimize, sweep, build, insert, query, info,
simulate, verify. Exit codes: 0 success, 1 usage error, 2 I/O or format
error, 3 verification failure.
"""

from __future__ import annotations

import json
import math
import os
import sys
from fractions import Fraction

import click

from . import analytics, montecarlo, suites
from .estimators import SaturationError
from .filters import (
    BloomFilter,
    FilterParams,
    FilterVariant,
    FormatError,
    deserialize,
    estimate_cardinality,
    serialize,
)
from .kernel import log2_fraction

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3


def fraction_sci(value: Fraction, sig: int = 6) -> str:
    """Scientific-notation decimal for an exact rational of any magnitude.

    float() would underflow around 1e-308; this scales by exact powers of
    ten instead, so 1e-43 rates (and far smaller) print correctly.
    """
    if value == 0:
        return "0"
    neg = value < 0
    a = -value if neg else value
    exp = math.floor(log2_fraction(a) * math.log10(2))
    scale = Fraction(10) ** exp
    if a < scale:
        exp -= 1
        scale /= 10
    elif a >= 10 * scale:
        exp += 1
        scale *= 10
    digits = round(a / scale * 10 ** (sig - 1))
    if digits >= 10**sig:
        digits //= 10
        exp += 1
    text = str(digits)
    mantissa = text[0] + ("." + text[1:] if sig > 1 else "")
    return f"{'-' if neg else ''}{mantissa}e{exp:+03d}"


def _variant(name: str) -> FilterVariant:
    return FilterVariant.CLASSIC if name == "classic" else FilterVariant.STANDARD


_VARIANT_OPT = click.option(
    "--variant",
    type=click.Choice(["classic", "standard"]),
    default="standard",
    show_default=True,
    help="Filter variant (classic marks k distinct bits per item).",
)
_FORMAT_OPT = click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json", "csv"]),
    default="text",
    show_default=True,
)
_TEXT_JSON_OPT = click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
)


@click.group()
def cli() -> None:
    """Exact analytics and reference filters for Bloom-style membership."""


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------


@cli.command()
@click.option("--m", type=int, required=True, help="Filter length in bits.")
@click.option("--n", type=int, required=True, help="Stored item count.")
@click.option("--k", type=int, required=True, help="Hash bits per item.")
@_VARIANT_OPT
@_TEXT_JSON_OPT
def analyze(m: int, n: int, k: int, variant: str, fmt: str) -> None:
    """Exact false-positive rate, bounds, approximations, efficiency."""
    rep = analytics.fpr_report(m, n, k, _variant(variant))
    payload = {
        "m": m,
        "n": n,
        "k": k,
        "variant": variant,
        "exact_fraction": f"{rep.exact.numerator}/{rep.exact.denominator}",
        "exact": fraction_sci(rep.exact),
        "log2_exact": rep.log2_exact if math.isfinite(rep.log2_exact) else None,
        "bits_of_cutdown": -rep.log2_exact if math.isfinite(rep.log2_exact) else None,
        "bound_E": rep.bounds.E,
        "bound_M": fraction_sci(rep.bounds.M),
        "bound_L": fraction_sci(rep.bounds.L),
        "bound_U": fraction_sci(rep.bounds.U),
        "taylor": rep.taylor,
        "recursive": rep.recursive,
        "efficiency": rep.efficiency,
    }
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"m={m} n={n} k={k} variant={variant}")
    num, den = rep.exact.numerator, rep.exact.denominator
    frac = f"{num}/{den}" if den != 1 and len(str(den)) <= 40 else None
    click.echo(
        "exact fpr      " + fraction_sci(rep.exact) + (f"  (= {frac})" if frac else "")
    )
    click.echo(f"log2 exact     {rep.log2_exact:.6f}  (cut-down {-rep.log2_exact:.4f} bits)")
    click.echo(f"bound E        {rep.bounds.E:.6e}")
    click.echo(f"bound M        {fraction_sci(rep.bounds.M)}")
    click.echo(f"bound L        {fraction_sci(rep.bounds.L)}")
    click.echo(f"bound U        {fraction_sci(rep.bounds.U)}")
    click.echo(f"taylor approx  {rep.taylor:.6e}")
    click.echo(f"recursive      {rep.recursive:.6e}")
    click.echo(f"efficiency     {rep.efficiency:.6f}")


# --------------------------------------------------------------------------
# optimize
# --------------------------------------------------------------------------


@cli.command()
@click.option("--m", type=int, default=None, help="Filter length in bits.")
@click.option("--n", type=int, default=None, help="Stored item count.")
@click.option("--p", type=float, default=None, help="Target false-positive rate.")
@click.option(
    "--variant",
    type=click.Choice(["classic", "standard"]),
    default=None,
    help="Filter variant; omit to report both.",
)
@_TEXT_JSON_OPT
def optimize(m, n, p, variant: str | None, fmt: str) -> None:
    """Optimal k (given m, n), max n (given m, p), or min m (given n, p)."""
    given = [v is not None for v in (m, n, p)]
    if sum(given) != 2:
        raise click.UsageError("supply exactly two of --m, --n, --p")
    variants = [variant] if variant else ["classic", "standard"]
    payloads = [_optimize_one(m, n, p, name) for name in variants]
    if fmt == "json":
        click.echo(json.dumps(payloads if len(payloads) > 1 else payloads[0], indent=2))
        return
    for i, payload in enumerate(payloads):
        if i:
            click.echo()
        for key, val in payload.items():
            click.echo(f"{key:<16} {val}")


def _optimize_one(m, n, p, variant: str) -> dict:
    var = _variant(variant)
    payload: dict = {"variant": variant}
    if p is None:
        exact = analytics.optimal_k(m, n, var)
        est = analytics.optimal_k_estimate(m, n)
        payload.update(
            m=m,
            n=n,
            k_exact=exact.k,
            fpr_exact=fraction_sci(exact.fpr),
            k_estimate=est.k,
            fpr_at_estimate=fraction_sci(
                analytics.fpr_exact(m, n, min(round(est.k), m), var)
            ),
            estimate_gap=round(est.k) - exact.k,
        )
    elif m is not None:
        n_exact = analytics.capacity_n_max(m, p, var)
        payload.update(
            m=m,
            p=p,
            n_max_exact=n_exact,
            n_max_estimate=analytics.n_max_estimate(m, p),
            k_exact=analytics.optimal_k(m, n_exact, var).k,
        )
        payload["estimate_gap"] = round(payload["n_max_estimate"]) - n_exact
    else:
        m_exact = analytics.size_m_min(n, p, var)
        payload.update(
            n=n,
            p=p,
            m_min_exact=m_exact,
            m_min_estimate=analytics.m_min_estimate(n, p),
            k_exact=analytics.optimal_k(m_exact, n, var).k,
        )
        payload["estimate_gap"] = round(payload["m_min_estimate"]) - m_exact
    return payload


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

_SWEEP_OUTPUTS = [
    "exact", "E", "M", "L", "U", "taylor", "efficiency",
    "kstar_est", "kstar_classic", "kstar_standard",
]
_KSTAR_OUTPUTS = {"kstar_est", "kstar_classic", "kstar_standard"}


@cli.command()
@click.option(
    "--variable",
    type=click.Choice(["k", "n", "m"]),
    required=True,
    help="Which parameter the sweep varies.",
)
@click.option("--start", type=int, required=True)
@click.option("--end", type=int, required=True, help="Inclusive end of the range.")
@click.option("--step", type=int, default=1, show_default=True)
@click.option("--m", type=int, default=None)
@click.option("--n", type=int, default=None)
@click.option("--k", type=int, default=None)
@_VARIANT_OPT
@click.option(
    "--outputs",
    default="exact",
    show_default=True,
    help="Comma-separated subset of " + ",".join(_SWEEP_OUTPUTS) + ".",
)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write CSV here instead of stdout.")
def sweep(variable, start, end, step, m, n, k, variant, outputs, out) -> None:
    """CSV of analytics over an inclusive parameter range."""
    wanted = [w.strip() for w in outputs.split(",") if w.strip()]
    unknown = [w for w in wanted if w not in _SWEEP_OUTPUTS]
    if unknown:
        raise click.UsageError(f"unknown outputs: {', '.join(unknown)}")
    if start > end or step < 1:
        raise click.UsageError("need start <= end and step >= 1")
    kstar_only = set(wanted) <= _KSTAR_OUTPUTS
    if any(w in _KSTAR_OUTPUTS for w in wanted) and not kstar_only:
        raise click.UsageError("kstar_* outputs cannot be mixed with rate outputs")
    if kstar_only and variable == "k":
        raise click.UsageError("kstar_* outputs sweep m or n, not k")
    fixed = {"m": m, "n": n, "k": k}
    if fixed[variable] is not None:
        raise click.UsageError(f"--{variable} is the sweep variable; do not fix it")
    needed = {"m", "n"} - {variable} if kstar_only else set(fixed) - {variable}
    missing = [name for name in sorted(needed) if fixed[name] is None]
    if missing:
        raise click.UsageError("missing fixed parameters: " + ", ".join(missing))
    var = _variant(variant)
    if kstar_only:
        lines = ["m,n," + ",".join(wanted)]
        for value in range(start, end + 1, step):
            point = dict(fixed)
            point[variable] = value
            pm, pn = point["m"], point["n"]
            cells = []
            for w in wanted:
                if w == "kstar_est":
                    cells.append(f"{analytics.optimal_k_estimate(pm, pn).k:.4f}")
                else:
                    v = FilterVariant.CLASSIC if w.endswith("classic") else (
                        FilterVariant.STANDARD
                    )
                    cells.append(str(analytics.optimal_k(pm, pn, v).k))
            lines.append(f"{pm},{pn}," + ",".join(cells))
        text = "\n".join(lines) + "\n"
        if out:
            _write_text(out, text)
        else:
            click.echo(text, nl=False)
        return
    lines = ["variant,m,n,k," + ",".join(wanted)]
    for value in range(start, end + 1, step):
        point = dict(fixed)
        point[variable] = value
        pm, pn, pk = point["m"], point["n"], point["k"]
        if pk > pm and var is FilterVariant.CLASSIC:
            continue
        cells = []
        bounds = None
        for w in wanted:
            if w == "exact":
                cells.append(fraction_sci(analytics.fpr_exact(pm, pn, pk, var)))
            elif w in ("E", "M", "L", "U"):
                bounds = bounds or analytics.fpr_bounds(pm, pn, pk)
                val = getattr(bounds, w)
                cells.append(
                    f"{val:.9e}" if isinstance(val, float) else fraction_sci(val)
                )
            elif w == "taylor":
                cells.append(f"{analytics.fpr_taylor(pm, pn, pk):.9e}")
            elif w == "efficiency":
                cells.append(f"{analytics.efficiency(pm, pn, pk, var):.9f}")
        lines.append(f"{variant},{pm},{pn},{pk}," + ",".join(cells))
    text = "\n".join(lines) + "\n"
    if out:
        _write_text(out, text)
    else:
        click.echo(text, nl=False)


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise click.ClickException(str(exc)) from None


# --------------------------------------------------------------------------
# filter file operations
# --------------------------------------------------------------------------


def _load_filter(path: str) -> BloomFilter:
    try:
        with open(path, "rb") as fh:
            return deserialize(fh.read())
    except OSError as exc:
        raise click.ClickException(str(exc)) from None


def _store_filter(path: str, filt: BloomFilter) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(serialize(filt))
    except OSError as exc:
        raise click.ClickException(str(exc)) from None


def _warn_if_overfull(filt: BloomFilter) -> None:
    if filt.fill_ratio() > 0.5:
        click.echo(
            "warning: bit sum exceeds m/2; past bit parity, additional items "
            "should go to a new filter",
            err=True,
        )


@cli.command()
@click.option("--m", type=int, required=True)
@click.option("--k", type=int, required=True)
@_VARIANT_OPT
@click.option("--seed", type=int, default=0, show_default=True,
              help="128-bit hashing seed.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def build(m, k, variant, seed, out) -> None:
    """Write an empty serialized filter."""
    params = FilterParams(m=m, k=k, variant=_variant(variant), seed=seed)
    _store_filter(out, BloomFilter(params))
    click.echo(f"wrote empty {variant} filter m={m} k={k} to {out}")


@cli.command()
@click.argument("filter_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "source", type=click.File("rb"), default="-",
              help="Newline-delimited elements (default stdin).")
def insert(filter_file, source) -> None:
    """Insert newline-delimited elements and rewrite the filter file."""
    filt = _load_filter(filter_file)
    inserted = 0
    for line in source:
        filt.insert(line.rstrip(b"\r\n"))
        inserted += 1
    _store_filter(filter_file, filt)
    _warn_if_overfull(filt)
    click.echo(f"inserted {inserted} elements; bit sum {filt.bit_sum()}/{filt.params.m}")


@cli.command()
@click.argument("filter_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "source", type=click.File("rb"), default="-",
              help="Newline-delimited elements (default stdin).")
@_TEXT_JSON_OPT
def query(filter_file, source, fmt) -> None:
    """Per-element membership verdicts plus a summary."""
    filt = _load_filter(filter_file)
    positives = 0
    total = 0
    rows = []
    for line in source:
        element = line.rstrip(b"\r\n")
        hit = filt.query(element)
        positives += hit
        total += 1
        rows.append((element, hit))
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "results": [
                        {"element": e.decode("utf-8", "replace"), "positive": bool(h)}
                        for e, h in rows
                    ],
                    "positives": positives,
                    "total": total,
                }
            )
        )
        return
    for element, hit in rows:
        label = "positive" if hit else "negative"
        click.echo(f"{label}\t{element.decode('utf-8', 'replace')}")
    click.echo(f"# {positives}/{total} positive")


@cli.command()
@click.argument("filter_file", type=click.Path(exists=True, dir_okay=False))
@_TEXT_JSON_OPT
def info(filter_file, fmt) -> None:
    """Parameters, bit sum, and estimated cardinality of a filter file."""
    filt = _load_filter(filter_file)
    try:
        cardinality = estimate_cardinality(filt)
    except SaturationError:
        cardinality = None
    payload = {
        "m": filt.params.m,
        "k": filt.params.k,
        "variant": filt.params.variant.name.lower(),
        "seed": filt.params.seed,
        "count": filt.count,
        "bit_sum": filt.bit_sum(),
        "fill_ratio": filt.fill_ratio(),
        "estimated_cardinality": cardinality,
    }
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        for key, val in payload.items():
            shown = "saturated" if key == "estimated_cardinality" and val is None else val
            click.echo(f"{key:<22} {shown}")
    _warn_if_overfull(filt)


# --------------------------------------------------------------------------
# simulate / verify
# --------------------------------------------------------------------------


@cli.command()
@click.option("--m", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@_VARIANT_OPT
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--probes", type=int, default=10, show_default=True,
              help="Never-inserted elements probed per trial.")
@click.option("--seed", type=int, default=0, show_default=True)
@_FORMAT_OPT
def simulate(m, n, k, variant, trials, probes, seed, fmt) -> None:
    """Empirical FPR and occupancy histogram against the exact law."""
    params = FilterParams(m=m, k=k, variant=_variant(variant), seed=seed)
    config = montecarlo.TrialConfig(
        params=params, n=n, trials=trials, probes=probes, rng_seed=seed
    )
    rows = montecarlo.run_validation([config])
    row = rows[0]
    if fmt == "csv":
        click.echo(montecarlo.validation_csv(rows), nl=False)
        return
    if fmt == "json":
        click.echo(json.dumps(row.__dict__, indent=2))
        return
    click.echo(montecarlo.validation_summary(rows), nl=False)
    if abs(row.z_score) > 4:
        click.echo("note: fpr z-score outside 4 SE", err=True)


@cli.command()
@click.argument("suite", type=click.Choice(suites.suite_names()))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for report artifacts (CSV).")
def verify(suite, out) -> None:
    """Run a verification suite; exit 3 if any check fails."""
    results = suites.run_suite(suite)
    failed = False
    for result in results:
        click.echo(f"== {result.suite}")
        for check in result.checks:
            click.echo(check.line())
            failed |= not check.passed
        if out:
            os.makedirs(out, exist_ok=True)
            for stem, text in result.artifacts.items():
                _write_text(os.path.join(out, f"{stem}.csv"), text)
    if failed:
        sys.exit(EXIT_VERIFY)


def main() -> None:
    """Entry point mapping exception classes onto the documented exit codes."""
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_IO)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)
    except (FormatError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except (ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
