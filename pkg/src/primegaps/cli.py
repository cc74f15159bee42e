"""Command-line front end.

JSON is the canonical output format (floats serialized at a fixed 15
significant digits so identical configs produce byte-identical reports);
CSV is a projection offered where the subcommand defines a row schema.
Exit codes: 0 success, 2 usage error, 3 capacity/precision error.
"""

import functools
import math
import os
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import click
import numpy as np

from . import distribution as dist
from . import equidist, sequences, sieve, smoothing, tuples
from ._util import as_fraction
from .errors import PrimegapsError
from .irrational import cf_expand, convergents, estimate_type, parse_irrational
from .sequences import BeattySpec, parse_leitmann

CACHE_ENV = sieve.CACHE_ENV

# stated on every distribution report: the theory's (log x)^A error budgets
# are vacuous at desk scale, so reports track raw totals and fitted slopes
_NORMALIZATION_NOTE = ("raw error totals with natural normalizers and "
                       "log-log ladder slopes; no asymptotic log-power "
                       "normalization is applied at desk scale")


# ---------------------------------------------------------------------------
# canonical serialization

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float in report")
    s = f"{x:.15g}"
    return s


def canonical_json(obj) -> str:
    """Deterministic JSON: dict order preserved, floats at 15 sig digits."""
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    if isinstance(obj, dict):
        items = ",".join(f'"{k}":{canonical_json(v)}' for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if isinstance(obj, np.ndarray):
            obj = obj.tolist()
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return f'"{obj}"'
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit(ctx_params, payload, out=None, csv_rows=None, csv_header=None,
          as_csv=False):
    if as_csv and csv_rows is not None:
        lines = [csv_header] if csv_header else []
        lines += [",".join(str(c) for c in row) for row in csv_rows]
        text = "\n".join(lines) + "\n"
    else:
        text = canonical_json({"params": ctx_params, **payload}) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PrimegapsError as exc:
            click.echo(canonical_json({"error": {"type": type(exc).__name__,
                                                 "message": str(exc)}}),
                       err=True)
            sys.exit(3)
        except ValueError as exc:
            raise click.UsageError(str(exc))
    return wrapper


# ---------------------------------------------------------------------------
# shared options

def alpha_option(fn):
    fn = click.option("--alpha", default="surd:(0+1*sqrt(2))/1",
                      show_default=True,
                      help="irrational spec: surd:(a+b*sqrt(d))/e | pi | "
                           "cf:[a0;a1,(p1,p2)]")(fn)
    fn = click.option("--beta", default="0", show_default=True,
                      help="exact rational offset p/q")(fn)
    fn = click.option("--c", "cutoff", default="1", show_default=True,
                      help="fractional-part cutoff p/q in (0,1]")(fn)
    return fn


def common_output(fn):
    fn = click.option("--out", type=click.Path(), default=None,
                      help="write the report here instead of stdout")(fn)
    fn = click.option("--csv", "as_csv", is_flag=True,
                      help="emit the CSV projection")(fn)
    return fn


def table_option(fn):
    return click.option("--prime-cache", type=click.Path(), default=None,
                        help=f"prime cache directory (default ${CACHE_ENV})")(fn)


def workers_option(fn):
    return click.option("--workers", default=1, show_default=True,
                        help="window-scan worker processes (results are "
                             "identical for any count)")(fn)


def _beatty_spec(alpha, beta, cutoff) -> BeattySpec:
    try:
        return BeattySpec(parse_irrational(alpha), as_fraction(beta),
                          as_fraction(cutoff))
    except (ValueError, TypeError) as exc:
        raise click.UsageError(str(exc))


def _build_table(limit, prime_cache):
    cache = prime_cache or os.environ.get(CACHE_ENV)
    return sieve.build_table(limit, cache_dir=cache)


@click.group()
def main():
    """Desk-scale experiments on primes in Beatty and floor sequences."""


# ---------------------------------------------------------------------------
# subcommands

@main.command("cf")
@click.option("--alpha", required=True)
@click.option("--count", default=10, show_default=True)
@click.option("--type-depth", default=0, help="also estimate the type at this depth")
@common_output
@handle_errors
def cf_cmd(alpha, count, type_depth, out, as_csv):
    """Partial quotients and convergents of an irrational."""
    spec = parse_irrational(alpha)
    quots = cf_expand(spec, count)
    convs = convergents(spec, count)
    payload = {
        "alpha": spec.to_text(),
        "quotients": quots,
        "convergents": [{"k": c.k, "p": c.p, "q": c.q, "a": c.a} for c in convs],
    }
    if type_depth >= 2:
        est = estimate_type(spec, type_depth)
        payload["tau_hat"] = est.tau_hat
        payload["type_levels"] = [{"k": l.k, "a_next": l.a_next, "q_k": l.q_k,
                                   "term": l.term} for l in est.levels]
    rows = [(c.k, c.a, c.p, c.q) for c in convs]
    _emit({"subcommand": "cf", "alpha": alpha, "count": count}, payload,
          out, rows, "k,a,p,q", as_csv)


@main.command("beatty")
@alpha_option
@click.option("--lo", default=1, show_default=True)
@click.option("--hi", required=True, type=int)
@workers_option
@common_output
@handle_errors
def beatty_cmd(alpha, beta, cutoff, lo, hi, workers, out, as_csv):
    """Dump the Beatty window [lo, hi): rows n,term,frac_part."""
    spec = _beatty_spec(alpha, beta, cutoff)
    w = sequences.beatty_window(spec, lo, hi, workers=workers)
    from .irrational import frac_values_array
    fr = frac_values_array(spec.alpha, w.witnesses, spec.beta) if len(w) else []
    rows = [(int(n), int(t), _fmt_float(float(fp)))
            for n, t, fp in zip(w.witnesses, w.terms, fr)]
    payload = {"count": len(w),
               "terms": [{"n": r[0], "term": r[1], "frac_part": float(r[2])}
                         for r in rows]}
    _emit({"subcommand": "beatty", "alpha": alpha, "beta": beta, "c": cutoff,
           "lo": lo, "hi": hi}, payload, out, rows, "n,term,frac_part", as_csv)


@main.command("leitmann")
@click.option("--f", "fspec", default="power:21/20", show_default=True)
@click.option("--lo", required=True, type=int)
@click.option("--hi", required=True, type=int)
@common_output
@handle_errors
def leitmann_cmd(fspec, lo, hi, out, as_csv):
    """Dump the Leitmann window [lo, hi): rows n,term."""
    f = parse_leitmann(fspec)
    w = sequences.leitmann_window(f, lo, hi)
    rows = [(int(n), int(t)) for n, t in zip(w.witnesses, w.terms)]
    payload = {"count": len(w), "c0": f.c0,
               "terms": [{"n": r[0], "term": r[1]} for r in rows]}
    _emit({"subcommand": "leitmann", "f": fspec, "lo": lo, "hi": hi},
          payload, out, rows, "n,term", as_csv)


@main.command("discrepancy", epilog="""\b
CSV columns (all dimensionless):
  N          number of points {value*n/q mod 1}, n = 1..N
  q          scaling denominator
  d_star     exact sup over [0,t) of |count/N - t|
  d_extreme  exact sup over [a,b) of |count/N - (b-a)|
  et_bound   6/(m+1) + (4/pi) sum_{h<=m} |S_h|/(hN), minimized over m
  et_m       the minimizing m
  envelope   (N/q)^(-1/tau_hat+eps) for rotations, or
             N^(-1/11) + sqrt(q) N^(-23/22) for the floor-sequence kind""")
@alpha_option
@click.option("--q", default=1, show_default=True)
@click.option("--n", "npts", required=True, type=int)
@click.option("--kind", type=click.Choice(["beatty", "leitmann"]), default="beatty",
              show_default=True)
@click.option("--f", "fspec", default="power:21/20", show_default=True)
@common_output
@handle_errors
def discrepancy_cmd(alpha, beta, cutoff, q, npts, kind, fspec, out, as_csv):
    """Exact discrepancy report; CSV schema N,q,d_star,d_extreme,et_bound,et_m,envelope."""
    if kind == "beatty":
        spec = parse_irrational(alpha)
        rep = equidist.scaled_beatty_discrepancy(spec, q, npts)
    else:
        rep = equidist.leitmann_discrepancy(parse_leitmann(fspec), q, npts)
    payload = {"report": rep}
    rows = [(rep.n, rep.q, _fmt_float(rep.d_star), _fmt_float(rep.d_extreme),
             _fmt_float(rep.et_bound), rep.et_m, _fmt_float(rep.envelope))]
    _emit({"subcommand": "discrepancy", "kind": kind, "alpha": alpha, "q": q,
           "n": npts}, payload, out, rows,
          "N,q,d_star,d_extreme,et_bound,et_m,envelope", as_csv)


@main.command("psi-delta")
@click.option("--gamma", required=True, help="plateau end, exact rational")
@click.option("--delta", required=True, help="ramp half-width, exact rational")
@click.option("--kmax", default=100, show_default=True)
@common_output
@handle_errors
def psi_delta_cmd(gamma, delta, kmax, out, as_csv):
    """Fourier coefficient table: rows k,re_g,im_g,bound."""
    p = smoothing.PsiDelta(as_fraction(gamma), as_fraction(delta))
    rows = []
    coeffs = []
    for k in range(1, kmax + 1):
        g, _ = smoothing.psi_delta_fourier(p, k)
        bound = smoothing.psi_delta_coeff_bound(k, p.delta)
        rows.append((k, _fmt_float(g.real), _fmt_float(g.imag), _fmt_float(bound)))
        coeffs.append({"k": k, "re_g": g.real, "im_g": g.imag, "bound": bound})
    _emit({"subcommand": "psi-delta", "gamma": gamma, "delta": delta},
          {"coefficients": coeffs}, out, rows, "k,re_g,im_g,bound", as_csv)


@main.command("admissible")
@alpha_option
@click.option("--k", required=True, type=int)
@click.option("--search-limit", default=100_000, show_default=True)
@workers_option
@common_output
@handle_errors
def admissible_cmd(alpha, beta, cutoff, k, search_limit, workers, out, as_csv):
    """Beatty-constructed admissible tuple: {shifts, W, residue_class, diameter}."""
    spec = _beatty_spec(alpha, beta, cutoff)
    t = tuples.beatty_admissible_tuple(spec, k, search_limit, workers=workers)
    payload = {"shifts": list(t.shifts), "W": t.provenance["W"],
               "residue_class": t.provenance["residue_class"],
               "diameter": tuples.diameter(t)}
    rows = [(i + 1, s) for i, s in enumerate(t.shifts)]
    _emit({"subcommand": "admissible", "alpha": alpha, "c": cutoff, "k": k,
           "search_limit": search_limit}, payload, out, rows, "i,shift", as_csv)


@main.command("hyp-check", epilog="""\b
Columns:
  q          modulus (counts taken over the window [x, 2x))
  max_error  part 1: max_a |#A(x;q,a) - #A(x)/q|  (a over all classes)
             part 2: max over classes a with gcd(a+shift, q) = 1 of
                     |#P(x;q,a) - #P(x)/phi(q)|, P = primes among members+shift
  total      sum of max_error over q <= x^theta
  ratio      total divided by #A(x) (part 1) or #P(x) (part 2)
  part 3 reports max over q, a of q * #A(x;q,a) / #A(x) instead.""")
@alpha_option
@click.option("--part", type=click.IntRange(1, 3), required=True)
@click.option("--x", required=True, type=int)
@click.option("--theta", type=float, default=None,
              help="default: min(1/(2*tau_hat)-0.01, 0.45) for parts 1/3, 0.2 for part 2")
@click.option("--shift", default=0, show_default=True, help="form shift l (part 2)")
@table_option
@workers_option
@common_output
@handle_errors
def hyp_check_cmd(alpha, beta, cutoff, part, x, theta, shift, prime_cache,
                  workers, out, as_csv):
    """Well-distribution error sums for the Beatty set."""
    spec = _beatty_spec(alpha, beta, cutoff)
    params = {"subcommand": "hyp-check", "part": part, "alpha": alpha,
              "beta": beta, "c": cutoff, "x": x, "theta": theta, "shift": shift}
    if part == 1:
        rep = dist.hyp1_part1(spec, x, theta, workers=workers)
    elif part == 2:
        table = _build_table(2 * x + max(shift, 0) + 1, prime_cache)
        rep = dist.hyp1_part2(spec, table, shift, x, theta or 0.2, workers=workers)
    else:
        rep = dist.hyp1_part3(spec, x, theta or dist.default_theta(spec.alpha),
                              workers=workers)
        _emit(params, {"note": _NORMALIZATION_NOTE, "ratio": rep.ratio,
                       "worst_q": rep.worst_q,
                       "worst_a": rep.worst_a, "q_max": rep.q_max}, out,
              [(rep.q_max, _fmt_float(rep.ratio), rep.worst_q, rep.worst_a)],
              "q_max,ratio,worst_q,worst_a", as_csv)
        return
    rows = [(q, _fmt_float(e)) for q, e in rep.rows]
    _emit(params, {"note": _NORMALIZATION_NOTE, "theta": rep.theta,
                   "q_max": rep.q_max, "total": rep.total,
                   "normalizer": rep.normalizer, "ratio": rep.ratio,
                   "rows": [{"q": q, "max_error": e} for q, e in rep.rows]},
          out, rows, "q,max_error", as_csv)


@main.command("lambda-sum")
@alpha_option
@click.option("--n", "nmax", required=True, type=int)
@click.option("--q", default=1, show_default=True)
@click.option("--a", default=0, show_default=True)
@click.option("--decompose", is_flag=True)
@click.option("--delta", type=float, default=None)
@click.option("--eps", type=float, default=0.1, show_default=True)
@click.option("--k-split", type=int, default=None)
@table_option
@common_output
@handle_errors
def lambda_sum_cmd(alpha, beta, cutoff, nmax, q, a, decompose, delta, eps,
                   k_split, prime_cache, out, as_csv):
    """Weighted prime sum over the Beatty set vs its main term."""
    spec = _beatty_spec(alpha, beta, cutoff)
    approx_m = int(spec.alpha.approx() * nmax + float(spec.beta)) + 2
    table = _build_table(approx_m, prime_cache)
    rep = dist.lambda_beatty_sum(spec, table, nmax, q, a, delta=delta, eps=eps,
                                 k_split=k_split, decompose=decompose)
    rows = [(rep.N, rep.M, rep.q, rep.a, _fmt_float(rep.S),
             _fmt_float(rep.main_term), _fmt_float(rep.rel_error))]
    _emit({"subcommand": "lambda-sum", "alpha": alpha, "beta": beta,
           "c": cutoff, "n": nmax, "q": q, "a": a},
          {"note": _NORMALIZATION_NOTE, "report": rep}, out,
          rows, "N,M,q,a,S,main_term,rel_error", as_csv)


@main.command("cluster")
@alpha_option
@click.option("--k", required=True, type=int)
@click.option("--m", required=True, type=int)
@click.option("--x", required=True, type=int)
@click.option("--search-limit", default=100_000, show_default=True)
@table_option
@workers_option
@common_output
@handle_errors
def cluster_cmd(alpha, beta, cutoff, k, m, x, search_limit, prime_cache,
                workers, out, as_csv):
    """Construct a k-tuple and count members with >= m primes among shifts."""
    spec = _beatty_spec(alpha, beta, cutoff)
    t = tuples.beatty_admissible_tuple(spec, k, search_limit, workers=workers)
    table = _build_table(2 * x + t.shifts[-1] + 1, prime_cache)
    rep = dist.cluster_search(spec, table, t, x, m, workers=workers)
    rows = [(rep.x_lo, rep.x_hi, rep.m, rep.count, rep.diameter, rep.scanned)]
    _emit({"subcommand": "cluster", "alpha": alpha, "c": cutoff, "k": k,
           "m": m, "x": x}, {"report": rep}, out, rows,
          "x_lo,x_hi,m,count,diameter,scanned", as_csv)


@main.command("leitmann-search")
@click.option("--f", "fspec", default="power:21/20", show_default=True)
@click.option("--m", required=True, type=int)
@click.option("--window", required=True, type=int)
@click.option("--lo", required=True, type=int)
@click.option("--hi", required=True, type=int)
@table_option
@common_output
@handle_errors
def leitmann_search_cmd(fspec, m, window, lo, hi, prime_cache, out, as_csv):
    """Leitmann terms whose prime window [t, t+window] holds >= m primes."""
    f = parse_leitmann(fspec)
    table = _build_table(hi + window + 1, prime_cache)
    rep = dist.leitmann_interval_search(f, table, lo, hi, m, window)
    rows = [(rep.x_lo, rep.x_hi, rep.m, rep.count, rep.diameter, rep.scanned)]
    _emit({"subcommand": "leitmann-search", "f": fspec, "m": m,
           "window": window, "lo": lo, "hi": hi}, {"report": rep}, out, rows,
          "x_lo,x_hi,m,count,window,scanned", as_csv)


@main.command("leitmann-pnt")
@click.option("--f", "fspec", default="power:21/20", show_default=True)
@click.option("--x", required=True, type=int)
@click.option("--q-max", default=1, show_default=True)
@table_option
@common_output
@handle_errors
def leitmann_pnt_cmd(fspec, x, q_max, prime_cache, out, as_csv):
    """Prime counts in the floor sequence vs the inverse-function integral."""
    f = parse_leitmann(fspec)
    table = _build_table(x + 1, prime_cache)
    rep = dist.leitmann_pnt_check(f, table, x, q_max)
    rows = [(q, _fmt_float(e)) for q, e in rep.rows]
    _emit({"subcommand": "leitmann-pnt", "f": fspec, "x": x, "q_max": q_max},
          {"report": rep}, out, rows, "q,max_error", as_csv)


_LADDER_EXPERIMENTS = ("part1-total", "part2-total", "part3-ratio",
                       "lambda-error", "twisted-magnitude")


@main.command("ladder")
@alpha_option
@click.option("--experiment", type=click.Choice(_LADDER_EXPERIMENTS), required=True)
@click.option("--points", required=True,
              help="comma-separated x ladder, e.g. 10000,100000,1000000")
@click.option("--theta", type=float, default=None)
@click.option("--shift", default=0, show_default=True)
@click.option("--q", default=1, show_default=True)
@click.option("--a", default=0, show_default=True)
@click.option("--k", "k_twist", default=1, show_default=True)
@table_option
@workers_option
@common_output
@handle_errors
def ladder_cmd(alpha, beta, cutoff, experiment, points, theta, shift, q, a,
               k_twist, prime_cache, workers, out, as_csv):
    """Run an experiment along an x ladder and fit the log-log slope."""
    xs = [int(float(t)) for t in points.split(",")]
    if len(xs) < 3:
        raise click.UsageError("need at least 3 ladder points")
    spec = _beatty_spec(alpha, beta, cutoff)
    top = max(xs)
    if experiment == "part1-total":
        runner = lambda x: dist.hyp1_part1(spec, x, theta, workers=workers).total
    elif experiment == "part2-total":
        table = _build_table(2 * top + max(shift, 0) + 1, prime_cache)
        runner = lambda x: dist.hyp1_part2(spec, table, shift, x, theta or 0.2,
                                           workers=workers).total
    elif experiment == "part3-ratio":
        runner = lambda x: dist.hyp1_part3(
            spec, x, theta or dist.default_theta(spec.alpha), workers=workers).ratio
    elif experiment == "lambda-error":
        approx_m = int(spec.alpha.approx() * top + float(spec.beta)) + 2
        table = _build_table(approx_m, prime_cache)
        runner = lambda x: abs(dist.lambda_beatty_sum(spec, table, x, q, a).error)
    else:  # twisted-magnitude
        table = _build_table(top, prime_cache)
        inv = spec.alpha.inverse()
        runner = lambda x: dist.twisted_lambda_sum(table, x, q, a, inv, k_twist)
    rep = dist.ladder(xs, runner)
    rows = list(zip(rep.points, (_fmt_float(v) for v in rep.values)))
    _emit({"subcommand": "ladder", "experiment": experiment, "alpha": alpha,
           "points": points}, {"note": _NORMALIZATION_NOTE, "report": rep},
          out, rows, "x,value", as_csv)


if __name__ == "__main__":
    main()
