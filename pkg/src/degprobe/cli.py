"""Command-line front end.

Exit codes: 0 success (``test``: degree < k), 1 ``test`` found degree >= k,
2 parse error, 3 cost guard, 4 ``sweep --check`` mismatch, 5 methods disagree.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

from . import catalog
from .boolfun import (
    AnfParseError,
    anf_to_tt,
    format_anf,
    moebius,
    parse_anf,
    read_truth_table,
)
from .degtest import (
    CostGuardError,
    Verdict,
    bounds,
    decide,
    dt_by_derivative_recursion,
    dt_from_add,
    estimate_dt,
    exact_add,
    exact_dt_homogeneous,
    exact_dt_tuples,
    fmt,
    fmt_rational,
    pochhammer_floor,
)
from .gf2 import lin_indep_probability

DEFAULT_SEED = 271828

EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_CHECK = 4
EXIT_DISAGREE = 5


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _seed(value: str) -> int:
    if value == "random":
        return secrets.randbits(63)
    try:
        s = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {value!r}") from None
    if not 0 <= s < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return s


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=_seed, default=d(DEFAULT_SEED), help="integer seed or 'random'")
    p.add_argument("--output", choices=["plain", "csv", "json"], default=d("plain"))
    p.add_argument("--precision", type=int, default=d(6), help="decimal digits (half-even)")
    p.add_argument("--parallelism", type=int, default=d(1), help="worker threads")
    p.add_argument("--exact", action="store_true", default=d(False), help="also print rationals")


def _function_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--expr", help="ANF text, e.g. 'x1x2x3 + x4x5x6'")
    p.add_argument("--n", type=int, help="number of variables for --expr")
    p.add_argument("--tt", help="truth-table file")
    p.add_argument("--hex", action="store_true", help="truth-table data line is hex")


def _load_function(args):
    if (args.expr is None) == (args.tt is None):
        raise CliError("give exactly one of --expr or --tt", EXIT_PARSE)
    try:
        if args.tt is not None:
            tt = read_truth_table(args.tt, args.hex)
            return moebius(tt), tt
        a = parse_anf(args.expr, args.n)
    except (AnfParseError, ValueError, OSError) as e:
        raise CliError(f"parse error: {e}", EXIT_PARSE) from None
    return a, anf_to_tt(a)


def _emit(args, records: list[dict]) -> None:
    out = sys.stdout
    if args.output == "json":
        out.write(json.dumps(records[0] if len(records) == 1 else records, indent=2) + "\n")
    elif args.output == "csv":
        keys = list(records[0])
        out.write(",".join(keys) + "\n")
        for r in records:
            out.write(",".join(str(r[k]) for k in keys) + "\n")
    else:
        for i, r in enumerate(records):
            if i:
                out.write("\n")
            for k, v in r.items():
                out.write(f"{k}: {v}\n")


def _prob(args, rec: dict, name: str, p: Fraction) -> None:
    rec[name] = fmt(p, args.precision)
    if args.exact or args.output != "plain":
        rec[f"{name}_rational"] = fmt_rational(p)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_anf(args) -> int:
    a, tt = _load_function(args)
    d = a.degree()
    if args.output == "plain":
        if d is None:
            print("0, zero function (degree undefined)")
        else:
            print(f"{format_anf(a)}, degree {d}")
        if args.tt is None:
            print(f"truth table: {tt.to_bitstring()}")
        for k in range(a.n + 1):
            print(f"dd_{k} = {_dd(a, k)}")
        return 0
    rec = {"anf": format_anf(a), "n": a.n, "degree": "none" if d is None else d, "truth_table": tt.to_bitstring()}
    for k in range(a.n + 1):
        rec[f"dd_{k}"] = _dd(a, k)
    _emit(args, [rec])
    return 0


def _dd(a, k: int) -> str:
    return f"{a.count(k)}/{comb(a.n, k)}"


def _dt_by(method: str, tt, k: int) -> Fraction:
    if method == "tuples":
        return exact_dt_tuples(tt, k)
    if method == "subspaces":
        return dt_from_add(exact_add(tt, k), tt.n, k)
    if method == "homogeneous":
        return exact_dt_homogeneous(tt, k)
    return dt_by_derivative_recursion(tt, k)


METHODS = ["tuples", "subspaces", "homogeneous", "recursion"]


def cmd_exact(args) -> int:
    a, tt = _load_function(args)
    k = args.k
    if not 1 <= k <= a.n:
        raise CliError(f"need 1 <= k <= n={a.n}", EXIT_PARSE)
    try:
        dt = _dt_by(args.method, tt, k)
    except CostGuardError as e:
        raise CliError(str(e), EXIT_GUARD) from None
    except ValueError as e:
        raise CliError(str(e), EXIT_PARSE) from None
    rec = {"function": format_anf(a), "n": a.n, "k": k, "method": args.method}
    _prob(args, rec, "dt_k", dt)
    _prob(args, rec, "add_k", dt / lin_indep_probability(a.n, k))
    if args.self_check:
        agreed = [args.method]
        for m in METHODS:
            if m == args.method:
                continue
            try:
                other = _dt_by(m, tt, k)
            except (CostGuardError, ValueError):
                continue
            if other != dt:
                raise CliError(f"methods disagree: {args.method}={dt} {m}={other}", EXIT_DISAGREE)
            agreed.append(m)
        rec["self_check"] = "agree:" + "+".join(agreed)
    _emit(args, [rec])
    return 0


def cmd_test(args) -> int:
    a, tt = _load_function(args)
    if args.k < 1:
        raise CliError("k must be >= 1", EXIT_PARSE)
    d = decide(tt, args.k, args.t, args.seed)
    rec = {
        "verdict": d.verdict.value,
        "failures": f"{d.failures}/{d.runs_used}",
        "runs_used": d.runs_used,
        "t": args.t,
        "false_positive_bound": f"{d.false_positive_bound:.{args.precision}g}",
        "seed": args.seed,
    }
    _emit(args, [rec])
    return 0 if d.verdict is Verdict.DEG_LESS_THAN_K else 1


def cmd_estimate(args) -> int:
    a, tt = _load_function(args)
    if args.k < 1:
        raise CliError("k must be >= 1", EXIT_PARSE)
    est = estimate_dt(tt, args.k, args.trials, args.seed, args.independent, args.parallelism)
    rec = {
        "target": "add_k" if args.independent else "dt_k",
        "p_hat": f"{est.p_hat:.{args.precision}f}",
        "stderr": f"{est.stderr:.{args.precision}f}",
        "failures": est.failures,
        "trials": est.trials,
        "seed": est.seed,
    }
    _emit(args, [rec])
    return 0


def _reps_from(args) -> list[catalog.RepEntry]:
    src = args.reps
    try:
        if src.startswith("builtin:"):
            reps = catalog.builtin_reps(int(src.split(":", 1)[1]), args.n)
            if not reps:
                print(f"no built-in representatives for {src}; load them from a file", file=sys.stderr)
        else:
            reps = catalog.load_reps(src, args.n, args.degree)
        if args.complement:
            reps = catalog.derive_complement_reps(reps, args.n)
    except (ValueError, OSError) as e:
        raise CliError(f"parse error: {e}", EXIT_PARSE) from None
    return reps


def _hist_spec(mode: str, bins: int) -> catalog.HistogramSpec:
    return catalog.HistogramSpec("distinct" if mode == "distinct" else "bins", bins)


def cmd_sweep(args) -> int:
    reps = _reps_from(args)
    if not reps:
        return 0
    k = args.k if args.k is not None else reps[0].degree
    try:
        rows = catalog.sweep(reps, k, args.parallelism)
    except CostGuardError as e:
        raise CliError(str(e), EXIT_GUARD) from None
    text = (
        catalog.sweep_json(rows, args.precision) if args.output == "json" else catalog.sweep_csv(rows, args.precision)
    )
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(catalog.sweep_json(rows, args.precision))
    if args.hist:
        spec = _hist_spec(args.hist, args.bins)
        htext = catalog.histogram_csv(catalog.histogram(rows, spec), spec.mode, args.precision)
        if args.hist_out:
            Path(args.hist_out).write_text(htext)
        else:
            sys.stdout.write(htext)
    if args.check:
        bad = [(r, r.mismatches()) for r in rows]
        bad = [(r, m) for r, m in bad if m]
        checked = sum(1 for r in rows if r.expected_add or r.expected_dt)
        if bad:
            for r, m in bad:
                hint = " (truncated value agrees)" if r.matches_truncated() else ""
                print(f"MISMATCH {r.id}: {'; '.join(m)}{hint}", file=sys.stderr)
            print(f"check failed: {len(bad)} of {checked} rows differ ({', '.join(r.id for r, _ in bad)})", file=sys.stderr)
            return EXIT_CHECK
        print(f"check passed: {checked} rows", file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    try:
        b = bounds(args.n, args.k)
    except ValueError as e:
        raise CliError(str(e), EXIT_PARSE) from None
    rec = {"n": args.n, "k": args.k}
    _prob(args, rec, "lower", b.lower)
    _prob(args, rec, "upper", b.upper)
    rec["floor"] = str(pochhammer_floor(args.precision))
    _emit(args, [rec])
    return 0


def cmd_hist(args) -> int:
    try:
        rows = catalog.read_sweep_csv(Path(args.csv).read_text())
    except (OSError, KeyError, ValueError) as e:
        raise CliError(f"parse error: {e}", EXIT_PARSE) from None
    spec = _hist_spec(args.mode, args.bins)
    sys.stdout.write(catalog.histogram_csv(catalog.histogram(rows, spec), spec.mode, args.precision))
    return 0


def cmd_reps(args) -> int:
    reps = _reps_from(args)
    records = [
        {
            "id": r.id,
            "degree": r.degree,
            "anf": r.anf_text,
            "expected_add": r.expected_add or "",
            "expected_dt": r.expected_dt or "",
        }
        for r in reps
    ]
    if args.output == "plain":
        for r in reps:
            print(f"{r.id}: {r.anf_text}")
    elif records:
        _emit(args, records)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="degprobe", description="Probabilistic deg(f)<k testing of Boolean functions")
    _global_options(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _global_options(sp, suppress=True)
        sp.set_defaults(func=fn)
        return sp

    sp = add("anf", cmd_anf, "convert between truth table and ANF; report degree and dd_k")
    _function_options(sp)

    sp = add("exact", cmd_exact, "exact dt_k and add_k")
    _function_options(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--method", choices=METHODS, default="subspaces")
    sp.add_argument("--self-check", action="store_true", help="cross-check every feasible method")

    sp = add("test", cmd_test, "run the deg(f)<k test t times")
    _function_options(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--t", type=int, default=9)

    sp = add("estimate", cmd_estimate, "Monte-Carlo estimate of dt_k")
    _function_options(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--independent", action="store_true", help="independent tuples only (targets add_k)")

    def reps_options(sp):
        sp.add_argument("--reps", default="builtin:3", help="builtin:<degree> or a representative file")
        sp.add_argument("--n", type=int, default=8)
        sp.add_argument("--degree", type=int, help="validate file entries against this degree")
        sp.add_argument("--complement", action="store_true", help="use f^c of each representative")

    sp = add("sweep", cmd_sweep, "exact add_k/dt_k over a representative list")
    reps_options(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--out", help="CSV (or JSON with --output json) destination")
    sp.add_argument("--json", help="also write a JSON mirror here")
    sp.add_argument("--check", action="store_true", help="compare with the embedded expected values")
    sp.add_argument("--hist", choices=["distinct", "bins"])
    sp.add_argument("--bins", type=int, default=20)
    sp.add_argument("--hist-out")

    sp = add("bounds", cmd_bounds, "lower/upper bounds on dt_k for degree-k functions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("hist", cmd_hist, "histogram of a sweep CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--mode", choices=["distinct", "bins"], default="distinct")
    sp.add_argument("--bins", type=int, default=20)

    sp = add("reps", cmd_reps, "list representatives")
    reps_options(sp)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
