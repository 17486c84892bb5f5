"""Command line front end.

Subcommands::

    count            C(n, k) over ranges of n and k
    spencer-verify   n^{n-2} E*[binom(M, k)] against the recurrence (and brute force)
    moments          exact or float DP moments of the excursion area
    simulate         Monte Carlo moments of M_n or of the excursion area
    converge         finite-n ratios along a ladder of n, with extrapolation

Every command writes a table as CSV (header row first) or JSON.  In CSV,
rationals are ``p/q`` and big integers plain decimal; in JSON, rationals
are ``{"num": "p", "den": "q"}`` and big integers decimal strings.  JSON
documents follow :data:`JSON_SCHEMA`.

Exit status: 0 success, 1 usage or I/O error, 2 verification mismatch.
``EXCURSION_COUNTS_CACHE`` in the environment overrides ``--cache``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import asymptotics, exact_moments, graph_counts, simulate

CACHE_ENV = "EXCURSION_COUNTS_CACHE"
ZERO_SEED_HOOK = "fixed-zero-hook"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2

JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "columns", "rows", "meta"],
    "properties": {
        "command": {"type": "string"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": {"$ref": "#/$defs/cell"}},
        },
        "meta": {"type": "object"},
    },
    "$defs": {
        "cell": {
            "oneOf": [
                {"type": "string"},
                {"type": "number"},
                {"type": "boolean"},
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["num", "den"],
                    "additionalProperties": False,
                    "properties": {
                        "num": {"type": "string", "pattern": "^-?[0-9]+$"},
                        "den": {"type": "string", "pattern": "^[0-9]+$"},
                    },
                },
            ]
        }
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class BigInt(int):
    """Marks integers serialised as decimal strings in JSON."""


# --- encoding -----------------------------------------------------------------


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, Fraction):
        return {"num": str(v.numerator), "den": str(v.denominator)}
    if isinstance(v, BigInt):
        return str(int(v))
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(command: str, columns: list[str], rows: list[dict], fmt: str, meta: dict | None = None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_csv_cell(row.get(c)) for c in columns])
        return buf.getvalue()
    doc = {
        "command": command,
        "columns": columns,
        "rows": [{c: _json_cell(row.get(c)) for c in columns} for row in rows],
        "meta": meta or {},
    }
    return json.dumps(doc, indent=2) + "\n"


def _emit(args, command, columns, rows, meta=None, plot=None):
    text = render(command, columns, rows, args.format, meta)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if getattr(args, "emit_plot_data", None):
        if plot is None:
            raise UsageError(f"{command} has no plot data")
        xcol, ycol = plot
        lines = ["x,y"] + [
            f"{_csv_cell(r[xcol])},{_csv_cell(r[ycol])}" for r in rows if r.get(ycol) is not None
        ]
        Path(args.emit_plot_data).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- argument helpers -----------------------------------------------------------


def parse_int_range(text: str) -> list[int]:
    """'3..5' -> [3, 4, 5]; '50,100' -> [50, 100]; parts may be mixed."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(p) for p in part.split("..", 1))
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty range")
    return out


def parse_seed(text: str):
    if text == ZERO_SEED_HOOK:
        return text
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


def _cache_path(args) -> str | None:
    return os.environ.get(CACHE_ENV) or getattr(args, "cache", None)


def _load_cache(args) -> graph_counts.GraphCountTable:
    path = _cache_path(args)
    if path and Path(path).exists():
        return graph_counts.load_cache(path)
    return graph_counts.GraphCountTable()


def _save_cache(args, table) -> None:
    path = _cache_path(args)
    if path:
        graph_counts.save_cache(table, path)


# --- commands -----------------------------------------------------------------


def cmd_count(args) -> int:
    table = _load_cache(args)
    rows = []
    status = EXIT_OK
    for n in args.n:
        for k in args.k:
            if n < 1:
                raise UsageError("n must be positive")
            if not 0 <= k <= exact_moments.max_excess(n):
                rows.append({"n": n, "k": k, "count": BigInt(0), "provenance": "", "flag": "infeasible"})
                continue
            value, prov = graph_counts.count(n, k, table)
            flag = "ok"
            if args.verify:
                checks = {"recurrence": graph_counts.recurrence_count(n, k, table)}
                if n <= graph_counts.BRUTE_FORCE_MAX_N:
                    checks["brute_force"] = graph_counts.brute_force_count(n, k)
                if 2 <= n <= args.max_exact_n:
                    checks["spencer"] = exact_moments.spencer_count(n, k, max_exact_n=args.max_exact_n)
                if all(v == value for v in checks.values()):
                    flag = "verified:" + "+".join(sorted(checks))
                    for p, v in checks.items():
                        table.add(n, k, v, p)
                else:
                    flag = "MISMATCH"
                    status = EXIT_MISMATCH
            rows.append({"n": n, "k": k, "count": BigInt(value), "provenance": prov, "flag": flag})
    _save_cache(args, table)
    _emit(args, "count", ["n", "k", "count", "provenance", "flag"], rows, plot=("n", "count"))
    return status


def cmd_spencer_verify(args) -> int:
    if args.n_max < 2:
        raise UsageError("--n-max must be at least 2")
    if args.n_max > args.max_exact_n:
        raise UsageError(
            f"exact arithmetic is limited to n <= {args.max_exact_n}; lower --n-max or raise --max-exact-n"
        )
    table = _load_cache(args)
    grid = [
        (n, k)
        for n in range(2, args.n_max + 1)
        for k in range(0, min(args.k_max, exact_moments.max_excess(n)) + 1)
    ]
    fault_at = grid[-1] if args.inject_fault else None
    rows = []
    status = EXIT_OK
    for n, k in grid:
        moments = exact_moments.dp_moments(n, k, "exact", max_exact_n=args.max_exact_n)
        binom = moments.binomial[k]
        if (n, k) == fault_at:
            binom += Fraction(1, n ** (n - 2))
        spencer = binom * n ** (n - 2)
        rec = graph_counts.recurrence_count(n, k, table)
        brute = graph_counts.brute_force_count(n, k) if n <= graph_counts.BRUTE_FORCE_MAX_N else None
        ok = spencer == rec and (brute is None or brute == rec)
        if not ok:
            status = EXIT_MISMATCH
        rows.append(
            {
                "n": n,
                "k": k,
                "spencer": BigInt(spencer) if spencer.denominator == 1 else spencer,
                "recurrence": BigInt(rec),
                "brute_force": None if brute is None else BigInt(brute),
                "status": "EXACT-MATCH" if ok else "MISMATCH",
            }
        )
    _save_cache(args, table)
    _emit(args, "spencer-verify", ["n", "k", "spencer", "recurrence", "brute_force", "status"], rows)
    return status


def cmd_moments(args) -> int:
    mode = "float" if args.float else "exact"
    t = exact_moments.dp_moments(args.n, args.k, mode, max_exact_n=args.max_exact_n)
    scaled = t.scaled()
    rows = [
        {"j": j, "raw": t.raw[j], "binomial": t.binomial[j], "scaled": scaled[j]}
        for j in range(t.k_max + 1)
    ]
    meta = {"n": args.n, "arithmetic": mode, "total_weight": _json_cell(t.total_weight)}
    _emit(args, "moments", ["j", "raw", "binomial", "scaled"], rows, meta, plot=("j", "scaled"))
    return EXIT_OK


def _rng_from(seed) -> simulate.RngStream:
    if seed == ZERO_SEED_HOOK:
        return simulate.RngStream(0, 0, zero=True)
    return simulate.RngStream(seed)


def cmd_simulate(args) -> int:
    size = args.n if args.kind == "walk" else args.grid
    if size is None:
        raise UsageError("--n is required for walks and --grid for excursions")
    rng = _rng_from(args.seed)
    report = simulate.estimate_moments(
        args.kind, size, args.k, args.samples, rng, workers=args.workers, rule=args.rule
    )
    rows = [dict(r, seed=args.seed) for r in report.rows()]
    columns = ["kind", "size", "j", "estimate", "std_error", "samples", "seed", "workers"]
    meta = {"seed": args.seed, "workers": args.workers, "samples": args.samples, "rule": args.rule}
    _emit(args, "simulate", columns, rows, meta, plot=("j", "estimate"))
    return EXIT_OK


def cmd_converge(args) -> int:
    ladder = args.ladder
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise UsageError("ladder must be ascending")
    k = args.k
    want = {"theorem1", "theorem2", "binom-raw"} if args.ratio == "all" else {args.ratio}
    tables = {n: exact_moments.dp_moments(n, k, "float") for n in ladder}
    dp_values = [tables[n].scaled()[k] for n in ladder]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = asymptotics.extrapolate_moment(k, ladder, dp_values)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    ea_k, ea_source = None, args.ea_source
    if args.ea_source == "dp":
        ea_k = fit.intercept
    elif args.ea_source == "asymptotic":
        ea_k = asymptotics.excursion_moment_asymptotic(k)
    else:
        report = simulate.estimate_moments(
            "excursion", args.mc_grid, k, args.mc_samples, _rng_from(args.seed), workers=args.workers
        )
        ea_k = report.estimates[-1]

    table = _load_cache(args) if "theorem1" in want else None
    rows = []
    for n, value in zip(ladder, dp_values):
        row = {"n": n, "k": k, "dp_moment": value, "ea_k": ea_k, "ea_source": ea_source,
               "extrapolated": fit.intercept, "fit_residual": fit.residual}
        if "theorem2" in want and ea_k is not None:
            row["theorem2_ratio"] = asymptotics.moment_ratio(n, k, value, ea_k, "dp", ea_source).ratio
        if "theorem1" in want:
            count, prov = graph_counts.count(n, k, table)
            row["count"] = BigInt(count)
            row["count_source"] = prov
            if ea_k is not None and count > 0:
                row["theorem1_ratio"] = asymptotics.theorem1_ratio(n, k, count, ea_k, prov, ea_source).ratio
        if "binom-raw" in want:
            row["binom_raw_ratio"] = float(asymptotics.binomial_vs_raw_ratio(tables[n], k))
        rows.append(row)
    if table is not None:
        _save_cache(args, table)

    columns = ["n", "k", "dp_moment"]
    if "theorem2" in want:
        columns += ["theorem2_ratio"]
    if "theorem1" in want:
        columns += ["count", "count_source", "theorem1_ratio"]
    if "binom-raw" in want:
        columns += ["binom_raw_ratio"]
    columns += ["ea_k", "ea_source", "extrapolated", "fit_residual"]
    ycol = next(c for c in ("theorem1_ratio", "theorem2_ratio", "binom_raw_ratio", "dp_moment") if c in columns)
    _emit(args, "converge", columns, rows, {"k": k, "ladder": ladder}, plot=("n", ycol))
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--cache", help=f"graph-count cache file (overridden by ${CACHE_ENV})")
    common.add_argument("--max-exact-n", type=int, default=exact_moments.DEFAULT_MAX_EXACT_N)
    plot = argparse.ArgumentParser(add_help=False)
    plot.add_argument("--emit-plot-data", metavar="PATH", help="also write x,y columns for plotting")

    parser = _Parser(prog="excursion-counts", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common, plot], help="connected graph counts C(n,k)")
    p.add_argument("--n", type=parse_int_range, required=True)
    p.add_argument("--k", type=parse_int_range, required=True)
    p.add_argument("--verify", action="store_true", help="cross-check against every other exact route")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("spencer-verify", parents=[common], help="exact check of the Spencer identity")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_spencer_verify)

    p = sub.add_parser("moments", parents=[common, plot], help="DP moments of the excursion area")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact rationals (default)")
    mode.add_argument("--float", action="store_true", help="floating point with log scaling")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("simulate", parents=[common, plot], help="Monte Carlo moment estimates")
    p.add_argument("--kind", choices=("walk", "excursion"), required=True)
    p.add_argument("--n", type=int, help="walk length (kind=walk)")
    p.add_argument("--grid", type=int, help="bridge grid size (kind=excursion)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=parse_seed, default=simulate.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rule", choices=("left", "trapezoid"), default="left")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("converge", parents=[common, plot], help="convergence ratios along a ladder of n")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ladder", type=parse_int_range, required=True)
    p.add_argument("--ratio", choices=("all", "theorem1", "theorem2", "binom-raw"), default="all")
    p.add_argument("--ea-source", choices=("dp", "mc", "asymptotic"), default="dp")
    p.add_argument("--mc-grid", type=int, default=2000)
    p.add_argument("--mc-samples", type=int, default=10**5)
    p.add_argument("--seed", type=parse_seed, default=simulate.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"excursion-counts {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
