"""Command-line front end.

Subcommands: threshold, exact, simulate, privacy, audit, figures.  Output is
CSV with a header row (or JSON with ``--format json``) on stdout or in
``--output``.  Relative output paths are resolved against
``$DPSTOP_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 2 parameter error, 3 capacity-guard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import curves, exact, montecarlo, privacy
from .errors import CapacityError, ContractError, ParameterError
from .stopping import BlindChoice, OptimalSecretary, PMix, as_probability, policy_from_name, threshold

EXIT_PARAMETER = 2
EXIT_CAPACITY = 3


def parse_int_range(text: str) -> list[int]:
    """``"7"``, ``"3..10"`` (inclusive) or ``"3,5,8"``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            values = list(range(lo, hi + 1))
        else:
            values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError("n", f"cannot parse range {text!r}") from None
    if not values:
        raise ParameterError("n", f"empty range {text!r}")
    return values


def parse_number(text: str, name: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParameterError(name, f"cannot parse {text!r}") from None


def _cell(value, exact_mode=True):
    if isinstance(value, Fraction):
        if exact_mode:
            return str(value)
        return repr(float(value))
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def emit(rows: list[dict], columns: list[str], args) -> None:
    exact_mode = not getattr(args, "float", False)
    if args.format == "json":
        data = [{c: _json_value(row.get(c), exact_mode) for c in columns} for row in rows]
        text = json.dumps(data, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c), exact_mode) for c in columns])
        text = buf.getvalue()
    if args.output:
        path = Path(args.output)
        base = os.environ.get("DPSTOP_OUTPUT_DIR")
        if base and not path.is_absolute():
            path = Path(base) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _json_value(value, exact_mode):
    if isinstance(value, Fraction):
        return _cell(value, exact_mode) if exact_mode else float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


# Subcommands -----------------------------------------------------------------


def cmd_threshold(args):
    rows = [{"n": n, "threshold": threshold(n)} for n in parse_int_range(args.n)]
    emit(rows, ["n", "threshold"], args)


def cmd_exact(args):
    p = parse_number(args.p, "p")
    as_probability(p)
    label = f"q_pmix({args.p})"
    rows = []
    for n in parse_int_range(args.n):
        if n < 1:
            raise ParameterError("n", f"must be positive, got {n}")
        ks = range(1, n + 1) if args.k is None else [args.k]
        for k in ks:
            r = exact.r_exact(k, n)
            rows.append({
                "n": n,
                "k": k,
                "r_exact": r,
                "r_asymptotic": exact.r_asymptotic(k),
                label: exact.q_pmix(k, n, p),
            })
    emit(rows, ["n", "k", "r_exact", "r_asymptotic", label], args)


def _simulation_config(args, n=None):
    success = frozenset(parse_int_range(args.success_set)) if getattr(args, "success_set", None) else frozenset({1})
    return montecarlo.SimulationConfig(
        n=args.n if n is None else n,
        policy=args.policy,
        p=args.p,
        samples=args.samples,
        seed=args.seed,
        shards=args.shards,
        success_set=success,
    )


def cmd_simulate(args):
    cfg = _simulation_config(args)
    counts = montecarlo.simulate_counts(cfg)
    rows = []
    for k, c in enumerate(counts, start=1):
        est = montecarlo.Estimate.from_counts(int(c), cfg.samples)
        lo, hi = est.ci95 if est.ci95 else (None, None)
        rows.append({
            "rank": k,
            "count": int(c),
            "frequency": est.point,
            "std_error": est.std_error,
            "ci95_low": lo,
            "ci95_high": hi,
            "in_success_set": int(k in cfg.success_set),
        })
    emit(rows, ["rank", "count", "frequency", "std_error", "ci95_low", "ci95_high", "in_success_set"], args)


def cmd_privacy(args):
    finite_n = args.finite_n
    l = args.l
    if args.curve == "eps-vs-p":
        rows, cols = curves.eps_vs_p(_need(args.delta, "delta"), l, finite_n), ["p", "epsilon"]
    elif args.curve == "delta-vs-p":
        rows, cols = curves.delta_vs_p(float(_need(args.epsilon, "epsilon")), l, finite_n), ["p", "delta"]
    elif args.curve == "eps-vs-delta":
        rows, cols = curves.eps_vs_delta(_need(args.p, "p"), l, finite_n), ["delta", "epsilon"]
    else:
        rows, cols = curves.p_vs_eps(_need(args.delta, "delta"), l, finite_n), ["epsilon", "p"]
    emit(rows, cols, args)


def _need(value, name):
    if value is None:
        raise ParameterError(name, "required for this curve")
    return parse_number(value, name)


def read_distribution(path) -> exact.RankDistribution:
    """Read ``rank,prob`` rows; probabilities as ``num/den`` or decimals."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"rank", "prob"} <= set(reader.fieldnames):
                raise ParameterError("dist", "CSV needs a 'rank,prob' header")
            entries = {int(row["rank"]): parse_number(row["prob"], "dist") for row in reader}
    except OSError as exc:
        raise ParameterError("dist", str(exc)) from None
    n = len(entries)
    if sorted(entries) != list(range(1, n + 1)):
        raise ParameterError("dist", "ranks must be exactly 1..n")
    return exact.RankDistribution(tuple(entries[k] for k in range(1, n + 1)))


def cmd_audit(args):
    delta = parse_number(args.delta, "delta")
    if args.dist:
        dist = read_distribution(args.dist)
        source = args.dist
        n = dist.n
    else:
        if args.n is None:
            raise ParameterError("n", "required with --policy")
        n = args.n
        source = args.policy
        policy = policy_from_name(args.policy, args.p)
        if args.empirical:
            cfg = _simulation_config(args)
            report = montecarlo.empirical_dp(cfg, args.l, delta)
            _emit_report(report, source, n, args)
            return
        dist = _policy_distribution(policy, n)
    report = privacy.audit_dp(dist, args.l, delta, args.mode)
    _emit_report(report, source, n, args)


def _policy_distribution(policy, n):
    if isinstance(policy, PMix):
        return exact.pmix_distribution(n, policy.p)
    if isinstance(policy, OptimalSecretary):
        return exact.secretary_distribution(n)
    if isinstance(policy, BlindChoice):
        return exact.RankDistribution.uniform(n)
    return exact.brute_force_distribution(policy, n)


def _emit_report(report, source, n, args):
    i, j = report.witness_pair or (None, None)
    row = {
        "source": source,
        "n": n,
        "l": report.l,
        "delta": report.delta,
        "mode": "empirical" if report.empirical else report.mode,
        "min_epsilon": report.min_epsilon,
        "max_ratio": report.max_ratio,
        "witness_i": i,
        "witness_j": j,
        "witness_set": " ".join(str(k) for k in sorted(report.witness_set)),
    }
    emit([row], list(row), args)


def cmd_figures(args):
    rows = curves.figure(
        args.figure,
        finite_n=args.finite_n,
        p=None if args.p is None else parse_number(args.p, "p"),
        l=args.l,
        delta=None if args.delta is None else parse_number(args.delta, "delta"),
        epsilon=None if args.epsilon is None else float(parse_number(args.epsilon, "epsilon")),
    )
    emit(rows, list(rows[0]) if rows else [], args)


# Parser ----------------------------------------------------------------------


def _output_flags(sp, allow_float=False):
    sp.add_argument("--output", help="write to this file instead of stdout")
    sp.add_argument("--format", "--out", dest="format", choices=["csv", "json"], default="csv")
    if allow_float:
        sp.add_argument("--float", action="store_true", help="print decimals instead of num/den")


def _sim_flags(sp):
    sp.add_argument("--p", help="mix weight for --policy pmix")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shards", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpstop",
        description="Differentially private optimal stopping: exact probabilities, simulation and privacy bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("threshold", help="threshold t_n of the optimal secretary rule")
    sp.add_argument("--n", required=True, help="N, A..B or comma list")
    _output_flags(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("exact", help="exact selection probabilities")
    sp.add_argument("--n", required=True, help="N, A..B or comma list")
    which = sp.add_mutually_exclusive_group()
    which.add_argument("--k", type=int)
    which.add_argument("--all-k", action="store_true", help="every rank 1..n (default)")
    sp.add_argument("--p", default="1", help="mix weight for the q_pmix column (default 1)")
    _output_flags(sp, allow_float=True)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("simulate", help="Monte Carlo rank frequencies")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--policy", default="optimal", help="optimal, blind or pmix:<p>")
    _sim_flags(sp)
    sp.add_argument("--success-set", help="ranks counted as success, e.g. 1 or 1..3")
    _output_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser(
        "privacy",
        help="privacy trade-off curves",
        description="Grids: p in [0,1] step 0.01; delta in [0,0.4] step 0.001; "
        "epsilon in [0,1.5] step 0.001.  Large-n formulas unless --finite-n is given.",
    )
    sp.add_argument("--curve", required=True, choices=["eps-vs-p", "delta-vs-p", "eps-vs-delta", "p-vs-eps"])
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--p")
    sp.add_argument("--delta")
    sp.add_argument("--epsilon")
    sp.add_argument("--finite-n", type=int)
    _output_flags(sp)
    sp.set_defaults(func=cmd_privacy)

    sp = sub.add_parser("audit", help="smallest epsilon of a policy or distribution")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--policy", help="optimal, blind or pmix:<p>")
    src.add_argument("--dist", help="CSV file with rank,prob columns")
    sp.add_argument("--n", type=int)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--delta", default="0")
    sp.add_argument("--mode", choices=["singleton", "exhaustive"], default="singleton")
    sp.add_argument("--empirical", action="store_true", help="audit simulated frequencies instead")
    _sim_flags(sp)
    _output_flags(sp, allow_float=True)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser(
        "figures",
        help="data for the six standard trade-off plots",
        description="; ".join(f"{k}: {v}" for k, v in curves.FIGURES.items()),
    )
    sp.add_argument("--figure", type=int, required=True, choices=sorted(curves.FIGURES))
    sp.add_argument("--finite-n", type=int)
    sp.add_argument("--p")
    sp.add_argument("--l", type=int)
    sp.add_argument("--delta")
    sp.add_argument("--epsilon")
    _output_flags(sp)
    sp.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ParameterError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    return 0


if __name__ == "__main__":
    sys.exit(main())
