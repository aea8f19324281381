"""Command-line entry point: ``onlinesearch {run,sweep,bounds,verify,trace}``.

Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import bench
from .adversary import adversarial_run, ora_policy, robust_mix_policy
from .core import PriceBounds, PriceSequence, best_price, competitive_ratio, on_star_reservation, run_reservation
from .errors import GuaranteeUnavailableError, SearchError
from .predictors import (
    ErrorBounds,
    ErrorSpec,
    Parity,
    max_eta,
    ora_bound,
    ora_reservation,
    robust_mix_bound,
    robust_mix_reservation,
)
from .query.oracle import fixed_oracle, make_oracle
from .query.partition import IntervalPartition, QueryBudget
from .query.rbis import leaf_node, rbis_bound, rbis_search, query_lower_bound
from .query.rlis import rlis, rlis_bound, rlis_responses

log = logging.getLogger("onlinesearch")

NO_GUARANTEE = "no guarantee"
FIGURE1_R = (0.5, 0.75, 1.0, 1.25, 1.5)
DEFAULT_GRID = "neg:0:0.5:500,pos:0:0.5:500"
DEFAULT_H = "3,5,8,10,13"


class UsageError(Exception):
    """Bad flags or missing files; mapped to exit status 2."""


# ---------------------------------------------------------------------------
# argument helpers


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


def _positive_float_list(text: str) -> list[float]:
    vals = _float_list(text)
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError(f"values must all be > 0: {text!r}")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _error_spec(text: str) -> ErrorSpec:
    try:
        return ErrorSpec.parse(text)
    except SearchError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_series(path: Path | None) -> bench.DatedSeries:
    if path is None:
        with bench.sample_path().open("r", encoding="utf-8") as fh:
            return bench.load_prices(fh)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        return bench.load_prices(fh)


def _bounds_from(args, prices: Sequence[float] | None = None) -> PriceBounds:
    if prices is not None and args.m is None and args.M is None:
        return PriceBounds.of(prices)
    lo = args.m if args.m is not None else (min(prices) if prices else 1.0)
    hi = args.M if args.M is not None else (max(prices) if prices else 10.0)
    return PriceBounds(lo, hi)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    series = _read_series(args.input)
    bounds = _bounds_from(args, series.prices)
    seq = PriceSequence(series.prices, bounds)
    algo = args.algo
    extra = ""
    if algo == "onstar":
        reservation = on_star_reservation(bounds)
    elif algo in ("ora", "robustmix"):
        if args.prediction is None:
            raise UsageError(f"--prediction is required for {algo}")
        if algo == "ora":
            reservation = ora_reservation(args.prediction, args.r)
        else:
            reservation = robust_mix_reservation(
                args.prediction, bounds, ErrorBounds(args.h_neg, args.h_pos)
            )
    else:
        budget = QueryBudget(args.n, args.H)
        p_star = best_price(seq)
        cells = args.n if algo == "rlis" else 1 << args.n
        part = IntervalPartition(bounds, cells)
        oracle = make_oracle(p_star, part, args.lies, budget, args.seed)
        if algo == "rlis":
            reservation = rlis(rlis_responses(oracle, part), args.H, part)
        else:
            reservation = rbis_search(oracle, budget, part, record=False)[0]
        extra = " lies=" + (",".join(str(s) for s in sorted(oracle.corruption)) or "-")
    out = run_reservation(seq, reservation)
    ratio = competitive_ratio(seq, out)
    print(
        f"algo={algo} reservation={_fmt(reservation)} accepted={_fmt(out.accepted_price)} "
        f"day={out.accept_day} forced={'yes' if out.forced_last_day else 'no'} "
        f"ratio={_fmt(ratio)}{extra}"
    )
    return 0


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args) -> int:
    series = _read_series(args.input)
    instances = bench.make_instances(series, args.count, args.length)
    report = bench.baseline(instances)
    if args.algo == "ora":
        algos = [bench.Ora(r) for r in args.r]
        report.extend(
            bench.sweep_best_price(
                instances, algos, bench.parse_grid(args.grid), strict=not args.unbounded_predictions
            )
        )
    elif args.algo == "robustmix":
        algos = [bench.RobustMix(hn, hp) for hn in args.h_neg_list for hp in args.h_pos_list]
        report.extend(
            bench.sweep_best_price(
                instances, algos, bench.parse_grid(args.grid), strict=not args.unbounded_predictions
            )
        )
    else:
        report.extend(
            bench.sweep_query(instances, args.algo, args.H, n=args.n, trials=args.trials, seed=args.seed)
        )
    if args.output is None:
        bench.emit_report(report, sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            bench.emit_report(report, fh)
        log.info("wrote %d rows to %s", len(report.rows), args.output)
    return 0


# ---------------------------------------------------------------------------
# bounds


def _figure1_rows(bounds: PriceBounds, steps: int) -> list[str]:
    rows = []
    for parity in (Parity.NEGATIVE, Parity.POSITIVE):
        top = max_eta(parity, bounds)
        for r in FIGURE1_R:
            for i in range(steps):
                eta = top * i / (steps - 1) if steps > 1 else 0.0
                b = ora_bound(ErrorSpec(parity, eta), r, bounds)
                rows.append(f"ora,{_fmt(r)},{parity.value},{_fmt(eta)},{_fmt(b)}")
        for i in range(steps):
            eta = top * i / (steps - 1) if steps > 1 else 0.0
            rows.append(f"onstar,,{parity.value},{_fmt(eta)},{_fmt(math.sqrt(bounds.ratio))}")
    return rows


def cmd_bounds(args) -> int:
    bounds = PriceBounds(1.0, args.ratio)
    chosen = [k for k in ("figure1", "ora", "robustmix", "rlis", "rbis", "query_lower") if getattr(args, k)]
    if not chosen:
        raise UsageError("pick at least one of --figure1/--ora/--robustmix/--rlis/--rbis/--query-lower")
    if "figure1" in chosen:
        print("algorithm,r,parity,eta,bound")
        for line in _figure1_rows(bounds, args.steps):
            print(line)
    if "ora" in chosen or "robustmix" in chosen:
        if args.eta is None:
            raise UsageError("--ora/--robustmix need --eta parity:value")
        print("algorithm,param,parity,eta,bound")
        for err in args.eta:
            if "ora" in chosen:
                for r in args.r:
                    if not err.feasible(bounds):
                        cell = "infeasible"
                    else:
                        cell = _fmt(ora_bound(err, r, bounds))
                    print(f"ora,{_fmt(r)},{err.parity.value},{_fmt(err.eta)},{cell}")
            if "robustmix" in chosen:
                hb = ErrorBounds(args.h_neg, args.h_pos)
                if not err.feasible(bounds):
                    cell = "infeasible"
                elif err.eta > hb.cap(err.parity):
                    cell = NO_GUARANTEE
                else:
                    cell = _fmt(robust_mix_bound(err, bounds, hb))
                print(f"robustmix,{_fmt(hb.h_neg)}/{_fmt(hb.h_pos)},{err.parity.value},{_fmt(err.eta)},{cell}")
    query = [(k, f) for k, f in (("rlis", rlis_bound), ("rbis", rbis_bound), ("query_lower", query_lower_bound)) if k in chosen]
    if query:
        print("algorithm,n,H,bound")
        for name, fn in query:
            for h in args.H:
                try:
                    cell = _fmt(fn(args.n, h, bounds))
                except GuaranteeUnavailableError:
                    cell = NO_GUARANTEE
                print(f"{name.replace('_', '-')},{args.n},{h},{cell}")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    bounds = PriceBounds(args.m if args.m is not None else 1.0, args.M if args.M is not None else 10.0)
    err = args.eta
    err.require_feasible(bounds)
    if args.algo == "ora":
        policy = ora_policy(args.r)
        theory = ora_bound(err, args.r, bounds)
    else:
        hb = ErrorBounds(args.h_neg, args.h_pos)
        policy = robust_mix_policy(hb)
        theory = robust_mix_bound(err, bounds, hb)
    run = adversarial_run(policy, err, bounds, length=args.length)
    if args.algo == "ora":
        ok = run.realized >= theory - args.tol
        relation = ">="
    else:
        ok = run.realized <= theory + args.tol
        relation = "<="
    thr = "above-M" if run.probe.above_m else _fmt(run.probe.threshold_ratio)
    print(
        f"algo={args.algo} error={err} threshold_ratio={thr} realized={_fmt(run.realized)} "
        f"bound={_fmt(theory)} check=realized{relation}bound status={'ok' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# trace


def cmd_trace(args) -> int:
    if not 1 <= args.cell <= 1 << args.n:
        raise UsageError(f"--cell must be in 1..{1 << args.n}")
    bounds = PriceBounds(args.m if args.m is not None else 1.0, args.M if args.M is not None else 10.0)
    budget = QueryBudget(args.n, args.H)
    part = IntervalPartition(bounds, 1 << args.n)
    p_star = part.point(args.cell)  # right end of the half-open leaf (a_{x-1}, a_x]
    if args.slots is not None:
        oracle = fixed_oracle(p_star, args.slots, budget, part)
    else:
        oracle = make_oracle(p_star, part, args.lies, budget, args.seed)
    reservation, transcript = rbis_search(oracle, budget, part)
    print(
        f"# n={args.n} H={args.H} cell={args.cell} leaf_node={leaf_node(args.cell, args.n)} "
        f"p_star={_fmt(p_star)} lies={','.join(str(s) for s in sorted(oracle.corruption)) or '-'}"
    )
    for line in transcript.lines():
        print(line)
    print(
        f"reservation={_fmt(reservation)} contains_true_leaf="
        f"{'yes' if transcript.contains_leaf(args.cell) else 'no'}"
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_bounds_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=_positive_float, default=None, help="lower price bound")
    p.add_argument("--M", type=_positive_float, default=None, help="upper price bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onlinesearch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one algorithm on one price file")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--algo", choices=["onstar", "ora", "robustmix", "rlis", "rbis"], required=True)
    p.add_argument("--prediction", type=_positive_float)
    p.add_argument("--r", type=_positive_float, default=1.0)
    p.add_argument("--h-neg", type=float, default=0.0)
    p.add_argument("--h-pos", type=float, default=0.0)
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--H", type=int, default=0)
    p.add_argument("--lies", type=int, default=0, help="number of corrupted query slots")
    p.add_argument("--seed", type=int, default=0)
    _add_bounds_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="error sweep over windows of a price file")
    p.add_argument("--input", type=Path, default=None, help="price CSV (default: bundled sample)")
    p.add_argument("--algo", choices=["ora", "robustmix", "rlis", "rbis"], required=True)
    p.add_argument("--r", type=_positive_float_list, default=[0.5, 0.75, 1.0, 1.25, 1.5])
    p.add_argument("--h-neg", dest="h_neg_list", type=_float_list, default=[0.1])
    p.add_argument("--h-pos", dest="h_pos_list", type=_float_list, default=[0.1])
    p.add_argument("--grid", default=DEFAULT_GRID, help="parity:lo:hi:steps[,...]")
    p.add_argument("--unbounded-predictions", action="store_true",
                   help="keep predictions that fall outside a window's [m, M] instead of skipping")
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--H", type=_int_list, default=_int_list(DEFAULT_H))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--length", type=int, default=200)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="print theoretical bounds as CSV")
    p.add_argument("--ratio", type=_positive_float, default=10.0, help="M/m")
    p.add_argument("--figure1", action="store_true")
    p.add_argument("--steps", type=int, default=100, help="eta points per parity for --figure1")
    p.add_argument("--ora", action="store_true")
    p.add_argument("--robustmix", action="store_true")
    p.add_argument("--rlis", action="store_true")
    p.add_argument("--rbis", action="store_true")
    p.add_argument("--query-lower", action="store_true")
    p.add_argument("--eta", type=lambda s: [_error_spec(x) for x in s.split(",")], default=None)
    p.add_argument("--r", type=_positive_float_list, default=[1.0])
    p.add_argument("--h-neg", type=float, default=0.0)
    p.add_argument("--h-pos", type=float, default=0.0)
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--H", type=_int_list, default=[0])
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="play a policy against its adversarial instance")
    p.add_argument("--algo", choices=["ora", "robustmix"], required=True)
    p.add_argument("--eta", type=_error_spec, required=True)
    p.add_argument("--r", type=_positive_float, default=1.0)
    p.add_argument("--h-neg", type=float, default=0.0)
    p.add_argument("--h-pos", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--length", type=int, default=200)
    _add_bounds_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="dump one RBIS search transcript")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--H", type=int, default=0)
    p.add_argument("--cell", type=int, default=1, help="1-based leaf holding p*")
    p.add_argument("--slots", type=_int_list, default=None, help="explicit 1-based lie slots")
    p.add_argument("--lies", type=int, default=0, help="random lie count (with --seed)")
    p.add_argument("--seed", type=int, default=0)
    _add_bounds_flags(p)
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"onlinesearch: error: {exc}", file=sys.stderr)
        return 2
    except SearchError as exc:
        print(f"onlinesearch: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:  # domain errors raised as ValueError subclasses
        print(f"onlinesearch: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
