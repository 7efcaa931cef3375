"""Command-line front end: run, bench, verify-bounds, analyze, gen.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import analysis, bench, rectangles
from .model import ProtocolError, load_instance, random_instance, save_instance
from .protocols import REGISTRY, run_protocol

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _random_spec(text: str) -> dict:
    out = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        if key.strip() not in ("n", "ma", "mb", "m0") or not val:
            raise argparse.ArgumentTypeError(f"bad --random item {part!r}; "
                                             "use n=..,ma=..,mb=..,m0=..")
        out[key.strip()] = int(val)
    missing = {"n", "ma", "mb", "m0"} - out.keys()
    if missing:
        raise argparse.ArgumentTypeError(f"--random is missing {sorted(missing)}")
    return out


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def cmd_run(args) -> int:
    if args.instance and args.random:
        raise UsageError("use either --instance or --random, not both")
    if args.instance:
        inst = load_instance(args.instance)
    elif args.random:
        r = args.random
        inst = random_instance(r["n"], r["ma"], r["mb"], r["m0"], args.seed)
    else:
        raise UsageError("one of --instance or --random is required")
    params = {}
    if args.k is not None:
        params["k"] = args.k
    if args.sub:
        params["sub"] = args.sub
    if args.dedup:
        params["dedup"] = True
    if args.verdict_bit:
        params["verdict_bit"] = True
    try:
        out = run_protocol(args.protocol, inst, args.seed, round_cap=args.round_cap,
                           count_control_bits=args.count_control_bits, **params)
    except ProtocolError as exc:
        raise UsageError(str(exc))
    report = out.to_json()
    report["instance"] = inst.to_json()
    if args.transcript:
        with open(args.transcript, "w") as fh:
            json.dump(out.transcript.to_json(), fh, indent=1)
    _emit(args, _dump(report))
    return EXIT_OK if out.ok and out.oracle_match else EXIT_FAIL


def cmd_bench(args) -> int:
    config = bench.BenchConfig(
        protocols=[p.strip() for p in args.protocols.split(",") if p.strip()],
        n=args.n, m_a=args.ma, m_b=args.mb, m_0=args.m0, k=args.k,
        trials=args.trials, seed=args.seed,
        count_control_bits=args.count_control_bits, dedup_k_encoding=args.dedup,
        round_cap=args.round_cap, workers=args.workers, timing=not args.no_timing)
    try:
        records = bench.run_bench(config)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(args, bench.to_csv(records) if args.csv else bench.to_json(records))
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    n = args.n
    if not 1 <= n <= rectangles.MAX_MATERIALIZE_N:
        raise UsageError(f"verify-bounds supports 1 <= n <= {rectangles.MAX_MATERIALIZE_N}")
    samples = args.samples
    if samples is None and n == 4 and not args.full:
        samples = 1_000_000
    report = rectangles.bounds_report(args.kind, n, samples=samples, seed=args.seed)
    _emit(args, _dump(report))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_analyze(args) -> int:
    n, mb, da = args.n, args.mb, args.da
    try:
        c = Fraction(args.c)
        k = args.k
        if k is None:
            if not args.sweep_k or da < 1 or mb < 1:
                raise UsageError("--k is required unless --sweep-k is given "
                                 "with --da >= 1 and --mb >= 1")
            k = analysis.optimal_k(n, mb, da)
        report = analysis.model_report(n, k, mb, da, r=args.r, c=c)
        if args.sweep_k:
            report["sweep"] = [{"k": kk, "e_bits_inf": float(analysis.objective(n, kk, mb, da))}
                               for kk in range(1, n + 1)]
        if args.simulate:
            report["simulation"] = analysis.simulate_vs_formula(
                n, k, mb, da, args.simulate, args.seed, m_0=args.m0)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(args, _dump(report))
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        inst = random_instance(args.n, args.ma, args.mb, args.m0, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.out:
        save_instance(inst, args.out)
    else:
        sys.stdout.write(_dump(inst.to_json()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reconciled",
        description="Two-party protocols for functions of reconciled sets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of stdout")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="JSON output (default)")
        fmt.add_argument("--csv", action="store_true", help="CSV output (bench only)")

    p = sub.add_parser("run", help="run one protocol on one instance")
    common(p)
    p.add_argument("--protocol", required=True, choices=sorted(REGISTRY))
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--random", type=_random_spec, help="n=..,ma=..,mb=..,m0=..")
    p.add_argument("--k", type=int, help="hash width for lv-sum")
    p.add_argument("--sub", help="subprotocol id for compound protocols")
    p.add_argument("--round-cap", type=int, default=10_000)
    p.add_argument("--count-control-bits", action="store_true")
    p.add_argument("--dedup", action="store_true", help="deduplicate K_i hash fields")
    p.add_argument("--verdict-bit", action="store_true")
    p.add_argument("--transcript", help="dump the transcript JSON here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="Monte Carlo sweep over a parameter grid")
    common(p)
    p.add_argument("--protocols", default="trivial-sum,lv-sum")
    p.add_argument("--n", type=_ints, default=[4])
    p.add_argument("--ma", type=_ints, default=[4])
    p.add_argument("--mb", type=_ints, default=[4])
    p.add_argument("--m0", type=_ints, default=[2])
    p.add_argument("--k", type=_ints, default=[3])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--round-cap", type=int, default=10_000)
    p.add_argument("--count-control-bits", action="store_true")
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock columns for byte-stable output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify-bounds", help="check the fooling-family lower bounds")
    common(p)
    p.add_argument("--kind", choices=("sum", "product"), default="sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, help="random crossings to test in total")
    p.add_argument("--full", action="store_true", help="exhaustive check even at n=4")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("analyze", help="evaluate the cost model of lv-sum")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--mb", type=int, required=True)
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--m0", type=int, default=0, help="overlap for --simulate")
    p.add_argument("--r", type=int, help="round bound for the bounded expectation")
    p.add_argument("--c", default="1", help="constant in k = log2(d_a / c)")
    p.add_argument("--sweep-k", action="store_true")
    p.add_argument("--simulate", type=int, metavar="TRIALS")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen", help="write a random instance file")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ma", type=int, required=True)
    p.add_argument("--mb", type=int, required=True)
    p.add_argument("--m0", type=int, required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.csv and args.command != "bench":
        parser.error("--csv is only supported by bench")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reconciled {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"reconciled {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
