"""Command-line entry point.

Every command prints one JSON object per line. Point indices are 0-based and
pairs are reported with i < j. Exit codes: 0 ok, 2 usage, 3 I/O or unreadable
input, 4 contract violation (e.g. n < 2, real input to an integer algorithm).
"""
from __future__ import annotations

import argparse
import sys

from . import kernels
from .bench import dominance_sweep, kernel_sanity
from .distprod import (DEFAULT_MAX_BOUND, EncodingTooLarge, closest_pair_bisect,
                       closest_pair_integer)
from .dominance import choose_block_size, dominance_product
from .exponents import UnsupportedZeta, predict_exponent
from .geometry import PointFileError, generate_points, parse_points, write_points
from .kernels import KernelChoice
from .linf import (SearchTrace, closest_pair_bruteforce, closest_pair_deterministic,
                   closest_pair_randomized, pairs_within)
from .matrix_io import to_binary, to_csv
from .report import RunReport, stopwatch

EXIT_USAGE, EXIT_IO, EXIT_CONTRACT = 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _block_size(text):
    return text if text == "auto" else _positive_int(text)


def _kernel(text):
    try:
        return KernelChoice.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    return [_positive_int(t) for t in text.split(",") if t]


def _load(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return parse_points(data)
    except PointFileError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from None


def _write(path, data):
    try:
        mode = "wb" if isinstance(data, bytes) else "w"
        with open(path, mode) as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


def _plan(args, n, d):
    if args.s == "auto":
        return "auto", choose_block_size(n, d, args.kernel).s
    if args.s > n:
        raise CliError(EXIT_CONTRACT, f"--s {args.s} exceeds n={n}")
    return args.s, args.s


def _base(command, algorithm, pts, seed=None, **params):
    return RunReport(command, algorithm, pts.n, pts.d,
                     "int" if pts.is_integer else "real", seed, params)


def cmd_gen(args):
    if args.dist == "integer-grid" and args.int_range is None:
        raise CliError(EXIT_USAGE, "--dist integer-grid needs --int-range M")
    if args.int_range is not None and args.int_range < 0:
        raise CliError(EXIT_USAGE, "--int-range must be >= 0")
    with stopwatch() as ms:
        pts = generate_points(args.n, args.d, args.dist, args.seed, args.int_range)
        text = write_points(pts)
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
        return
    _write(args.out, text)
    rep = _base("gen", args.dist, pts, args.seed, int_range=args.int_range)
    rep.result = {"path": args.out}
    rep.wall_ms = ms[0]
    print(rep.to_json())


def cmd_dominance(args):
    pts = _load(args.inp)
    plan, s_used = _plan(args, pts.n, pts.d)
    mode = args.mode.upper()
    with stopwatch() as ms:
        dom = dominance_product(pts, mode, args.algo, plan, args.kernel)
    rep = _base("dominance", args.algo, pts, None, mode=mode,
                s=s_used if args.algo == "blocked" else None,
                kernel=args.kernel.name if args.algo == "blocked" else None)
    rep.wall_ms = ms[0]
    if args.out:
        if args.format == "bin":
            _write(args.out, to_binary(dom, mode))
        else:
            _write(args.out, to_csv(dom))
        rep.result = {"path": args.out, "format": args.format}
    else:
        rep.result = {"matrix": dom.tolist()}
    print(rep.to_json())


def cmd_decide(args):
    pts = _load(args.inp)
    plan, s_used = _plan(args, 2 * pts.n, pts.d)
    with stopwatch() as ms:
        rep_ = pairs_within(pts, args.delta, args.strict, args.kernel, plan)
    pairs = rep_.sorted_pairs()
    rep = _base("decide", "dominance", pts, None, delta=args.delta, strict=args.strict,
                s=s_used, kernel=args.kernel.name)
    rep.result = {"count": len(pairs), "pairs": [list(p) for p in pairs]}
    rep.wall_ms = ms[0]
    rep.decision_calls = 1
    print(rep.to_json())


def cmd_closest(args):
    pts = _load(args.inp)
    if pts.n < 2:
        raise CliError(EXIT_CONTRACT, "closest pair needs at least 2 points")
    if args.algo in ("intmm", "bisect") and not pts.is_integer:
        raise CliError(EXIT_CONTRACT, f"--algo {args.algo} needs an integer ('int') point file")
    plan, s_used = _plan(args, 2 * pts.n, pts.d)
    trace = SearchTrace()
    with stopwatch() as ms:
        if args.algo == "brute":
            res = closest_pair_bruteforce(pts)
        elif args.algo == "det":
            res = closest_pair_deterministic(pts, args.kernel, plan, trace)
        elif args.algo == "rand":
            res = closest_pair_randomized(pts, args.seed, args.kernel, plan, trace)
        elif args.algo == "intmm":
            res = closest_pair_integer(pts, "minplus", max_bound=args.max_bound)
        else:
            res = closest_pair_bisect(pts, args.kernel, plan, trace)
    uses_dom = args.algo in ("det", "rand", "bisect")
    rep = _base("closest", args.algo, pts, args.seed if args.algo == "rand" else None,
                s=s_used if uses_dom else None, kernel=args.kernel.name if uses_dom else None)
    rep.result = {"pair": [res.i, res.j], "distance": res.dist}
    rep.wall_ms = ms[0]
    rep.decision_calls = trace.decision_calls if uses_dom else None
    rep.iterations = trace.iterations if args.algo == "rand" else None
    print(rep.to_json())


def cmd_predict(args):
    try:
        p = predict_exponent(args.zeta)
    except UnsupportedZeta as exc:
        raise CliError(EXIT_CONTRACT, str(exc)) from None
    rep = RunReport("predict", "exponent-model", parameters={"zeta": args.zeta})
    rep.result = {"regime": p.regime, "exponent": p.exponent, "r": p.r,
                  "omega_r": p.omega_r, "u": p.u, "v": p.v,
                  "unmodeled_o1": p.unmodeled_o1}
    print(rep.to_json())


def cmd_bench(args):
    if args.suite == "kernels":
        print(kernel_sanity(args.n[0] if args.n else 512, args.K, args.seed, args.repeat).to_json())
        return
    ns = args.n or [64, 128, 256]
    ds = args.d or [16]
    ss = args.s_list or ["auto"]
    kerns = args.kernels or ["bitpack"]
    for rep in dominance_sweep(ns, ds, ss, kerns, args.seed, args.repeat, args.check):
        print(rep.to_json(), flush=True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="domprod",
        description="Dominance products and exact L-infinity closest pair. "
                    "Indices in all output are 0-based; pairs are reported with i < j.")
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="parallelism hint for kernels (env DOMPROD_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    def tuning(p):
        p.add_argument("--s", type=_block_size, default="auto",
                       help="block size, 'auto' or an integer")
        p.add_argument("--kernel", type=_kernel, default=KernelChoice("bitpack"),
                       help="naive | bitpack | strassen[:threshold]")

    g = sub.add_parser("gen", help="write a random point file")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--d", type=_positive_int, required=True)
    g.add_argument("--dist", choices=["uniform-real", "integer-grid", "clustered"],
                   default="uniform-real")
    g.add_argument("--int-range", type=int, default=None, help="M for integer-grid")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("dominance", help="compute a dominance matrix")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--algo", choices=["naive", "blocked"], default="blocked")
    p.add_argument("--mode", choices=["le", "lt", "eq"], default="le")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "bin"], default="csv")
    tuning(p)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("decide", help="all pairs within L-infinity distance delta")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--strict", action="store_true")
    tuning(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("closest", help="L-infinity closest pair")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--algo", choices=["brute", "det", "rand", "intmm", "bisect"], default="det")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-bound", type=int, default=DEFAULT_MAX_BOUND,
                   help="refuse intmm encodings above this M")
    tuning(p)
    p.set_defaults(func=cmd_closest)

    p = sub.add_parser("predict", help="reference dominance-product exponent for d = n**zeta")
    p.add_argument("--zeta", type=float, required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="timing sweeps (JSON lines)")
    p.add_argument("--suite", choices=["dominance", "kernels"], default="dominance")
    p.add_argument("--n", type=_int_list, default=None, help="comma-separated n values")
    p.add_argument("--d", type=_int_list, default=None, help="comma-separated d values")
    p.add_argument("--s", dest="s_list", type=lambda t: [_block_size(x) for x in t.split(",")],
                   default=None, help="comma-separated block sizes or 'auto'")
    p.add_argument("--kernel", dest="kernels",
                   type=lambda t: [_kernel(x).name if ":" not in x else x for x in t.split(",")],
                   default=None, help="comma-separated kernels")
    p.add_argument("--K", type=_positive_int, default=4096, help="inner width for --suite kernels")
    p.add_argument("--repeat", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true", help="verify each cell against the naive oracle")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)   # exits 2 on usage errors
    kernels.set_threads(args.threads)
    try:
        args.func(args)
    except CliError as exc:
        print(f"domprod: {exc}", file=sys.stderr)
        return exc.code
    except EncodingTooLarge as exc:
        print(f"domprod: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except ValueError as exc:
        print(f"domprod: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return 0


if __name__ == "__main__":
    sys.exit(main())
