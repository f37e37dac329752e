"""Command-line entry point: ``superhc eval ...`` and ``superhc verify ...``.

Exit codes: 0 when every case passes, 1 on failures or runtime errors,
2 on usage errors (bad flags, malformed or singular input points).
"""
from __future__ import annotations

import argparse
import json
import sys

from .cartan import CartanPoint, SuperDims
from .closed_form import chi_closed_form, chi_normalized
from .errors import DimensionMismatch, NonConvergent, SingularPoint, SuperHCError
from .harness import SUITES, SuiteConfig, default_seed, emit_report, report_json, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> SuperDims:
    try:
        return SuperDims.parse(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected K1,K2 with nonnegative integers, got {text!r}") from exc


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="superhc", description="Supersymmetric group-integral closed forms and their checks.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate the closed form at one (s, r) pair")
    e.add_argument("--dims", type=_dims, required=True, help="K1,K2")
    e.add_argument("--s", type=_floats, required=True,
                   help="radial coordinates of s, bosonic first, comma separated")
    e.add_argument("--r", type=_floats, required=True, help="radial coordinates of r")
    e.add_argument("--normalized", action="store_true",
                   help="divide by the small-r calibration constant along r")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--dims", type=_dims, nargs="+", help="one or more K1,K2 pairs")
    v.add_argument("--points", type=int, help="random points (or pairs) per dims")
    v.add_argument("--seed", type=int, help="default from SUPERHC_SEED or built in")
    v.add_argument("--tol", type=float, help="override the suite tolerance")
    v.add_argument("--out", help="write the report here (for 'all': a directory prefix)")
    v.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    v.add_argument("--mode", choices=("jet", "fd"), default="jet",
                   help="derivative mode for harmonic/eigen/flat")
    v.add_argument("--group", nargs="+", help="mc groups: so3 so4 so5 usp2 usp4")
    v.add_argument("--n", type=int, default=1_000_000, help="mc samples per case")
    v.add_argument("--family", nargs="+", choices=("B", "C", "D"), help="weyl root-system families")
    v.add_argument("--rank", type=int, nargs="+", help="weyl ranks (1..6)")
    v.add_argument("--workers", type=int)
    v.add_argument("--quiet", action="store_true", help="print only the summary line")
    return p


def _split(dims: SuperDims, xs: list[float]) -> CartanPoint:
    if len(xs) != dims.rank:
        raise DimensionMismatch(f"dims {dims} need {dims.rank} coordinates ({dims.m} bosonic, "
                                f"{dims.k2} fermionic), got {len(xs)}")
    return CartanPoint(dims, xs[:dims.m], xs[dims.m:])


def cmd_eval(args) -> int:
    try:
        s, r = _split(args.dims, args.s), _split(args.dims, args.r)
        val = chi_normalized(s, r) if args.normalized else chi_closed_form(s, r).value
    except (DimensionMismatch, SingularPoint) as exc:
        print(f"superhc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergent as exc:
        print(f"superhc: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps({"value_re": val.real, "value_im": val.imag,
                      "calibrated": bool(args.normalized)}, sort_keys=True))
    return EXIT_OK


def _systems(args) -> list:
    if not args.family and not args.rank:
        return []
    fams = args.family or ["B", "C", "D"]
    ranks = args.rank or [1, 2, 3]
    return [(f, r) for f in fams for r in ranks]


def _config(args, suite: str) -> SuiteConfig:
    tol = {}
    if args.tol is not None:
        key = "harmonic_fd" if suite == "harmonic" and args.mode == "fd" else suite
        tol[key] = args.tol
    return SuiteConfig(
        suite, dims=args.dims or [], points=args.points,
        seed=default_seed() if args.seed is None else args.seed, tolerances=tol,
        out=args.out, fmt=args.fmt, mode=args.mode, groups=args.group or [], n=args.n,
        systems=_systems(args), workers=args.workers)


def _summary(rep) -> str:
    a = rep.aggregate
    mx = "-" if a["max_residual"] is None else f"{a['max_residual']:.3e}"
    status = "PASS" if a["pass"] else "FAIL"
    return (f"{status} {rep.suite}: {a['pass_count']}/{a['cases']} cases, "
            f"max residual {mx}, {rep.wall_time:.2f}s")


def cmd_verify(args) -> int:
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for suite in suites:
        try:
            cfg = _config(args, suite)
        except (ValueError, SuperHCError) as exc:
            print(f"superhc: {exc}", file=sys.stderr)
            return EXIT_USAGE
        try:
            rep = run_suite(cfg)
        except ValueError as exc:
            print(f"superhc: {exc}", file=sys.stderr)
            return EXIT_USAGE
        ok &= rep.passed
        if args.out:
            path = args.out if len(suites) == 1 else f"{args.out}{suite}.{args.fmt}"
            try:
                emit_report(rep, path, args.fmt)
            except OSError as exc:
                print(f"superhc: cannot write report: {exc}", file=sys.stderr)
                return EXIT_FAIL
        elif not args.quiet and len(suites) == 1:
            print(report_json(rep))
        print(_summary(rep), file=sys.stderr if (not args.out and not args.quiet
                                                 and len(suites) == 1) else sys.stdout)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "eval":
        return cmd_eval(args)
    return cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
