"""``nevlab`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
3 domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import convolutions as conv
from . import decomposition as dec
from . import inversion as inv
from . import measure_io
from .core import ComplexGrid, DiscreteMeasure, NevanlinnaData
from .errors import DomainError, NevlabError
from .suite import SUITES, format_table, run_suite
from .transforms import TransformKind, evaluate, laplace_charfn

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count`` -> ``count`` evenly spaced points."""
    try:
        start, stop, count = spec.split(":")
        start, stop, n = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"grid {spec!r} is not of the form start:stop:count") from None
    if n < 1:
        raise UsageError("grid count must be positive")
    return np.linspace(start, stop, n)


@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load(path: str | None):
    if path is None:
        raise UsageError("--measure is required")
    try:
        return measure_io.read_measure(path)
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def _as_measure(obj) -> DiscreteMeasure:
    return obj.rho if isinstance(obj, NevanlinnaData) else obj


def _as_data(obj) -> NevanlinnaData:
    return obj if isinstance(obj, NevanlinnaData) else NevanlinnaData(0.0, obj)


# ------------------------------------------------------------------ commands


def cmd_eval(args) -> int:
    obj = _load(args.measure)
    if args.transform in ("laplace", "theorem1"):
        if args.w_grid is None:
            raise UsageError(f"{args.transform} needs --w-grid")
        ws = parse_grid(args.w_grid)
        if args.transform == "laplace":
            m = _as_measure(obj)
            rows = [(w, laplace_charfn(m, w)) for w in ws]
        else:
            d = _as_data(obj)
            rows = [(w, inv.theorem1_rhs(d, w)) for w in ws]
        header = "w"
    else:
        if args.t_grid is None:
            raise UsageError(f"{args.transform} needs --t-grid")
        ts = parse_grid(args.t_grid)
        vals = np.atleast_1d(evaluate(args.transform, obj, ts))
        rows = list(zip(ts, vals))
        header = "t"
    with _output(args.out) as fh:
        measure_io.write_csv(rows, fh, header)
    return EXIT_OK


def cmd_invert(args) -> int:
    if args.samples is not None:
        if args.degree_hint is None:
            raise UsageError("--samples needs --degree-hint")
        try:
            pts, vals = measure_io.read_csv(args.samples)
        except OSError as exc:
            raise UsageError(str(exc)) from exc
        m = inv.recover_measure(ComplexGrid(tuple(pts), tuple(vals)), args.degree_hint)
        with _output(args.out) as fh:
            fh.write(measure_io.dumps(m))
        return EXIT_OK

    d = _as_data(_load(args.measure))
    k_i = evaluate("nevanlinna", d, 1.0)
    rec = inv.recover_constants(k_i)
    with _output(args.out) as fh:
        if args.w_grid is None:
            fh.write(json.dumps({"a": rec.a, "total_mass": rec.total_mass}, indent=2) + "\n")
        else:
            rep = inv.verify_theorem1(d, parse_grid(args.w_grid))
            fh.write("w,lhs_re,lhs_im,rhs_re,rhs_im\n")
            fmt = measure_io.format_float
            for w, lhs, rhs in zip(rep.grid, rep.lhs, rep.rhs):
                fh.write(",".join(fmt(x) for x in (w, lhs.real, lhs.imag, rhs.real, rhs.imag)) + "\n")
    return EXIT_OK


def cmd_decompose(args) -> int:
    atoms = _as_measure(_load(args.measure)).atoms
    results = dec.iterate_decomposition(atoms, args.steps)
    docs = [measure_io.to_dict(r.data) for r in results]
    with _output(args.out) as fh:
        payload = docs[0] if len(docs) == 1 else docs
        fh.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_convolve(args) -> int:
    measures = [_as_measure(_load(p)) for p in args.inputs]
    if args.op == "booleanpow":
        if len(measures) != 1 or args.power is None:
            raise UsageError("booleanpow takes one measure and --power S")
        result = conv.boolean_power(measures[0], args.power)
    elif len(measures) < 2:
        raise UsageError(f"{args.op} needs at least two measures")
    elif args.op == "boolean":
        result = conv.boolean_convolve_all(measures)
    else:
        if args.t_grid is None:
            raise UsageError("free convolution needs --t-grid")
        ts = parse_grid(args.t_grid)
        if np.any(ts <= 0):
            raise DomainError("free convolution is sampled at t > 0")
        pair = conv.free_f(measures)
        with _output(args.out) as fh:
            measure_io.write_csv([(t, pair(1j * t)[0]) for t in ts], fh)
        return EXIT_OK
    with _output(args.out) as fh:
        fh.write(measure_io.dumps(result))
    return EXIT_OK


def cmd_verify(args) -> int:
    outcomes = run_suite(args.suite, args.seed)
    with _output(args.out) as fh:
        fh.write(format_table(outcomes) + "\n")
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_FAIL


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nevlab",
        description="Imaginary-axis Cauchy/Nevanlinna transforms of discrete measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, measure=True):
        if measure:
            p.add_argument("--measure", metavar="PATH")
        p.add_argument("--out", metavar="PATH", help="write here instead of stdout")

    p = sub.add_parser("eval", help="evaluate a transform on a grid, CSV output")
    p.add_argument(
        "transform", choices=[k.value for k in TransformKind] + ["laplace", "theorem1"]
    )
    p.add_argument("--t-grid", metavar="A:B:N")
    p.add_argument("--w-grid", metavar="A:B:N")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("invert", help="recover constants or a measure")
    p.add_argument("--samples", metavar="CSV", help="t,re,im samples of the Cauchy transform")
    p.add_argument("--degree-hint", type=int)
    p.add_argument("--w-grid", metavar="A:B:N")
    common(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("decompose", help="self-energy of the uniform measure on the atoms")
    p.add_argument("--steps", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("convolve", help="boolean / free convolution")
    p.add_argument("op", choices=["boolean", "booleanpow", "free"])
    p.add_argument("inputs", nargs="+", metavar="MEASURE")
    p.add_argument("--power", type=float)
    p.add_argument("--t-grid", metavar="A:B:N")
    common(p, measure=False)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("verify", help="run the numerical verification suite")
    p.add_argument("suite", nargs="?", default="all", choices=("all",) + SUITES)
    p.add_argument("--seed", type=int, default=7)
    common(p, measure=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nevlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except measure_io.MeasureFileError as exc:
        print(f"nevlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"nevlab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NevlabError as exc:
        print(f"nevlab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
