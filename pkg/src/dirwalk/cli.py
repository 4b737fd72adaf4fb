"""``dirwalk`` command line.

Exit codes: 0 success, 1 verification failure or no closed form, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from .errors import DomainError, DimensionMismatch, NotClosedForm, UnsupportedLaw
from .exactlaw import WalkConfig, prop12_b_coeffs, radial_law, thm11_law, thm13_p_coeffs
from .laws import BetaMixture, MixedSignedLaw, fmt_number, parse_number
from .sampler import RngStream, StickConfig, format_batch_csv, sample_stick_breaking, sample_walk
from .transform import t_limit, t_single, t_walk_analytic
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _qs(text: str) -> tuple:
    try:
        return tuple(parse_number(t) for t in text.split(",") if t.strip())
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _grid(text: str) -> np.ndarray:
    """``start:stop:step`` with the stop included when it lands on the lattice."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"--ygrid wants start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"empty grid {text!r}")
    m = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(m + 1)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DIRWALK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"DIRWALK_SEED is not an integer: {env!r}") from exc


def _walk(args) -> WalkConfig:
    if args.d is None or args.q is None:
        raise UsageError("need --d and --q")
    return WalkConfig(args.d, _qs(args.q))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _table(header: list, rows, config: str, fmt: str) -> str:
    if fmt == "json":
        return _dumps({"config": config, "columns": header, "rows": [[float(v) for v in r] for r in rows]})
    lines = [f"# config={config}", ",".join(header)]
    lines.extend(",".join(repr(float(v)) for v in r) for r in rows)
    return "\n".join(lines) + "\n"


def cmd_law(args) -> int:
    cfg = _walk(args)
    try:
        law = radial_law(cfg)
    except NotClosedForm as exc:
        _emit(_dumps({"error": "NotClosedForm", "config": cfg.describe(), "message": str(exc)}), args.out)
        return EXIT_FAIL
    _emit(_dumps(law.to_json()), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.count < 1 or args.workers < 1:
        raise UsageError("--count and --workers must be >= 1")
    rng = RngStream(_seed(args))
    if args.stick:
        if args.Q is None or args.d is None:
            raise UsageError("--stick needs --Q and --d")
        batch = sample_stick_breaking(StickConfig(args.Q, args.d, args.eps), args.count, rng, args.workers)
    else:
        batch = sample_walk(_walk(args), args.count, rng, args.workers)
    if args.format == "json":
        meta = dict(batch.meta, d=batch.d)
        _emit(_dumps({"meta": meta, "points": batch.points.tolist()}), args.out)
    else:
        _emit(format_batch_csv(batch, {"workers": args.workers}), args.out)
    return EXIT_OK


def cmd_transform(args) -> int:
    zs = _grid(args.ygrid or "0:0.9:0.1")
    ys = np.sqrt(zs)
    if args.Q is not None:
        if args.d is None:
            raise UsageError("--Q needs --d")
        config = f"limit;Q={args.Q!r};d={args.d}"
        values = [t_limit(args.Q, args.d, y) for y in ys]
    elif args.q is not None:
        cfg = _walk(args)
        config = f"walk;{cfg.describe()};p={fmt_number(cfg.Q)}"
        values = [t_walk_analytic(cfg, y) for y in ys]
    elif args.p is not None:
        if args.d is None:
            raise UsageError("--p needs --d")
        config = f"single;p={args.p!r};d={args.d}"
        values = [t_single(args.p, args.d, y) for y in ys]
    else:
        raise UsageError("transform needs --q, --Q or --p")
    _emit(_table(["y2", "value"], zip(zs, values), config, args.format), args.out)
    return EXIT_OK


def _strs(xs) -> list:
    return [fmt_number(x) for x in xs]


def cmd_coeffs(args) -> int:
    picked = [args.prop12, args.thm11, args.thm13]
    if sum(picked) != 1:
        raise UsageError("pick exactly one of --prop12, --thm11, --thm13")
    if args.prop12:
        if args.D is None:
            raise UsageError("--prop12 needs --D")
        out = {"B": _strs(prop12_b_coeffs(args.D))}
    elif args.thm11:
        if args.n is None or args.d is None:
            raise UsageError("--thm11 needs --n and --d")
        law = thm11_law(args.n, args.d)
        if isinstance(law, BetaMixture):
            out = {"r": _strs(law.weights), "components": [_strs(c) for c in law.components]}
        else:
            out = {"A": _strs(c for c, _ in law.terms), "exponents": _strs(e for _, e in law.terms)}
    else:
        if args.n is None or args.D is None:
            raise UsageError("--thm13 needs --n and --D")
        out = {"p": {str(i): fmt_number(c) for i, c in thm13_p_coeffs(args.n, args.D).items()}}
    _emit(_dumps(out), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.count < 1 or args.workers < 1:
        raise UsageError("--count and --workers must be >= 1")
    report = run_suite(args.suite, _seed(args), args.count, args.workers)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if all(e["pass"] for e in report["entries"]) else EXIT_FAIL


def cmd_density(args) -> int:
    cfg = _walk(args)
    try:
        law = radial_law(cfg)
        signed = isinstance(law, MixedSignedLaw)
        xs = _grid(args.ygrid or ("-1:1:0.02" if signed else "0:1:0.01"))
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.asarray(law.pdf(xs), dtype=float)
    except NotClosedForm as exc:
        sys.stderr.write(f"dirwalk: no closed form: {exc}\n")
        return EXIT_FAIL
    except UnsupportedLaw as exc:
        sys.stderr.write(f"dirwalk: {exc}\n")
        return EXIT_FAIL
    column = "w" if signed else "v"
    _emit(_table([column, "density"], zip(xs, dens), f"{cfg.describe()};law={law.kind}", args.format), args.out)
    return EXIT_OK


COMMANDS = {
    "law": cmd_law,
    "sample": cmd_sample,
    "transform": cmd_transform,
    "coeffs": cmd_coeffs,
    "verify": cmd_verify,
    "density": cmd_density,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirwalk", description="Exact laws and simulation of Dirichlet walks.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--d", type=int)
    parser.add_argument("--q", help="comma separated Dirichlet parameters, e.g. 2,2 or 1/2,1/2")
    parser.add_argument("--Q", type=float, help="total mass for the limiting walk")
    parser.add_argument("--stick", action="store_true", help="sample the stick-breaking limit")
    parser.add_argument("--eps", type=float, default=1e-12)
    parser.add_argument("--n", type=int)
    parser.add_argument("--D", type=int)
    parser.add_argument("--count", type=int, default=10 ** 5)
    parser.add_argument("--seed", type=int, help="master seed (falls back to DIRWALK_SEED)")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--p", type=float)
    parser.add_argument("--ygrid", help="start:stop:step over |y|^2 (transform) or v (density)")
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--prop12", action="store_true")
    parser.add_argument("--thm11", action="store_true")
    parser.add_argument("--thm13", action="store_true")
    parser.add_argument("--suite", default="all", choices=("all", "identities", "kolesnik", "panels"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, DimensionMismatch) as exc:
        sys.stderr.write(f"dirwalk: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
