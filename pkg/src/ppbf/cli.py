"""Command-line entry point: ``ppbf <subcommand> ...``.

stdout carries data only (CSV, JSON lines, JSON reports); the resolved
configuration and diagnostics go to stderr.  Exit codes: 0 success, 1 usage
error, 2 verification failure, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from typing import Sequence

import numpy as np

from . import __version__
from .code import build_code, syndrome
from .decoder import classical_bf_decode, ppbf_decode
from .errors import InvalidParameterError, PPBFError
from .proximity import CACHE_ENV, build_template, get_template, save_template
from .sim import (
    DECODERS,
    TrialConfig,
    config_dict,
    csv_header,
    csv_line,
    estimate_threshold,
    grid,
    iter_sweep,
    jsonl_line,
    run_point,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RUNTIME = 0, 1, 2, 3
FAMILIES = ("toric", "rotated-planar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _p_list(text: str) -> list[float]:
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return grid(start, stop, step)
        return [float(x) for x in text.split(",") if x.strip()]
    except (ValueError, InvalidParameterError) as exc:
        raise argparse.ArgumentTypeError(f"bad p grid {text!r}: {exc}")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _code_args(p: argparse.ArgumentParser, multi_L: bool = False) -> None:
    p.add_argument("--family", choices=FAMILIES, required=True, help="code family")
    if multi_L:
        p.add_argument("--L", type=_int_list, required=True, help="lattice sizes, comma separated (e.g. 5,7,9)")
    else:
        p.add_argument("--L", type=int, required=True, help="lattice size")
    p.add_argument("--depth", type=int, default=None, metavar="D",
                   help="influence depth D (default: D = L)")


def _run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, default=0, help="64-bit base seed (default 0)")
    p.add_argument("--decoder", choices=DECODERS, default="ppbf", help="decoder (default ppbf)")
    p.add_argument("--max-trials", type=int, default=100_000, help="trial cap per point (default 100000)")
    p.add_argument("--target-failures", type=int, default=100,
                   help="stop a point at this many logical failures (default 100)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: available CPUs); results do not depend on it")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="output format (default csv)")
    p.add_argument("--timing", action="store_true",
                   help="fill the seconds column (wall time makes output run-dependent)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ppbf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ppbf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="estimate the logical error rate at one (L, p) point")
    _code_args(p)
    p.add_argument("--p", type=float, required=True, help="physical bit-flip probability")
    _run_args(p)

    p = sub.add_parser("sweep", help="grid of points plus a threshold estimate")
    _code_args(p, multi_L=True)
    p.add_argument("--p", type=_p_list, required=True,
                   help="p grid as start:stop:step (inclusive) or a comma list")
    _run_args(p)

    p = sub.add_parser("decode", help="decode one syndrome and print the steps as JSON lines")
    _code_args(p)
    p.add_argument("--syndrome", required=True,
                   help="bit string with one character per check, or 0x-prefixed hex (bit i = check i)")
    p.add_argument("--decoder", choices=DECODERS, default="ppbf", help="decoder (default ppbf)")

    p = sub.add_parser("verify", help="check the fast paths against the brute-force oracles")
    _code_args(p)
    p.add_argument("--seed", type=_seed, default=0, help="seed for the random-syndrome checks")
    p.add_argument("--samples", type=int, default=200, help="random syndromes for round-trip checks")

    p = sub.add_parser("dump-code", help="print the code as JSON")
    p.add_argument("--family", choices=FAMILIES, required=True, help="code family")
    p.add_argument("--L", type=int, required=True, help="lattice size")

    p = sub.add_parser("build-template", help=f"build an influence template into the cache (${CACHE_ENV})")
    _code_args(p)
    return parser


def _echo(config: dict) -> None:
    print(f"# config: {json.dumps(config, sort_keys=True)}", file=sys.stderr, flush=True)


def parse_syndrome(text: str, m: int) -> np.ndarray:
    text = text.strip()
    if text.lower().startswith("0x"):
        value = int(text, 16)
        if value >> m:
            raise InvalidParameterError(f"hex syndrome has bits beyond check {m - 1}")
        return np.array([(value >> i) & 1 for i in range(m)], dtype=np.uint8)
    if len(text) != m or set(text) - {"0", "1"}:
        raise InvalidParameterError(f"bit-string syndrome must be {m} characters of 0/1")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")


def _cmd_simulate(args) -> int:
    config = TrialConfig(args.family, args.L, args.p, args.depth, args.seed,
                         args.max_trials, args.target_failures, args.decoder)
    _echo({**config_dict(config), "jobs": args.jobs, "format": args.format})
    point = run_point(config, jobs=args.jobs)
    if args.format == "csv":
        print(csv_header())
        print(csv_line(point, args.timing))
    else:
        print(jsonl_line(point, args.timing))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    _echo({"family": args.family, "L": args.L, "p": args.p, "D": args.depth or "L",
           "seed": args.seed, "decoder": args.decoder, "max_trials": args.max_trials,
           "target_failures": args.target_failures, "jobs": args.jobs, "format": args.format})
    points = []
    if args.format == "csv":
        print(csv_header(), flush=True)
    for point in iter_sweep(args.family, args.L, args.p, args.seed, D=args.depth,
                            decoder=args.decoder, max_trials=args.max_trials,
                            target_failures=args.target_failures, jobs=args.jobs):
        points.append(point)
        if point.error:
            print(f"point L={point.config.L} p={point.config.p} failed: {point.error}", file=sys.stderr)
        print(csv_line(point, args.timing) if args.format == "csv" else jsonl_line(point, args.timing),
              flush=True)
    threshold = None
    if len(set(args.L)) >= 2:
        threshold = estimate_threshold(points)
    if args.format == "csv":
        print(threshold.describe() if threshold else "# threshold: needs two lattice sizes")
    else:
        print(json.dumps({"threshold": [threshold.low, threshold.high] if threshold and threshold.found else None}))
    return EXIT_OK


def _cmd_decode(args) -> int:
    _echo({"family": args.family, "L": args.L, "D": args.depth or args.L, "decoder": args.decoder})
    code = build_code(args.family, args.L)
    s = parse_syndrome(args.syndrome, code.m)
    if args.decoder == "ppbf":
        out = ppbf_decode(code, get_template(args.family, args.L, args.depth), s, trace=True)
        for step in out.trace:
            print(json.dumps({"phase": step.phase, "pivot": step.pivot, "target": step.target,
                              "flipped": list(step.flipped), "weight": step.weight_after}))
    else:
        out = classical_bf_decode(code, s)
    print(json.dumps({
        "estimate": np.flatnonzero(out.estimate).tolist(),
        "converged": out.converged,
        "residual": np.flatnonzero(out.residual_syndrome).tolist(),
        "bf_flips": out.bf_flips,
        "matching_rounds": out.matching_rounds,
        "boundary_matches": out.boundary_matches,
        "iterations": out.iterations,
    }))
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_checks

    _echo({"family": args.family, "L": args.L, "D": args.depth or args.L,
           "seed": args.seed, "samples": args.samples})
    report = run_checks(args.family, args.L, args.depth, seed=args.seed, samples=args.samples)
    print(json.dumps(report, indent=2))
    return EXIT_OK if all(r["pass"] for r in report.values()) else EXIT_VERIFY


def _cmd_dump(args) -> int:
    _echo({"family": args.family, "L": args.L})
    print(build_code(args.family, args.L).to_json())
    return EXIT_OK


def _cmd_build_template(args) -> int:
    D = args.depth or args.L
    _echo({"family": args.family, "L": args.L, "D": D})
    path = save_template(build_template(args.family, args.L, D))
    print(path)
    return EXIT_OK


COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "decode": _cmd_decode,
    "verify": _cmd_verify,
    "dump-code": _cmd_dump,
    "build-template": _cmd_build_template,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvalidParameterError as exc:
        print(f"ppbf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PPBFError as exc:
        print(f"ppbf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception:  # pragma: no cover - last-resort diagnostics
        traceback.print_exc()
        return EXIT_RUNTIME
