"""Command line entry point: ``janusme {verify,evolve,steady,run,batch}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .report import run_scenario
from .scenario import ScenarioError, load_scenario

PARTS = {
    "verify": ("verify",),
    "evolve": ("evolve",),
    "steady": ("steady",),
    "run": ("verify", "evolve", "steady"),
}

EXIT_OK, EXIT_INVARIANT, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3


def _error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": message}}) + "\n")


def _run_one(config: str, out: str, parts, tol, allow_large_beta: bool, dense_oracle: bool) -> int:
    try:
        sc = load_scenario(config, allow_large_beta=allow_large_beta, tol=tol)
    except ScenarioError as exc:
        _error(exc.code, str(exc))
        return EXIT_VALIDATION
    try:
        ok = run_scenario(sc, out, parts, dense_oracle=dense_oracle)
    except Exception as exc:  # reported as machine-readable JSON, never a traceback
        _error(f"runtime.{type(exc).__name__}", str(exc))
        return EXIT_RUNTIME
    return EXIT_OK if ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="janusme", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*PARTS, "batch"):
        p = sub.add_parser(name)
        p.add_argument("target", help="scenario file" if name != "batch" else "directory of *.toml scenarios")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--tol", type=float, default=None, help="override the scenario integration tolerance")
        p.add_argument("--allow-large-beta", action="store_true", help="accept |beta| > 0.5")
        p.add_argument("--dense-oracle", action="store_true",
                       help="dense steady-state solver and expm cross-check of the trajectory")
        if name == "batch":
            p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = (args.tol, args.allow_large_beta, args.dense_oracle)
    if args.command != "batch":
        return _run_one(args.target, args.out, PARTS[args.command], *opts)

    configs = sorted(Path(args.target).glob("*.toml"))
    if not configs:
        _error("validation.batch", f"no *.toml scenarios in {args.target}")
        return EXIT_VALIDATION
    outs = [str(Path(args.out) / c.stem) for c in configs]
    with ProcessPoolExecutor(max_workers=max(1, args.workers)) as pool:
        codes = list(pool.map(_run_one, map(str, configs), outs,
                              *[[v] * len(configs) for v in (PARTS["run"], *opts)]))
    for config, code in zip(configs, codes):
        print(f"{config.name}\t{code}")
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
