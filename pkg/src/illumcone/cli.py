"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or I/O error. JSON
reports keep run-specific details (argv, threads, timestamp) under "meta";
everything else is a deterministic function of the arguments and seed.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diameter import Configuration, diameter_oracle, verify_configuration
from .geometry import ConeDomainError, closed_form_constants, derive_cone_params, optimum_params, solve_optimal_R
from .illumination import DEFAULT_EPSILON, blocking_witness, counting_lower_bound, greedy_apex_cover, is_blocked
from .optimizer import maximize_tau
from .sphere import AnnulusCode, generate_annulus_code

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORACLE_REL_TOL = 1e-9


class UsageError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


def payload_bytes(report: dict) -> bytes:
    """Canonical serialization of a report without its metadata block."""
    body = {k: v for k, v in report.items() if k != "meta"}
    return json.dumps(body, sort_keys=True).encode()


def _meta(args, params: dict) -> dict:
    return {
        "tool": "illumcone",
        "version": __version__,
        "argv": list(args.argv),
        "seed": args.seed if args.seed is not None else 0,
        "seed_defaulted": args.seed is None,
        "threads": args.threads,
        "params": params,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(_clean(report), indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    return args.seed if args.seed is not None else 0


def _vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc
    if v.size < 2 or np.linalg.norm(v) == 0:
        raise UsageError(f"need a nonzero vector of dimension >= 2, got {text!r}")
    return v / np.linalg.norm(v)


def _params(args, file_params: dict | None = None):
    if args.R is not None or args.d is not None:
        if args.R is None or args.d is None:
            raise UsageError("--R and --d must be given together")
        return derive_cone_params(args.R, args.d)
    if file_params:
        return derive_cone_params(file_params["R"], file_params["d"])
    return optimum_params()


def _load_config(args) -> tuple[Configuration, AnnulusCode]:
    try:
        data = json.loads(Path(args.config).read_text())
        code = AnnulusCode.from_json(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read configuration {args.config}: {exc}") from exc
    params = _params(args, data.get("params"))
    return Configuration(code.points, params, psi=code.psi), code


# -- subcommands --------------------------------------------------------------

def cmd_constants(args) -> int:
    c = solve_optimal_R()
    cf = closed_form_constants()
    s33 = math.sqrt(33.0)
    report = {
        "command": "constants",
        "R0": c.R0, "d0": c.d0, "alpha0": c.alpha0, "beta0": c.beta0, "tau": c.tau,
        "closed_form": {"R0": cf.R0, "d0": cf.d0, "alpha0": cf.alpha0, "beta0": cf.beta0, "tau": cf.tau},
        "residuals": {
            "cos2_beta0": math.cos(c.beta0) ** 2 - (15.0 + s33) / 32.0,
            "tau2": c.tau ** 2 - (111.0 - s33) / 96.0,
            "R0_vs_closed_form": c.R0 - cf.R0,
            "angle_sum": 2.0 * c.beta0 + c.alpha0 - math.pi / 2,
            "root_equation": math.sin(2.0 * c.beta0) - math.cos(c.alpha0),
        },
        "alpha0_le_pi_over_6": c.alpha0 <= math.pi / 6,
        "baseline_tau_R1": 1.0 / math.cos(math.pi / 14),
        "meta": _meta(args, {}),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_params(args) -> int:
    p = _params(args)
    report = {
        "command": "params",
        "params": p.as_dict(),
        "cos_alpha": math.cos(p.alpha), "cos_beta": math.cos(p.beta),
        "base_chord": p.base_chord, "diameter_ok": p.diameter_ok,
        "illumination_cap_radius": p.cap_radius,
        "meta": _meta(args, {"R": args.R, "d": args.d}),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config, code = _load_config(args)
    seed = _seed(args)
    verdict = verify_configuration(config)
    est = diameter_oracle(config, args.resolution, seed=seed)
    oracle_ok = est.diameter <= config.params.d * (1.0 + ORACLE_REL_TOL)
    report = {
        "command": "verify",
        "params": config.params.as_dict(),
        "config": {"n_apexes": len(config), "dimension": config.dimension, "psi": config.psi},
        "verdicts": {
            "pairwise": verdict.as_dict(),
            "oracle": {
                "ok": oracle_ok,
                "diameter_estimate": est.diameter,
                "excess": est.diameter - config.params.d,
                "witness": [est.witness[0], est.witness[1]],
                "witness_owners": list(est.witness_owners),
                "resolution": args.resolution,
            },
        },
        "ok": verdict.ok and oracle_ok,
        "meta": _meta(args, {"config": str(args.config), "resolution": args.resolution}),
    }
    _emit(report, args.out)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.psi is None:
        raise UsageError("gen requires --psi")
    if not 0 < args.psi < math.pi / 2:
        raise UsageError("--psi must lie in (0, pi/2)")
    code = generate_annulus_code(args.dim, args.psi, args.target, max_trials=args.max_trials, seed=_seed(args))
    report = {
        "command": "gen",
        **code.to_json(),
        "size": len(code),
        "target": args.target,
        "exhausted": code.exhausted,
        "trials": code.trials,
        "meta": _meta(args, {"dim": args.dim, "psi": args.psi, "target": args.target,
                             "max_trials": args.max_trials}),
    }
    if args.R is not None or args.d is not None:
        report["params"] = {"R": args.R, "d": args.d}
    _emit(report, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    config, _ = _load_config(args)
    seed = _seed(args)
    if args.phi is not None:
        args.epsilon = args.phi - config.params.cap_radius
    try:
        cert = counting_lower_bound(config, epsilon=args.epsilon, mode=args.mode, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cover = greedy_apex_cover(config, epsilon=args.epsilon, seed=seed)
    report = {
        "command": "bound",
        **cert.as_dict(),
        "greedy_cover_size": int(cover.shape[0]),
        "meta": _meta(args, {"config": str(args.config), "epsilon": args.epsilon, "mode": args.mode}),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = args.grid
    result = maximize_tau(R_range=tuple(args.R_range), d_range=tuple(args.d_range), grid=(grid, grid),
                          refine_iters=args.refine_iters, slice=args.slice, threads=args.threads)
    csv_text = result.trace_csv()
    if args.out:
        Path(args.out).write_text(csv_text)
    report = {
        "command": "sweep",
        "best": result.best.as_dict() if result.best else None,
        "message": result.message,
        "grid_cells": len(result.trace),
        "trace_csv": args.out,
        "meta": _meta(args, {"R_range": args.R_range, "d_range": args.d_range, "grid": grid,
                             "refine_iters": args.refine_iters, "slice": args.slice}),
    }
    if args.best_json:
        _emit(report, args.best_json)
    elif not args.out:
        sys.stdout.write(csv_text)
    else:
        _emit(report, None)
    return EXIT_OK if result.best else EXIT_FAIL


def cmd_witness(args) -> int:
    if args.apex is None or args.ell is None:
        raise UsageError("witness requires --apex and --ell")
    x = _vector(args.apex)
    ell = _vector(args.ell)
    if x.shape != ell.shape:
        raise UsageError("--apex and --ell differ in dimension")
    p = _params(args)
    try:
        blocked, margin = is_blocked(x, ell, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    b = blocking_witness(x, ell, p, resolution=args.resolution, seed=_seed(args))
    report = {
        "command": "witness",
        "params": p.as_dict(),
        "apex": x, "ell": ell,
        "blocked": blocked, "margin": margin,
        "witness": b,
        "agree": blocked == (b is not None),
        "meta": _meta(args, {"apex": args.apex, "ell": args.ell, "resolution": args.resolution}),
    }
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0, reported as defaulted)")
    common.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--R", type=float, default=None, help="base sphere radius")
    common.add_argument("--d", type=float, default=None, help="apex to base-circle distance")

    parser = argparse.ArgumentParser(prog="illumcone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"illumcone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="optimal cone constants and identity residuals")
    sub.add_parser("params", parents=[common], help="derived angles for --R/--d (default: optimum)")

    p = sub.add_parser("verify", parents=[common], help="pairwise diameter conditions + sampled oracle")
    p.add_argument("config")
    p.add_argument("--resolution", type=int, default=256)

    p = sub.add_parser("gen", parents=[common], help="greedy annulus code")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--psi", type=float, default=None)
    p.add_argument("--target", type=int, default=20)
    p.add_argument("--max-trials", type=int, default=100_000)

    p = sub.add_parser("bound", parents=[common], help="counting lower bound certificate")
    p.add_argument("config")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--phi", type=float, default=None, help="cap radius; overrides --epsilon")
    p.add_argument("--mode", choices=["exact_n2", "bnb", "branch_and_bound", "heuristic"], default="heuristic")

    p = sub.add_parser("sweep", parents=[common], help="grid scan + refinement of tau; CSV trace")
    p.add_argument("--R-range", type=float, nargs=2, default=[0.7, 1.1])
    p.add_argument("--d-range", type=float, nargs=2, default=[1.2, 2.2])
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--refine-iters", type=int, default=20)
    p.add_argument("--slice", choices=["d=2R"], default=None)
    p.add_argument("--best-json", default=None, help="write the best record as JSON here")

    p = sub.add_parser("witness", parents=[common], help="illumination cap test and blocking witness")
    p.add_argument("--apex", default=None, help="comma-separated apex vector")
    p.add_argument("--ell", default=None, help="comma-separated direction")
    p.add_argument("--resolution", type=int, default=256)
    return parser


COMMANDS = {
    "constants": cmd_constants, "params": cmd_params, "verify": cmd_verify, "gen": cmd_gen,
    "bound": cmd_bound, "sweep": cmd_sweep, "witness": cmd_witness,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if getattr(args, "resolution", 2) < 2:
        parser.error("--resolution must be >= 2")
    if getattr(args, "grid", 64) < 64:
        parser.error("--grid must be >= 64")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConeDomainError, OSError) as exc:
        print(f"illumcone {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
