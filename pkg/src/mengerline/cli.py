"""Command-line interface.

Subcommands: gen (synthetic datasets), energy (curvature energies and the
comparability check), build (full net + curve pipeline with reports), and
coverage (distance-to-curve measurement against a saved build report).

Exit codes: 0 success (warnings allowed), 2 bad input, 3 structural abort.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .builder import build_curve
from .config import Config, load_config
from .curvature import beta, c2_k, check_cp
from .datasets import (gen_cantor4, gen_circle, gen_lipschitz_graph,
                       gen_segment, gen_snowflake)
from .diagnostics import coverage, proposition_gate
from .errors import InputError, StructuralError
from .io import dump_report, read_dataset, write_matrix_json, write_points_csv
from .metric import FiniteMetricSpace, Measure
from .nets import epsilon1_screen

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mengerline",
        description="curvature energies, multiscale nets and curve "
                    "construction on finite metric spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset")
    p_gen.add_argument("family",
                       choices=["segment", "circle", "cantor4", "lipschitz",
                                "snowflake"])
    p_gen.add_argument("--n", type=int, default=100)
    p_gen.add_argument("--jitter", type=float, default=0.0)
    p_gen.add_argument("--radius", type=float, default=1.0)
    p_gen.add_argument("--generation", type=int, default=3)
    p_gen.add_argument("--slope", type=float, default=0.5)
    p_gen.add_argument("--exponent", type=float, default=0.5,
                       help="snowflake exponent in (0, 1)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--uniform", action="store_true",
                       help="uniform weights instead of the half-gap rule")
    p_gen.add_argument("--out", type=Path, default=None)

    p_energy = sub.add_parser("energy", help="curvature energies of a dataset")
    p_energy.add_argument("input", type=Path)
    p_energy.add_argument("--k", default="inf",
                          help="comparability constant (number or 'inf')")
    p_energy.add_argument("--subset", default=None,
                          help="comma-separated point ids")
    p_energy.add_argument("--out", type=Path, default=None)

    p_build = sub.add_parser("build", help="run the full curve pipeline")
    p_build.add_argument("input", type=Path)
    p_build.add_argument("--config", type=Path, default=None)
    p_build.add_argument("--out", type=Path, default=None)
    p_build.add_argument("--dump-scales", type=Path, default=None,
                         metavar="DIR", help="write per-scale net dumps")
    p_build.add_argument("--svg", type=Path, default=None,
                         help="render the result (2D coordinate sources)")
    p_build.add_argument("--ledger", type=Path, default=None,
                         help="write the step ledger as CSV")
    p_build.add_argument("--epsilon", type=float, default=None,
                         help="also measure coverage at this distance")
    p_build.add_argument("--mode", choices=["vertex", "segment"],
                         default="vertex")
    p_build.add_argument("--screen", action="store_true",
                         help="scan local ball energies against eps1")

    p_cov = sub.add_parser("coverage", help="coverage of a saved build")
    p_cov.add_argument("input", type=Path)
    p_cov.add_argument("curve", type=Path, help="build report JSON")
    p_cov.add_argument("--epsilon", type=float, required=True)
    p_cov.add_argument("--mode", choices=["vertex", "segment"],
                       default="vertex")
    p_cov.add_argument("--config", type=Path, default=None)
    p_cov.add_argument("--out", type=Path, default=None)
    return parser


def _parse_k(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise InputError(f"--k must be a number or 'inf', got {text!r}")


def _parse_subset(text: str | None):
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"--subset must be comma-separated integers, got {text!r}")


def _cmd_gen(args) -> int:
    if args.family == "segment":
        space, measure = gen_segment(args.n, args.jitter, args.seed,
                                     args.uniform)
    elif args.family == "circle":
        space, measure = gen_circle(args.n, args.radius)
    elif args.family == "cantor4":
        space, measure = gen_cantor4(args.generation)
    elif args.family == "lipschitz":
        space, measure = gen_lipschitz_graph(args.n, args.slope, args.seed,
                                             args.uniform)
    else:
        space, measure = gen_snowflake(args.n, args.exponent)
        write_matrix_json(args.out, space.dist, measure.weights)
        return 0
    write_points_csv(args.out, space.coords, measure.weights)
    return 0


def _cmd_energy(args) -> int:
    space, measure = read_dataset(args.input)
    k = _parse_k(args.k)
    subset = _parse_subset(args.subset)
    report = {
        "input": str(args.input),
        "n": space.size,
        "subset": subset,
        "c2_k": c2_k(space, measure, subset, k).to_json_dict(),
        "beta": beta(space, measure, subset).to_json_dict(),
        "cp": (check_cp(space, measure, subset, k).to_json_dict()
               if math.isfinite(k) else None),
    }
    dump_report(report, args.out)
    return 0


def _stopped_entries(result) -> list[dict]:
    final = result.cascade.final
    return [{"id": int(y), "m": int(m), "center": int(final.q_inverse[y])}
            for y, m in sorted(final.H.items())]


def _write_ledger(path: Path, steps) -> None:
    lines = ["scale,step,kind,lambda,delta"]
    for rec in steps:
        lam = rec.lambda_class or ""
        lines.append(f"{rec.scale},{rec.index},{rec.kind},{lam},{rec.delta!r}")
    path.write_text("\n".join(lines) + "\n", newline="")


def _cmd_build(args) -> int:
    space, measure = read_dataset(args.input)
    config = load_config(args.config)
    result = build_curve(space, measure, config)
    gate = proposition_gate(space, measure, config)
    report = {
        "input": str(args.input),
        "config": config.to_json_dict(),
        "n": space.size,
        "diameter": space.diameter(),
        "n0": result.cascade.n0,
        "n_max": result.cascade.n_max,
        "density_variant": result.cascade.density_variant,
        "curve": result.snapshots[-1].to_json_dict(),
        "length_bound": result.length_bound,
        "length_ok": result.length_ok,
        "stopped": _stopped_entries(result),
        "steps": len(result.steps),
        "checks": [c.to_json_dict() for c in result.checks],
        "check_failures": result.check_failures(),
        "warnings": list(result.warnings),
        "gate": gate.to_json_dict(),
    }
    if args.epsilon is not None:
        cov = coverage(space, measure, result, args.epsilon, mode=args.mode,
                       config=config)
        report["coverage"] = cov.to_json_dict()
    if args.screen:
        screen = epsilon1_screen(space, measure, config)
        report["screen"] = {
            "threshold": screen.threshold,
            "ok": screen.ok,
            "violations": [[int(x), float(r), float(v)]
                           for x, r, v in screen.violations],
        }
    if args.dump_scales is not None:
        args.dump_scales.mkdir(parents=True, exist_ok=True)
        for state, snap in zip(result.cascade.states, result.snapshots):
            payload = {"net": state.to_json_dict(),
                       "curve": snap.to_json_dict()}
            dump_report(payload,
                        args.dump_scales / f"scale_{state.n:+04d}.json")
    if args.ledger is not None:
        _write_ledger(args.ledger, result.steps)
    if args.svg is not None:
        from .plotting import render_build_svg
        render_build_svg(space, measure, result, args.svg)
    dump_report(report, args.out)
    return 0


def _cmd_coverage(args) -> int:
    space, measure = read_dataset(args.input)
    config = load_config(args.config)
    try:
        payload = json.loads(Path(args.curve).read_text())
    except FileNotFoundError:
        raise InputError(f"curve file not found: {args.curve}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.curve}: invalid JSON: {exc}")
    if isinstance(payload, dict) and "curve" in payload:
        curve = {"vertices": payload["curve"]["vertices"],
                 "stopped": payload.get("stopped", [])}
    elif isinstance(payload, dict):
        curve = payload
    else:
        curve = {"vertices": payload, "stopped": []}
    cov = coverage(space, measure, curve, args.epsilon, mode=args.mode,
                   config=config)
    report = {
        "input": str(args.input),
        "curve_file": str(args.curve),
        "config": config.to_json_dict(),
        "coverage": cov.to_json_dict(),
    }
    dump_report(report, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "energy": _cmd_energy,
        "build": _cmd_build,
        "coverage": _cmd_coverage,
    }
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StructuralError as exc:
        print(f"structural abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
