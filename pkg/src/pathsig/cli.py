"""Command-line surface: sign, check, lift, uat, ae.

Results go to standard output (JSON or CSV), diagnostics to standard error.
Exit code 0 means every computed residual stayed within its tolerance;
2 signals bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import grouplike, molecules, regression
from .paths import (
    PathFormatError,
    PiecewiseLinearPath,
    chen_check,
    default_triples,
    exact_pl_functional,
    lyons_lift,
    pure_area_functional,
    signature_pl,
)
from .tensor import GroupElement, TruncatedTensor


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_path(path_file: str) -> PiecewiseLinearPath:
    return PiecewiseLinearPath.from_csv(Path(path_file).read_text())


def _load_tensor_or_path(input_file: str, level: int):
    """Accept either a path CSV (signed at `level`) or a tensor JSON."""
    text = Path(input_file).read_text()
    if text.lstrip().startswith("{"):
        return TruncatedTensor.from_json(text)
    path = PiecewiseLinearPath.from_csv(text)
    return signature_pl(path, level)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_sign(args) -> int:
    try:
        path = _load_path(args.path_csv)
    except (OSError, PathFormatError) as exc:
        return _fail(str(exc))
    s = 0.0 if args.s is None else args.s
    t = path.T if args.t is None else args.t
    sig = signature_pl(path, args.level, s, t)
    _emit(sig.to_json(), args.out)
    return 0


def cmd_check(args) -> int:
    try:
        if args.which == "chen":
            path = _load_path(args.input)
            functional = exact_pl_functional(path, args.level)
            residuals = {
                "chen": chen_check(
                    functional, default_triples(path.T, args.samples, args.seed)
                )
            }
        else:
            tensor = _load_tensor_or_path(args.input, args.level)
            g = GroupElement.from_tensor(tensor)
            if args.which == "grouplike":
                residuals = {
                    "weak_grouplike": grouplike.weak_grouplike_residual(g),
                    "block_shuffle": grouplike.block_shuffle_residual(g),
                    "log_lie": grouplike.log_lie_residual(g),
                }
            elif args.which == "lie":
                residuals = {
                    "log_lie_per_level": grouplike.dynkin_residuals(g.log()),
                    "log_lie": grouplike.log_lie_residual(g),
                }
            else:  # shuffle
                residuals = {"weak_grouplike": grouplike.weak_grouplike_residual(g)}
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    worst = max(
        (v for r in residuals.values() for v in (r if isinstance(r, list) else [r])),
        default=0.0,
    )
    payload = {"residuals": residuals, "tol": args.tol, "pass": bool(worst <= args.tol)}
    _emit(json.dumps(payload, separators=(",", ":"), sort_keys=True), args.out)
    return 0 if worst <= args.tol else 1


def cmd_lift(args) -> int:
    try:
        text = Path(args.input).read_text()
        if text.lstrip().startswith("{"):
            spec = json.loads(text)
            if spec.get("kind") != "pure_area":
                return _fail(f"unsupported functional spec {spec.get('kind')!r}")
            functional = pure_area_functional(
                d=int(spec.get("d", 2)),
                T=float(spec.get("T", 1.0)),
                i=int(spec.get("i", 1)),
                j=int(spec.get("j", 2)),
                scale=float(spec.get("scale", 1.0)),
            )
        else:
            path = PiecewiseLinearPath.from_csv(text)
            functional = exact_pl_functional(path, 2).project(args.level_in)
    except (OSError, PathFormatError, ValueError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    depths = sorted(set(args.depths))
    result = lyons_lift(functional, args.level, depths)
    lines = ["depth,err_vs_deepest"]
    for depth, err in result.error_trace():
        lines.append(f"{depth},{err!r}")
    _emit("\n".join(lines) + "\n", args.out)
    print(
        f"lifted to level {args.level}; deepest mesh depth {depths[-1]}",
        file=sys.stderr,
    )
    return 0


def cmd_uat(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"config: {exc}")
    fam_cfg = config.get("family", {})
    target_cfg = config.get("target", {})
    sweep_cfg = config.get("sweep", {})
    spec = regression.FamilySpec(
        count=int(fam_cfg.get("count", 100)),
        d=int(fam_cfg.get("d", 2)),
        segments=int(fam_cfg.get("segments", 6)),
        amplitude=float(fam_cfg.get("amplitude", 0.5)),
        T=float(fam_cfg.get("T", 1.0)),
        seed=int(fam_cfg.get("seed", args.seed)),
        alpha=float(fam_cfg.get("alpha", args.alpha)),
        R=fam_cfg.get("R"),
    )
    family = regression.generate_family(spec)
    target = regression.make_target(
        target_cfg.get("kind", "shuffle_square"), **target_cfg.get("params", {})
    )
    levels = sweep_cfg.get("levels", [1, 2, 3])
    report, functionals = regression.uat_sweep(
        family,
        target,
        levels=[int(l) for l in levels],
        holdout=float(sweep_cfg.get("holdout", 0.25)),
        ridge=float(sweep_cfg.get("ridge", 0.0)),
        seed=int(sweep_cfg.get("seed", args.seed)),
    )
    _emit(report.to_csv(), args.out)
    if args.functional_out:
        best_level = max(functionals)
        Path(args.functional_out).write_text(functionals[best_level].to_json())
        print(f"functional for level {best_level} -> {args.functional_out}", file=sys.stderr)
    return 0


def cmd_ae(args) -> int:
    try:
        molecule = molecules.Molecule.from_json(Path(args.molecule).read_text())
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"molecule: {exc}")
    value, certificate = molecules.ae_norm(molecule, args.alpha)
    payload = {
        "norm_upper_bound": value,
        "alpha": args.alpha,
        "certificate": [
            {"a": term.a, "t": term.t, "s": term.s, "y": term.y.tolist()}
            for term in certificate
        ],
    }
    _emit(json.dumps(payload, separators=(",", ":"), sort_keys=True), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathsig",
        description="Signatures of piecewise-linear paths and their checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sign = sub.add_parser("sign", help="exact signature of a path CSV")
    p_sign.add_argument("path_csv")
    p_sign.add_argument("--level", type=int, default=3)
    p_sign.add_argument("--s", type=float, default=None)
    p_sign.add_argument("--t", type=float, default=None)
    p_sign.add_argument("--out", default=None)
    p_sign.set_defaults(func=cmd_sign)

    p_check = sub.add_parser("check", help="residual checks on a path or tensor")
    p_check.add_argument("input", help="path CSV or tensor JSON")
    p_check.add_argument("--which", choices=["chen", "grouplike", "lie", "shuffle"],
                         default="chen")
    p_check.add_argument("--level", type=int, default=3)
    p_check.add_argument("--tol", type=float, default=1e-10)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--samples", type=int, default=25)
    p_check.add_argument("--out", default=None)
    p_check.set_defaults(func=cmd_check)

    p_lift = sub.add_parser("lift", help="partition-product lift with trace")
    p_lift.add_argument("input", help="path CSV or pure-area JSON spec")
    p_lift.add_argument("--level", type=int, default=3, help="target level")
    p_lift.add_argument("--level-in", type=int, default=2, dest="level_in")
    p_lift.add_argument("--depth", type=int, nargs="+", default=[2, 4, 6, 8],
                        dest="depths")
    p_lift.add_argument("--out", default=None)
    p_lift.set_defaults(func=cmd_lift)

    p_uat = sub.add_parser("uat", help="approximation sweep from a config file")
    p_uat.add_argument("--config", required=True)
    p_uat.add_argument("--alpha", type=float, default=0.5)
    p_uat.add_argument("--seed", type=int, default=0)
    p_uat.add_argument("--out", default=None, help="report CSV destination")
    p_uat.add_argument("--functional-out", default=None, dest="functional_out")
    p_uat.set_defaults(func=cmd_uat)

    p_ae = sub.add_parser("ae", help="transport norm of a molecule JSON")
    p_ae.add_argument("molecule")
    p_ae.add_argument("--alpha", type=float, default=0.5)
    p_ae.add_argument("--out", default=None)
    p_ae.set_defaults(func=cmd_ae)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
