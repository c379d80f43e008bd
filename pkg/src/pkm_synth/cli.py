"""``pkm-synth`` command line front end.

Exit codes: 0 success, 1 configuration error, 2 computation error,
3 partial failure in a multi-architecture run.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .errors import ConfigError, PKMError
from .kinetostatics import KinetostaticBounds, amplification_factors, check_bounds
from .mechanism import (
    Architecture,
    BranchModes,
    JointConfig,
    MechanismDesign,
    classify_singularity,
    forward_kinematics,
    inverse_jacobian,
    inverse_kinematics,
    jacobians,
    posture_angles,
)
from .report import (
    RunConfig,
    format_table1,
    format_table2,
    load_config_file,
    report_to_csv,
    run_compare,
    run_synth,
    write_outputs,
)

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_PARTIAL = 0, 1, 2, 3


def _sign(text):
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError("expected + or -")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arch", help="biglide1, biglide2, orthoglide, all, or custom (with --alpha1/--alpha2)")
    common.add_argument("--alpha1", type=float, help="rail 1 direction in radians (custom architecture)")
    common.add_argument("--alpha2", type=float, help="rail 2 direction in radians (custom architecture)")
    common.add_argument("--lambda-min", type=float)
    common.add_argument("--lambda-max", type=float)
    common.add_argument("--target-area", type=float, help="prescribed rectangle area in m^2")
    common.add_argument("--resolution", type=int, help="raster cells along the longer side")
    common.add_argument("--square", action="store_true", default=None, help="also compute square rectangles")
    common.add_argument("--axis-aligned", action="store_true", default=None,
                        help="restrict inscribed rectangles to the machine axes")
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("text", "csv", "json"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pkm-synth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="normalised dimensions L0/L and drho/L")
    sub.add_parser("compare", parents=[common], help="full pipeline: synthesis, workspace, scaling, envelope")
    sub.add_parser("plot", parents=[common], help="SVG workspace figure per architecture")
    pose = sub.add_parser("pose", parents=[common], help="inspect a single joint configuration")
    pose.add_argument("--L0", type=float, dest="L0")
    pose.add_argument("--L", type=float, dest="L")
    pose.add_argument("--delta-rho", type=float)
    pose.add_argument("--rho1", type=float)
    pose.add_argument("--rho2", type=float)
    pose.add_argument("--x", type=float, help="tool x (inverse kinematics instead of --rho1/--rho2)")
    pose.add_argument("--y", type=float)
    pose.add_argument("--assembly", type=_sign, default=1)
    pose.add_argument("--working1", type=_sign, default=-1)
    pose.add_argument("--working2", type=_sign, default=-1)
    return parser


def make_config(args) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for key, attr in (("arch", "arch"), ("alpha1", "alpha1"), ("alpha2", "alpha2"),
                      ("lambda_min", "lambda_min"), ("lambda_max", "lambda_max"),
                      ("target_area", "target_area"), ("resolution", "resolution"),
                      ("square", "square"), ("axis_aligned", "axis_aligned"),
                      ("out", "out"), ("format", "format")):
        v = getattr(args, attr, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig()
    arch = values.pop("arch", None)
    if arch is None and values.get("alpha1") is not None:
        arch = "custom"
    if arch is not None and arch != "all":
        cfg.architectures = [a.strip().lower() for a in arch.split(",")]
    cfg.alpha1 = values.get("alpha1")
    cfg.alpha2 = values.get("alpha2")
    cfg.lambda_min = values.get("lambda_min", cfg.lambda_min)
    cfg.lambda_max = values.get("lambda_max", cfg.lambda_max)
    cfg.target_area = values.get("target_area", cfg.target_area)
    cfg.resolution = values.get("resolution", cfg.resolution)
    cfg.square_mode = bool(values.get("square", False))
    cfg.axis_aligned = bool(values.get("axis_aligned", False))
    cfg.out_dir = values.get("out")
    cfg.fmt = values.get("format", cfg.fmt)
    return cfg.validate()


def _emit(report, cfg, tables):
    if cfg.fmt == "json":
        sys.stdout.write(report.to_json())
    elif cfg.fmt == "csv":
        sys.stdout.write(report_to_csv(report))
    else:
        for fn in tables:
            sys.stdout.write(fn(report))
    for rec in report.records:
        if rec.error:
            print(f"error: {rec.name}: {rec.error}", file=sys.stderr)
    if cfg.out_dir:
        write_outputs(report, cfg.out_dir)


def _exit_for(report) -> int:
    failed = report.failed
    if failed == 0:
        return EXIT_OK
    return EXIT_COMPUTE if failed == len(report.records) else EXIT_PARTIAL


def cmd_synth(cfg: RunConfig) -> int:
    report = run_synth(cfg)
    _emit(report, cfg, [format_table1])
    return _exit_for(report)


def cmd_compare(cfg: RunConfig) -> int:
    report = run_compare(cfg)
    _emit(report, cfg, [format_table1, format_table2])
    return _exit_for(report)


def cmd_plot(cfg: RunConfig, debug: bool = False) -> int:
    from .plotting import save_svg, workspace_figure
    from .synthesis import synthesize
    from .workspace import best_rectangle, write_pgm

    out_dir = cfg.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    failed = 0
    specs = cfg.arch_specs()
    angles = [0.0] if cfg.axis_aligned else None
    for name, spec in specs:
        try:
            res = synthesize(spec, cfg.bounds)
            rect, grid = best_rectangle(res.design, bounds=cfg.bounds, resolution=cfg.resolution,
                                        force_square=cfg.square_mode, angles=angles)
        except PKMError as exc:
            print(f"error: {name}: {exc.describe()}: {exc}", file=sys.stderr)
            failed += 1
            continue
        fig = workspace_figure(res.design, grid, rect, title=name)
        path = os.path.join(out_dir, f"{name}.svg")
        save_svg(fig, path)
        if debug:
            write_pgm(grid, os.path.join(out_dir, f"{name}.pgm"))
        print(path)
    if failed == 0:
        return EXIT_OK
    return EXIT_COMPUTE if failed == len(specs) else EXIT_PARTIAL


def pose_report(design: MechanismDesign, q: JointConfig, modes: BranchModes,
                bounds: KinetostaticBounds) -> dict:
    p = forward_kinematics(design, q, modes)
    ang = posture_angles(design, q, p)
    sing = classify_singularity(design, q, p)
    try:
        lam = amplification_factors(inverse_jacobian(jacobians(design, q, p)))
        lam1, lam2 = lam.lambda1, lam.lambda2
        within = check_bounds(lam, bounds)
    except PKMError:
        within = False
        lam2 = math.inf
        if sing.serial:
            lam1 = 0.0
        else:
            # parallel singular: the ellipse degenerates along one axis only
            lam1 = 1.0 / float(np.linalg.norm(inverse_jacobian(jacobians(design, q, p)), 2))
    return {
        "P": [p.x, p.y],
        "rho": [q.rho1, q.rho2],
        "in_range": q.in_range(design),
        "theta1": ang.theta1,
        "theta2": ang.theta2,
        "det_A": sing.det_A,
        "det_B": sing.det_B,
        "lambda1": lam1,
        "lambda2": lam2,
        "parallel": sing.parallel,
        "serial": sing.serial,
        "structural": sing.structural,
        "within_bounds": within,
    }


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    return v


def cmd_pose(args, cfg: RunConfig) -> int:
    from .synthesis import synthesize

    if len(cfg.architectures) == 1:
        name = cfg.architectures[0]
    elif args.arch in (None, "all"):
        name = "biglide1"
    else:
        raise ConfigError("arch: pose needs exactly one architecture")
    by_rho = args.rho1 is not None and args.rho2 is not None
    if not by_rho and (args.x is None or args.y is None):
        raise ConfigError("pose: give --rho1/--rho2 or --x/--y")
    spec = (cfg.alpha1, cfg.alpha2) if name == "custom" else Architecture.from_name(name)
    a1, a2 = spec if name == "custom" else (spec.alpha1, spec.alpha2)
    try:
        L0, L, dr = args.L0, args.L, args.delta_rho
        if L0 is None or dr is None:
            base = synthesize(spec, cfg.bounds).design
            L0 = base.L0 if L0 is None else L0
            dr = base.delta_rho if dr is None else dr
        design = MechanismDesign(a1, a2, L0, 1.0 if L is None else L, dr)
    except ValueError as exc:
        raise ConfigError(f"design: {exc}") from None
    except PKMError as exc:
        print(f"error: {exc.describe()}", file=sys.stderr)
        return EXIT_COMPUTE
    modes = BranchModes(args.assembly, args.working1, args.working2)
    try:
        q = JointConfig(args.rho1, args.rho2) if by_rho else inverse_kinematics(design, (args.x, args.y), modes)
        rep = pose_report(design, q, modes, cfg.bounds)
    except PKMError as exc:
        print(f"error: {exc.describe()}")
        return EXIT_COMPUTE
    if cfg.fmt == "json":
        print(json.dumps({k: _json_safe(v) for k, v in rep.items()}, indent=2))
    else:
        for k, v in rep.items():
            if isinstance(v, bool):
                v = str(v).lower()
            elif isinstance(v, float):
                v = f"{v:.9g}"
            elif isinstance(v, list):
                v = ", ".join(f"{x:.9g}" for x in v)
            print(f"{k}: {v}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        if args.command == "synth":
            return cmd_synth(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "plot":
            return cmd_plot(cfg, debug=args.verbose)
        return cmd_pose(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
