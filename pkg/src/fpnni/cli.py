"""Command-line front end.

Subcommands: ``simulate``, ``equilibrium``, ``check``, ``mlf``, ``search-q``.
Exit codes: 0 success/pass, 1 check failed, 2 config error, 3 solver or
runtime error.  ``NO_COLOR`` disables ANSI colors in reports.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, config, model, output, stability
from .errors import ConfigError, FpnniError

# Check ids: each certificate has a short numeric id and a descriptive alias.
CHECK_IDS = {
    "3.2a": "existence", "existence": "existence",
    "3.2b": "uniqueness", "uniqueness": "uniqueness",
    "3.3": "boundedness", "boundedness": "boundedness",
    "4.1": "eigenvalue", "eigenvalue": "eigenvalue",
    "4.2": "lmi", "lmi": "lmi",
}


def _use_color() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _load(args) -> config.SystemConfig:
    return config.parse_config(args.config)


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _format_point(x, digits: int = 10) -> str:
    return "(" + ", ".join(f"{v:.{digits}g}" for v in np.atleast_1d(x)) + ")"


def _default_radius(cfg: config.SystemConfig) -> float:
    return max(1.0, 2.0 * float(np.linalg.norm(cfg.x0)))


def _bound_params(cfg: config.SystemConfig, sys_resolved) -> model.BoundParams:
    """Bounds from the config, with sigma-form defaults where omitted."""
    cert = cfg.certificate
    if isinstance(sys_resolved.impulses, model.SigmaImpulses):
        radius = cert.get("radius", _default_radius(cfg))
        params = model.sigma_bound_params(sys_resolved, radius)
        l1 = cert.get("l1", params.l1)
        l2 = cert.get("l2", params.l2)
        return model.BoundParams(l1=l1, l2=l2, psi=params.psi)
    from . import convex

    psi = convex.project(
        config.build_set(cfg), np.zeros(cfg.dimension)
    )
    return model.BoundParams(
        l1=cert.get("l1", 0.0), l2=cert.get("l2", 0.0), psi=psi
    )


def cmd_simulate(args) -> int:
    cfg = _load(args)
    sys_model = config.build_system(cfg)
    solver = config.build_solver_config(cfg, steps_override=args.steps)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    sys_model = model.resolve_anchor(sys_model)
    existence = stability.check_existence(
        sys_model, cfg.t_final, _bound_params(cfg, sys_model)
    )
    if not existence.passed:
        print("note: the existence sufficient condition does not hold at this "
              "horizon (margins "
              + ", ".join(f"{k}={v:.4g}" for k, v in existence.margins.items())
              + " must be < 1); simulating anyway")

    started = time.perf_counter()
    traj = model.simulate(sys_model, cfg.x0, cfg.t_final, config=solver)
    duration = time.perf_counter() - started

    csv_path = out_dir / "trajectory.csv"
    svg_path = out_dir / "trajectory.svg"
    output.write_trajectory_csv(traj, csv_path)
    output.write_trajectory_svg(traj, svg_path, title="state trajectory")
    manifest = output.RunManifest(
        config_digest=_digest(args.config),
        solver_settings={
            "steps_per_unit_time": solver.steps_per_unit_time,
            "corrector_iterations": solver.corrector_iterations,
            "quadrature": solver.quadrature,
            "alpha": cfg.alpha,
            "t_final": cfg.t_final,
        },
        outputs=(str(csv_path), str(svg_path)),
        certificate_summaries=({
            "theorem": existence.theorem,
            "pass": existence.passed,
            "margins": {k: float(v) for k, v in existence.margins.items()},
        },),
        duration_seconds=duration,
    )
    output.write_manifest(manifest, out_dir / "manifest.json")
    final = traj.right[-1]
    print(f"simulated {len(traj.times)} nodes over [0, {cfg.t_final:g}] "
          f"in {duration:.3f}s")
    print(f"final state: {_format_point(final)}")
    print(f"wrote {csv_path}, {svg_path}, {out_dir / 'manifest.json'}")
    return 0


def cmd_equilibrium(args) -> int:
    cfg = _load(args)
    sys_model = config.build_system(cfg)
    result = model.equilibrium(sys_model, x_init=cfg.x0)
    # a residual of ~1e-8 supports about six reliable digits here
    print(f"equilibrium: {_format_point(result.point, digits=6)}")
    print(f"residual: {result.residual:.6g}")
    print(f"iterations: {result.iterations}")
    return 0


def cmd_check(args) -> int:
    cfg = _load(args)
    check = CHECK_IDS[args.theorem]
    sys_model = config.build_system(cfg)
    cert = cfg.certificate
    horizon = cert.get("horizon", cfg.t_final)
    q = np.array(cert["Q"], dtype=float) if "Q" in cert \
        else np.eye(cfg.dimension)

    if check in ("existence", "uniqueness", "boundedness"):
        sys_model = model.resolve_anchor(sys_model)
        bounds = _bound_params(cfg, sys_model)
        if check == "existence":
            report = stability.check_existence(sys_model, horizon, bounds)
        elif check == "uniqueness":
            report = stability.check_uniqueness(sys_model, horizon, bounds.l2)
        else:
            solver = config.build_solver_config(cfg, steps_override=args.steps)
            traj = model.simulate(sys_model, cfg.x0, cfg.t_final, config=solver)
            report = stability.check_boundedness(
                sys_model, traj, cfg.x0, bounds, slack=args.slack
            )
    elif check == "eigenvalue":
        report = stability.check_eigenvalue_certificate(
            sys_model, q, rho1=cert.get("rho1", 1.0), eta1=cert.get("eta1", 1.0)
        )
    else:
        report = stability.check_lmi_certificate(
            sys_model, q, rho2=cert.get("rho2", 1.0),
            mu2=cert.get("mu2", 0.1), eta2=cert.get("eta2", 1.0),
        )

    print(output.format_report(report, color=_use_color()))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        json_path = out_dir / f"certificate-{check}.json"
        output.write_report_json(report, json_path)
        print(f"wrote {json_path}")
    return 0 if report.passed else 1


def cmd_mlf(args) -> int:
    from . import mlf

    value = mlf.mittag_leffler(args.alpha, args.z, beta=args.beta)
    print(f"{value:.17g}")
    return 0


def cmd_search_q(args) -> int:
    cfg = _load(args)
    sys_model = config.build_system(cfg)
    cert = cfg.certificate
    found = stability.search_q(
        sys_model, rho2=cert.get("rho2", 1.0), mu2=cert.get("mu2", 0.1),
        eta2=cert.get("eta2", 1.0), budget=args.budget, seed=args.seed,
    )
    if found is None:
        print("no certificate found within budget "
              "(this does not prove infeasibility)")
        return 1
    q, report = found
    print("found Q:")
    for row in q:
        print("  [" + ", ".join(f"{v: .10g}" for v in row) + "]")
    print(output.format_report(report, color=_use_color()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpnni",
        description="Simulate impulsive fractional projection networks and "
                    "check their stability certificates.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"fpnni {__version__} (config schema {config.SCHEMA_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a configured system")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out-dir", default="fpnni-out")
    sim.add_argument("--steps", type=int, default=None,
                     help="override steps_per_unit_time")
    sim.set_defaults(func=cmd_simulate)

    eq = sub.add_parser("equilibrium", help="solve for the equilibrium point")
    eq.add_argument("--config", required=True)
    eq.set_defaults(func=cmd_equilibrium)

    chk = sub.add_parser("check", help="run one certificate check")
    chk.add_argument("--config", required=True)
    chk.add_argument("--theorem", required=True, choices=sorted(CHECK_IDS),
                     help="check id or its descriptive alias")
    chk.add_argument("--out-dir", default=None,
                     help="also write the report as JSON here")
    chk.add_argument("--steps", type=int, default=None)
    chk.add_argument("--slack", type=float, default=0.0,
                     help="relative slack for the boundedness ratio")
    chk.set_defaults(func=cmd_check)

    ml = sub.add_parser("mlf", help="evaluate the Mittag-Leffler function")
    ml.add_argument("z", type=float)
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--beta", type=float, default=1.0)
    ml.set_defaults(func=cmd_mlf)

    sq = sub.add_parser("search-q", help="heuristic search for a feasible Q")
    sq.add_argument("--config", required=True)
    sq.add_argument("--seed", type=int, default=0)
    sq.add_argument("--budget", type=int, default=2000)
    sq.set_defaults(func=cmd_search_q)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FpnniError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
