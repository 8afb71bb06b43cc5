"""Command-line entry point.

Subcommands: order, simulate, certify, oscillation, witness, limitset,
floquet.  Every run owns an output directory, writes a manifest.json
recording inputs, seed, versions and tolerances, a report.json with the
analysis result, delimited data files, and (unless --no-plot) rendered
figures.  Exit codes: 0 success, 1 domain error (JSON payload on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, plots
from .cones import order_relation, validate_cone
from .errors import BlowUp, MonoflowError
from .integrate import Direction, IntegratorOptions, integrate
from .limitsets import (classify_limit_set, estimate_limit_set, floquet_multipliers,
                        interior_direction, non_ordering_check, project_and_check,
                        spectrum_at_equilibrium)
from .monotonicity import (certify_linear, estimate_tstar_empirical,
                           verify_order_preservation)
from .oscillation import non_oscillation_verdict, scan_monotone_intervals
from .systems import LinearField, parse_system
from .witness import WitnessProblem, brute_force_witness, construct_witness


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("%.17g" % float(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from exc


def _load_system(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"system file not found: {path}")
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return parse_system(text)


def _load_cone(spec: str):
    text = spec.strip()
    if not text.startswith("{"):
        p = Path(spec)
        if not p.is_file():
            raise UsageError(f"cone file not found: {spec}")
        text = p.read_text(encoding="utf-8")
    try:
        return validate_cone(json.loads(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad cone JSON: {exc}") from exc


def _rational(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monoflow",
                                     description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"monoflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--out", default="monoflow_out", help="output directory")
        p.add_argument("--tol-order", type=float, default=1e-6,
                       help="order-relation tolerance for sampled data")
        p.add_argument("--json", action="store_true",
                       help="also print the report JSON to stdout")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        p.add_argument("--emit-plot-data", action="store_true",
                       help="write the plotted series as additional CSV files")

    p = sub.add_parser("order", help="classify the cone relation of two vectors")
    common(p)
    p.add_argument("--cone", required=True, help="cone JSON (inline or a file path)")
    p.add_argument("--x", required=True, help="first vector, comma separated")
    p.add_argument("--y", required=True, help="second vector, comma separated")
    p.add_argument("--tol", type=float, default=0.0)

    p = sub.add_parser("simulate", help="integrate a trajectory and export it")
    common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--direction", choices=["forward", "backward"], default="forward")
    p.add_argument("--method", choices=["rk4", "dp54"], default="dp54")
    p.add_argument("--step", type=float, default=1e-2, help="rk4 step size")
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--max-step", type=float, default=None)
    p.add_argument("--norm-cap", type=float, default=1e9)

    p = sub.add_parser("certify", help="certify (eventual) order preservation")
    common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--horizon", type=float, default=None,
                   help="scan horizon (default 50 linear, 10 sampled)")
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--trials", type=int, default=200,
                   help="independent verification trials (0 disables)")
    p.add_argument("--box", default=None,
                   help="sampling box 'lo1,lo2,...;hi1,hi2,...' for nonlinear systems")

    p = sub.add_parser("oscillation", help="scan a trajectory for monotone intervals")
    common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--horizon", type=float, default=20.0)
    p.add_argument("--step", type=float, default=None,
                   help="rk4 sampling step (default horizon/1024)")
    p.add_argument("--max-pairs", type=int, default=4_000_000)
    p.add_argument("--forward-only", action="store_true")
    p.add_argument("--norm-cap", type=float, default=1e9)

    p = sub.add_parser("witness", help="run the interval-landing construction")
    common(p)
    p.add_argument("--A", required=True, help="window spacing (rational or decimal)")
    p.add_argument("--B", required=True, help="point spacing")
    p.add_argument("--E", required=True, help="window width, 0 < E <= A")
    p.add_argument("--float", dest="float_mode", action="store_true",
                   help="float arithmetic (requires --eps)")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--oracle", action="store_true",
                   help="also run the brute-force landing search")
    p.add_argument("--lmax", type=int, default=10**6)

    p = sub.add_parser("limitset", help="estimate and classify a limit set")
    common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--direction", choices=["omega", "alpha"], default="omega")
    p.add_argument("--transient", type=float, required=True)
    p.add_argument("--window", type=float, required=True)
    p.add_argument("--refine", type=int, default=3)
    p.add_argument("--margin", type=float, default=1e-6,
                   help="non-ordering check margin")
    p.add_argument("--norm-cap", type=float, default=1e9)

    p = sub.add_parser("floquet", help="multipliers of a periodic orbit")
    common(p)
    p.add_argument("--system", required=True)
    p.add_argument("--point", required=True, help="point on the cycle")
    p.add_argument("--period", type=float, required=True)
    p.add_argument("--rtol", type=float, default=1e-11)
    p.add_argument("--atol", type=float, default=1e-13)

    return parser


def _emit(args, out: Path, report: dict, outputs: list[str]) -> None:
    _write_json(out / "report.json", report)
    outputs.append("report.json")
    manifest = {
        "command": args.command,
        "inputs": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("json",)},
        "seed": getattr(args, "seed", 0),
        "tolerances": {"tol_order": getattr(args, "tol_order", None)},
        "outputs": sorted(outputs),
        "versions": {"monoflow": __version__, "numpy": np.__version__},
    }
    _write_json(out / "manifest.json", manifest)
    if args.json:
        print(json.dumps(_jsonable(report), indent=2, sort_keys=True))


def _cmd_order(args, out: Path, outputs: list[str]) -> dict:
    cone = _load_cone(args.cone)
    x = _parse_vector(args.x)
    y = _parse_vector(args.y)
    rel = order_relation(cone, x, y, args.tol)
    rev = order_relation(cone, y, x, args.tol)
    return {"relation": rel.value, "reverse": rev.value,
            "slacks": cone.slacks(y - x), "cone": cone.to_json()}


def _cmd_simulate(args, out: Path, outputs: list[str]) -> dict:
    sysdef = _load_system(args.system)
    x0 = _parse_vector(args.x0)
    opts = IntegratorOptions(method=args.method, step=args.step, rel_tol=args.rtol,
                             abs_tol=args.atol, max_step=args.max_step,
                             norm_cap=args.norm_cap)
    direction = Direction.FORWARD if args.direction == "forward" else Direction.BACKWARD
    traj = integrate(sysdef, x0, args.t_end, direction, opts)
    (out / "trajectory.csv").write_text(traj.to_csv(), encoding="utf-8")
    outputs.append("trajectory.csv")
    if not args.no_plot:
        plots.plot_trajectory(traj, out / "trajectory.png")
        outputs.append("trajectory.png")
    return {"samples": len(traj.times), "t_final": traj.times[-1],
            "state_final": traj.states[-1], "direction": direction.value,
            "meta": traj.meta}


def _parse_box(text: str, dim: int):
    try:
        lo_text, hi_text = text.split(";")
        lo = _parse_vector(lo_text)
        hi = _parse_vector(hi_text)
    except ValueError as exc:
        raise UsageError(f"bad box {text!r}") from exc
    if lo.size != dim or hi.size != dim:
        raise UsageError(f"box dimension does not match system dimension {dim}")
    return lo, hi


def _cmd_certify(args, out: Path, outputs: list[str]) -> dict:
    sysdef = _load_system(args.system)
    fieldspec = sysdef.field
    if isinstance(fieldspec, LinearField):
        horizon = args.horizon if args.horizon is not None else 50.0
        cert = certify_linear(fieldspec.matrix, sysdef.cone, horizon, args.grid)
        box = None
    else:
        horizon = args.horizon if args.horizon is not None else 10.0
        box = _parse_box(args.box, sysdef.dimension) if args.box else None
        cert = estimate_tstar_empirical(sysdef, pairs=args.pairs, horizon=horizon,
                                        seed=args.seed, box=box)
    violations = None
    trials = None
    if cert.detected and args.trials > 0:
        ver = verify_order_preservation(sysdef, cert, trials=args.trials,
                                        horizon=horizon, seed=args.seed + 1, box=box)
        violations = ver.violations
        trials = ver.trials
        worst = ver.worst_margin
    else:
        worst = None
    report = cert.to_json(pairs=trials, violations=violations)
    report["worst_margin"] = worst
    report["evidence"] = cert.evidence

    if isinstance(fieldspec, LinearField) and cert.detected and not args.no_plot:
        import scipy.linalg

        sign = 1.0 if cert.cooperative else -1.0
        conj = fieldspec.matrix * np.outer(sysdef.cone.signs, sysdef.cone.signs)
        ts = np.linspace(horizon / 512, horizon, 512)
        mins = [float(scipy.linalg.expm(sign * t * conj).min()) for t in ts]
        plots.plot_certificate_scan(ts, mins, cert.tstar_estimate,
                                    out / "certificate.png",
                                    title="propagator minimum entry")
        outputs.append("certificate.png")
        if args.emit_plot_data:
            _write_csv(out / "certificate_scan.csv", ["t", "min_entry"],
                       zip(ts, mins))
            outputs.append("certificate_scan.csv")
    return report


def _cmd_oscillation(args, out: Path, outputs: list[str]) -> dict:
    sysdef = _load_system(args.system)
    x0 = _parse_vector(args.x0)
    step = args.step if args.step else args.horizon / 1024
    opts = IntegratorOptions(method="rk4", step=step, norm_cap=args.norm_cap)
    report: dict = {"scope": "complete", "tol": args.tol_order}
    directions = [("forward", Direction.FORWARD)]
    if not args.forward_only:
        directions.append(("backward", Direction.BACKWARD))
    for name, direction in directions:
        try:
            traj = integrate(sysdef, x0, args.horizon, direction, opts)
        except BlowUp as exc:
            report[name] = None
            report["scope"] = "forward-only"
            report[f"{name}_blowup_t"] = exc.t_reached
            continue
        intervals = scan_monotone_intervals(traj, sysdef.cone, args.tol_order,
                                            args.max_pairs)
        verdict = non_oscillation_verdict(traj, sysdef.cone, args.tol_order,
                                          args.max_pairs)
        report[name] = verdict.to_json()
        report[f"{name}_interval_count"] = len(intervals)
        (out / f"trajectory_{name}.csv").write_text(traj.to_csv(), encoding="utf-8")
        outputs.append(f"trajectory_{name}.csv")
        if not args.no_plot:
            plots.plot_intervals(traj, intervals, verdict, out / f"intervals_{name}.png")
            outputs.append(f"intervals_{name}.png")
        if args.emit_plot_data and intervals:
            _write_csv(out / f"intervals_{name}.csv",
                       ["a", "b", "kind", "interior"],
                       [(iv.a, iv.b,
                         1.0 if iv.kind.value == "increasing" else -1.0,
                         1.0 if iv.strength.value == "strict_interior" else 0.0)
                        for iv in intervals])
            outputs.append(f"intervals_{name}.csv")
    return report


def _cmd_witness(args, out: Path, outputs: list[str]) -> dict:
    if args.float_mode:
        if args.eps is None:
            raise UsageError("--float requires --eps")
        prob = WitnessProblem(float(Fraction(args.A)), float(Fraction(args.B)),
                              float(Fraction(args.E)), epsilon=args.eps)
    else:
        prob = WitnessProblem(_rational(args.A), _rational(args.B), _rational(args.E))
    result = construct_witness(prob)
    report = result.to_json()
    report["problem"] = {"A": prob.A, "B": prob.B, "E": prob.E,
                         "epsilon": prob.epsilon}
    if args.oracle:
        found = brute_force_witness(prob, min(args.lmax, max(result.l_star, 1)))
        report["oracle"] = ({"l": found[0], "n": found[1]} if found else None)
    if not args.no_plot and result.n_star <= 4000:
        plots.plot_witness_ladder(prob, result, out / "witness.png")
        outputs.append("witness.png")
    if args.emit_plot_data:
        _write_csv(out / "witness_trace.csv", ["level", "D", "n", "l", "h"],
                   [(s.level, float(s.D), s.n, s.l, s.h) for s in result.trace])
        outputs.append("witness_trace.csv")
    return report


def _cmd_limitset(args, out: Path, outputs: list[str]) -> dict:
    sysdef = _load_system(args.system)
    x0 = _parse_vector(args.x0)
    direction = Direction.FORWARD if args.direction == "omega" else Direction.BACKWARD
    est = estimate_limit_set(sysdef, x0, direction, transient=args.transient,
                             window=args.window, refine=args.refine,
                             opts=IntegratorOptions(norm_cap=args.norm_cap))
    _write_csv(out / "limitset_points.csv",
               [f"x{i + 1}" for i in range(sysdef.dimension)], est.points)
    outputs.append("limitset_points.csv")
    ordering = non_ordering_check(est.points, sysdef.cone, args.margin)
    projection = project_and_check(est.points, sysdef.cone)
    cls = classify_limit_set(sysdef, est, sysdef.cone)
    spectra = []
    if cls.verdict in ("equilibrium", "contains_equilibrium") and cls.point is not None:
        spectra.append(spectrum_at_equilibrium(sysdef, cls.point).to_json())
    cycle_report = None
    if cls.verdict == "periodic_orbit":
        cycle_report = floquet_multipliers(sysdef, cls.point, cls.period)
        spectra.append(cycle_report.to_json())
    report = {
        "verdict": cls.verdict,
        "period": cls.period,
        "point": cls.point,
        "classification_evidence": cls.evidence,
        "direction": args.direction,
        "converged": est.converged,
        "hausdorff_gap": est.hausdorff_gap,
        "points": len(est.points),
        "non_ordering": ordering.to_json(),
        "injectivity_margin": projection.injectivity_margin,
        "spectra": spectra,
    }
    if args.emit_plot_data:
        _write_csv(out / "limitset_projected.csv",
                   [f"u{i + 1}" for i in range(projection.projected.shape[1])],
                   projection.projected)
        outputs.append("limitset_projected.csv")
    if not args.no_plot:
        plots.plot_limit_set(est, projection, out / "limitset.png",
                             title=f"verdict: {cls.verdict}")
        outputs.append("limitset.png")
        if cycle_report is not None:
            plots.plot_multipliers(cycle_report, out / "multipliers.png")
            outputs.append("multipliers.png")
    return report


def _cmd_floquet(args, out: Path, outputs: list[str]) -> dict:
    sysdef = _load_system(args.system)
    point = _parse_vector(args.point)
    rep = floquet_multipliers(sysdef, point, args.period,
                              rel_tol=args.rtol, abs_tol=args.atol)
    if not args.no_plot:
        plots.plot_multipliers(rep, out / "multipliers.png")
        outputs.append("multipliers.png")
    if args.emit_plot_data:
        _write_csv(out / "multipliers.csv", ["re", "im", "abs"],
                   [(v.real, v.imag, abs(v)) for v in rep.values])
        outputs.append("multipliers.csv")
    return rep.to_json()


_HANDLERS = {
    "order": _cmd_order,
    "simulate": _cmd_simulate,
    "certify": _cmd_certify,
    "oscillation": _cmd_oscillation,
    "witness": _cmd_witness,
    "limitset": _cmd_limitset,
    "floquet": _cmd_floquet,
}


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=_sys.stderr)
        return 2
    outputs: list[str] = []
    try:
        report = _HANDLERS[args.command](args, out, outputs)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=_sys.stderr)
        return 2
    except MonoflowError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=_sys.stderr)
        _write_json(out / "error.json", payload)
        return 1
    _emit(args, out, report, outputs)
    return 0


def main() -> None:
    _sys.exit(dispatch(_sys.argv[1:]))


if __name__ == "__main__":
    main()
