"""Command-line surface: config loading, simulation commands, CSV/JSON emission.

Every command writes its data files plus a `<command>_manifest.json` into
the output directory (flag --out, overridden by the PADDLE_LAB_OUT
environment variable). Floats are serialized in full-precision scientific
notation so reruns with identical flags and seed are byte-identical; the
manifest timestamp is the one deliberately non-reproducible field.

Exit codes: 0 success, 2 input/config error, 3 no stable equilibrium,
4 fit non-convergence (the result file is still written).
"""
from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .electrostatics import (Electrode, capacitance_value, force_per_v2_value)
from .errors import NoStableEquilibrium, PaddleLabError
from .extraction import fit_film_parameters, load_cv_csv
from .instrument import NoiseModel, calibrate, calibration_table, measure_capacitance
from .mechanics import (compliance, film_force, pull_in_voltage, solve_equilibrium,
                        stress_profile, sweep_voltage)
from .model import (ValidatedModel, build_model, load_model_json, model_from_dict,
                    model_to_dict, yb_from_yp)

DEFAULT_SPACERS = "25e-6,50e-6,75e-6,100e-6,125e-6"
DEFAULT_SIGMA0_LIST = "100e6,200e6,300e6"
CURVE_GRID_FRACTION = 0.9
CURVE_GRID_POINTS = 201
DESIGN_REFERENCE_LOAD = 1e-3  # N
DESIGN_PROFILE_POINTS = 201


def fmt(x: float) -> str:
    return f"{float(x):.17e}"


def _jsonify(obj):
    """Floats to full-precision strings, recursively; other scalars pass through."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _write_json(path: str, obj) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(_jsonify(obj), indent=2, sort_keys=True))
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def _out_dir(args) -> str:
    out = os.environ.get("PADDLE_LAB_OUT") or args.out
    os.makedirs(out, exist_ok=True)
    return out


def _write_manifest(args, out: str, output_names: list[str]) -> None:
    manifest = {
        "command": args.command,
        "config_path": args.config,
        "output_paths": output_names,
        "seed": args.seed,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool_version": __version__,
    }
    _write_json(os.path.join(out, f"{args.command}_manifest.json"), manifest)


def _load_model(args) -> ValidatedModel:
    model = load_model_json(args.config) if args.config else build_model()
    if getattr(args, "sigma0", None) is not None:
        d = model_to_dict(model.model)
        d["sigma0"] = args.sigma0
        model = model_from_dict(d)
    return model


def _electrode(args) -> Electrode:
    return Electrode.TOP if args.electrode == "top" else Electrode.BOTTOM


def _drive(electrode: Electrode, V: float) -> tuple[float, float]:
    return (V, 0.0) if electrode is Electrode.TOP else (0.0, V)


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise PaddleLabError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _breakdown_dict(b) -> dict:
    return {"F_film_N": b.F_film, "F_beam_N": b.F_beam,
            "F_elec_top_N": b.F_elec_top, "F_elec_bottom_N": b.F_elec_bottom,
            "F_total_N": b.F_total}


def cmd_design(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    tri = stress_profile(DESIGN_REFERENCE_LOAD, model.geom, "triangular",
                         DESIGN_PROFILE_POINTS)
    rect = stress_profile(DESIGN_REFERENCE_LOAD, model.geom, "rectangular",
                          DESIGN_PROFILE_POINTS)
    rows = [("triangular", float(x), float(s)) for x, s in tri.samples]
    rows += [("rectangular", float(x), float(s)) for x, s in rect.samples]
    _write_csv(os.path.join(out, "design_profile.csv"),
               ["plan", "x_m", "sigma_Pa"], rows)
    report = {
        "y_p_min_m": model.y_p_min,
        "y_p_max_m": model.y_p_max,
        "compliance_m_per_N": compliance(model),
        "stiffness_N_per_m": 1.0 / compliance(model),
        "C_top_flat_F": capacitance_value(0.0, model, Electrode.TOP),
        "reference_load_N": DESIGN_REFERENCE_LOAD,
        "uniformity_triangular": tri.uniformity,
        "uniformity_rectangular": rect.uniformity,
    }
    _write_json(os.path.join(out, "design_report.json"), report)
    _write_manifest(args, out, ["design_profile.csv", "design_report.json"])
    print(f"touch limits y_p in [{model.y_p_min:.4e}, {model.y_p_max:.4e}] m; "
          f"triangular uniformity {tri.uniformity}")
    return 0


def _curve_grid(args, model: ValidatedModel) -> np.ndarray:
    lo = args.y_min if args.y_min is not None else CURVE_GRID_FRACTION * model.y_p_min
    hi = args.y_max if args.y_max is not None else CURVE_GRID_FRACTION * model.y_p_max
    if not model.y_p_min < lo < hi < model.y_p_max:
        raise PaddleLabError(
            f"grid [{lo!r}, {hi!r}] must lie strictly inside the touch window "
            f"({model.y_p_min:.4e}, {model.y_p_max:.4e})")
    return np.linspace(lo, hi, args.points)


def cmd_curves(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    grid = _curve_grid(args, model)
    if args.which == "capacitance":
        name = "curves_capacitance.csv"
        rows = [(float(y),
                 capacitance_value(float(y), model, Electrode.TOP),
                 capacitance_value(float(y), model, Electrode.BOTTOM)) for y in grid]
        _write_csv(os.path.join(out, name), ["y_p_m", "C_top_F", "C_bottom_F"], rows)
    elif args.which == "force":
        name = "curves_force.csv"
        rows = [(float(y),
                 float(force_per_v2_value(float(y), model, Electrode.TOP)),
                 float(force_per_v2_value(float(y), model, Electrode.BOTTOM)))
                for y in grid]
        _write_csv(os.path.join(out, name),
                   ["y_p_m", "f_top_N_per_V2", "f_bottom_N_per_V2"], rows)
    else:
        name = "curves_film_beam.csv"
        sigma_list = _float_list(args.sigma0_list, "--sigma0-list")
        base = model_to_dict(model.model)
        rows = []
        for s0 in sigma_list:
            d = dict(base)
            d["sigma0"] = s0
            m = model_from_dict(d)
            comp = compliance(m)
            for y in grid:
                rows.append((s0, float(y), float(film_force(float(y), m)) - float(y) / comp))
        _write_csv(os.path.join(out, name), ["sigma0_Pa", "y_p_m", "F_N"], rows)
    _write_manifest(args, out, [name])
    print(f"wrote {name} ({args.which}, {args.points} grid points)")
    return 0


def cmd_equilibrium(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    if args.v > 0.0 and args.electrode is None:
        print("error: --electrode is required when --v > 0", file=sys.stderr)
        return 2
    electrode = _electrode(args) if args.electrode else Electrode.BOTTOM
    drive = _drive(electrode, args.v)
    try:
        sol = solve_equilibrium(model, *drive)
    except NoStableEquilibrium:
        pi = pull_in_voltage(model, electrode)
        print(f"error: no stable equilibrium at V = {args.v} on the {electrode.value} "
              f"electrode; pull-in voltage is {pi.V_pull_in:.4f} V", file=sys.stderr)
        return 3
    result = {
        "V_V": args.v,
        "electrode": args.electrode,
        "y_p_m": sol.y_p,
        "y_b_m": yb_from_yp(sol.y_p, model.geom),
        "C_top_F": sol.C_top,
        "stable": sol.stable,
        "residual_N": sol.residual,
        **_breakdown_dict(sol.breakdown),
    }
    _write_json(os.path.join(out, "equilibrium.json"), result)
    _write_manifest(args, out, ["equilibrium.json"])
    print(f"y_p = {sol.y_p:.6e} m, C_top = {sol.C_top:.6e} F")
    return 0


def cmd_pullin(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    pi = pull_in_voltage(model, _electrode(args))
    result = {"V_pull_in_V": pi.V_pull_in,
              "y_p_last_stable_m": pi.y_p_last_stable,
              "electrode": pi.electrode.value}
    _write_json(os.path.join(out, "pullin.json"), result)
    _write_manifest(args, out, ["pullin.json"])
    print(f"pull-in at {pi.V_pull_in:.4f} V ({pi.electrode.value} electrode)")
    return 0


SWEEP_HEADER = ["V_volt", "y_p_m", "C_top_F", "F_film_N", "F_beam_N",
                "F_elec_top_N", "F_elec_bottom_N", "F_total_N"]


def cmd_sweep(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    if args.v_list:
        voltages = _float_list(args.v_list, "--v-list")
    elif args.v_max is not None:
        voltages = np.linspace(0.0, args.v_max, args.points).tolist()
    else:
        raise PaddleLabError("sweep needs --v-max or --v-list")
    result = sweep_voltage(model, _electrode(args), voltages)
    rows = [(r.V, r.y_p, r.C_top, r.breakdown.F_film, r.breakdown.F_beam,
             r.breakdown.F_elec_top, r.breakdown.F_elec_bottom,
             r.breakdown.F_total) for r in result.records]
    _write_csv(os.path.join(out, "sweep.csv"), SWEEP_HEADER, rows)
    summary = {"rows": len(result.records),
               "requested": len(voltages),
               "truncated_at_V": result.truncated_at,
               "electrode": args.electrode}
    _write_json(os.path.join(out, "sweep_summary.json"), summary)
    _write_manifest(args, out, ["sweep.csv", "sweep_summary.json"])
    trunc = (f"truncated at {result.truncated_at} V"
             if result.truncated_at is not None else "no truncation")
    print(f"{len(result.records)} rows; {trunc}")
    return 0


def cmd_calibrate(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    spacers = _float_list(args.spacers, "--spacers")
    noise = NoiseModel(sigma_C=args.sigma_c, seed=args.seed)
    rows = calibration_table(model, spacers, noise)
    fit = calibrate(model, spacers, noise)
    _write_csv(os.path.join(out, "calibration.csv"),
               ["spacer_m", "inv_spacer_per_m", "C_F"], rows)
    _write_json(os.path.join(out, "calibration_fit.json"),
                {"slope_F_m": fit.slope, "intercept_F": fit.intercept,
                 "r2": fit.r2, "implied_area_m2": fit.implied_area})
    _write_manifest(args, out, ["calibration.csv", "calibration_fit.json"])
    print(f"slope = {fit.slope:.6e} F*m, r2 = {fit.r2:.6f}")
    return 0


def cmd_measure(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    electrode = _electrode(args) if args.electrode else Electrode.TOP
    C_true = capacitance_value(args.yp, model, electrode)
    noise = NoiseModel(sigma_C=args.sigma_c, dt=args.dt, seed=args.seed)
    samples = measure_capacitance(C_true, noise, args.n)
    _write_csv(os.path.join(out, "measurement.csv"), ["t_s", "C_meas_F"],
               [(s.t, s.C_meas) for s in samples])
    _write_manifest(args, out, ["measurement.csv"])
    print(f"{args.n} samples of C = {C_true:.6e} F ({electrode.value} electrode)")
    return 0


def cmd_extract(args) -> int:
    model = _load_model(args)
    out = _out_dir(args)
    data = load_cv_csv(args.data, _electrode(args))
    fit = fit_film_parameters(data, model)
    _write_json(os.path.join(out, "extract_result.json"),
                {"sigma0_hat_Pa": fit.sigma0_hat,
                 "EFVF_hat_Pa_m3": fit.EFVF_hat,
                 "rms_residual_F": fit.rms_residual,
                 "iterations": fit.iterations,
                 "converged": fit.converged})
    _write_manifest(args, out, ["extract_result.json"])
    if not fit.converged:
        print(f"warning: fit did not converge after {fit.iterations} iterations "
              f"(result written)", file=sys.stderr)
        return 4
    print(f"sigma0 = {fit.sigma0_hat:.6e} Pa in {fit.iterations} iterations")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="model JSON path (defaults built in)")
    common.add_argument("--out", default=".", help="output directory (PADDLE_LAB_OUT overrides)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed for noisy commands")
    common.add_argument("--electrode", choices=["top", "bottom"], default=None,
                        help="which DC electrode is energized/sensed")

    parser = argparse.ArgumentParser(
        prog="paddle-lab",
        description="Paddle-cantilever capacitive test system: forward model, "
                    "virtual bridge, and film-stress extraction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common],
                       help="stress-profile comparison and geometry report")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("curves", parents=[common], help="model curves over a y_p grid")
    p.add_argument("--which", choices=["capacitance", "force", "film-beam"],
                   default="capacitance")
    p.add_argument("--y-min", type=float, default=None, help="grid start, m")
    p.add_argument("--y-max", type=float, default=None, help="grid end, m")
    p.add_argument("--points", type=int, default=CURVE_GRID_POINTS)
    p.add_argument("--sigma0-list", default=DEFAULT_SIGMA0_LIST,
                   help="comma list of film stresses, Pa (film-beam mode)")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("equilibrium", parents=[common], help="stable force balance")
    p.add_argument("--v", type=float, default=0.0, help="drive voltage, V")
    p.add_argument("--sigma0", type=float, default=None, help="override film stress, Pa")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("pullin", parents=[common], help="pull-in voltage (requires --electrode)")
    p.add_argument("--sigma0", type=float, default=None, help="override film stress, Pa")
    p.set_defaults(func=cmd_pullin, needs_electrode=True)

    p = sub.add_parser("sweep", parents=[common], help="equilibrium sweep over voltage")
    p.add_argument("--v-max", type=float, default=None, help="sweep end, V")
    p.add_argument("--points", type=int, default=51)
    p.add_argument("--v-list", default=None, help="explicit comma list of voltages, V")
    p.add_argument("--sigma0", type=float, default=None, help="override film stress, Pa")
    p.set_defaults(func=cmd_sweep, needs_electrode=True)

    p = sub.add_parser("calibrate", parents=[common], help="spacer-sweep calibration")
    p.add_argument("--spacers", default=DEFAULT_SPACERS, help="comma list of spacer gaps, m")
    p.add_argument("--sigma-c", type=float, default=0.0, help="capacitance noise std, F")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("measure", parents=[common], help="noisy capacitance stream")
    p.add_argument("--yp", type=float, default=0.0, help="paddle-center deflection, m")
    p.add_argument("--n", type=int, default=100, help="sample count")
    p.add_argument("--dt", type=float, default=1e-2, help="sample interval, s")
    p.add_argument("--sigma-c", type=float, default=1e-16, help="capacitance noise std, F")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("extract", parents=[common],
                       help="fit film stress to a V_volt,C_F CSV (requires --electrode)")
    p.add_argument("--data", required=True, help="input CSV path")
    p.set_defaults(func=cmd_extract, needs_electrode=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_electrode", False) and args.electrode is None:
        print(f"error: {args.command} requires --electrode top|bottom", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except NoStableEquilibrium as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PaddleLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
