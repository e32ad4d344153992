"""Command-line front end.

Subcommands: optimize, evaluate, pattern, subarray, compare. Configuration
and result documents are JSON with an explicit schema version; pattern cuts
and convergence traces are CSV. Angles and the published-units convention
(mm, degrees, wavelengths) live only here; everything behind this module is
radians and meters.

Exit codes: 0 success, 1 input error, 2 optimization finished without
reaching the target.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from .geometry import END_FIRE, DipoleArray, Direction, Excitation, pattern_cut
from .metrics import (RadiationReport, max_directivity_excitation,
                      quadrature_radiated_power, realized_gain)
from .network import build_network
from .optimizer import DeConfig, decode, optimize
from .subarray import SubarrayConfig, compose, subarray_report

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_TARGET_NOT_REACHED = 2


class InputError(Exception):
    """Malformed configuration, design document or argument."""


# ---------------------------------------------------------------------------
# document handling


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _check_schema(doc: dict, path: str) -> None:
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise InputError(f"{path}: expected a document with schema: {SCHEMA_VERSION}")


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise InputError(f"{path}: missing required field '{key}'")
    return doc[key]


def _positive(doc: dict, key: str, path: str, default=None) -> float:
    value = doc.get(key, default)
    if value is None:
        raise InputError(f"{path}: missing required field '{key}'")
    value = float(value)
    if not value > 0:
        raise InputError(f"{path}: field '{key}' must be positive, got {value}")
    return value


def _direction_from(doc: dict, path: str) -> Direction:
    pair = doc.get("evaluation_direction_deg", [90.0, 0.0])
    try:
        theta_deg, phi_deg = (float(v) for v in pair)
        return Direction(math.radians(theta_deg), math.radians(phi_deg))
    except (TypeError, ValueError) as exc:
        raise InputError(
            f"{path}: evaluation_direction_deg must be [theta_deg, phi_deg]: {exc}"
        ) from exc


def _json_ready(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats."""
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [_json_ready(obj.real), _json_ready(obj.imag)]
    return obj


def write_json(path: str, doc: dict) -> None:
    text = json.dumps(_json_ready(doc), indent=2, sort_keys=True) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_run_config(path: str):
    """Parse a run configuration into (DeConfig, n_elements, extras dict)."""
    doc = _load_json(path)
    _check_schema(doc, path)
    wavelength = _positive(doc, "wavelength_mm", path) * 1e-3
    rho_rel = _positive(doc, "wire_radius_over_lambda", path, default=5e-4)
    sigma = _positive(doc, "conductivity_s_per_m", path, default=5.8e7)
    z_ref = _positive(doc, "z_ref_ohms", path, default=50.0)
    n_elements = int(_require(doc, "n_elements", path))
    if n_elements < 1:
        raise InputError(f"{path}: n_elements must be >= 1")
    direction = _direction_from(doc, path)

    de = doc.get("de", {})
    cfg = DeConfig(
        population=int(de.get("population", 150)),
        crossover=float(de.get("crossover", 0.9)),
        mutation=float(de.get("mutation", 0.8)),
        max_iterations=int(de.get("max_iterations", 250)),
        seed=int(de.get("seed", 1)),
        target_realized_gain_dbi=float(de.get("target_realized_gain_dbi", 9.16)),
        wavelength=wavelength,
        wire_radius=rho_rel * wavelength,
        conductivity=sigma,
        z_ref=z_ref,
        direction=direction,
    )
    bounds = doc.get("bounds")
    if bounds is not None:
        cfg.bounds = _bounds_from_doc(bounds, n_elements, wavelength, path)
    try:
        cfg.validate(n_elements)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return cfg, n_elements, doc


def _bounds_from_doc(spec: dict, n: int, wavelength: float, path: str) -> np.ndarray:
    def pair(key, default, scale=1.0):
        lo, hi = spec.get(key, default)
        lo, hi = float(lo) * scale, float(hi) * scale
        if not lo < hi:
            raise InputError(f"{path}: bounds field '{key}' needs lo < hi")
        return lo, hi

    p_lo, p_hi = pair("position_lambda", (-0.6, 0.6), wavelength)
    l_lo, l_hi = pair("length_lambda", (0.35, 0.5), wavelength)
    a_lo, a_hi = pair("amplitude", (0.05, 1.0))
    f_lo, f_hi = pair("phase_deg", (-180.0, 180.0), math.pi / 180.0)
    lo = np.concatenate([np.full(n, p_lo), np.full(n, l_lo),
                         np.full(n - 1, a_lo), np.full(n - 1, f_lo)])
    hi = np.concatenate([np.full(n, p_hi), np.full(n, l_hi),
                         np.full(n - 1, a_hi), np.full(n - 1, f_hi)])
    return np.column_stack([lo, hi])


def load_design(path: str):
    """Parse a design document into (DipoleArray, Excitation, z_ref, direction).

    Result documents produced by `optimize` embed a design under the
    "design" key and are accepted directly.
    """
    doc = _load_json(path)
    _check_schema(doc, path)
    if "design" in doc and "elements" not in doc:
        doc = doc["design"]
        _check_schema(doc, path + "#design")
    wavelength = _positive(doc, "wavelength_mm", path) * 1e-3
    rho = _positive(doc, "wire_radius_over_lambda", path, default=5e-4) * wavelength
    sigma = _positive(doc, "conductivity_s_per_m", path, default=5.8e7)
    z_ref = _positive(doc, "z_ref_ohms", path, default=50.0)
    elements = _require(doc, "elements", path)
    if not isinstance(elements, list) or not elements:
        raise InputError(f"{path}: 'elements' must be a non-empty list")
    try:
        positions = np.array([float(e["position_mm"]) for e in elements]) * 1e-3
        lengths = np.array([float(e["length_lambda"]) for e in elements]) * wavelength
        amplitudes = np.array([float(e["amplitude"]) for e in elements])
        phases = np.deg2rad([float(e["phase_deg"]) for e in elements])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed element entry: {exc}") from exc
    direction = _direction_from(doc, path)
    try:
        array = DipoleArray(wavelength, positions, lengths, rho, sigma)
        excitation = Excitation(currents=amplitudes * np.exp(1j * phases))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return array, excitation, z_ref, direction


def design_doc(array: DipoleArray, excitation: Excitation, z_ref: float,
               direction: Direction) -> dict:
    lam = array.wavelength
    return {
        "schema": SCHEMA_VERSION,
        "wavelength_mm": lam * 1e3,
        "wire_radius_over_lambda": array.wire_radius / lam,
        "conductivity_s_per_m": array.conductivity,
        "z_ref_ohms": z_ref,
        "evaluation_direction_deg": [math.degrees(direction.theta),
                                     math.degrees(direction.phi)],
        "elements": [
            {
                "position_mm": float(x) * 1e3,
                "length_lambda": float(l) / lam,
                "amplitude": float(abs(c)),
                "phase_deg": float(np.angle(c, deg=True)),
            }
            for x, l, c in zip(array.positions, array.lengths, excitation.currents)
        ],
    }


def report_doc(report: RadiationReport) -> dict:
    return {
        "direction_deg": [math.degrees(report.direction.theta),
                          math.degrees(report.direction.phi)],
        "directivity_dbi": report.directivity_dbi,
        "gain_dbi": report.gain_dbi,
        "realized_gain_dbi": report.realized_gain_dbi,
        "radiation_efficiency": report.radiation_efficiency,
        "mismatch_efficiency": report.mismatch_efficiency,
        "total_efficiency": report.total_efficiency,
        "active_reflection": [[c.real, c.imag] for c in report.active_reflection],
        "p_rad_w": report.p_rad,
        "p_loss_w": report.p_loss,
        "p_in_w": report.p_in,
        "diagnostics": list(report.diagnostics),
    }


# ---------------------------------------------------------------------------
# CSV


PATTERN_HEADER = "angle_deg,directivity_dBi,gain_dBi,realized_gain_dBi"


def write_pattern_csv(path: str, rows) -> None:
    lines = [PATTERN_HEADER]
    for angle, d, g, rg in rows:
        lines.append(f"{_csv_num(angle)},{_csv_num(d)},{_csv_num(g)},{_csv_num(rg)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_pattern_csv(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != PATTERN_HEADER:
        raise InputError(f"{path}: unexpected pattern CSV header")
    return [tuple(float(tok) for tok in line.split(",")) for line in lines[1:]]


def _csv_num(value: float) -> str:
    return repr(float(value))


def write_trace_csv(path: str, trace) -> None:
    lines = ["iteration,best_cost"]
    for iteration, best_cost in trace:
        lines.append(f"{iteration},{_csv_num(best_cost)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _pattern_rows(array, excitation, z_ref, plane, samples):
    """Angle-resolved directivity/gain/realized gain columns in dB."""
    net = build_network(array, z_ref)
    cut = pattern_cut(array, excitation, plane, samples)
    # powers and mismatch efficiency do not depend on the cut angle
    ref = realized_gain(array, net, excitation, END_FIRE)
    e_ref = ref.mismatch_efficiency
    rows = []
    for angle, u in cut:
        d_lin = 4.0 * math.pi * u / ref.p_rad
        g_lin = 4.0 * math.pi * u / ref.p_in
        d_dbi = 10.0 * math.log10(d_lin) if d_lin > 0 else float("-inf")
        g_dbi = 10.0 * math.log10(g_lin) if g_lin > 0 else float("-inf")
        rg = g_dbi + 10.0 * math.log10(e_ref) if e_ref > 0 else float("nan")
        rows.append((math.degrees(angle), d_dbi, g_dbi, rg))
    return rows


# ---------------------------------------------------------------------------
# subcommands


def cmd_optimize(args) -> int:
    cfg, n_elements, _ = load_run_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    result = optimize(cfg, n_elements)
    array, excitation, feasible = decode(result.best_genome, cfg)
    doc = {
        "schema": SCHEMA_VERSION,
        "reached_target": result.best_cost == 0.0,
        "best_cost": result.best_cost,
        "iterations_run": result.iterations_run,
        "seed": cfg.seed,
        "cost_trace": [[it, c] for it, c in result.cost_trace],
    }
    if feasible:
        doc["design"] = design_doc(array, excitation, cfg.z_ref, cfg.direction)
    if result.achieved_report is not None:
        doc["report"] = report_doc(result.achieved_report)
    write_json(args.out, doc)
    write_trace_csv(_sibling(args.out, ".trace.csv"), result.cost_trace)
    status = "reached target" if doc["reached_target"] else "target not reached"
    print(f"{status}: best cost {result.best_cost:.6g} after "
          f"{result.iterations_run} iterations -> {args.out}")
    return EXIT_OK if doc["reached_target"] else EXIT_TARGET_NOT_REACHED


def cmd_evaluate(args) -> int:
    array, excitation, z_ref, direction = load_design(args.design)
    net = build_network(array, z_ref)
    report = realized_gain(array, net, excitation, direction)
    doc = {"schema": SCHEMA_VERSION, "report": report_doc(report)}
    if args.oracle:
        p_quad = quadrature_radiated_power(array, excitation)
        doc["oracle"] = {
            "p_rad_quadrature_w": p_quad,
            "p_rad_impedance_w": report.p_rad,
            "relative_discrepancy": abs(p_quad - report.p_rad) / abs(p_quad),
        }
    print(json.dumps(_json_ready(doc), indent=2, sort_keys=True))
    if args.out:
        write_json(args.out, doc)
    return EXIT_OK


def cmd_pattern(args) -> int:
    array, excitation, z_ref, _ = load_design(args.design)
    if args.samples < 2:
        raise InputError(f"samples must be >= 2, got {args.samples}")
    rows = _pattern_rows(array, excitation, z_ref, args.plane, args.samples)
    try:
        write_pattern_csv(args.out, rows)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(rows)} samples -> {args.out}")
    return EXIT_OK


def cmd_subarray(args) -> int:
    array, excitation, z_ref, direction = load_design(args.design)
    if args.groups < 1:
        raise InputError(f"groups must be >= 1, got {args.groups}")
    if args.gap <= 0:
        raise InputError(f"gap must be positive, got {args.gap}")
    cfg = SubarrayConfig(unit_array=array, unit_excitation=excitation,
                         groups=args.groups, group_gap=args.gap * array.wavelength)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = subarray_report(cfg, z_ref, direction)
        comp_array, comp_excitation = compose(cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    doc = {
        "schema": SCHEMA_VERSION,
        "groups": args.groups,
        "gap_lambda": args.gap,
        "scaled_power_route": report_doc(report.approximate),
        "full_matrix_route": report_doc(report.full),
        "p_in_scaled_w": report.p_in_scaled,
        "p_in_full_w": report.p_in_full,
        "p_in_relative_error": report.p_in_relative_error,
        "gap_warning": report.gap_warning,
    }
    write_json(args.out, doc)
    rows = _pattern_rows(comp_array, comp_excitation, z_ref, "azimuth", args.samples)
    write_pattern_csv(_sibling(args.out, ".pattern.csv"), rows)
    print(f"composite realized gain {report.full.realized_gain_dbi:.3f} dB "
          f"(scaled route {report.approximate.realized_gain_dbi:.3f} dB) -> {args.out}")
    return EXIT_OK


def _comparison_rows(cfg: DeConfig, n: int, array, excitation, z_ref):
    """The comparison configurations, each as (name, array, excitation, direction, note)."""
    lam = cfg.wavelength
    rho = cfg.resolved_wire_radius()
    sigma = cfg.conductivity
    k = 2.0 * math.pi / lam
    end_fire = Direction(math.pi / 2, 0.0)
    broadside = Direction(math.pi / 2, math.pi / 2)

    half = np.full(n, 0.5 * lam)
    ula_positions = (np.arange(n) - (n - 1) / 2) * 0.5 * lam
    rows = []

    rows.append(("optimized", array, excitation, end_fire,
                 "optimized design as provided"))
    rows.append(("config_1",
                 DipoleArray(lam, array.positions, half, rho, sigma),
                 excitation, end_fire,
                 "optimized positions and currents, all lengths held at 0.5 wavelengths"))
    rows.append(("config_2",
                 DipoleArray(lam, ula_positions, array.lengths, rho, sigma),
                 excitation, end_fire,
                 "uniform 0.5 wavelength spacing, optimized lengths and currents"))
    ula = DipoleArray(lam, ula_positions, half, rho, sigma)
    rows.append(("ula_broadside", ula, Excitation(currents=np.ones(n)), broadside,
                 "half-wave ULA, uniform in-phase currents, broadside"))
    rows.append(("ula_end_fire", ula,
                 Excitation(currents=np.exp(1j * k * ula_positions)), end_fire,
                 "half-wave ULA phased for end-fire"))
    th_positions = (np.arange(n) - (n - 1) / 2) * 0.35 * lam
    th_array = DipoleArray(lam, th_positions, half, rho, sigma)
    th_exc = max_directivity_excitation(build_network(th_array, z_ref), end_fire, th_array)
    rows.append(("max_directivity_0p35", th_array, th_exc, end_fire,
                 "uniform 0.35 wavelength spacing, maximum-directivity currents"))
    return rows


def cmd_compare(args) -> int:
    cfg, n, _ = load_run_config(args.config)
    if not args.design:
        raise InputError("compare needs --design pointing at the optimized design")
    array, excitation, z_ref, _ = load_design(args.design)
    if array.n_elements != n:
        raise InputError(f"design has {array.n_elements} elements, config says {n}")

    rows_out = []
    for name, row_array, row_exc, direction, note in \
            _comparison_rows(cfg, n, array, excitation, z_ref):
        net = build_network(row_array, z_ref)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            report = realized_gain(row_array, net, row_exc, direction)
            p_quad = quadrature_radiated_power(row_array, row_exc)
        rows_out.append({
            "name": name,
            "note": note,
            "realized_gain_dbi": report.realized_gain_dbi,
            "total_efficiency_percent": 100.0 * report.total_efficiency,
            "gain_dbi": report.gain_dbi,
            "directivity_dbi": report.directivity_dbi,
            "direction_deg": [math.degrees(direction.theta), math.degrees(direction.phi)],
            "oracle_relative_discrepancy": abs(p_quad - report.p_rad) / abs(p_quad),
        })

    doc = {"schema": SCHEMA_VERSION, "rows": rows_out}
    write_json(args.out, doc)

    header = f"{'configuration':<22} {'RG (dB)':>9} {'tot eff %':>10} {'D (dBi)':>9} {'oracle':>9}"
    print(header)
    print("-" * len(header))
    for row in rows_out:
        rg = row["realized_gain_dbi"]
        rg_text = f"{rg:9.2f}" if math.isfinite(rg) else "      nan"
        print(f"{row['name']:<22} {rg_text} {row['total_efficiency_percent']:10.2f} "
              f"{row['directivity_dbi']:9.2f} {row['oracle_relative_discrepancy']:9.2e}")
    return EXIT_OK


def _sibling(path: str, suffix: str) -> str:
    return (path[:-5] if path.endswith(".json") else path) + suffix


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as input errors (exit 1)."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="superdir",
        description="Design and evaluate super-directive linear dipole arrays.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the realized-gain DE optimization")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="result document path")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="evaluate a fixed design")
    p.add_argument("--design", required=True, help="design document JSON")
    p.add_argument("--out", default=None, help="also write the report here")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check radiated power against the sphere quadrature")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pattern", help="export an angle cut as CSV")
    p.add_argument("--design", required=True)
    p.add_argument("--plane", choices=("azimuth", "elevation"), default="azimuth")
    p.add_argument("--samples", type=int, default=361)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("subarray", help="compose and evaluate a subarray configuration")
    p.add_argument("--design", required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--gap", type=float, required=True,
                   help="edge-to-edge group gap in wavelengths")
    p.add_argument("--samples", type=int, default=361)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_subarray)

    p = sub.add_parser("compare", help="tabulate the comparison configurations")
    p.add_argument("--config", required=True)
    p.add_argument("--design", default=None, help="optimized design document")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
