"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 physics error, 4 validation failure.
Warnings and errors are written to stderr as one JSON object per line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from pathlib import Path

from .errors import PhysicsError, QuadratureError
from .io import dumps_json, parameter_report, rad_s_to_ev, spectrum_csv, spectrum_json
from .oracle import DEFAULT_SEED
from .quasistatics import check_quasistatic
from .scenario import (
    SWEEP_KINDS,
    ScenarioError,
    load_scenario,
    merge_segments,
    parse_grid,
    parse_quantity,
    preset_names,
    preset_path,
)
from .spectrum import SWEEP_AXES, compute_spectrum, derive_parameters, sweep
from .validation import FAULTS, TOLERANCE_PROFILES, validate_scenario

EXIT_OK, EXIT_INPUT, EXIT_PHYSICS, EXIT_VALIDATION = 0, 2, 3, 4

# |1 - 2n| below this leaves almost no emitter-mode interference
DEGENERACY_MARGIN = 0.02


class _InputError(Exception):
    pass


class _ValidationFailed(Exception):
    def __init__(self, failed):
        super().__init__("validation failed")
        self.failed = failed


def _diag(stream, level, message, **extra):
    record = {"level": level, "message": message}
    record.update(extra)
    stream.write(json.dumps(record, sort_keys=True) + "\n")


def _load(args):
    if args.scenario and args.preset:
        raise _InputError("give either --scenario or --preset, not both")
    if args.preset:
        return load_scenario(preset_path(args.preset))
    if not args.scenario:
        raise _InputError("a scenario is required (--scenario PATH or --preset NAME)")
    return load_scenario(args.scenario)


def _overrides(args, sf):
    overrides = dict(sf.overrides)
    if getattr(args, "overrides", None):
        try:
            doc = json.loads(Path(args.overrides).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise _InputError(f"cannot read overrides file: {exc}") from None
        expected = {"Omega": "rad/s", "g": "rad/s", "gamma_r": "1/s"}
        for key, unit in expected.items():
            if key in doc:
                entry = doc[key]
                if not isinstance(entry, dict) or entry.get("unit") != unit or not isinstance(entry.get("value"), (int, float)):
                    raise _InputError(f"override {key} must be {{'value': <number>, 'unit': '{unit}'}}")
                overrides[key] = float(entry["value"])
    return overrides


def _grid(args, sf):
    if args.grid:
        return merge_segments([parse_grid(args.grid)])
    grid = sf.omega_grid()
    if grid is None:
        raise _InputError("no frequency grid: pass --grid start,stop,n (eV) or add a grid section")
    return grid


def _advisories(sf, params, stream):
    scenario = sf.scenario
    n = scenario.qd.n_excitation
    if abs(1.0 - 2.0 * n) < DEGENERACY_MARGIN:
        _diag(stream, "warning", f"n={n} is close to 1/2; the interference strength scales with 1 - 2n",
              category="degeneracy")
    report = parameter_report(scenario, params)
    stark = report["stark"]
    if stark is not None and not stark["admissible"]:
        _diag(stream, "warning", "quadratic Stark shift not negligible at the single-quantum field",
              category="stark", shift_eV=stark["shift_eV"])
    return report


def _emit(text, out, stdout):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)


def _render(spec, fmt, normalize):
    return spectrum_json(spec, normalize) if fmt == "json" else spectrum_csv(spec, normalize)


def cmd_spectrum(args, stdout, stderr):
    sf = _load(args)
    grid = _grid(args, sf)
    overrides = _overrides(args, sf)
    params = derive_parameters(sf.scenario, overrides)
    check_quasistatic(sf.scenario.geom, params.Omega)
    _advisories(sf, params, stderr)
    spec = compute_spectrum(sf.scenario, grid, overrides)
    _emit(_render(spec, args.format, args.normalize), args.out, stdout)
    return EXIT_OK


_DISPLAY = {"omega_a": ("eV", lambda v: float(rad_s_to_ev(v))), "r": ("nm", lambda v: v * 1e9)}


def _label(axis, value):
    if axis == "orientation":
        return str(value)
    unit, conv = _DISPLAY.get(axis, ("", lambda v: v))
    return f"{conv(value):.10g}{unit}"


def _sweep_values(args, sf):
    axis = args.axis or sf.sweep_axis
    if axis is None:
        raise _InputError("no sweep axis: pass --axis or add a sweep section")
    if axis not in SWEEP_AXES:
        raise _InputError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    if args.values:
        kind = SWEEP_KINDS[axis]
        values = []
        for token in args.values.split(","):
            token = token.strip()
            if axis == "orientation":
                values.append(token)
            elif kind is None:
                try:
                    values.append(float(token))
                except ValueError:
                    raise _InputError(f"sweep value {token!r} must be a plain number") from None
            else:
                values.append(parse_quantity(token, kind, "--values"))
    elif sf.sweep_axis == axis:
        values = list(sf.sweep_values)
    else:
        raise _InputError("no sweep values: pass --values or add a sweep section")
    if not values:
        raise _InputError("sweep values must be non-empty")
    return axis, values


def cmd_sweep(args, stdout, stderr):
    sf = _load(args)
    grid = _grid(args, sf)
    overrides = _overrides(args, sf)
    axis, values = _sweep_values(args, sf)
    _advisories(sf, derive_parameters(sf.scenario, overrides), stderr)
    spectra = sweep(sf.scenario, grid, axis, values, overrides=overrides, workers=args.workers)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for value, spec in zip(values, spectra):
        label = _label(axis, value)
        name = f"spectrum_{axis}_{label}.{args.format}"
        text = _render(spec, args.format, args.normalize)
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        entries.append(
            {
                "value": value if isinstance(value, str) else float(value),
                "label": label,
                "file": name,
                "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
            }
        )
    manifest = {"schema_version": 1, "axis": axis, "format": args.format, "entries": entries}
    (out / "manifest.json").write_text(dumps_json(manifest), encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_params(args, stdout, stderr):
    sf = _load(args)
    params = derive_parameters(sf.scenario, _overrides(args, sf))
    check_quasistatic(sf.scenario.geom, params.Omega)
    report = _advisories(sf, params, stderr)
    _emit(dumps_json(report), args.out, stdout)
    return EXIT_OK


def cmd_validate(args, stdout, stderr):
    sf = _load(args)
    report = validate_scenario(sf.scenario, args.profile, args.inject_fault, args.seed)
    _emit(dumps_json(report), args.out, stdout)
    if not report["passed"]:
        raise _ValidationFailed(report["failed"])
    return EXIT_OK


def cmd_presets(args, stdout, stderr):
    for name in preset_names():
        stdout.write(name + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tifano", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--scenario", help="path of a scenario YAML file")
        p.add_argument("--preset", help="name of a bundled scenario (see 'presets list')")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")

    def output_args(p):
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--grid", help="uniform grid 'start,stop,n' in eV, replacing the file's grid")
        p.add_argument("--normalize", action="store_true", help="divide sigma by its maximum")
        p.add_argument("--overrides", help="params JSON whose Omega, g, gamma_r replace derived values")

    p = sub.add_parser("spectrum", help="absorption spectrum on a frequency grid")
    scenario_args(p)
    output_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="one spectrum per value of a scenario parameter")
    scenario_args(p)
    output_args(p)
    p.add_argument("--axis", choices=SWEEP_AXES)
    p.add_argument("--values", help="comma-separated values with units where dimensioned, e.g. '8 nm,9 nm'")
    p.add_argument("--workers", type=int, default=None, help="evaluate sweep values in parallel")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("params", help="derived mode, coupling and damping parameters as JSON")
    scenario_args(p)
    p.add_argument("--out")
    p.add_argument("--overrides", help="params JSON whose Omega, g, gamma_r replace derived values")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("validate", help="compare closed forms against the brute-force oracles")
    scenario_args(p)
    p.add_argument("--out")
    p.add_argument("--profile", choices=sorted(TOLERANCE_PROFILES), default="default")
    p.add_argument(
        "--inject-fault",
        choices=sorted(FAULTS),
        default=None,
        help="test hook: " + "; ".join(f"{k}: {v}" for k, v in FAULTS.items()),
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="bundled scenarios")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    error, extra = None, {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args, stdout, stderr)
        except _ValidationFailed as exc:
            code, error, extra = EXIT_VALIDATION, str(exc), {"failed": exc.failed}
        except (ScenarioError, _InputError) as exc:
            code, error = EXIT_INPUT, str(exc)
        except (PhysicsError, QuadratureError) as exc:
            code, error = EXIT_PHYSICS, str(exc)
        except ValueError as exc:
            code, error = EXIT_INPUT, str(exc)
        except OSError as exc:
            code, error = EXIT_INPUT, f"I/O error: {exc}"
    seen = set()
    for w in caught:
        key = (w.category.__name__, str(w.message))
        if key not in seen:
            seen.add(key)
            _diag(stderr, "warning", str(w.message), category=w.category.__name__)
    # the error, when there is one, is always the last diagnostic line
    if error is not None:
        _diag(stderr, "error", error, exit_code=code, **extra)
    return code


if __name__ == "__main__":
    sys.exit(main())
