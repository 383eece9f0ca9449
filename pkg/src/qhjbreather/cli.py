"""Command-line driver.

Every subcommand reads one INI file (``--config``) whose sections hold the
physical units, the breather and one block of parameters per subcommand.
Individual keys can be overridden with ``--set section.key=value``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BreatherError, ConfigError, DiagnosticsError
from .evolve import RadialGrid, antinode_radius, mode_period, run_diagnostics, run_periods
from .fields import BreatherSpec, evaluator, quantization_check
from .kinematics import Boost, PhysParams, SpacetimePoint, boost_for_momentum
from .specfun import ModeIndex
from .verify import (
    StencilConfig,
    average_energy,
    average_energy_spatial,
    boundary_condition_check,
    far_field_spectrum,
    kg_residual,
    qhj_residual,
)

log = logging.getLogger("qhjbreather")

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "units": {"system": "natural", "m": "1", "c": "1", "hbar": "1"},
    "breather": {"alpha": "0.5", "l": "0", "n": "0", "v": "0", "train_period": "", "truncation": "64"},
    "sample": {
        "field": "psi",
        "t": "0, 1, 3",
        "x": "-2, 2, 5",
        "y": "0, 0, 1",
        "z": "0, 0, 1",
        "format": "csv",
        "output": "sample.csv",
    },
    "verify": {
        "field": "psi",
        "points": "random",
        "n_points": "20",
        "seed": "20240601",
        "r_min": "0.2",
        "r_max": "10",
        "h": "0.02",
        "levels": "3",
        "order_band": "1.8, 2.2",
        "control": "none",
        "output": "verify.json",
    },
    "quantize": {
        "d": "2pi",
        "p_min": "0.5",
        "p_max": "3.5",
        "p_count": "61",
        "h": "0.01",
        "tol": "1e-9",
        "t": "0",
        "y": "0",
        "z": "0",
        "format": "csv",
        "output": "quantize.csv",
    },
    "evolve": {
        "R": "",
        "N": "1024",
        "cfl": "0.5",
        "periods": "20",
        "perturbation": "1",
        "probe_radius": "1",
        "record_every": "1",
        "output": "evolve.csv",
    },
    "spectrum": {
        "x": "50",
        "y": "0",
        "z": "0",
        "n_periods": "16",
        "samples_per_period": "64",
        "output": "spectrum.json",
    },
    "average-energy": {
        "x": "0.7",
        "y": "0",
        "z": "0",
        "t0": "0",
        "nodes": "256",
        "average": "time",
        "radius": "5",
        "output": "average_energy.json",
    },
}

COMMANDS = {
    "sample": "tabulate psi or S on a (t, x, y, z) grid",
    "verify": "finite-difference residual convergence of psi or S",
    "quantize": "scan train momenta for periodic boundary conditions",
    "evolve": "leapfrog evolution of the spherical breather mode",
    "spectrum": "FFT of S + m c^2 t at a fixed position",
    "average-energy": "average of -dS/dt over one period or a ball",
}


# -- configuration -----------------------------------------------------------

_PI_NUMBER = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


def parse_number(text: str) -> float:
    """Float, optionally written as a multiple of pi (``2pi``, ``0.5*pi``)."""
    m = _PI_NUMBER.match(text)
    try:
        if m:
            factor = m.group(1)
            value = (float(factor) if factor not in ("", "+", "-") else float(factor + "1")) * math.pi
        else:
            value = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"non-finite value: {text!r}")
    return value


def parse_complex(text: str) -> complex:
    try:
        value = complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConfigError(f"non-finite value: {text!r}")
    return value


def parse_int(text: str) -> int:
    value = parse_number(text)
    if not value.is_integer():
        raise ConfigError(f"not an integer: {text!r}")
    return int(value)


def parse_list(text: str) -> list[float]:
    return [parse_number(part) for part in text.split(",") if part.strip()]


def parse_range(text: str) -> np.ndarray:
    """``start, stop, count`` as an inclusive linspace."""
    parts = parse_list(text)
    if len(parts) != 3 or not float(parts[2]).is_integer() or parts[2] < 1:
        raise ConfigError(f"expected 'start, stop, count', got {text!r}")
    return np.linspace(parts[0], parts[1], int(parts[2]))


def load_config(path: str | None, overrides: list[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str
    cfg.read_dict(DEFAULTS)
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().rpartition(".")
        if not sep or not dot:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if not cfg.has_section(section):
            raise ConfigError(f"unknown config section {section!r}")
        cfg.set(section, option, value.strip())
    return cfg


def params_from(cfg) -> PhysParams:
    units = cfg["units"]
    system = units["system"].strip()
    if system == "natural":
        return PhysParams()
    if system == "explicit":
        return PhysParams(parse_number(units["m"]), parse_number(units["c"]), parse_number(units["hbar"]))
    raise ConfigError(f"units.system must be 'natural' or 'explicit', got {system!r}")


def spec_from(cfg, **changes) -> BreatherSpec:
    b = cfg["breather"]
    period = b["train_period"].strip()
    fields = dict(
        alpha=parse_complex(b["alpha"]),
        mode=ModeIndex(parse_int(b["l"]), parse_int(b["n"])),
        boost=Boost(parse_number(b["v"])),
        train_period=parse_number(period) if period else None,
        truncation=parse_int(b["truncation"]),
    )
    fields.update(changes)
    return BreatherSpec(**fields)


# -- serialisation -----------------------------------------------------------


def fmt(value) -> str:
    """17 significant digits, enough to round-trip any double."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(_jsonable(body), indent=2) + "\n"


def write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def _records(header, rows):
    return [dict(zip(header, row)) for row in rows]


def _write_table(path, fmt_name, header, rows, **extra):
    if fmt_name == "csv":
        write_text(path, render_csv(header, rows))
    elif fmt_name == "json":
        write_text(path, render_json({"columns": header, "rows": _records(header, rows), **extra}))
    else:
        raise ConfigError(f"output format must be csv or json, got {fmt_name!r}")


# -- subcommands -------------------------------------------------------------


def cmd_sample(cfg, output) -> int:
    params = params_from(cfg)
    sec = cfg["sample"]
    spec = spec_from(cfg)
    fn = evaluator(sec["field"].strip(), spec, params)
    grids = [parse_range(sec[axis]) for axis in ("t", "x", "y", "z")]
    rows = []
    for t in grids[0]:
        for x in grids[1]:
            for y in grids[2]:
                for z in grids[3]:
                    value = fn(SpacetimePoint(float(t), float(x), float(y), float(z)))
                    rows.append([t, x, y, z, value.real, value.imag])
    header = ["t", "x", "y", "z", "re", "im"]
    _write_table(output or sec["output"], sec["format"].strip(), header, rows, field=sec["field"].strip())
    return EXIT_OK


def verify_points(sec) -> list[SpacetimePoint]:
    """Explicit ``t x y z; ...`` list, or seeded random events with r in [r_min, r_max]."""
    mode = sec["points"].strip()
    if mode == "random":
        count = parse_int(sec["n_points"])
        r_min, r_max = parse_number(sec["r_min"]), parse_number(sec["r_max"])
        if count < 1:
            raise ConfigError("verify needs a non-empty point set")
        if not 0 <= r_min <= r_max:
            raise ConfigError("need 0 <= r_min <= r_max")
        return random_points(count, r_min, r_max, parse_int(sec["seed"]))
    pts = []
    for chunk in mode.split(";"):
        if not chunk.strip():
            continue
        coords = [parse_number(c) for c in chunk.split()]
        if len(coords) != 4:
            raise ConfigError(f"each point needs 't x y z', got {chunk!r}")
        pts.append(SpacetimePoint(*coords))
    if not pts:
        raise ConfigError("verify needs a non-empty point set")
    return pts


def random_points(count: int, r_min: float, r_max: float, seed: int) -> list[SpacetimePoint]:
    """Events with isotropic direction, uniform radius and ``t`` in ``[0, 2 pi)``."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        r = rng.uniform(r_min, r_max)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        t = rng.uniform(0.0, 2 * math.pi)
        x, y, z = (r * direction).tolist()
        pts.append(SpacetimePoint(float(t), x, y, z))
    return pts


CONTROLS = {
    "none": None,
    "sqrt3": lambda params: 1.7 * params.kappa,
    "kappa": lambda params: math.sqrt(3.0) * 1.1 * params.kappa,
}


def _report_dict(rep):
    return {
        "max_abs": rep.max_abs,
        "l2": rep.l2,
        "per_level": [{"h": h, "max_abs": m} for h, m in rep.per_level],
        "orders": list(rep.orders),
        "convergence_order": rep.convergence_order,
    }


def cmd_verify(cfg, output) -> int:
    params = params_from(cfg)
    sec = cfg["verify"]
    spec = spec_from(cfg)
    kind = sec["field"].strip()
    control = sec["control"].strip()
    if control not in CONTROLS:
        raise ConfigError(f"verify.control must be one of {sorted(CONTROLS)}")
    kwargs = {}
    if CONTROLS[control] is not None:
        if spec.boost.v != 0.0 or kind not in ("psi", "action"):
            raise ConfigError("negative controls apply to rest-frame psi or action fields only")
        kwargs["radial_wavenumber"] = CONTROLS[control](params)
    fn = evaluator(kind, spec, params, **kwargs)
    check = qhj_residual if kind.startswith("action") else kg_residual
    stencil = StencilConfig(parse_number(sec["h"]), parse_int(sec["levels"]))
    low, high = parse_list(sec["order_band"])
    pts = verify_points(sec)

    entries = []
    good = []
    ok = True
    for p in pts:
        entry = {"t": p.t, "x": p.x, "y": p.y, "z": p.z}
        try:
            rep = check(fn, p, stencil, params)
        except BreatherError as exc:
            entry.update(flagged=True, error=str(exc))
            ok = False
        else:
            entry.update(_report_dict(rep), flagged=not rep.orders_within(low, high))
            ok &= rep.orders_within(low, high)
            good.append(p)
        entries.append(entry)
    aggregate = None
    if good:
        agg = check(fn, good, stencil, params)
        aggregate = _report_dict(agg)
        ok &= agg.orders_within(low, high)
    payload = {
        "command": "verify",
        "field": kind,
        "equation": "qhj" if check is qhj_residual else "klein-gordon",
        "control": control,
        "order_band": [low, high],
        "passed": ok,
        "aggregate": aggregate,
        "points": entries,
    }
    write_text(output or sec["output"], render_json(payload))
    return EXIT_OK if ok else EXIT_FAIL


def quantize_scan(cfg) -> tuple[list[str], list[list]]:
    params = params_from(cfg)
    sec = cfg["quantize"]
    d = parse_number(sec["d"])
    p_min, p_max, count = parse_number(sec["p_min"]), parse_number(sec["p_max"]), parse_int(sec["p_count"])
    if not (0 < p_min <= p_max) or count < 1 or d <= 0:
        raise ConfigError("need 0 < p_min <= p_max, p_count >= 1 and d > 0")
    tol = parse_number(sec["tol"])
    stencil = StencilConfig(parse_number(sec["h"]))
    at = SpacetimePoint(parse_number(sec["t"]), 0.0, parse_number(sec["y"]), parse_number(sec["z"]))
    rows = []
    for p in np.linspace(p_min, p_max, count):
        p = float(p)
        q = quantization_check(d, p, params, tol)
        spec = spec_from(cfg, boost=boost_for_momentum(p, params), train_period=d, mode=ModeIndex(0, 0))
        dt_m, dx_m = boundary_condition_check(evaluator("action_train", spec, params), d, at, stencil, params)
        rows.append([p, q.mismatch, dt_m, dx_m, q.n_exact])
    return ["p", "mismatch", "dt_mismatch", "dx_mismatch", "n"], rows


def cmd_quantize(cfg, output) -> int:
    header, rows = quantize_scan(cfg)
    sec = cfg["quantize"]
    _write_table(output or sec["output"], sec["format"].strip(), header, rows)
    return EXIT_OK


def _summary_path(path: str) -> str:
    p = Path(path)
    return str(p.with_suffix(".json")) if p.suffix != ".json" else str(p.with_name(p.stem + "_summary.json"))


def cmd_evolve(cfg, output) -> int:
    params = params_from(cfg)
    sec = cfg["evolve"]
    spec = spec_from(cfg)
    radius = sec["R"].strip()
    R = parse_number(radius) if radius else antinode_radius(params)
    grid = RadialGrid.from_cfl(R, parse_int(sec["N"]), parse_number(sec["cfl"]), params)
    final, history = run_periods(
        spec,
        grid,
        params,
        n_periods=parse_number(sec["periods"]),
        perturbation=parse_number(sec["perturbation"]),
        probe_radius=parse_number(sec["probe_radius"]) / params.kappa,
        record_every=parse_int(sec["record_every"]),
    )
    rows = [
        [s, t, cn, en, pr.real, pr.imag]
        for s, t, cn, en, pr in zip(history.steps, history.times, history.core_norm, history.energy, history.probe)
    ]
    path = output or sec["output"]
    write_text(path, render_csv(["step", "time", "core_norm", "discrete_energy", "probe_re", "probe_im"], rows))
    summary = {
        "command": "evolve",
        "grid": {"R": grid.R, "N": grid.N, "dr": grid.dr, "dt": grid.dt, "cfl": grid.cfl(params)},
        "steps": final.step_index,
        "final_time": final.time,
        "expected_frequency": 2 * params.omega0,
    }
    keys = ("measured_frequency", "frequency_bin", "core_norm_drift", "energy_drift", "profile_error")
    try:
        diag = run_diagnostics(history)
    except DiagnosticsError as exc:
        # the trajectory is still written; only the summary statistics are unavailable
        log.warning("diagnostics skipped: %s", exc)
        summary.update(dict.fromkeys(keys), diagnostics_error=str(exc))
    else:
        summary.update({k: getattr(diag, k) for k in keys})
    write_text(_summary_path(path), render_json(summary))
    return EXIT_OK


def _spatial_point(sec, t_key=None) -> SpacetimePoint:
    t = parse_number(sec[t_key]) if t_key else 0.0
    return SpacetimePoint(t, parse_number(sec["x"]), parse_number(sec["y"]), parse_number(sec["z"]))


def cmd_spectrum(cfg, output) -> int:
    params = params_from(cfg)
    sec = cfg["spectrum"]
    fn = evaluator("action", spec_from(cfg), params)
    at = _spatial_point(sec)
    rep = far_field_spectrum(fn, at, params, parse_int(sec["n_periods"]), parse_int(sec["samples_per_period"]))
    payload = {
        "command": "spectrum",
        "position": [at.x, at.y, at.z],
        "rest_frequency": params.omega0,
        "peak_frequency": rep.peak_frequency,
        "harmonic_ratio": rep.harmonic_ratio,
        "bin_width": rep.bin_width,
        "zero_signal": rep.zero_signal,
    }
    write_text(output or sec["output"], render_json(payload))
    return EXIT_OK


def cmd_average_energy(cfg, output) -> int:
    params = params_from(cfg)
    sec = cfg["average-energy"]
    fn = evaluator("action", spec_from(cfg), params)
    kind = sec["average"].strip()
    at = _spatial_point(sec, "t0")
    if kind == "time":
        value = average_energy(fn, at, params, parse_int(sec["nodes"]))
    elif kind == "space":
        value = average_energy_spatial(fn, at.t, parse_number(sec["radius"]), params, parse_int(sec["nodes"]))
    else:
        raise ConfigError(f"average must be 'time' or 'space', got {kind!r}")
    payload = {
        "command": "average-energy",
        "average": kind,
        "position": [at.x, at.y, at.z],
        "t0": at.t,
        "rest_energy": params.rest_energy,
        "energy": value,
        "deviation": abs(value - params.rest_energy),
    }
    write_text(output or sec["output"], render_json(payload))
    return EXIT_OK


HANDLERS = {
    "sample": cmd_sample,
    "verify": cmd_verify,
    "quantize": cmd_quantize,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "average-energy": cmd_average_energy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhj-breather", description="Construct and verify relativistic breather solutions."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, summary in COMMANDS.items():
        p = sub.add_parser(name, help=summary, description=summary)
        p.add_argument("--config", help="INI file with [units], [breather] and [%s] sections" % name)
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a key")
        p.add_argument("--output", "-o", help="output path (overrides the config)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config, args.set)
        code = HANDLERS[args.command](cfg, args.output)
    except ConfigError as exc:
        print(f"qhj-breather {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BreatherError as exc:
        print(f"qhj-breather {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
