"""Command-line front end: JSON config in, CSV/JSON artifacts plus a manifest out.

Usage::

    chiralwgm <command> --config run.json --out results/ [--format csv|json] [--threads N]

Rates in configs are ordinary frequencies in MHz and are converted to rad/s
(× 2π·10⁶); tabulated axes are dimensionless (Δ/κ_0, κ/κ_0).  Exit status is
0 on success, 1 for configuration errors and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import atom as atom_mod
from . import chiral, devices, lindblad, wgm
from .errors import ChiralWGMError, ConfigError, DomainError, GridTooLarge, UnsupportedModel
from .io import write_json, write_table

MHZ = 2.0 * math.pi * 1e6
MAX_GRID = 10_000
MAX_AXES = 2
COMMANDS = ("mode", "overlap", "spectrum", "sweep", "diode", "circulator", "sprint", "validate")

# --- schemas -------------------------------------------------------------------

_RATE = {"type": "number", "minimum": 0}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["start", "stop", "points"],
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "points": {"type": "integer", "minimum": 0},
    },
}
_MODE_PROPS = {
    "n0": {"type": "number", "exclusiveMinimum": 1},
    "R_um": {"type": "number", "exclusiveMinimum": 0},
    "m": {"type": "integer", "minimum": 1},
    "p": {"type": "integer", "minimum": 0, "default": 0},
    "polarization": {"enum": ["TM", "TE"], "default": "TM"},
}
_SYSTEM_PROPS = {
    "g_MHz": _RATE,
    "gamma_MHz": _RATE,
    "kappa0_MHz": {"type": "number", "exclusiveMinimum": 0},
    "kappa_ext_MHz": _RATE,
    "h_MHz": {"type": "number", "default": 0.0},
    "alpha_sp_sq": {"type": "number", "minimum": 0, "maximum": 1, "default": 1.0},
    "model": {"enum": ["VSystem", "TwoLevelSigmaPlus", "LinearTwoLevel", "Atom"], "default": "VSystem"},
    "dipole_axis": {"enum": ["r", "phi"], "default": "r"},
    "atom": {"type": "string", "default": "Rb85_D2_F3_F4"},
    "B_T": {"type": "number", "default": 0.0},
    "solver": {"enum": ["master", "analytic"], "default": "master"},
    "n_max": {"type": "integer", "minimum": 1, "maximum": 6, "default": lindblad.DEFAULT_NMAX},
    "drive_scale": {"type": "number", "exclusiveMinimum": 0, "default": lindblad.DEFAULT_DRIVE},
}
_SWEEP_AXES = ["g_MHz", "gamma_MHz", "kappa0_MHz", "kappa_ext_MHz", "alpha_sp_sq"]
_DEVICE_RATES = ["g_MHz", "gamma_MHz", "kappa0_MHz"]


def _obj(props, required, extra=None):
    schema = {"type": "object", "additionalProperties": False, "properties": dict(props), "required": required}
    if extra:
        schema["properties"].update(extra)
    return schema


PARAM_SCHEMAS = {
    "mode": _obj(_MODE_PROPS, ["n0", "R_um", "m"], {
        "start_nm": {"type": "number", "default": -3000.0},
        "stop_nm": {"type": "number", "default": 500.0},
        "points": {"type": "integer", "minimum": 2, "maximum": 100_000, "default": 1401},
    }),
    "overlap": _obj(_MODE_PROPS, ["n0", "R_um", "m"], {
        "offsets_nm": {"type": "array", "items": {"type": "number", "minimum": 0}, "default": [0.0]},
    }),
    "spectrum": _obj(_SYSTEM_PROPS, ["g_MHz", "gamma_MHz", "kappa0_MHz", "kappa_ext_MHz"], {
        "delta_over_kappa0": _GRID,
    }),
    "sweep": _obj({k: v for k, v in _SYSTEM_PROPS.items() if k in _SWEEP_AXES}, [], {
        "axes": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "start", "stop", "points"],
                "properties": {
                    "name": {"enum": _SWEEP_AXES},
                    "start": {"type": "number"},
                    "stop": {"type": "number"},
                    "points": {"type": "integer", "minimum": 0},
                    "scale": {"enum": ["linear", "log"], "default": "linear"},
                },
            },
        },
    }),
    "diode": _obj({k: _SYSTEM_PROPS[k] for k in _DEVICE_RATES}, ["g_MHz", "gamma_MHz", "kappa0_MHz"], {
        "kappa_ext_MHz": _RATE,
        "g_cw_MHz": _RATE,
        "atom": {"type": "string"},
        "alpha_sm_sq": {"type": "number", "minimum": 0, "maximum": 1},
        "delta_over_kappa0": _GRID,
    }),
    "circulator": _obj({k: _SYSTEM_PROPS[k] for k in _DEVICE_RATES}, ["g_MHz", "gamma_MHz", "kappa0_MHz"], {
        "kappa_A_MHz": _RATE,
        "kappa_B_MHz": _RATE,
        "g_weak_MHz": {**_RATE, "default": 0.0},
        "spin": {"enum": [1, -1], "default": 1},
        "optimize": {"type": "boolean", "default": False},
    }),
    "sprint": _obj({k: _SYSTEM_PROPS[k] for k in _DEVICE_RATES}, ["g_MHz", "gamma_MHz", "kappa0_MHz"], {
        "kappa_ext_MHz": _RATE,
    }),
    "validate": _obj({}, [], {"samples": {"type": "integer", "minimum": 1, "maximum": 50, "default": 5}}),
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "params": {"type": "object"},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}},
        },
    },
}


def _fill_defaults(schema: dict, params: dict) -> dict:
    out = copy.deepcopy(params)
    for key, sub in schema.get("properties", {}).items():
        if key not in out and "default" in sub:
            out[key] = copy.deepcopy(sub["default"])
    if "axes" in out:
        out["axes"] = [
            _fill_defaults(schema["properties"]["axes"]["items"], axis) for axis in out["axes"]
        ]
    return out


def resolve_config(command: str, config: dict) -> dict:
    """Validate a config dict against the command schema and fill defaults."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
        if config.get("command", command) != command:
            raise ConfigError(f"config is for command {config['command']!r}, not {command!r}")
        params = config.get("params", {})
        jsonschema.validate(params, PARAM_SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"invalid config{' at ' + path if path else ''}: {exc.message}") from exc
    return {"command": command, "params": _fill_defaults(PARAM_SCHEMAS[command], params),
            "output": config.get("output", {})}


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


# --- helpers -------------------------------------------------------------------


def _grid(spec: dict) -> np.ndarray:
    return np.linspace(spec["start"], spec["stop"], spec["points"])


def _mode_spec(p: dict) -> wgm.ModeSpec:
    return wgm.ModeSpec(n0=p["n0"], R=p["R_um"] * 1e-6, m=p["m"], p=p["p"], polarization=p["polarization"])


def _system(p: dict) -> lindblad.SystemParams:
    return lindblad.SystemParams.from_sigma_plus(
        p["alpha_sp_sq"], g=p["g_MHz"] * MHZ, gamma=p["gamma_MHz"] * MHZ, kappa_0=p["kappa0_MHz"] * MHZ,
        kappa_ext=p["kappa_ext_MHz"] * MHZ, h=p["h_MHz"] * MHZ, B=p["B_T"],
    )


def _atom_model(p: dict):
    model = p["model"]
    if model == "VSystem":
        return atom_mod.v_system()
    if model == "TwoLevelSigmaPlus":
        return atom_mod.two_level_sigma_plus()
    if model == "LinearTwoLevel":
        return atom_mod.linear_two_level(p["dipole_axis"])
    presets = atom_mod.load_presets()
    if p["atom"] not in presets:
        raise ConfigError(f"unknown atom preset {p['atom']!r}; available: {sorted(presets)}")
    return atom_mod.atom_model(presets[p["atom"]], B=p["B_T"])


# --- commands ------------------------------------------------------------------


def cmd_mode(p, out, fmt, threads):
    sol = wgm.solve_resonance(_mode_spec(p))
    rows = wgm.radial_profile(sol, p["start_nm"], p["stop_nm"], p["points"])
    path = write_table(out / "mode_profile", wgm.PROFILE_COLUMNS, rows, fmt)
    ov = wgm.overlaps_at(sol, wgm.surface_radius(sol))
    results = {
        "k_phi_r_per_m": sol.k_phi_r, "f_p_m": sol.f_p_m, "residual": sol.residual,
        "wavelength_nm": 2 * math.pi / sol.k_phi_r * 1e9,
        "surface": {"ratio_Ephi_Er": ov.ratio_R, "alpha_sp_sq": abs(ov.alpha_sigma_plus) ** 2,
                    "alpha_sm_sq": abs(ov.alpha_sigma_minus) ** 2, "O": ov.O, "S_z_norm": ov.S_z_norm},
    }
    return [path], results


OVERLAP_COLUMNS = ("offset_nm", "abs_alpha_sp", "abs_alpha_pi", "abs_alpha_sm", "alpha_sp_sq", "O",
                   "S_z_norm", "ratio_Ephi_Er")


def cmd_overlap(p, out, fmt, threads):
    sol = wgm.solve_resonance(_mode_spec(p))
    rows = []
    for off in p["offsets_nm"]:
        r = wgm.surface_radius(sol) + off * 1e-9
        ov = wgm.overlaps_at(sol, r)
        rows.append([off, abs(ov.alpha_sigma_plus), abs(ov.alpha_pi), abs(ov.alpha_sigma_minus),
                     abs(ov.alpha_sigma_plus) ** 2, ov.O, ov.S_z_norm, ov.ratio_R])
    path = write_table(out / "overlap", OVERLAP_COLUMNS, rows, fmt)
    return [path], {"f_p_m": sol.f_p_m, "residual": sol.residual}


SPECTRUM_COLUMNS = ("delta_over_kappa0", "T_fwd", "R_fwd", "T_bwd", "R_bwd")


def cmd_spectrum(p, out, fmt, threads):
    params = _system(p)
    k0 = params.kappa_0
    if "delta_over_kappa0" in p:
        grid = _grid(p["delta_over_kappa0"])
    else:
        grid = lindblad.default_grid(params) / k0
    deltas = grid * k0
    if p["solver"] == "analytic":
        if p["model"] == "Atom":
            raise UnsupportedModel("the analytic solver covers VSystem, TwoLevelSigmaPlus and LinearTwoLevel")
        if params.h != 0:
            raise UnsupportedModel("the analytic models assume no mode-mode coupling (h = 0)")
        inp = chiral.AnalyticInput(g=params.g, gamma=params.gamma, kappa_0=k0, kappa_ext=params.kappa_ext,
                                   alpha_sp_sq=p["alpha_sp_sq"], model=p["model"], dipole_axis=p["dipole_axis"])
        tf, rf = chiral.analytic_spectrum(inp, deltas, "forward")
        tb, rb = chiral.analytic_spectrum(inp, deltas, "backward")
    else:
        atom = _atom_model(p)
        kw = dict(n_max=p["n_max"], drive_scale=p["drive_scale"], threads=threads)
        fwd = lindblad.spectrum(atom, params, deltas, "forward", **kw)
        bwd = lindblad.spectrum(atom, params, deltas, "backward", **kw)
        tf, rf, tb, rb = fwd.t, fwd.r, bwd.t, bwd.r
    rows = [[x, abs(a) ** 2, abs(b) ** 2, abs(c) ** 2, abs(d) ** 2] for x, a, b, c, d in zip(grid, tf, rf, tb, rb)]
    columns = SPECTRUM_COLUMNS
    if p["solver"] == "analytic":
        columns = SPECTRUM_COLUMNS + ("model",)
        rows = [r + [p["model"]] for r in rows]
    path = write_table(out / "spectrum", columns, rows, fmt)
    T = np.array([r[1] for r in rows])
    return [path], {"points": len(rows), "min_T_fwd": float(T.min()) if len(T) else None,
                    "manifest": lindblad.manifest(params, solver=p["solver"], model=p["model"])}


SWEEP_OBSERVABLES = ("T_plus", "T_minus", "beta_plus", "beta_minus")


def _axis_values(axis) -> np.ndarray:
    if axis["points"] == 0:
        return np.zeros(0)
    if axis["scale"] == "log":
        if axis["start"] <= 0 or axis["stop"] <= 0:
            raise ConfigError(f"log axis {axis['name']} needs positive bounds")
        return np.geomspace(axis["start"], axis["stop"], axis["points"])
    return np.linspace(axis["start"], axis["stop"], axis["points"])


def _axis_column(name: str) -> str:
    return name[:-4] + "_over_kappa0" if name.endswith("_MHz") else name


def cmd_sweep(p, out, fmt, threads):
    axes = p.get("axes", [])
    if len(axes) > MAX_AXES:
        raise GridTooLarge(f"at most {MAX_AXES} sweep axes are supported, got {len(axes)}")
    values = [_axis_values(a) for a in axes]
    size = int(np.prod([len(v) for v in values])) if values else 0
    if size > MAX_GRID:
        raise GridTooLarge(f"sweep grid has {size} points; the limit is {MAX_GRID}")
    names = [a["name"] for a in axes]
    base = {k: p[k] for k in _SWEEP_AXES if k in p}
    missing = [k for k in _SWEEP_AXES if k not in base and k not in names]
    if missing:
        raise ConfigError(f"sweep needs fixed values or axes for {missing}")
    columns = tuple(_axis_column(n) for n in names) + SWEEP_OBSERVABLES
    rows = []
    if values and size > 0:
        mesh = np.meshgrid(*values, indexing="ij")
        for idx in np.ndindex(*mesh[0].shape):
            q = dict(base)
            for name, grid in zip(names, mesh):
                q[name] = float(grid[idx])
            g, gamma, k0, ke = (q[k] * MHZ for k in ("g_MHz", "gamma_MHz", "kappa0_MHz", "kappa_ext_MHz"))
            if k0 <= 0:
                raise DomainError("kappa0 must be positive in a sweep")
            x = q["alpha_sp_sq"]
            t_plus, t_minus = chiral.resonator_transmission(g, gamma, k0, ke, x)
            beta = chiral.resonator_betas(g, gamma, k0, ke, x)
            axis_vals = [q[n] / q["kappa0_MHz"] if n.endswith("_MHz") else q[n] for n in names]
            rows.append(axis_vals + [t_plus ** 2, t_minus ** 2, beta.beta_plus, beta.beta_minus])
    path = write_table(out / "sweep", columns, rows, fmt)
    return [path], {"points": len(rows), "axes": names}


DIODE_COLUMNS = ("delta_over_kappa0", "T12", "T21")


def cmd_diode(p, out, fmt, threads):
    g, gamma, k0 = p["g_MHz"] * MHZ, p["gamma_MHz"] * MHZ, p["kappa0_MHz"] * MHZ
    ke = p.get("kappa_ext_MHz", p["kappa0_MHz"]) * MHZ
    if "g_cw_MHz" in p:
        g_cw = p["g_cw_MHz"] * MHZ
    elif "atom" in p:
        presets = atom_mod.load_presets()
        if p["atom"] not in presets:
            raise ConfigError(f"unknown atom preset {p['atom']!r}")
        g_cw = devices.g_cw_from_dipoles(g, presets[p["atom"]], p.get("alpha_sm_sq"))
    else:
        g_cw = 0.0
    grid = _grid(p["delta_over_kappa0"]) if "delta_over_kappa0" in p else np.linspace(-3 * g / k0, 3 * g / k0, 401)
    res = devices.diode(g, g_cw, gamma, k0, ke, grid * k0)
    rows = list(zip(grid, res.T12, res.T21))
    path = write_table(out / "diode", DIODE_COLUMNS, rows, fmt)
    return [path], {"g_cw_over_g": g_cw / g if g else None, "T12_0": res.T12_0, "T21_0": res.T21_0,
                    "isolation_dB": res.isolation_dB}


def cmd_circulator(p, out, fmt, threads):
    g, gamma, k0 = p["g_MHz"] * MHZ, p["gamma_MHz"] * MHZ, p["kappa0_MHz"] * MHZ
    g_weak = p["g_weak_MHz"] * MHZ
    extra = {}
    if p["optimize"]:
        opt = devices.optimize_kappa("circulator_fidelity", {"g": g, "gamma": gamma, "kappa_0": k0, "g_weak": g_weak},
                                     (0.01 * k0, 100 * k0))
        kA = kB = opt.kappa
        extra = {"optimal_kappa_over_kappa0": opt.kappa / k0, "unimodal": opt.unimodal}
    else:
        if "kappa_A_MHz" not in p or "kappa_B_MHz" not in p:
            raise ConfigError("circulator needs kappa_A_MHz and kappa_B_MHz unless optimize is true")
        kA, kB = p["kappa_A_MHz"] * MHZ, p["kappa_B_MHz"] * MHZ
    res = devices.circulator(g, gamma, k0, kA, kB, spin=p["spin"], g_weak=g_weak)
    rows = [[i + 1, j + 1, res.M[i, j]] for i in range(4) for j in range(4)]
    path = write_table(out / "circulator", ("from_port", "to_port", "T"), rows, fmt)
    return [path], {"fidelity": res.fidelity, "insertion_loss_dB": res.insertion_loss_dB,
                    "kappa_A_over_kappa0": kA / k0, "kappa_B_over_kappa0": kB / k0,
                    "kappa_tot_over_2kappa0": (k0 + kA + kB) / (2 * k0), **extra}


def cmd_sprint(p, out, fmt, threads):
    g, gamma, k0 = p["g_MHz"] * MHZ, p["gamma_MHz"] * MHZ, p["kappa0_MHz"] * MHZ
    k_star = devices.sprint_critical_kappa(g, gamma, k0)
    ke = p["kappa_ext_MHz"] * MHZ if "kappa_ext_MHz" in p else k_star
    res = devices.sprint(g, gamma, k0, ke)
    rows = []
    for key in sorted(res.t):
        t, r = res.t[key], res.r[key]
        rows.append([key[0], key[1], t, r, t * t, r * r])
    path = write_table(out / "sprint", ("direction", "initial_m_F", "t", "r", "T", "R"), rows, fmt)
    return [path], {"kappa_ext_over_kappa0": ke / k0, "critical_kappa_ext_over_kappa0": k_star / k0,
                    "swap_efficiency": res.swap_efficiency}


def cmd_validate(p, out, fmt, threads):
    from .validation import run_checks

    checks = run_checks(samples=p["samples"])
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  value={c.value:.3e}  tol={c.tolerance:.1e}")
    rows = [[c.name, c.value, c.tolerance, "PASS" if c.passed else "FAIL"] for c in checks]
    path = write_table(out / "validate", ("check", "value", "tolerance", "status"), rows, fmt)
    failed = [c.name for c in checks if not c.passed]
    return [path], {"passed": len(checks) - len(failed), "failed": failed}


HANDLERS = {
    "mode": cmd_mode, "overlap": cmd_overlap, "spectrum": cmd_spectrum, "sweep": cmd_sweep,
    "diode": cmd_diode, "circulator": cmd_circulator, "sprint": cmd_sprint, "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chiralwgm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", default=None, help="output directory (default: config output.path or '.')")
    parser.add_argument("--format", choices=("csv", "json"), default=None, help="table format (default csv)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for spectrum sweeps")
    parser.add_argument("--seed", type=int, default=None, help="reserved; all algorithms are deterministic")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        raw = load_config(args.config) if args.config else {}
        if args.config is None and args.command != "validate":
            raise ConfigError(f"command {args.command!r} needs --config")
        config = resolve_config(args.command, raw)
        out = Path(args.out or config["output"].get("path", "."))
        fmt = args.format or config["output"].get("format", "csv")
        files, results = HANDLERS[args.command](config["params"], out, fmt, args.threads)
        manifest = {
            "library": "chiralwgm", "version": __version__, "command": args.command,
            "params": config["params"], "format": fmt, "outputs": [p.name for p in files], "results": results,
        }
        write_json(out / f"{args.command}.manifest.json", manifest)
    except (ConfigError, GridTooLarge, UnsupportedModel, DomainError, jsonschema.SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ChiralWGMError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate" and results["failed"]:
        return 2
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
