"""Command-line driver: config parsing, runs, sweeps and CSV output.

A config is an INI-style file with explicit units::

    preset = singlet_fission

    [model]
    omega_diag = 80 meV
    lambda_s1 = 0.7 hbar_omega_diag

    [bath]
    n_modes = 48

    [evolution]
    d_bath = 10
    t_final = 0.4 ps

Keys written before the first section header belong to whichever section
owns them (every key name is unique across sections). The same rule applies
to ``--override key=value``; ``section.key=value`` is accepted too.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import itertools
import json
import math
import platform
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .chainmap import TimeDependentCouplings
from .errors import ChainBathError, ConfigError, NumericalFailureError, UnitError
from .evolve import EvolutionConfig, run_trajectory
from .model import SingletFissionParams, build_singlet_fission, build_spin_boson, map_model
from .spectral import DiscretizedBath, SpectralDensity, discretize_shared, wave_demo_densities
from .units import HBAR_MEV_PS, WAVENUMBER_PER_MEV, canonical_unit, convert, dimension_of

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
MAPPINGS = ("lanczos_x", "lanczos_z", "block_lanczos")
PRESETS = ("singlet_fission", "spin_boson")

# key -> (section, kind). Kinds: str, int, float, bond, energy, time, lambda, energy_list.
SCHEMA = {
    "preset": ("run", "str"),
    "mapping": ("run", "str"),
    "compare": ("run", "str"),
    "seed": ("run", "int"),
    "out": ("run", "str"),
    "delta_z": ("model", "energy"),
    "delta_x": ("model", "energy"),
    "omega_diag": ("model", "energy"),
    "omega_od": ("model", "energy"),
    "gamma": ("model", "energy"),
    "lambda_s1": ("model", "lambda"),
    "lambda_tt": ("model", "lambda"),
    "lambda_od": ("model", "lambda"),
    "n_modes": ("bath", "int"),
    "omega_min": ("bath", "energy"),
    "omega_max": ("bath", "energy"),
    "dt": ("evolution", "time"),
    "t_final": ("evolution", "time"),
    "svd_cutoff": ("evolution", "float"),
    "max_bond": ("evolution", "bond"),
    "d_bath": ("evolution", "int"),
    "measure_every": ("evolution", "int"),
    "t_max": ("couplings", "time"),
    "n_times": ("couplings", "int"),
    "sweep_omega_diag": ("sweep", "energy_list"),
    "sweep_omega_od": ("sweep", "energy_list"),
}
SECTIONS = ("run", "model", "bath", "evolution", "couplings", "sweep")
SF_ONLY = {"omega_diag", "omega_od", "gamma", "lambda_s1", "lambda_tt", "lambda_od",
           "sweep_omega_diag", "sweep_omega_od"}

# Defaults per preset; the singlet-fission values are the full-scale parameter table.
DEFAULTS = {
    "singlet_fission": {
        "mapping": "lanczos_z", "seed": 0, "out": "out",
        "delta_z": 100.0, "delta_x": 20.0, "omega_diag": 80.0, "omega_od": 60.0,
        "gamma": HBAR_MEV_PS, "lambda_s1": ("hbar_omega_diag", 0.7),
        "lambda_tt": ("hbar_omega_diag", 1.4), "lambda_od": ("hbar_omega_od", 0.1),
        "n_modes": 300, "omega_min": 0.0, "omega_max": 800.0 / WAVENUMBER_PER_MEV,
        "dt": 0.25e-3, "t_final": 1.0, "svd_cutoff": 1e-4, "max_bond": 64, "d_bath": 160,
        "measure_every": 4, "t_max": 0.5, "n_times": 101,
    },
    "spin_boson": {
        "mapping": "lanczos_z", "seed": 0, "out": "out",
        "delta_z": 0.0, "delta_x": 1.0,
        "n_modes": 300, "omega_min": 0.0, "omega_max": 20.0,
        "dt": 0.25e-3, "t_final": 1.0, "svd_cutoff": 1e-4, "max_bond": 64, "d_bath": 12,
        "measure_every": 4, "t_max": 5.0, "n_times": 101,
    },
}
UNITS_OUT = {"energy": "meV", "time": "ps", "lambda": "meV", "energy_list": "meV"}

_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*(.*?)\s*$")


def resolve_params(params: dict) -> dict:
    """Turn ``(hbar_omega_*, factor)`` strengths into meV values."""
    out = dict(params)
    for key in ("lambda_s1", "lambda_tt", "lambda_od"):
        if isinstance(out.get(key), tuple):
            ref, factor = out[key]
            out[key] = factor * out["omega_diag" if ref == "hbar_omega_diag" else "omega_od"]
    return out


@dataclass
class RunSpec:
    """A fully resolved run; energies in meV, times in ps."""

    preset: str
    params: dict
    evolution: EvolutionConfig
    mapping: str
    compare: str | None = None
    out: str = "out"
    seed: int = 0
    wave_times: tuple = (0.5, 101)
    sweep: dict = field(default_factory=dict)
    source: str | None = None

    def with_params(self, **updates) -> "RunSpec":
        return dataclasses.replace(self, params={**self.params, **updates}, sweep={})

    def manifest_params(self) -> dict:
        out = {}
        for key, value in sorted(resolve_params(self.params).items()):
            unit = UNITS_OUT.get(SCHEMA[key][1])
            out[key] = {"value": value, "unit": unit} if unit else value
        ev = self.evolution
        out.update({
            "dt": {"value": ev.dt, "unit": "ps"},
            "t_final": {"value": ev.t_final, "unit": "ps"},
            "svd_cutoff": ev.svd_cutoff, "max_bond": ev.max_bond, "d_bath": ev.d_bath,
            "measure_every": ev.measure_every,
            "t_max": {"value": self.wave_times[0], "unit": "ps"},
            "n_times": self.wave_times[1],
            "hbar": {"value": HBAR_MEV_PS, "unit": "meV ps"},
        })
        return out


def _parse_quantity(text, kind):
    """Return a float in canonical units or raise ValueError with a reason."""
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse {text!r} as a number with unit")
    value, unit = float(m.group(1)), m.group(2)
    if kind == "lambda" and unit.lower() in ("hbar_omega_diag", "hbar_omega_od"):
        return (unit.lower(), value)
    if not unit:
        raise ValueError(f"missing unit in {text!r}")
    try:
        unit = canonical_unit(unit)
    except UnitError:
        raise ValueError(f"unknown unit {unit!r}") from None
    want = "time" if kind == "time" else "energy"
    if dimension_of(unit) != want:
        raise ValueError(f"{unit} is not a {want} unit")
    return convert(value, unit, "ps" if want == "time" else "meV")


def _parse_value(text, kind):
    text = text.strip()
    if kind == "str":
        return text.strip('"').strip("'")
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "bond":
        return None if text.lower() in ("none", "inf", "unbounded") else int(text)
    if kind == "energy_list":
        tokens = [t for t in re.split(r"[,\s]+", text) if t]
        unit = tokens.pop() if tokens and not re.fullmatch(r"[-+0-9.eE]+", tokens[-1]) else ""
        if not tokens:
            raise ValueError("empty list")
        return [_parse_quantity(f"{t} {unit}", "energy") for t in tokens]
    return _parse_quantity(text, kind)


def _line_numbers(lines):
    """Map ``(section, key)`` to 1-based line numbers of a raw config text."""
    where, section = {}, "run"
    for i, raw in enumerate(lines, 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
        elif "=" in line and not line.startswith(("#", ";")):
            where[(section, line.split("=", 1)[0].strip().lower())] = i
    return where


def _canonical_key(section, key):
    if section == "sweep" and not key.startswith("sweep_"):
        return "sweep_" + key
    return key


def _route(key):
    """Split an override or top-level key into (section, key)."""
    if "." in key:
        section, key = key.split(".", 1)
        section = section.strip().lower()
        return section, _canonical_key(section, key.strip().lower())
    key = key.strip().lower()
    return (SCHEMA[key][0] if key in SCHEMA else None), key


def parse_config(path, overrides=()) -> RunSpec:
    """Read, merge overrides into, and validate a config file.

    Raises
    ------
    ConfigError
        Listing every problem found, each with its line or field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config_text(text, overrides, source=str(path))


def parse_config_text(text, overrides=(), source="<config>") -> RunSpec:
    problems = []
    lines = text.splitlines()
    where = _line_numbers(lines)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       default_section="__defaults__")
    try:
        parser.read_string("[__top__]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    raw = {}  # key -> (text, context)
    for section in parser.sections():
        name = section.strip().lower()
        for key, value in parser.items(section):
            line = where.get(("run" if name == "__top__" else name, key))
            ctx = f"{source}:{line}" if line else source
            if name == "__top__":
                sec, key = _route(key)
            else:
                sec = name
                key = _canonical_key(name, key)
                if name not in SECTIONS:
                    problems.append(f"{ctx}: unknown section [{section}]")
                    continue
            if key not in SCHEMA or (sec is not None and SCHEMA[key][0] != sec):
                label = f"{sec}.{key}" if sec else key
                problems.append(f"{ctx}: unknown key {label!r}")
                continue
            raw[key] = (value, ctx)
    for item in overrides:
        if "=" not in item:
            problems.append(f"--override {item!r}: expected key=value")
            continue
        key, value = item.split("=", 1)
        sec, key = _route(key)
        if key not in SCHEMA or SCHEMA[key][0] != sec:
            problems.append(f"--override {item!r}: unknown key {key!r}")
            continue
        raw[key] = (value, f"--override {item}")

    values = {}
    for key, (value, ctx) in raw.items():
        try:
            values[key] = _parse_value(value, SCHEMA[key][1])
        except ValueError as exc:
            problems.append(f"{ctx}: field {SCHEMA[key][0]}.{key}: {exc}")

    preset = values.get("preset")
    if "preset" not in raw:
        problems.append(f"{source}: missing required field run.preset")
    elif preset not in PRESETS:
        problems.append(f"{raw['preset'][1]}: field run.preset: unknown preset {preset!r} "
                        f"(expected one of {', '.join(PRESETS)})")
    if problems or preset not in PRESETS:
        raise ConfigError(problems)

    for key in sorted(set(values) & SF_ONLY):
        if preset != "singlet_fission":
            problems.append(f"{raw[key][1]}: field {SCHEMA[key][0]}.{key} "
                            f"does not apply to preset {preset!r}")
    merged = {**DEFAULTS[preset], **values}
    for key in ("mapping", "compare"):
        if key in merged and merged[key] not in MAPPINGS:
            problems.append(f"{raw.get(key, ('', source))[1]}: field run.{key}: unknown "
                            f"mapping {merged[key]!r} (expected one of {', '.join(MAPPINGS)})")

    model_keys = [k for k, (sec, _) in SCHEMA.items() if sec in ("model", "bath")]
    params = {k: merged[k] for k in model_keys if k in merged}
    for key, value in resolve_params(params).items():
        if key.startswith("lambda_") and value < 0:
            problems.append(f"{raw.get(key, ('', source))[1]}: field model.{key} must be >= 0")
    if params["n_modes"] < 1:
        problems.append("field bath.n_modes must be at least 1")
    if not 0 <= params["omega_min"] < params["omega_max"]:
        problems.append("fields bath.omega_min/omega_max must satisfy 0 <= min < max")

    sweep = {}
    for key in ("sweep_omega_diag", "sweep_omega_od"):
        if key in merged:
            sweep[key[len("sweep_"):]] = merged[key]

    try:
        evolution = EvolutionConfig(
            dt=merged["dt"], t_final=merged["t_final"], svd_cutoff=merged["svd_cutoff"],
            max_bond=merged["max_bond"], d_bath=merged["d_bath"],
            measure_every=merged["measure_every"], mapping=merged["mapping"])
    except ChainBathError as exc:
        problems.append(f"[evolution]: {exc}")
        evolution = None
    if merged["n_times"] < 1 or merged["t_max"] < 0:
        problems.append("fields couplings.t_max/n_times must be non-negative/positive")

    spec = RunSpec(preset=preset, params=params, evolution=evolution,
                   mapping=merged["mapping"], compare=merged.get("compare"),
                   out=merged["out"], seed=merged["seed"],
                   wave_times=(merged["t_max"], merged["n_times"]), sweep=sweep, source=source)
    if not problems:
        problems.extend(_degeneracy_problems(spec, raw))
    if problems:
        raise ConfigError(problems)
    return spec


def _degeneracy_problems(spec, raw):
    """Block Lanczos needs two independent seeds, hence distinct Lorentzian centers."""
    if spec.preset != "singlet_fission" or "block_lanczos" not in (spec.mapping, spec.compare):
        return []
    p = resolve_params(spec.params)
    if "omega_diag" in spec.sweep or "omega_od" in spec.sweep:
        return []  # degenerate grid points are reported per point
    out = []
    if p["omega_diag"] == p["omega_od"]:
        ctx = raw.get("omega_od", raw.get("omega_diag", ("", spec.source)))[1]
        out.append(f"{ctx}: block_lanczos requires omega_diag != omega_od "
                   "(equal Lorentzian centers make the two coupling seeds parallel)")
    if p["lambda_od"] == 0 or (p["lambda_s1"] == 0 and p["lambda_tt"] == 0):
        out.append(f"{spec.source}: block_lanczos requires both channels to be coupled")
    return out


# ----------------------------------------------------------------------------- building

def build_bath(spec: RunSpec) -> DiscretizedBath:
    p = spec.params
    support = (p["omega_min"], p["omega_max"])
    if spec.preset == "singlet_fission":
        dens = {
            "z": SpectralDensity.singlet_fission(p["omega_diag"], p["gamma"], support),
            "x": SpectralDensity.singlet_fission(p["omega_od"], p["gamma"], support),
        }
    else:
        dens = wave_demo_densities(support)
    return discretize_shared(dens, p["n_modes"])


def build_model(spec: RunSpec):
    p = resolve_params(spec.params)
    bath = build_bath(spec)
    if spec.preset == "spin_boson":
        return build_spin_boson(p["delta_x"], p["delta_z"], bath)
    params = SingletFissionParams(
        delta_z=p["delta_z"], delta_x=p["delta_x"], omega_diag=p["omega_diag"],
        omega_od=p["omega_od"], gamma_ps=p["gamma"] / HBAR_MEV_PS,
        lambda_s1=p["lambda_s1"], lambda_tt=p["lambda_tt"], lambda_od=p["lambda_od"],
        n_modes=p["n_modes"], cutoff=p["omega_max"])
    return build_singlet_fission(params, bath)


# ----------------------------------------------------------------------------- output

def _fmt(x):
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_populations(path, traj):
    header = ["t_ps"] + [f"P_{b}" for b in traj.basis]
    rows = ([_fmt(t)] + [_fmt(p) for p in row] for t, row in zip(traj.times, traj.populations))
    _write_rows(path, header, rows)


def write_entropy(path, traj):
    rows = ([_fmt(t), b, _fmt(s), int(d)]
            for t, srow, drow in zip(traj.times, traj.entropies, traj.bond_dims)
            for b, (s, d) in enumerate(zip(srow, drow)))
    _write_rows(path, ["t_ps", "bond", "S_nats", "bond_dim"], rows)


def write_couplings(path, model, mapping, spec):
    t_max, n = spec.wave_times
    times_ps = np.linspace(0.0, t_max, n)
    sources = {ch.label: ch.couplings for ch in model.channels}
    tc = TimeDependentCouplings(mapping, sources)
    from .chainmap import write_wave_csv

    write_wave_csv(path, tc, times_ps / HBAR_MEV_PS, time_scale=HBAR_MEV_PS)


def _versions():
    from . import __version__

    return {"chainbath": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def write_manifest(out, spec, verb, status, timings, files, extra=None):
    doc = {
        "verb": verb, "status": status, "partial": status != "ok",
        "preset": spec.preset, "mapping": spec.mapping, "compare": spec.compare,
        "seed": spec.seed, "config": spec.source,
        "parameters": spec.manifest_params(),
        "sweep": {k: {"values": v, "unit": "meV"} for k, v in spec.sweep.items()},
        "versions": _versions(), "timings_s": timings, "files": sorted(files),
    }
    if extra:
        doc.update(extra)
    (Path(out) / "run_manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------- verbs

def _run_mapping(model, spec, kind, out):
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    mapping = map_model(model, kind)
    mapping.to_csv(out / "bandcoeffs.csv")
    write_couplings(out / "couplings.csv", model, mapping, spec)
    t1 = time.perf_counter()
    traj = run_trajectory(model, mapping, None, dataclasses.replace(spec.evolution, mapping=kind))
    t2 = time.perf_counter()
    write_populations(out / "populations.csv", traj)
    write_entropy(out / "entropy.csv", traj)
    timing = {"mapping_s": t1 - t0, "evolution_s": t2 - t1}
    return traj, timing, ["bandcoeffs.csv", "couplings.csv", "populations.csv", "entropy.csv"]


def run(spec: RunSpec, out=None) -> dict:
    """Run one trajectory (two with ``compare``) and write its files.

    Returns a small summary dict; raises package errors unchanged after the
    manifest has been written with ``status`` set to the error.
    """
    out = Path(out or spec.out)
    out.mkdir(parents=True, exist_ok=True)
    timings, files, summary = {}, [], {}
    try:
        t0 = time.perf_counter()
        model = build_model(spec)
        model.bath.to_csv(out / "bath.csv")
        files.append("bath.csv")
        timings["build_s"] = time.perf_counter() - t0
        if spec.compare is None:
            traj, timing, written = _run_mapping(model, spec, spec.mapping, out)
            timings.update(timing)
            files += written
            summary = {"final_populations": traj.populations[-1].tolist(),
                       "discarded_weight": float(traj.discarded_weight[-1])}
        else:
            trajs = {}
            for kind in (spec.mapping, spec.compare):
                trajs[kind], timing, written = _run_mapping(model, spec, kind, out / kind)
                timings[kind] = timing
                files += [f"{kind}/{f}" for f in written]
            a, b = (trajs[spec.mapping], trajs[spec.compare])
            diff = np.abs(a.population(0) - b.population(0))
            summary = {"max_abs_dP_state0": float(diff.max()),
                       "t_at_max_ps": float(a.times[int(np.argmax(diff))]),
                       "mean_total_entropy": {k: float(t.entropies.sum(axis=1).mean())
                                              for k, t in trajs.items()}}
            _write_rows(out / "diff_summary.csv",
                        ["mapping_a", "mapping_b", "max_abs_dP_state0", "t_at_max_ps"],
                        [[spec.mapping, spec.compare, _fmt(diff.max()),
                          _fmt(summary["t_at_max_ps"])]])
            files.append("diff_summary.csv")
    except ChainBathError as exc:
        write_manifest(out, spec, "run", f"error: {type(exc).__name__}: {exc}", timings, files)
        raise
    write_manifest(out, spec, "run", "ok", timings, files, {"summary": summary})
    return summary


def _point_name(point):
    return "_".join(f"{k}={v:g}" for k, v in point.items())


def _sweep_point(args):
    spec, point, out = args
    try:
        summary = run(spec.with_params(**point), out)
        return point, "ok", summary
    except ChainBathError as exc:
        return point, f"{type(exc).__name__}: {exc}", {}


def sweep(spec: RunSpec, out=None, workers: int = 1) -> list:
    """Run every grid point into its own subdirectory and write ``summary.csv``."""
    out = Path(out or spec.out)
    out.mkdir(parents=True, exist_ok=True)
    axes = spec.sweep or {}
    names = list(axes)
    grid = [dict(zip(names, combo)) for combo in itertools.product(*axes.values())] or [{}]
    jobs = [(spec, point, out / (_point_name(point) or "point")) for point in grid]
    t0 = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(job) for job in jobs]

    basis = ("S1", "TT") if spec.preset == "singlet_fission" else ("up", "down")
    header = [f"{n}_meV" for n in names] + ["status"] + [f"P_{b}_final" for b in basis]
    rows = []
    for point, status, summary in results:
        pops = summary.get("final_populations", [math.nan] * len(basis))
        rows.append([_fmt(point[n]) for n in names] + [status] + [_fmt(p) for p in pops])
    _write_rows(out / "summary.csv", header, rows)
    ok = all(status == "ok" for _, status, _ in results)
    write_manifest(out, spec, "sweep", "ok" if ok else "error: failed grid points",
                   {"total_s": time.perf_counter() - t0},
                   ["summary.csv"] + [f"{_point_name(p) or 'point'}/" for p in grid],
                   {"workers": workers, "points": len(grid)})
    return results


def couplings(spec: RunSpec, out=None):
    """Coupling-wave grid only (no evolution)."""
    out = Path(out or spec.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    model = build_model(spec)
    mapping = map_model(model, spec.mapping)
    write_couplings(out / "couplings.csv", model, mapping, spec)
    mapping.to_csv(out / "bandcoeffs.csv")
    model.bath.to_csv(out / "bath.csv")
    write_manifest(out, spec, "couplings", "ok", {"total_s": time.perf_counter() - t0},
                   ["couplings.csv", "bandcoeffs.csv", "bath.csv"])


def bandcoeffs(spec: RunSpec, out=None):
    out = Path(out or spec.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    model = build_model(spec)
    mapping = map_model(model, spec.mapping)
    mapping.to_csv(out / "bandcoeffs.csv")
    model.bath.to_csv(out / "bath.csv")
    write_manifest(out, spec, "bandcoeffs", "ok", {"total_s": time.perf_counter() - t0},
                   ["bandcoeffs.csv", "bath.csv"],
                   {"orthogonality_residual": mapping.orthogonality_residual(),
                    "band_residual": mapping.band_residual()})


def _parser():
    p = argparse.ArgumentParser(prog="chainbath", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=["run", "sweep", "couplings", "bandcoeffs", "validate"])
    p.add_argument("--config", required=True, help="config file")
    p.add_argument("--out", help="output directory (overrides run.out)")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep points")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="set a config field; repeatable")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = parse_config(args.config, args.override)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    if args.verb == "validate":
        print(json.dumps({"preset": spec.preset, "mapping": spec.mapping,
                          "parameters": spec.manifest_params()}, indent=2, sort_keys=True))
        return EXIT_OK
    try:
        if args.verb == "run":
            run(spec, args.out)
        elif args.verb == "sweep":
            results = sweep(spec, args.out, max(1, args.workers))
            if any(status != "ok" for _, status, _ in results):
                return EXIT_NUMERICAL
        elif args.verb == "couplings":
            couplings(spec, args.out)
        else:
            bandcoeffs(spec, args.out)
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChainBathError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
