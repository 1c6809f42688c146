"""Scenario files, experiment dispatch, run records and plot-data sidecars.

A scenario is one YAML mapping:

    schema_version: 1            # required, only 1 is supported
    name: my-run                 # optional, defaults to the file stem
    experiment: resolve          # see EXPERIMENTS
    seed: 42                     # 0 <= seed < 2**64, default 0
    potential: {kind: star}      # see potentials.from_spec
    data: {family: steady_plus_bump, a: 1.0, r1: 2, r2: 4, norm: 0.3}
    solver: {h: 0.005, cfl: 0.5, r_max: 50}
    params: {ladder: [10, 20, 30, 40]}

Unknown keys anywhere are errors.  Each run writes ``<name>.jsonl`` (one
record per line) and ``<name>.<series>.tsv`` sidecars into the output
directory.
"""
from __future__ import annotations

import json
import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import __version__
from . import dalembert, data, potentials, resolution, spectrum, steady
from .evolver import (
    BlowUpError,
    CoefficientField,
    SolverConfig,
    Status,
    continuous_dependence_experiment,
    evolve,
    scale_robustness_experiment,
    support_growth_experiment,
)
from .radial import RadialGrid, ReducedState

SCHEMA_VERSION = 1
EXPERIMENTS = (
    "evolve", "channel-test", "steady-census", "bs-spectrum", "resolve", "support-growth", "scale-robustness",
    "dependence",
)
TOP_KEYS = {"schema_version", "name", "experiment", "seed", "potential", "data", "solver", "params"}
SOLVER_KEYS = set(SolverConfig.__dataclass_fields__)
DATA_KEYS = {
    "gaussian": {"amp", "center", "width", "velocity", "r_max"},
    "bump": {"r1", "r2", "amp", "k", "velocity", "r_max"},
    "outgoing_bump": {"r1", "r2", "amp", "k", "r_max"},
    "steady_plus_bump": {"a", "r1", "r2", "norm", "k", "velocity", "r_max"},
    "random_bumps": {"n_min", "n_max", "mu", "sigma", "amp", "velocity", "r_max"},
    "random_compact": {"r_hi", "r_max"},
    "file": {"path"},
}
PARAM_KEYS = {
    "evolve": {"n_snap", "backward"},
    "channel-test": {"trials", "R_max", "forward_trials", "tol", "span", "r_hi"},
    "steady-census": {"A", "step", "tol", "R_big"},
    "bs-spectrum": {"k", "n_quad", "R_spec", "bifurcation", "census_A", "census_step"},
    "resolve": {"ladder", "A_buf", "A_mis", "census_A", "census_step", "meter_R", "meter_T"},
    "support-growth": {"n_times", "threshold"},
    "scale-robustness": {"lams", "n_snap"},
    "dependence": {"eps", "n_snap", "interior", "perturbation"},
}


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    experiment: str
    name: str = "run"
    seed: int = 0
    potential: dict = field(default_factory=lambda: {"kind": "zero"})
    data: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def normalized(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "experiment": self.experiment,
            "seed": self.seed,
            "potential": dict(self.potential),
            "data": dict(self.data),
            "solver": dict(self.solver),
            "params": dict(self.params),
        }


def _lines(node, prefix="") -> dict[str, int]:
    """dotted key path -> 1-based line, from a composed YAML node."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}{k.value}"
            out[path] = k.start_mark.line + 1
            out.update(_lines(v, path + "."))
    return out


def parse_scenario(text: str, source: str = "<string>", default_name: str = "run") -> Scenario:
    try:
        raw = yaml.safe_load(text)
        lines = _lines(yaml.compose(text))
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{source}: YAML error: {exc}") from None

    def fail(path: str, msg: str):
        line = lines.get(path)
        where = f"{source}:{line}" if line else source
        raise ScenarioError(f"{where}: field '{path}': {msg}")

    if not isinstance(raw, dict):
        raise ScenarioError(f"{source}: top level must be a mapping")
    for k in raw:
        if k not in TOP_KEYS:
            fail(str(k), "unknown key")
    if "schema_version" not in raw:
        raise ScenarioError(f"{source}: field 'schema_version' is required")
    if raw["schema_version"] != SCHEMA_VERSION:
        fail("schema_version", f"unsupported version {raw['schema_version']!r} (supported: {SCHEMA_VERSION})")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        fail("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        fail("seed", "must be an integer in [0, 2**64)")
    sections = {}
    for sec in ("potential", "data", "solver", "params"):
        val = raw.get(sec, {})
        if val is None:
            val = {}
        if not isinstance(val, dict):
            fail(sec, "must be a mapping")
        sections[sec] = val
    pot = sections["potential"] or {"kind": "zero"}
    if "kind" not in pot:
        fail("potential", "needs a 'kind'")
    try:
        potentials.from_spec(pot)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        fail("potential", str(exc))
    for k in sections["solver"]:
        if k not in SOLVER_KEYS:
            fail(f"solver.{k}", "unknown key")
    for k in sections["params"]:
        if k not in PARAM_KEYS[exp]:
            fail(f"params.{k}", f"unknown key for experiment {exp}")
    dat = sections["data"]
    if dat:
        fam = dat.get("family")
        if fam not in DATA_KEYS:
            fail("data.family", f"must be one of {', '.join(DATA_KEYS)}")
        for k in dat:
            if k != "family" and k not in DATA_KEYS[fam]:
                fail(f"data.{k}", f"unknown key for family {fam}")
    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name or "/" in name:
        fail("name", "must be a nonempty string without '/'")
    try:
        _solver(sections["solver"])
    except (ValueError, TypeError) as exc:
        fail("solver", str(exc))
    return Scenario(exp, name, seed, pot, dat, sections["solver"], sections["params"])


def load_scenario(path: str | os.PathLike) -> Scenario:
    p = Path(path)
    return parse_scenario(p.read_text(), str(p), p.stem)


def dump_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(sc.normalized(), sort_keys=False)


@lru_cache(maxsize=1)
def artifact_version() -> str:
    """``<version>+g<short hash>`` when run inside a git checkout, else ``<version>``."""
    try:
        sha = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent, capture_output=True, text=True,
            timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        sha = ""
    return f"{__version__}+g{sha}" if sha else __version__


def _solver(spec: dict, **defaults) -> SolverConfig:
    return SolverConfig(**{**defaults, **spec})


class _Context:
    """Lazy shared pieces of one run: potential, census, seeded RNG."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.V = potentials.from_spec(sc.potential)
        self.rng = np.random.default_rng(sc.seed)
        self._census = None

    def census(self, A: float = 5.0, step: float = 0.05) -> steady.Census:
        if self._census is None:
            self._census = steady.census(self.V, A=A, step=step)
        return self._census


def build_data(spec: dict, ctx: _Context, h: float) -> ReducedState:
    spec = dict(spec)
    fam = spec.pop("family")
    r_max = float(spec.pop("r_max", 12.0))
    grid = RadialGrid.covering(h, r_max)
    if fam == "gaussian":
        amp, c, w = spec.get("amp", 1.0), spec.get("center", 0.0), spec.get("width", 1.0)
        u = amp * np.exp(-((grid.r - c) ** 2) / w**2)
        v = grid.r * u
        vt = spec.get("velocity", 0.0) * np.gradient(v, h)
        vt[0] = 0.0
        return ReducedState(grid, v, vt)
    if fam == "bump":
        return data.bump_state(grid, spec["r1"], spec["r2"], spec.get("amp", 1.0), spec.get("k", 3),
                               spec.get("velocity", 0.0))
    if fam == "outgoing_bump":
        return data.outgoing_bump(grid, spec["r1"], spec["r2"], spec.get("amp", 1.0), spec.get("k", 3))
    if fam == "steady_plus_bump":
        cen = ctx.census(ctx.sc.params.get("census_A", 5.0), ctx.sc.params.get("census_step", 0.05))
        st = min(cen.all_states(), key=lambda e: abs(e.a - spec.get("a", 1.0)))
        base = resolution.grid_steady(st, grid, ctx.V)
        b = data.bump_state(grid, spec.get("r1", 2.0), spec.get("r2", 4.0), 1.0, spec.get("k", 3),
                            spec.get("velocity", 0.0))
        return base + b.scaled(spec.get("norm", 0.3) / data.reduced_norm(b.v, b.vt, h))
    if fam == "random_bumps":
        return data.random_bumps(ctx.rng, grid, (spec.get("n_min", 1), spec.get("n_max", 3)),
                                 tuple(spec.get("mu", (1.0, 4.0))), tuple(spec.get("sigma", (0.25, 1.0))),
                                 tuple(spec.get("amp", (-1.0, 1.0))), spec.get("velocity", True))
    if fam == "random_compact":
        return data.random_compact(ctx.rng, grid, spec.get("r_hi", 5.0))
    if fam == "file":
        return read_data_file(spec["path"], h)
    raise ScenarioError(f"unknown data family {fam!r}")


def read_data_file(path: str | os.PathLike, h: float) -> ReducedState:
    """Three columns r, u0, u1 on a uniform grid starting at r = 0 with spacing h."""
    arr = np.loadtxt(path, ndmin=2)
    if arr.shape[1] != 3:
        raise ScenarioError(f"{path}: expected 3 columns r, u0, u1")
    r = arr[:, 0]
    if r[0] != 0.0 or not np.allclose(np.diff(r), h, rtol=1e-9, atol=0):
        raise ScenarioError(f"{path}: radii must start at 0 with spacing {h}")
    grid = RadialGrid(h, r.size)
    v = grid.r * arr[:, 1]
    vt = grid.r * arr[:, 2]
    return ReducedState(grid, v, vt)


def series(columns: list[str], units: list[str], rows) -> dict:
    return {"columns": columns, "units": units, "rows": [[_plain(x) for x in row] for row in rows]}


def _plain(x):
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    x = _plain(obj)
    if isinstance(x, float) and not np.isfinite(x):
        return repr(x)
    return x


@dataclass
class Outcome:
    results: dict
    series: dict
    assertions: dict
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------- experiments

def _exp_evolve(sc: Scenario, ctx: _Context) -> Outcome:
    cfg = _solver(sc.solver)
    init = build_data(sc.data or {"family": "gaussian"}, ctx, cfg.h)
    n = int(sc.params.get("n_snap", 20))
    sign = -1.0 if sc.params.get("backward", False) else 1.0
    times = [sign * cfg.T * k / n for k in range(n + 1)]
    traj = evolve(init, CoefficientField.static(ctx.V), cfg, times)
    drift = traj.energy_drift()
    rows = [(t, e, d) for t, e, d in zip(traj.times, traj.energies, drift)]
    res = {"status": traj.status.value, "blowup_at": traj.blowup_at, "max_abs_drift": float(np.max(np.abs(drift))),
           "dt": traj.dt, "r_max": traj.states[-1].grid.r_max}
    ok = {"completed": traj.status is Status.COMPLETED}
    if traj.status is Status.COMPLETED:
        ok["energy_drift"] = res["max_abs_drift"] <= cfg.energy_drift_tol
    return Outcome(res, {"energy": series(["t", "E", "drift"], ["time", "energy per steradian", "1"], rows)}, ok)


def _exp_channel(sc: Scenario, ctx: _Context) -> Outcome:
    p = sc.params
    h = float(sc.solver.get("h", 0.01))
    trials = int(p.get("trials", 200))
    tol = float(p.get("tol", 1e-8))
    R_max = float(p.get("R_max", 5.0))
    r_hi = float(p.get("r_hi", 5.0))
    grid = RadialGrid.covering(h, r_hi + 1.0)
    rows, violations, worst = [], 0, np.inf
    for k in range(trials):
        st = data.random_compact(ctx.rng, grid, r_hi)
        R = float(ctx.rng.uniform(0.0, R_max))
        res = dalembert.channel_direction(dalembert.split(st), R, tol=tol)
        bad = res.direction is dalembert.Direction.NEITHER
        violations += bad
        worst = min(worst, res.margin)
        rows.append((k, R, res.R_snapped, res.R_snapped - R, res.direction.value, res.margin, res.e0))
    out = {"trials": trials, "violations": violations, "min_margin": worst, "tol": tol}
    ser = {"channel": series(["trial", "R", "R_snapped", "snap_distance", "direction", "margin", "e0"],
                             ["1", "length", "length", "length", "1", "energy", "energy"], rows)}
    ok = {"no_channel_violations": violations == 0}
    nf = int(p.get("forward_trials", 0))
    if nf:
        span = float(p.get("span", 50.0))
        frows, fails = [], 0
        for k in range(nf):
            pair = dalembert.split(data.random_compact(ctx.rng, grid, r_hi))
            try:
                t0 = dalembert.forward_time(pair)
                m = float(np.min(dalembert.forward_sweep(pair, t0, span)))
            except dalembert.SearchExhausted as exc:
                t0, m = np.nan, exc.best
            failed = not (np.isfinite(t0) and m >= -tol)
            fails += failed
            frows.append((k, t0, m))
        out.update(forward_trials=nf, forward_failures=fails)
        ser["forward"] = series(["trial", "t0", "min_margin"], ["1", "time", "energy"], frows)
        ok["forward_channel"] = fails == 0
    return Outcome(out, ser, ok)


def _census_rows(cen: steady.Census):
    return [(e.label, e.a, e.c, e.sign_changes, e.functional_J, e.residual) for e in cen.all_states()]


def _exp_census(sc: Scenario, ctx: _Context) -> Outcome:
    p = sc.params
    cen = steady.census(ctx.V, A=float(p.get("A", 5.0)), step=float(p.get("step", 0.05)),
                        tol=float(p.get("tol", 1e-10)), R_big=float(p.get("R_big", 200.0)))
    ser = {"census": series(["id", "a", "c", "sign_changes", "J", "residual"],
                            ["1", "field", "field*length", "1", "energy per steradian", "1"], _census_rows(cen))}
    res = {"n_states": len(cen.all_states()), "scanned": cen.scanned, "A": cen.A, "step": cen.step}
    return Outcome(res, ser, {"census_confirmed": not any("not confirmed" in w for w in cen.warnings)},
                   list(cen.warnings))


def _exp_spectrum(sc: Scenario, ctx: _Context) -> Outcome:
    p = sc.params
    n_quad, R_spec = int(p.get("n_quad", 400)), float(p.get("R_spec", 60.0))
    rep = spectrum.spectrum(ctx.V, int(p.get("k", 8)), n_quad, R_spec)
    rows = [(j + 1, l, a) for j, (l, a) in enumerate(zip(rep.eigenvalues, rep.thresholds))]
    ser = {"spectrum": series(["j", "lambda", "alpha"], ["1", "1", "1"], rows)}
    res = {"n_quad": n_quad, "R_spec": R_spec, "tail_bound": rep.tail_bound, "off_norm": rep.off_norm,
           "sweeps": rep.sweeps}
    ok, warn = {}, []
    if p.get("bifurcation", False):
        A, step = float(p.get("census_A", 5.0)), float(p.get("census_step", 0.05))
        b = spectrum.bifurcation_crosscheck(ctx.V, lambda W: steady.census(W, A=A, step=step), n_quad=n_quad,
                                            R_spec=R_spec)
        res["bifurcation"] = {"alpha1": b.alpha1, "alpha2": b.alpha2, "couplings": b.couplings,
                              "census": b.census_summary}
        ok["none_below_alpha1"] = b.none_below_alpha1
        ok["ground_above_alpha1"] = b.ground_above_alpha1
        ok["excited_or_attributed"] = b.excited_above_alpha2 or bool(b.attribution)
        warn += b.attribution
    return Outcome(res, ser, ok, warn)


def _exp_resolve(sc: Scenario, ctx: _Context) -> Outcome:
    p = sc.params
    cfg = _solver(sc.solver, h=0.005, r_max=50.0)
    cen = ctx.census(float(p.get("census_A", 5.0)), float(p.get("census_step", 0.05)))
    spec = sc.data or {"family": "steady_plus_bump", "r_max": cfg.r_max or 50.0}
    init = build_data(spec, ctx, cfg.h)
    meter = (float(p["meter_R"]), float(p.get("meter_T", 10.0))) if "meter_R" in p else None
    rep = resolution.resolution_experiment(
        init, ctx.V, cfg, cen, tuple(p.get("ladder", (10.0, 20.0, 30.0, 40.0))), float(p.get("A_buf", 5.0)),
        float(p.get("A_mis", 5.0)), meter=meter,
    )
    rows = [(t, d, m, a) for t, d, m, a in zip(rep.times, rep.distance, rep.mismatch, rep.argmin)]
    ser = {"ladder": series(["T_k", "distance", "mismatch", "argmin"], ["time", "energy^1/2", "energy^1/2", "1"],
                            rows)}
    res = {"selected": rep.selected, "initial_perturbation": rep.initial_perturbation, "T_ex": rep.T_ex,
           "extraction_quality": rep.extraction_quality, "delta_plus": rep.delta_plus,
           "delta_minus": rep.delta_minus, "census": [(e.label, e.a, e.c) for e in cen.all_states()]}
    return Outcome(res, ser, dict(rep.checks), rep.warnings)


def _exp_support(sc: Scenario, ctx: _Context) -> Outcome:
    cfg = _solver(sc.solver, nonlinear=False, T=10.0, cfl=1.0)
    init = build_data(sc.data or {"family": "bump", "r1": 1.0, "r2": 2.0}, ctx, cfg.h)
    n = int(sc.params.get("n_times", 10))
    rep = support_growth_experiment(init, CoefficientField.static(ctx.V), cfg,
                                    np.linspace(0.0, cfg.T, n + 1)[1:], float(sc.params.get("threshold", 1e-8)))
    rows = [(t, a, b, rep.rho0 + t) for t, a, b in zip(rep.times, rep.rho_forward, rep.rho_backward)]
    ser = {"support": series(["t", "rho_forward", "rho_backward", "rho0_plus_t"], ["time"] + ["length"] * 3,
                             rows)}
    res = {"rho0": rep.rho0, "tolerance": rep.tolerance, "saturates_forward": rep.saturates_forward,
           "saturates_backward": rep.saturates_backward}
    return Outcome(res, ser, {"support_growth": rep.passed})


def _profile(spec: dict) -> Callable:
    if spec.get("family", "gaussian") != "gaussian":
        raise ScenarioError("scale-robustness needs a gaussian data profile")
    amp, c, w = spec.get("amp", 1.0), spec.get("center", 0.0), spec.get("width", 1.0)
    return lambda r: amp * np.exp(-((r - c) ** 2) / w**2)


def _exp_scale(sc: Scenario, ctx: _Context) -> Outcome:
    cfg = _solver(sc.solver, T=5.0)
    lams = [float(x) for x in sc.params.get("lams", (0.1, 0.3, 1.0, 3.0, 10.0))]
    rep = scale_robustness_experiment(_profile(sc.data), lams, ctx.V, cfg, int(sc.params.get("n_snap", 20)))
    ser = {"scale": series(["lambda", "distance"], ["length", "energy^1/2"], zip(rep.lams, rep.distance))}
    return Outcome({"decays_toward_ends": rep.decays_toward_ends}, ser,
                   {"decays_toward_ends": rep.decays_toward_ends})


def _exp_dependence(sc: Scenario, ctx: _Context) -> Outcome:
    p = sc.params
    cfg = _solver(sc.solver)
    base = build_data(sc.data or {"family": "gaussian"}, ctx, cfg.h)
    pert = build_data(p.get("perturbation", {"family": "bump", "r1": 1.0, "r2": 3.0}), ctx, cfg.h)
    if pert.grid.n != base.grid.n:
        grid = base.grid if base.grid.n > pert.grid.n else pert.grid
        base, pert = base.regrid(grid), pert.regrid(grid)
    rep = continuous_dependence_experiment(base, pert, CoefficientField.static(ctx.V), cfg,
                                           tuple(float(e) for e in p.get("eps", (1e-2, 1e-3, 1e-4))),
                                           int(p.get("n_snap", 10)), p.get("interior"))
    rows = list(zip(rep.eps, rep.distance, rep.ratio))
    ser = {"dependence": series(["eps", "distance", "ratio"], ["1", "energy^1/2", "energy^1/2"], rows)}
    return Outcome({"ratio_quotients": rep.ratio_quotients, "interior_distance": rep.interior_distance}, ser,
                   {"bounded_ratio": rep.bounded})


DISPATCH: dict[str, Callable[[Scenario, _Context], Outcome]] = {
    "evolve": _exp_evolve,
    "channel-test": _exp_channel,
    "steady-census": _exp_census,
    "bs-spectrum": _exp_spectrum,
    "resolve": _exp_resolve,
    "support-growth": _exp_support,
    "scale-robustness": _exp_scale,
    "dependence": _exp_dependence,
}


def execute(sc: Scenario) -> dict:
    """Run a scenario; the record's ``body`` is deterministic, ``timing`` is not."""
    t0 = time.perf_counter()
    ctx = _Context(sc)
    warnings: list[str] = []
    error = None
    try:
        out = DISPATCH[sc.experiment](sc, ctx)
    except (BlowUpError, steady.IntegrationFailure, spectrum.NotConverged, potentials.AdmissibilityError) as exc:
        out = Outcome({}, {}, {"no_numerical_failure": False})
        error = f"{type(exc).__name__}: {exc}"
    warnings += out.warnings
    body = {
        "scenario": sc.normalized(),
        "version": artifact_version(),
        "results": out.results,
        "assertions": out.assertions,
        "series": out.series,
        "warnings": warnings,
        "error": error,
    }
    return {"body": _jsonable(body), "timing": {"wall_time_s": time.perf_counter() - t0,
                                                "created": time.strftime("%Y-%m-%dT%H:%M:%S")}}


def failed_assertions(record: dict) -> list[str]:
    return [k for k, v in record["body"]["assertions"].items() if not v]


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_record(record: dict, out_dir: str | os.PathLike) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = record["body"]["scenario"]["name"]
    path = out / f"{name}.jsonl"
    _atomic_write(path, json.dumps(record, sort_keys=True) + "\n")
    for key in record["body"]["series"]:
        emit_plot_data(record, key, out / f"{name}.{key}.tsv")
    return path


def read_records(path: str | os.PathLike) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def emit_plot_data(record: dict, selector: str, out_path: str | os.PathLike) -> Path:
    """Tab-separated columns with a '# name [unit]' header, doubles at 17 digits."""
    ser = record["body"]["series"]
    if selector not in ser:
        raise KeyError(f"unknown series {selector!r}; available: {sorted(ser)}")
    s = ser[selector]
    head = "# " + "\t".join(f"{c} [{u}]" for c, u in zip(s["columns"], s["units"]))
    lines = [head] + ["\t".join(_fmt(x) for x in row) for row in s["rows"]]
    path = Path(out_path)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def check_scenario(sc: Scenario) -> dict[str, bool]:
    """Cheap invariants of a scenario without running the experiment."""
    ctx = _Context(sc)
    checks = {}
    try:
        potentials.y_norm(ctx.V)
        checks["potential_admissible"] = True
    except potentials.AdmissibilityError:
        checks["potential_admissible"] = False
    cfg = _solver(sc.solver, **({"nonlinear": False, "cfl": 1.0} if sc.experiment == "support-growth" else {}))
    if sc.data and sc.data.get("family") != "steady_plus_bump":
        st = build_data(sc.data, ctx, cfg.h)
        checks["data_finite"] = bool(np.all(np.isfinite(st.v)) and np.all(np.isfinite(st.vt)))
        checks["data_regular_at_origin"] = st.v[0] == 0.0 and st.vt[0] == 0.0
    checks["cfl_stable"] = cfg.cfl <= 0.95 or not cfg.nonlinear
    return checks
