"""Batch front-end: JSON configuration, named experiments and artifact emission.

Usage::

    nlskdv-lab run <config.json> [--jobs N] [--output DIR] [--seed S]
    nlskdv-lab thresholds --branch {resonant|nonresonant}

Exit status is 0 on success, 2 when the configuration is invalid and 3 when
the time integration produced non-finite values.  ``manifest.json`` is
written in every case once the output directory is known.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bourgain_lab import LEMMAS, estimate_ratio, strichartz_ratio
from .commutators import E11_READINGS, READINGS, derivative_identity_residual
from .continuation import BRANCHES, ContinuationConfig, continuation_run, gwp_threshold
from .errors import ConfigurationError, HypothesisViolation, InstabilityError, SizeError
from .functionals import momentum_L, energy_E, modified_functionals, observer
from .i_operator import IOperatorSpec
from .initial_data import plane_wave_state, power_law_state, smooth_random_state
from .output import csv_text, emit_json, emit_svg, ensure_dir
from .solver import SCHEMES, SolverConfig, SystemParams, SystemState, integrate, sample_trajectory
from .spectral_core import Grid

log = logging.getLogger("nlskdv_lab")

EXPERIMENTS = ("simulate", "almost_conservation_sweep", "identity_residual", "lemma_ratios",
               "thresholds", "continuation")
EXIT_OK, EXIT_VALIDATION, EXIT_INSTABILITY = 0, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
INITIAL_KINDS = ("zero", "smooth", "power_law", "plane_wave")

_NUM = (int, float)
# section -> key -> (accepted types, default)
SCHEMA = {
    "spectral_core": {"M": (int, 64)},
    "solver": {"dt": (_NUM, 1e-4), "scheme": (str, "strang"), "alpha": (_NUM, 1.0),
               "beta": (_NUM, 1.0), "gamma": (_NUM, 1.0)},
    "i_operator": {"N": (_NUM, 16), "s": (_NUM, 0.9), "variant": (str, "smooth")},
    "initial_data": {"kind": (str, "smooth"), "amplitude": (_NUM, 0.5), "decay": (_NUM, 0.5),
                     "s": (_NUM, None), "eps": (_NUM, 0.1), "norm": (_NUM, 1.0), "k": (int, 1)},
    "simulate": {"T": (_NUM, 0.1), "stride": (int, 10)},
    "sweep": {"N_values": (list, [8, 16, 32, 64]), "delta": (_NUM, 0.1)},
    "commutators": {"t": (_NUM, 0.01), "h_values": (list, [1e-3, 5e-4, 2.5e-4]),
                    "reading": (str, "derived"), "e11_reading": (str, "inner_square")},
    "bourgain_lab": {"lemmas": (list, []), "sample_count": (int, 100), "M": (int, 16),
                     "M_t": (int, 32), "window": (_NUM, 4.0), "strichartz": (bool, False),
                     "time_loc_M_t": (int, 2048)},
    "continuation": {"s": (_NUM, 0.95), "N": (_NUM, 32), "T_goal": (_NUM, 1.0),
                     "c_delta": (_NUM, 1.0), "eps": (_NUM, 0.0), "beta_zero": (bool, None),
                     "branch": (str, "nonresonant")},
}
TOP_KEYS = {"experiment", "seed", "output_dir", *SCHEMA}


# --------------------------------------------------------------------------
# configuration


def _section(raw: dict, name: str) -> dict:
    given = raw.get(name, {})
    if not isinstance(given, dict):
        raise ConfigurationError(f"section {name!r} must be a JSON object")
    spec = SCHEMA[name]
    unknown = sorted(set(given) - set(spec))
    if unknown:
        raise ConfigurationError(f"unknown keys in {name!r}: {unknown}; valid keys: {sorted(spec)}")
    out = {}
    for key, (types, default) in spec.items():
        val = given.get(key, default)
        if val is not None:
            if isinstance(val, bool) and types is not bool:
                raise ConfigurationError(f"{name}.{key} must not be a boolean")
            if not isinstance(val, types):
                raise ConfigurationError(f"{name}.{key} has invalid type {type(val).__name__}")
            if isinstance(val, float) and not math.isfinite(val):
                raise ConfigurationError(f"{name}.{key} must be finite")
        out[key] = val
    return out


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    output_dir: str | None
    sections: dict
    raw: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("configuration must be a JSON object")
        unknown = sorted(set(raw) - TOP_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown top-level keys {unknown}; valid keys: {sorted(TOP_KEYS)}")
        exp = raw.get("experiment")
        if exp not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {exp!r}; valid experiments: {', '.join(EXPERIMENTS)}")
        seed = raw.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigurationError(f"seed must be an integer in [0, 2^64), got {seed!r}")
        out_dir = raw.get("output_dir")
        if out_dir is not None and not isinstance(out_dir, str):
            raise ConfigurationError("output_dir must be a string")
        sections = {name: _section(raw, name) for name in SCHEMA}
        cfg = cls(exp, seed, out_dir, sections, raw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigurationError(f"configuration file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"configuration {path} is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def __getitem__(self, name):
        return self.sections[name]

    # typed views ---------------------------------------------------------

    def grid(self) -> Grid:
        return Grid(self["spectral_core"]["M"])

    def params(self) -> SystemParams:
        s = self["solver"]
        return SystemParams(float(s["alpha"]), float(s["beta"]), float(s["gamma"]))

    def solver_config(self) -> SolverConfig:
        s = self["solver"]
        return SolverConfig(float(s["dt"]), s["scheme"])

    def i_spec(self, N=None) -> IOperatorSpec:
        s = self["i_operator"]
        return IOperatorSpec.from_regularity(float(N if N is not None else s["N"]), float(s["s"]),
                                             s["variant"])

    def initial_state(self) -> SystemState:
        d = self["initial_data"]
        g = self.grid()
        kind = d["kind"]
        if kind == "zero":
            return SystemState.from_arrays(0.0, g, np.zeros(g.M, complex), np.zeros(g.M, complex))
        if kind == "smooth":
            return smooth_random_state(g, self.seed, float(d["amplitude"]), float(d["decay"]))
        if kind == "power_law":
            s = d["s"] if d["s"] is not None else self["i_operator"]["s"]
            return power_law_state(g, self.seed, float(s), float(d["eps"]), float(d["norm"]))
        return plane_wave_state(g, d["k"], complex(d["amplitude"]))

    def validate(self):
        """Construct every object the experiment needs so invalid values fail early."""
        self.grid()
        if self["initial_data"]["kind"] not in INITIAL_KINDS:
            raise ConfigurationError(f"initial_data.kind must be one of {INITIAL_KINDS}")
        if self["solver"]["scheme"] not in SCHEMES:
            raise ConfigurationError(f"solver.scheme must be one of {SCHEMES}")
        exp = self.experiment
        if exp in ("simulate", "almost_conservation_sweep", "identity_residual", "continuation"):
            self.solver_config()
            self.params()
            self.initial_state()
        if exp in ("simulate", "almost_conservation_sweep", "identity_residual"):
            self.i_spec()
        if exp == "simulate":
            sim = self["simulate"]
            if not sim["T"] > 0 or sim["stride"] < 1:
                raise ConfigurationError("simulate.T must be positive and simulate.stride >= 1")
        elif exp == "almost_conservation_sweep":
            sw = self["sweep"]
            Ns = sw["N_values"]
            if not Ns or not all(isinstance(n, _NUM) and not isinstance(n, bool) and n >= 1 for n in Ns):
                raise ConfigurationError("sweep.N_values must be a nonempty list of numbers >= 1")
            if not sw["delta"] > 0:
                raise ConfigurationError("sweep.delta must be positive")
            for n in Ns:
                self.i_spec(n)
        elif exp == "identity_residual":
            c = self["commutators"]
            if c["reading"] not in READINGS or c["e11_reading"] not in E11_READINGS:
                raise ConfigurationError(f"commutators.reading must be in {READINGS} and "
                                         f"commutators.e11_reading in {E11_READINGS}")
            hs = c["h_values"]
            if not hs or not all(isinstance(h, _NUM) and not isinstance(h, bool) and 0 < h < c["t"] for h in hs):
                raise ConfigurationError("commutators.h_values must be positive and below commutators.t")
        elif exp == "lemma_ratios":
            b = self["bourgain_lab"]
            if b["sample_count"] < 1:
                raise ConfigurationError("bourgain_lab.sample_count must be >= 1")
            if not b["lemmas"] and not b["strichartz"]:
                raise ConfigurationError("bourgain_lab.lemmas is empty and strichartz is off")
            Grid(b["M"])
            for item in b["lemmas"]:
                _lemma_spec(item)
        elif exp == "thresholds":
            if self["continuation"]["branch"] not in BRANCHES:
                raise ConfigurationError(f"continuation.branch must be one of {tuple(BRANCHES)}")
        elif exp == "continuation":
            self.continuation_config()

    def continuation_config(self) -> ContinuationConfig:
        c = self["continuation"]
        return ContinuationConfig(Fraction(c["s"]).limit_denominator(10 ** 6), float(c["N"]),
                                  float(c["T_goal"]), float(c["c_delta"]), float(c["eps"]),
                                  c["beta_zero"])

    def echo(self) -> dict:
        return {"experiment": self.experiment, "seed": self.seed, "output_dir": self.output_dir,
                **self.sections}

    def digest(self) -> str:
        text = json.dumps(self.echo(), sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()


def _lemma_spec(item) -> tuple[str, dict]:
    if not isinstance(item, dict) or "id" not in item:
        raise ConfigurationError("each bourgain_lab.lemmas entry needs an 'id'")
    lid = item["id"]
    if lid not in LEMMAS:
        raise ConfigurationError(f"unknown lemma {lid!r}; valid lemmas: {', '.join(LEMMAS)}")
    params = {k: v for k, v in item.items() if k != "id"}
    allowed = {"k", "s", "b", "b_prime", "reg"}
    bad = sorted(set(params) - allowed)
    if bad:
        raise ConfigurationError(f"lemma {lid}: unknown parameters {bad}")
    for k, v in params.items():
        if isinstance(v, bool) or not isinstance(v, _NUM):
            raise ConfigurationError(f"lemma {lid}: parameter {k} must be a number")
    return lid, params


# --------------------------------------------------------------------------
# worker pool with staged outputs


def _run_point(job):
    index, func, args, staging = job
    result = func(*args)
    path = Path(staging) / f"point_{index:05d}.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(result, sort_keys=True, default=str))
    os.replace(tmp, path)
    return index


def run_points(func, arg_list, jobs: int = 1) -> list:
    """Evaluate ``func(*args)`` for each entry, staging each result in its own file.

    The results are merged in input order, so the outcome is independent of
    ``jobs`` and of completion order.
    """
    with tempfile.TemporaryDirectory(prefix="nlskdv-stage-") as staging:
        work = [(i, func, tuple(a), staging) for i, a in enumerate(arg_list)]
        if jobs > 1 and len(work) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(_run_point, work))
        else:
            for w in work:
                _run_point(w)
        return [json.loads((Path(staging) / f"point_{i:05d}.json").read_text())
                for i in range(len(work))]


# --------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentOutcome:
    rows: list
    columns: list | None = None
    plot: dict | None = None
    metadata: dict = field(default_factory=dict)
    failure: dict | None = None


def _fit_loglog(xs, ys):
    x = np.log(np.asarray(xs, float))
    y = np.log(np.asarray(ys, float))
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), (y - (slope * x + icpt)).tolist()


def experiment_simulate(cfg: ExperimentConfig, jobs: int) -> ExperimentOutcome:
    state = cfg.initial_state()
    params, spec = cfg.params(), cfg.i_spec()
    sim = cfg["simulate"]
    res = integrate(state, float(sim["T"]), cfg.solver_config(), params,
                    observers=[observer(params, spec)], stride=sim["stride"])
    rows = res.records
    cols = ["t", "mass", "L", "E", "IL", "IE", "u_H1", "v_H1"]
    plot = {"series": {c: ([r["t"] for r in rows], [r[c] for r in rows]) for c in ("mass", "L", "E")},
            "x_label": "t", "y_label": "functional value", "log": False}
    return ExperimentOutcome(rows, cols, plot, {"steps": res.steps})


@dataclass
class SweepResult:
    rows: list
    slope_L: float | None
    slope_E: float | None
    metadata: dict


def _sweep_point(N, s, variant, params_t, M, u0, v0, u1, v1):
    grid = Grid(M)
    params = SystemParams(*params_t)
    spec = IOperatorSpec.from_regularity(float(N), s, variant)
    a = SystemState.from_arrays(0.0, grid, np.array(u0), np.array(v0))
    b = SystemState.from_arrays(0.0, grid, np.array(u1), np.array(v1))
    L0, E0 = modified_functionals(a.u, a.v, spec, params)
    L1, E1 = modified_functionals(b.u, b.v, spec, params)
    return {"N": N, "IL_0": L0, "IE_0": E0, "increment_L": L1 - L0, "increment_E": E1 - E0}


def _as_pairs(c):
    return [[float(z.real), float(z.imag)] for z in c]


def _from_pairs(p):
    return np.array([complex(a, b) for a, b in p])


def almost_conservation_sweep(cfg: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Increments of ``L(Iu, Iv)`` and ``E(Iu, Iv)`` over ``[0, δ]`` for each ``N``.

    One trajectory is computed; the per-``N`` evaluations are the sweep
    points handed to the worker pool.
    """
    state = cfg.initial_state()
    params = cfg.params()
    sw = cfg["sweep"]
    delta = float(sw["delta"])
    t0 = time.perf_counter()
    end = integrate(state, delta, cfg.solver_config(), params).state
    wall = time.perf_counter() - t0
    io = cfg["i_operator"]
    args = [(N, float(io["s"]), io["variant"], (params.alpha, params.beta, params.gamma), cfg.grid().M,
             _as_pairs(state.u.coeffs), _as_pairs(state.v.coeffs),
             _as_pairs(end.u.coeffs), _as_pairs(end.v.coeffs)) for N in sw["N_values"]]
    pts = run_points(_wrap_sweep_point, args, jobs)
    ok = [p for p in pts if all(math.isfinite(p[k]) and p[k] != 0 for k in ("increment_L", "increment_E"))]
    slope_L = slope_E = None
    resid_L = resid_E = {}
    if len(ok) >= 3:
        Ns = [p["N"] for p in ok]
        slope_L, rl = _fit_loglog(Ns, [abs(p["increment_L"]) for p in ok])
        slope_E, re = _fit_loglog(Ns, [abs(p["increment_E"]) for p in ok])
        resid_L = dict(zip(Ns, rl))
        resid_E = dict(zip(Ns, re))
    rows = []
    for p in pts:
        rows.append({"N": p["N"], "increment_L": p["increment_L"], "increment_E": p["increment_E"],
                     "slope_L": slope_L, "slope_E": slope_E,
                     "residual_L": resid_L.get(p["N"]), "residual_E": resid_E.get(p["N"])})
    drift_L = momentum_L(end.u, end.v, params) - momentum_L(state.u, state.v, params)
    drift_E = energy_E(end.u, end.v, params) - energy_E(state.u, state.v, params)
    meta = {"delta": delta, "integration_wall_time": wall, "unmodified_drift_L": drift_L,
            "unmodified_drift_E": drift_E, "succeeded_points": len(ok)}
    return SweepResult(rows, slope_L, slope_E, meta)


def _wrap_sweep_point(*args):
    args = list(args)
    for i in range(5, 9):
        args[i] = _from_pairs(args[i])
    return _sweep_point(*args)


def experiment_sweep(cfg, jobs):
    res = almost_conservation_sweep(cfg, jobs)
    Ns = [r["N"] for r in res.rows]
    plot = {"series": {"|increment_L|": (Ns, [abs(r["increment_L"]) for r in res.rows]),
                       "|increment_E|": (Ns, [abs(r["increment_E"]) for r in res.rows])},
            "x_label": "N", "y_label": "|increment|", "log": True}
    meta = dict(res.metadata, slope_L=res.slope_L, slope_E=res.slope_E)
    cols = ["N", "increment_L", "increment_E", "slope_L", "slope_E", "residual_L", "residual_E"]
    return ExperimentOutcome(res.rows, cols, plot, meta)


def experiment_identity_residual(cfg, jobs):
    c = cfg["commutators"]
    t, hs = float(c["t"]), [float(h) for h in c["h_values"]]
    times = sorted({t} | {t - h for h in hs} | {t + h for h in hs})
    state = cfg.initial_state()
    params, spec = cfg.params(), cfg.i_spec()
    traj = sample_trajectory(state, times, cfg.solver_config(), params)
    rows = []
    for h in hs:
        rl, re = derivative_identity_residual(traj, t, h, spec, params, c["reading"], c["e11_reading"])
        rows.append({"h": h, "res_L": rl, "res_E": re})
    meta = {}
    if len(rows) >= 2:
        pos = [r for r in rows if r["res_L"] > 0 and r["res_E"] > 0]
        if len(pos) >= 2:
            meta["order_L"], _ = _fit_loglog([r["h"] for r in pos], [r["res_L"] for r in pos])
            meta["order_E"], _ = _fit_loglog([r["h"] for r in pos], [r["res_E"] for r in pos])
    plot = {"series": {"res_L": ([r["h"] for r in rows], [r["res_L"] for r in rows]),
                       "res_E": ([r["h"] for r in rows], [r["res_E"] for r in rows])},
            "x_label": "h", "y_label": "normalized residual", "log": True}
    return ExperimentOutcome(rows, ["h", "res_L", "res_E"], plot, meta)


def _lemma_point(kind, lemma_id, params, sample_count, seed, M, M_t, window):
    if kind == "strichartz":
        out = strichartz_ratio(sample_count, Grid(M), seed, M_t, window)
        return [dict(st.as_row(), params="") for st in out.values()]
    st = estimate_ratio(lemma_id, params, sample_count, seed, M, M_t, window)
    label = ";".join(f"{k}={params[k]}" for k in sorted(params))
    return [dict(st.as_row(), params=label)]


def experiment_lemma_ratios(cfg, jobs):
    b = cfg["bourgain_lab"]
    args = []
    if b["strichartz"]:
        args.append(("strichartz", "", {}, b["sample_count"], cfg.seed, b["M"], b["M_t"], b["window"]))
    for item in b["lemmas"]:
        lid, params = _lemma_spec(item)
        mt = b["time_loc_M_t"] if lid == "time_loc" else b["M_t"]
        args.append(("lemma", lid, params, b["sample_count"], cfg.seed, b["M"], mt, b["window"]))
    rows = [r for chunk in run_points(_lemma_point, args, jobs) for r in chunk]
    cols = ["label", "params", "count", "max", "q0.5", "q0.9", "q0.99", "exponent"]
    return ExperimentOutcome(rows, cols, None, {})


def threshold_rows(branch: str) -> list:
    return gwp_threshold(None, branch).rows()


def experiment_thresholds(cfg, jobs):
    branch = cfg["continuation"]["branch"]
    rep = gwp_threshold(None, branch)
    return ExperimentOutcome(rep.rows(), ["inequality", "threshold"], None,
                             {"branch": branch, "p_delta": str(rep.p_delta), "provenance": rep.provenance})


def experiment_continuation(cfg, jobs):
    state = cfg.initial_state()
    ccfg = cfg.continuation_config()
    rep = continuation_run(state.u, state.v, ccfg, cfg.params(), cfg.solver_config())
    rows = rep.rows()
    cols = ["leg", "t_start", "delta", "proxy", "mass", "IL", "IE", "dIL", "dIE", "usage_L", "usage_E"]
    plot = None
    if rows:
        ts = [r["t_start"] + r["delta"] for r in rows]
        plot = {"series": {"usage_L": (ts, [r["usage_L"] for r in rows]),
                           "usage_E": (ts, [r["usage_E"] for r in rows])},
                "x_label": "t", "y_label": "budget usage", "log": False}
    meta = {"legs": rep.leg_count, "total_time": rep.total_time, "budget_L": rep.budget_L,
            "budget_E": rep.budget_E, "breach_leg": rep.breach_leg, "breach_quantity": rep.breach_quantity}
    failure = None
    if rep.instability is not None:
        failure = {"kind": "instability", "t": rep.instability.t, "leg": rep.leg_count}
    return ExperimentOutcome(rows, cols, plot, meta, failure)


RUNNERS = {
    "simulate": experiment_simulate,
    "almost_conservation_sweep": experiment_sweep,
    "identity_residual": experiment_identity_residual,
    "lemma_ratios": experiment_lemma_ratios,
    "thresholds": experiment_thresholds,
    "continuation": experiment_continuation,
}


# --------------------------------------------------------------------------
# driver


def _versions() -> dict:
    return {"nlskdv_lab": __version__, "numpy": np.__version__, "python": platform.python_version()}


def run(config_path, jobs: int = 1, output: str | None = None, seed: int | None = None) -> int:
    """Execute one configured experiment and write its artifacts; return the exit status."""
    started = time.perf_counter()
    manifest = {"config_path": str(config_path), "versions": _versions(), "jobs": jobs}
    out_dir = Path(output) if output else None
    try:
        try:
            with open(config_path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigurationError(f"configuration file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"configuration {config_path} is not valid JSON: {exc}") from None
        if isinstance(raw, dict):
            if seed is not None:
                raw = dict(raw, seed=seed)
            if out_dir is None and isinstance(raw.get("output_dir"), str):
                out_dir = Path(raw["output_dir"])
        if jobs < 1:
            raise ConfigurationError(f"--jobs must be >= 1, got {jobs}")
        cfg = ExperimentConfig.from_dict(raw)
    except (ConfigurationError, HypothesisViolation, SizeError) as exc:
        log.error("validation failure: %s", exc)
        manifest.update(status="validation_failure", exit_code=EXIT_VALIDATION, error=str(exc))
        _finish(out_dir or Path("nlskdv-lab-output"), manifest, started)
        return EXIT_VALIDATION

    out_dir = out_dir or Path(cfg.output_dir or "nlskdv-lab-output")
    manifest.update(experiment=cfg.experiment, seed=cfg.seed, config=cfg.echo(), config_hash=cfg.digest())
    ensure_dir(out_dir)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            outcome = RUNNERS[cfg.experiment](cfg, jobs)
    except InstabilityError as exc:
        log.error("numerical instability at t=%g", exc.t)
        manifest.update(status="instability", exit_code=EXIT_INSTABILITY,
                        failure={"kind": "instability", "t": exc.t, "leg": None}, error=str(exc))
        _finish(out_dir, manifest, started)
        return EXIT_INSTABILITY
    except (ConfigurationError, HypothesisViolation, SizeError) as exc:
        log.error("validation failure: %s", exc)
        manifest.update(status="validation_failure", exit_code=EXIT_VALIDATION, error=str(exc))
        _finish(out_dir, manifest, started)
        return EXIT_VALIDATION

    outputs = []
    if outcome.rows:
        (out_dir / "results.csv").write_bytes(csv_text(outcome.rows, outcome.columns).encode("utf-8"))
        outputs.append("results.csv")
    if outcome.plot is not None:
        p = outcome.plot
        emit_svg(p["series"], out_dir / "plot.svg", p["x_label"], p["y_label"], p["log"], cfg.experiment)
        outputs.append("plot.svg")
    code = EXIT_OK if outcome.failure is None else EXIT_INSTABILITY
    manifest.update(status="ok" if code == EXIT_OK else "instability", exit_code=code,
                    outputs=outputs, metadata=outcome.metadata)
    if outcome.failure is not None:
        manifest["failure"] = outcome.failure
    _finish(out_dir, manifest, started)
    log.info("experiment %s finished with status %d in %s", cfg.experiment, code, out_dir)
    return code


def _finish(out_dir: Path, manifest: dict, started: float):
    manifest["wall_time"] = time.perf_counter() - started
    try:
        ensure_dir(out_dir)
        emit_json(manifest, out_dir / "manifest.json")
    except OSError as exc:
        log.error("%s", exc)


def configure_logging():
    level_name = os.environ.get("NLSKDV_LAB_LOG", "error").strip().lower()
    if level_name not in LOG_LEVELS:
        sys.stderr.write(f"NLSKDV_LAB_LOG must be one of {sorted(LOG_LEVELS)}; using 'error'\n")
        level_name = "error"
    logging.basicConfig(level=LOG_LEVELS[level_name], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlskdv-lab", description="NLS-KdV numerical laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the experiment described by a JSON configuration")
    r.add_argument("config")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--output")
    r.add_argument("--seed", type=int)
    t = sub.add_parser("thresholds", help="print the exact regularity thresholds")
    t.add_argument("--branch", choices=sorted(BRANCHES), required=True)
    return p


def main(argv=None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    if args.command == "thresholds":
        sys.stdout.write(csv_text(threshold_rows(args.branch), ["inequality", "threshold"]))
        return EXIT_OK
    return run(args.config, args.jobs, args.output, args.seed)


if __name__ == "__main__":
    sys.exit(main())
