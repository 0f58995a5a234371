"""Config-driven experiment runner.

``nplab <experiment> --config run.json [--out DIR] [--threads N] [--no-cache] [--seed S]``

Each run writes ``<out>/<experiment>.csv`` and a JSON sidecar with the
extrapolation, target, error, diagnostics and an echo of the config.  Exit
status is 0 when every comparison passes, 1 when one fails and 2 for invalid
configs or unsupported combinations.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cache import ResultCache, cache_key
from .dunkl import WeightedMeasure, root_system_from_config
from .fields import field_from_config
from .heat import HeatKernel, completeness_check, semigroup_check
from .quad import DivergenceError, QuadSpec, UnsupportedError
from .regions import region_from_config

log = logging.getLogger("nplab")

EXPERIMENTS = ("seminorm", "ms_limit", "perimeter", "relative_limit", "xi", "iota",
               "weighted_perimeter", "fractal", "verify_kernel", "properties_suite")
_TOP_FIELDS = {"experiment", "root_system", "functions", "regions", "s_grid", "quad", "seed",
               "params", "tolerance", "target", "output"}


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` and ``line`` locate the problem."""

    def __init__(self, message, field=None, line=None):
        self.field, self.line = field, line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message}" + (f" ({', '.join(where)})" if where else ""))


def _line_of(text: str | None, key: str):
    if not text:
        return None
    idx = text.find(f'"{key}"')
    return text.count("\n", 0, idx) + 1 if idx >= 0 else None


@dataclasses.dataclass(frozen=True)
class RunConfig:
    experiment: str
    root_system: dict = dataclasses.field(default_factory=lambda: {"preset": "trivial", "dimension": 1})
    functions: dict = dataclasses.field(default_factory=dict)
    regions: dict = dataclasses.field(default_factory=dict)
    s_grid: tuple | None = None
    quad: dict = dataclasses.field(default_factory=dict)
    seed: int = 0
    params: dict = dataclasses.field(default_factory=dict)
    tolerance: dict = dataclasses.field(default_factory=dict)
    target: float | None = None
    output: str | None = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["s_grid"] = list(self.s_grid) if self.s_grid is not None else None
        return d

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
        return cls.from_dict(d, text)

    @classmethod
    def from_dict(cls, d, text: str | None = None) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        bad = sorted(set(d) - _TOP_FIELDS)
        if bad:
            raise ConfigError(f"unknown config field(s) {bad}", bad[0], _line_of(text, bad[0]))
        exp = d.get("experiment")
        if exp not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {list(EXPERIMENTS)}", "experiment",
                              _line_of(text, "experiment"))
        for name in ("root_system", "functions", "regions", "quad", "params", "tolerance"):
            if name in d and not isinstance(d[name], dict):
                raise ConfigError("must be an object", name, _line_of(text, name))
        s_grid = d.get("s_grid")
        if s_grid is not None:
            if not isinstance(s_grid, list) or not all(isinstance(v, (int, float)) and v > 0 for v in s_grid):
                raise ConfigError("must be a list of positive numbers", "s_grid", _line_of(text, "s_grid"))
            s_grid = tuple(float(v) for v in s_grid)
        seed = d.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigError("must be a 64-bit nonnegative integer", "seed", _line_of(text, "seed"))
        kw = {k: d[k] for k in ("root_system", "functions", "regions", "quad", "params", "tolerance",
                                "target", "output") if k in d}
        cfg = cls(experiment=exp, s_grid=s_grid, seed=seed, **kw)
        cfg.validate(text)
        return cfg

    def validate(self, text=None):
        """Build every tagged object once so errors surface before any quadrature."""
        try:
            root_system_from_config(self.root_system)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), "root_system", _line_of(text, "root_system")) from exc
        for name, spec in self.regions.items():
            try:
                region_from_config(spec)
            except (ValueError, TypeError, KeyError) as exc:
                raise ConfigError(str(exc), f"regions.{name}", _line_of(text, name)) from exc
        for name, spec in self.functions.items():
            try:
                field_from_config(spec)
            except (ValueError, TypeError, KeyError) as exc:
                raise ConfigError(str(exc), f"functions.{name}", _line_of(text, name)) from exc
        try:
            QuadSpec.from_dict(self.quad)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), "quad", _line_of(text, "quad")) from exc


@dataclasses.dataclass
class ResultTable:
    experiment: str
    columns: tuple
    rows: list
    extrapolated_limit: float | None = None
    target_value: float | None = None
    target_provenance: str = ""
    passed: bool = True
    diagnostics: dict = dataclasses.field(default_factory=dict)

    @property
    def relative_error(self):
        if self.extrapolated_limit is None or self.target_value is None:
            return None
        return abs(self.extrapolated_limit - self.target_value) / max(abs(self.target_value), 1e-12)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "columns": list(self.columns), "rows": self.rows,
                "extrapolated_limit": self.extrapolated_limit, "target_value": self.target_value,
                "target_provenance": self.target_provenance, "relative_error": self.relative_error,
                "passed": self.passed, "diagnostics": self.diagnostics}

    @classmethod
    def from_dict(cls, d) -> "ResultTable":
        return cls(d["experiment"], tuple(d["columns"]), d["rows"], d["extrapolated_limit"],
                   d["target_value"], d["target_provenance"], d["passed"], d["diagnostics"])

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj))
    return obj


# ---------------------------------------------------------------- experiments

class _Ctx:
    def __init__(self, cfg: RunConfig, threads: int):
        self.cfg = cfg
        self.spec = root_system_from_config(cfg.root_system)
        self.measure = WeightedMeasure(self.spec)
        self.kernel = HeatKernel(self.measure)
        self.quad = QuadSpec.from_dict({"seed": cfg.seed, **cfg.quad})
        self.threads = max(1, threads)
        self.p = cfg.params

    def region(self, name):
        if name not in self.cfg.regions:
            raise ConfigError("required region missing", f"regions.{name}")
        return region_from_config(self.cfg.regions[name])

    def function(self, name):
        if name not in self.cfg.functions:
            raise ConfigError("required function missing", f"functions.{name}")
        return field_from_config(self.cfg.functions[name])

    def s_grid(self, default):
        return list(self.cfg.s_grid) if self.cfg.s_grid is not None else list(default)

    def rtol(self, default):
        return float(self.cfg.tolerance.get("rtol", default))

    def map(self, fn, items):
        if self.threads == 1:
            return [fn(v) for v in items]
        with ThreadPoolExecutor(self.threads) as ex:
            return list(ex.map(fn, items))


def _s_rows(s_grid, values):
    return [(float(s), float(v), float(s) * float(v)) for s, v in zip(s_grid, values)]


def _pass_target(table: ResultTable, rtol):
    if table.target_value is not None and table.extrapolated_limit is not None:
        table.passed = bool(table.relative_error <= rtol)


def _exp_seminorm(c: _Ctx) -> ResultTable:
    from .seminorm import SeminormRequest, besov, conversion_constant, gagliardo_power
    f = c.function("f")
    p = float(c.p.get("p", 1.0))
    q = c.p.get("q")
    q = math.inf if q in ("inf", "infinity") else (None if q is None else float(q))
    grid = c.s_grid((0.1, 0.3, 0.5))
    res = c.map(lambda s: besov(SeminormRequest(f, p, s, c.kernel, q, c.quad)), grid)
    table = ResultTable("seminorm", ("s", "value", "s_times_value"), _s_rows(grid, [r.value for r in res]))
    rtol = c.rtol(1e-3)
    if c.kernel.kind == "classical_gaussian" and (q is None or q == p):
        comps = []
        for s, r in zip(grid, res):
            try:
                ref = conversion_constant(s, p, c.kernel.dim) * gagliardo_power(f, s, p, c.quad)
            except DivergenceError:
                ref = math.inf
            both_inf = math.isinf(ref) and r.diverging
            err = 0.0 if both_inf else abs(r.power - ref) / abs(ref)
            comps.append({"s": s, "besov_power": r.power, "gagliardo_route": ref, "rel_diff": err})
        table.diagnostics["conversion_identity"] = comps
        table.passed = all(cmp["rel_diff"] <= rtol for cmp in comps)
        table.target_provenance = "conversion identity between the Besov and Gagliardo forms"
    table.diagnostics["grid_sup_t"] = [r.grid_sup_t for r in res]
    return table


def _exp_ms_limit(c: _Ctx) -> ResultTable:
    from .seminorm import DEFAULT_S_GRID, ms_limit
    f = c.function("f")
    p = float(c.p.get("p", 1.0))
    grid = c.s_grid(DEFAULT_S_GRID)
    est = ms_limit(f, p, c.kernel, grid, c.quad)
    rows = [(float(s), float(v), float(sv)) for s, v, sv in zip(est.s, est.raw, est.scaled)]
    t = ResultTable("ms_limit", ("s", "value", "s_times_value"), rows, est.limit, est.target,
                    "dimension-free MS formula (4/p)||f||_p^p", diagnostics=est.to_dict())
    _pass_target(t, c.rtol(0.01 if c.kernel.chi == 0 else 0.02))
    t.passed = t.passed and not est.unreliable
    return t


def _exp_perimeter(c: _Ctx) -> ResultTable:
    from .extrapolate import extrapolate_limit
    from .perimeter import PERIMETER_S_GRID, perimeter_classical, perimeter_dunkl
    E, O = c.region("E"), c.region("Omega")
    kind = c.p.get("kind", "dunkl")
    grid = c.s_grid(PERIMETER_S_GRID)
    if kind == "classical":
        res = c.map(lambda s: perimeter_classical(E, O, s, c.quad), grid)
    elif kind == "dunkl":
        res = c.map(lambda s: perimeter_dunkl(c.kernel, E, O, s, c.quad), grid)
    else:
        raise ConfigError("params.kind must be 'dunkl' or 'classical'", "params.kind")
    vals = [r.value for r in res]
    t = ResultTable("perimeter", ("s", "value", "s_times_value"), _s_rows(grid, vals),
                    diagnostics={"terms": [list(r.decomposition) for r in res], "kind": kind})
    if len(grid) >= 2 and all(math.isfinite(v) for v in vals):
        # the s -> 0 extrapolation is informational; a target refers to a single s
        t.diagnostics["extrapolation"] = extrapolate_limit(grid, vals).to_dict()
    if c.cfg.target is not None:
        # a scalar target is compared against the value at the first grid point
        t.target_value = float(c.cfg.target)
        t.target_provenance = "configured target at s = %s" % _fmt(grid[0])
        t.passed = abs(vals[0] - t.target_value) <= c.rtol(1e-4) * abs(t.target_value)
        t.diagnostics["compared_value"] = vals[0]
    return t


def _exp_relative_limit(c: _Ctx) -> ResultTable:
    from .perimeter import PERIMETER_S_GRID, relative_limit_verify
    E, O = c.region("E"), c.region("Omega")
    grid = c.s_grid(PERIMETER_S_GRID)
    rtol = c.rtol(0.02)
    r = relative_limit_verify(c.kernel, E, O, grid, c.quad, rtol=rtol)
    est = r.pop("estimate")
    t = ResultTable("relative_limit", ("s", "value", "s_times_value"), _s_rows(grid, r["perimeters"]),
                    est.limit, r["target"], "relative perimeter limit 2[(1-Xi)mu(E∩Ω) + Xi mu(Eᶜ∩Ω)]",
                    diagnostics={**r, "extrapolation": est.to_dict()})
    t.passed = bool(r["passed"] and r["forms_agree"])
    return t


def _exp_xi(c: _Ctx) -> ResultTable:
    from .perimeter import XI_S_GRID, xi_estimate
    E = c.region("E")
    grid = c.s_grid(XI_S_GRID)
    x = c.p.get("x", 0.0)
    r = float(c.p.get("r", 1.0))
    second = tuple(c.p["second"]) if "second" in c.p else (0.7, 2.5)
    tf = xi_estimate(c.kernel, E, x, r, grid, c.quad, second=second)
    first = tf.xi_estimates[0]
    rows = [(float(s), float(v), float(sv)) for s, v, sv in zip(first.s, first.raw, first.scaled)]
    t = ResultTable("xi", ("s", "value", "s_times_value"), rows, tf.xi,
                    diagnostics={"flags": tf.flags, "estimates": [e.to_dict() for e in tf.xi_estimates]})
    if c.cfg.target is not None:
        t.target_value = float(c.cfg.target)
        t.target_provenance = "configured Xi target"
        t.passed = abs(tf.xi - t.target_value) <= float(c.cfg.tolerance.get("atol", 0.03))
    t.passed = t.passed and not tf.flags.get("inconsistent", False)
    return t


def _exp_iota(c: _Ctx) -> ResultTable:
    from .perimeter import XI_S_GRID, iota_estimate
    E = c.region("E")
    grid = c.s_grid(XI_S_GRID)
    est = iota_estimate(E, grid, c.quad)
    rows = [(float(s), float(v), float(sv)) for s, v, sv in zip(est.s, est.raw, est.scaled)]
    t = ResultTable("iota", ("s", "value", "s_times_value"), rows, est.limit, diagnostics=est.to_dict())
    if c.cfg.target is not None:
        t.target_value = float(c.cfg.target)
        t.target_provenance = "configured iota target"
        _pass_target(t, c.rtol(0.02))
    return t


def _exp_weighted(c: _Ctx) -> ResultTable:
    from .perimeter import weighted_vanishing_trend
    E, O = c.region("E"), c.region("Omega")
    grid = c.s_grid((0.2, 0.1, 0.05, 0.02))
    r = weighted_vanishing_trend(c.measure, E, O, grid, c.quad)
    t = ResultTable("weighted_perimeter", ("s", "value", "s_times_value"), _s_rows(r["s"], r["values"]),
                    r["s_times_value"][-1], 0.0, "vanishing limit of s times the weighted perimeter",
                    diagnostics=r)
    need_ratio = bool(c.p.get("require_ratio", True))
    t.passed = bool(r["passed"] if need_ratio else r["decreasing"])
    return t


def _exp_fractal(c: _Ctx) -> ResultTable:
    from .fractal import WeierstrassSpec, box_count_dimension, boundary_condition_fit, weierstrass_eval
    mode = c.p.get("mode", "box_count")
    if mode == "box_count":
        spec = WeierstrassSpec(float(c.p.get("a", 0.5)), float(c.p.get("b", 3.0)), int(c.p.get("terms", 16)))
        window = tuple(c.p.get("window", (0.0, 1.0)))
        res = box_count_dimension(lambda x: weierstrass_eval(spec, x), window,
                                  phase=float(c.p.get("phase", 0.0)))
        t = ResultTable("fractal", ("delta", "count", "residual"), res.rows(), res.dimension,
                        spec.graph_dimension, "graph dimension 2 + log_b a",
                        diagnostics={"content": res.content.tolist(), "intercept": res.intercept})
        t.passed = abs(res.dimension - spec.graph_dimension) <= float(c.cfg.tolerance.get("atol", 0.15))
        return t
    if mode == "boundary":
        O = c.region("Omega")
        r_grid = c.p.get("r_grid")
        fit = boundary_condition_fit(O, c.measure, None if r_grid is None else np.asarray(r_grid, float),
                                     c.quad, c.p.get("s0"), int(c.p.get("n_samples", 2 ** 18)))
        lay = fit.layers
        rows = [(float(r), float(m), float(e)) for r, m, e in zip(lay["r"], lay["measure"], lay["stderr"])]
        target = c.cfg.target
        t = ResultTable("fractal", ("r", "measure", "stderr"), rows, fit.eta,
                        None if target is None else float(target), "boundary-layer exponent",
                        diagnostics=fit.to_dict())
        if target is not None:
            t.passed = abs(fit.eta - float(target)) <= float(c.cfg.tolerance.get("atol", 0.05))
        t.passed = t.passed and fit.monotone
        return t
    raise ConfigError("params.mode must be 'box_count' or 'boundary'", "params.mode")


def _exp_verify_kernel(c: _Ctx) -> ResultTable:
    t_grid = [float(v) for v in c.p.get("t_grid", (0.1, 1.0, 10.0))]
    xs = c.p.get("x_samples")
    if xs is None:
        rng = np.random.default_rng(c.cfg.seed)
        xs = rng.uniform(-3, 3, (16, c.kernel.dim))
    comp = completeness_check(c.kernel, t_grid, np.asarray(xs, float), c.quad)
    semi = semigroup_check(c.kernel, int(c.p.get("n_tuples", 20)), c.cfg.seed, c.quad)
    rows = [(t, dev) for t, dev in comp["per_t"]]
    t = ResultTable("verify_kernel", ("t", "max_deviation"), rows,
                    diagnostics={"completeness": comp, "semigroup": semi})
    t.passed = comp["max_deviation"] < float(c.cfg.tolerance.get("completeness", 1e-6)) and \
        semi["max_rel_deviation"] < float(c.cfg.tolerance.get("semigroup", 1e-5))
    return t


def _exp_properties(c: _Ctx) -> ResultTable:
    from .perimeter import perimeter_properties_suite
    rep = perimeter_properties_suite(c.kernel, float(c.p.get("s", 0.2)), c.quad,
                                     int(c.p.get("n_instances", 10)), c.cfg.seed,
                                     float(c.p.get("slack", 2.0)))
    rows = []
    for name, v in rep.items():
        if isinstance(v, dict):
            metric = next((v[k] for k in ("max_rel_dev", "min_rel_slack") if k in v), None)
            if metric is None:
                metric = v["per_A"] - v["per_B"]
            rows.append((name, float(metric), bool(v["passed"])))
    t = ResultTable("properties_suite", ("property", "metric", "passed"), rows, diagnostics=rep)
    t.passed = bool(rep["passed"])
    return t


_DISPATCH = {"seminorm": _exp_seminorm, "ms_limit": _exp_ms_limit, "perimeter": _exp_perimeter,
             "relative_limit": _exp_relative_limit, "xi": _exp_xi, "iota": _exp_iota,
             "weighted_perimeter": _exp_weighted, "fractal": _exp_fractal,
             "verify_kernel": _exp_verify_kernel, "properties_suite": _exp_properties}


def run(cfg: RunConfig, threads: int = 1, cache: ResultCache | None = None) -> ResultTable:
    """Execute one experiment; results are cached by the canonical config."""
    key_cfg = cfg.to_dict()
    key_cfg.pop("output", None)
    key = cache_key(cfg.experiment, key_cfg, QuadSpec.from_dict({"seed": cfg.seed, **cfg.quad}).to_dict())
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            try:
                table = ResultTable.from_dict(hit)
                table.diagnostics["cache"] = "hit"
                return table
            except (KeyError, TypeError):
                log.warning("cache entry has the wrong shape; recomputing")
    t0 = time.perf_counter()
    table = _DISPATCH[cfg.experiment](_Ctx(cfg, threads))
    table.diagnostics = _jsonable(table.diagnostics)
    table.diagnostics["wall_time"] = time.perf_counter() - t0
    table.rows = _jsonable(table.rows)
    if cache is not None:
        cache.put(key, _jsonable(table.to_dict()))
    return table


def write_outputs(table: ResultTable, cfg: RunConfig, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg.experiment}.csv"
    json_path = out / f"{cfg.experiment}.json"
    csv_path.write_text(table.csv_text())
    side = {**_jsonable(table.to_dict()), "config": cfg.to_dict(), "version": __version__}
    json_path.write_text(json.dumps(side, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return csv_path, json_path


def _threads(flag):
    if flag is not None:
        return int(flag)
    env = os.environ.get("NPLAB_THREADS")
    try:
        return int(env) if env else 1
    except ValueError:
        log.warning("ignoring non-integer NPLAB_THREADS=%r", env)
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nplab", description=__doc__.splitlines()[0])
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default=None, help="output directory (default: config 'output' or ./results)")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (overrides NPLAB_THREADS)")
    ap.add_argument("--no-cache", action="store_true", help="disable the on-disk result cache")
    ap.add_argument("--cache-dir", default=None, help="cache directory (default: NPLAB_CACHE_DIR or ~/.cache/nplab)")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    ap.add_argument("--version", action="version", version=f"nplab {__version__}")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="nplab: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"nplab: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = RunConfig.parse(text)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for '{cfg.experiment}', not '{args.experiment}'", "experiment",
                              _line_of(text, "experiment"))
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
            cfg.validate()
        cache = ResultCache(args.cache_dir, enabled=not args.no_cache)
        table = run(cfg, _threads(args.threads), cache)
    except ConfigError as exc:
        print(f"nplab: config error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedError as exc:
        print(f"nplab: unsupported: {exc}", file=sys.stderr)
        return 2
    out = args.out or cfg.output or "results"
    csv_path, _ = write_outputs(table, cfg, out)
    status = "PASS" if table.passed else "FAIL"
    lim = "" if table.extrapolated_limit is None else f" limit={_fmt(table.extrapolated_limit)}"
    tgt = "" if table.target_value is None else f" target={_fmt(table.target_value)}"
    print(f"{cfg.experiment}: {status}{lim}{tgt} -> {csv_path}")
    return 0 if table.passed else 1


if __name__ == "__main__":
    sys.exit(main())
