"""JSON run configuration.

A file names one model, its parameters, optional threshold overrides, an
optional one-parameter sweep and the outputs to write.  Model parameters
sit at the top level under their short names (``t1``, ``N``, ``gamma``,
``N_L`` ...)::

    {"schema": 1, "model": "hn", "t1": 1, "t2": 0.6, "t3": 1, "t4": 0.75,
     "N": 50, "N_d": 25, "strong_defect": true,
     "sweep": {"parameter": "t4", "values": [0.5, 0.75]},
     "outputs": [{"kind": "states_csv", "path": "states.csv"}]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .builders import HnParams, SshParams, apply_defect_strength, hn_strong_defect
from .classify import Thresholds
from .errors import ConfigError, SpecificationError
from .spectral import DEFAULT_NK

SCHEMA_VERSION = 1
OUTPUT_KINDS = ("spectrum_csv", "states_csv", "loop_csv", "svg_spectrum", "svg_profiles")
DEFAULT_OUTPUTS = {"spectrum_csv": "spectrum.csv", "states_csv": "states.csv",
                   "loop_csv": "loop.csv", "svg_spectrum": "spectrum.svg",
                   "svg_profiles": "profiles.svg"}

# config key -> dataclass field
HN_KEYS = {"t1": "t1", "t2": "t2", "t3": "t3", "t4": "t4", "N": "n_sites", "N_d": "defect_site",
           "t1p": "t1p", "t2p": "t2p", "t1pp": "t1pp", "t2pp": "t2pp",
           "t3p": "t3p", "t4p": "t4p", "t3pp": "t3pp", "t4pp": "t4pp"}
SSH_KEYS = {"t": "t", "gamma": "gamma", "N_L": "n_cells_left", "N_R": "n_cells_right",
            "t0": "t0", "t0p": "t0p", "t1pp": "t1pp", "t2pp": "t2pp", "t3pp": "t3pp",
            "t4pp": "t4pp", "p": "p"}
MODEL_KEYS = {"hn": HN_KEYS, "ssh": SSH_KEYS}
INT_KEYS = {"N", "N_d", "N_L", "N_R"}
REQUIRED = {"hn": ("t1", "t2", "t3", "t4", "N"), "ssh": ("t", "gamma", "N_L", "N_R")}
EXTRA = {"hn": ("strong_defect",), "ssh": ()}

TOP_KEYS = {"schema", "model", "bc", "n_k", "thresholds", "sweep", "outputs",
            "n_range", "t_range", "profiles"}
THRESHOLD_KEYS = {"theta_b", "theta_d", "w", "eps_loop", "eps_deg"}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict[str, Any]  # config keys -> values, exactly as in the file
    bc: str = "obc"
    n_k: int = DEFAULT_NK
    thresholds: Thresholds = field(default_factory=Thresholds)
    sweep: Sweep | None = None
    outputs: tuple[tuple[str, str], ...] = tuple(DEFAULT_OUTPUTS.items())
    n_range: tuple[int, int, int] | None = None  # start, stop (inclusive), step
    t_range: tuple[float, float, float] | None = None
    profiles: tuple[complex, ...] | None = None  # None: every defect-labelled state

    def sweep_values(self) -> list[float | None]:
        return [None] if self.sweep is None else list(self.sweep.values)

    def model_params(self, value: float | None = None) -> HnParams | SshParams:
        """Parameter record for one sweep point (``value`` replaces the swept key)."""
        raw = dict(self.params)
        if value is not None:
            raw[self.sweep.parameter] = value
        try:
            return _build(self.model, raw)
        except SpecificationError as exc:
            where = "" if value is None else f" at {self.sweep.parameter}={value!r}"
            raise ConfigError(f"invalid model parameters{where}: {exc}") from exc

    def sizes(self) -> list[int]:
        if self.n_range is None:
            raise ConfigError("n_range is required for the critical size")
        a, b, s = self.n_range
        return list(range(a, b + 1, s))

    def t_values(self) -> list[float]:
        if self.t_range is None:
            raise ConfigError("t_range is required for the gap scan")
        a, b, s = self.t_range
        n = int(round((b - a) / s))
        return [round(a + i * s, 12) for i in range(n + 1)]


def _build(model: str, raw: dict[str, Any]):
    keys = MODEL_KEYS[model]
    kw = {keys[k]: v for k, v in raw.items() if k in keys}
    if model == "hn":
        if raw.get("strong_defect"):
            given = [k for k in raw if k.endswith("p") and k in keys]
            if given:
                raise SpecificationError(f"strong_defect fixes the defect couplings; drop {given[0]!r}")
            return hn_strong_defect(kw["t1"], kw["t2"], kw["t3"], kw["t4"], kw["n_sites"],
                                    kw.get("defect_site"))
        return HnParams(**kw)
    params = SshParams(**kw)
    return params if params.p is None else apply_defect_strength(params)


# -- parsing -----------------------------------------------------------------

def _fail(msg: str):
    raise ConfigError(msg)


def _number(key, v, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{key!r} must be a number, got {type(v).__name__}")
    if integer and (not isinstance(v, int) and not float(v).is_integer()):
        _fail(f"{key!r} must be an integer, got {v!r}")
    if not math.isfinite(v):
        _fail(f"{key!r} must be finite")
    return int(v) if integer else v


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        _fail(f"{where} must be an object")
    for k in obj:
        if k not in allowed:
            _fail(f"unknown key {k!r} in {where}")


def _triple(key, v, integer):
    if not isinstance(v, list) or len(v) != 3:
        _fail(f"{key!r} must be [start, stop, step]")
    a, b, s = (_number(key, x, integer) for x in v)
    if not s > 0 or b < a:
        _fail(f"{key!r} needs step > 0 and stop >= start")
    return a, b, s


def parse_config(data: Any) -> RunConfig:
    if not isinstance(data, dict):
        _fail("top level must be a JSON object")
    if "schema" not in data:
        _fail("missing key 'schema'")
    if data["schema"] != SCHEMA_VERSION:
        _fail(f"unsupported 'schema' {data['schema']!r}; expected {SCHEMA_VERSION}")
    model = data.get("model")
    if model not in MODEL_KEYS:
        _fail(f"'model' must be one of {sorted(MODEL_KEYS)}, got {model!r}")
    keys = MODEL_KEYS[model]
    _check_keys(data, TOP_KEYS | set(keys) | set(EXTRA[model]), "config")
    for k in REQUIRED[model]:
        if k not in data:
            _fail(f"missing key {k!r} for model {model!r}")

    params = {}
    for k in keys:
        if k in data and data[k] is not None:
            params[k] = _number(k, data[k], integer=k in INT_KEYS)
    if model == "hn" and "strong_defect" in data:
        if not isinstance(data["strong_defect"], bool):
            _fail("'strong_defect' must be true or false")
        params["strong_defect"] = data["strong_defect"]

    bc = data.get("bc", "obc")
    if bc not in ("obc", "pbc"):
        _fail(f"'bc' must be 'obc' or 'pbc', got {bc!r}")
    n_k = _number("n_k", data.get("n_k", DEFAULT_NK), integer=True)
    if n_k < 64:
        _fail(f"'n_k' must be at least 64, got {n_k}")

    th = data.get("thresholds", {})
    _check_keys(th, THRESHOLD_KEYS, "thresholds")
    th_kw = {k: _number(k, v, integer=k == "w") for k, v in th.items() if v is not None}
    try:
        thresholds = Thresholds(**th_kw)
    except SpecificationError as exc:
        raise ConfigError(f"thresholds: {exc}") from exc

    sweep = None
    if data.get("sweep") is not None:
        sw = data["sweep"]
        _check_keys(sw, {"parameter", "values"}, "sweep")
        name = sw.get("parameter")
        if name not in keys:
            _fail(f"sweep parameter {name!r} is not a scalar field of model {model!r}")
        vals = sw.get("values")
        if not isinstance(vals, list) or not vals:
            _fail("sweep 'values' must be a non-empty list")
        sweep = Sweep(name, tuple(_number(f"sweep value of {name}", v, integer=name in INT_KEYS)
                                  for v in vals))

    outputs = _outputs(data.get("outputs"))
    n_range = _triple("n_range", data["n_range"], True) if "n_range" in data else None
    t_range = _triple("t_range", data["t_range"], False) if "t_range" in data else None
    profiles = None
    if data.get("profiles") is not None:
        pr = data["profiles"]
        if not isinstance(pr, list):
            _fail("'profiles' must be a list of [re, im] pairs")
        out = []
        for item in pr:
            if not isinstance(item, list) or len(item) != 2:
                _fail("'profiles' entries must be [re, im] pairs")
            out.append(complex(_number("profiles", item[0]), _number("profiles", item[1])))
        profiles = tuple(out)

    cfg = RunConfig(model, params, bc, n_k, thresholds, sweep, outputs, n_range, t_range, profiles)
    for v in cfg.sweep_values():
        cfg.model_params(v)
    return cfg


def _outputs(raw) -> tuple[tuple[str, str], ...]:
    if raw is None:
        return tuple(DEFAULT_OUTPUTS.items())
    if not isinstance(raw, list):
        _fail("'outputs' must be a list of {kind, path} objects")
    seen_kind, seen_path, out = set(), set(), []
    for item in raw:
        _check_keys(item, {"kind", "path"}, "outputs entry")
        kind, path = item.get("kind"), item.get("path", DEFAULT_OUTPUTS.get(item.get("kind")))
        if kind not in OUTPUT_KINDS:
            _fail(f"output kind {kind!r} is not one of {', '.join(OUTPUT_KINDS)}")
        if not isinstance(path, str) or not path:
            _fail(f"output path for {kind} must be a non-empty string")
        norm = str(Path(path))
        if kind in seen_kind:
            _fail(f"output kind {kind!r} listed twice")
        if norm in seen_path:
            _fail(f"output path {path!r} used twice")
        seen_kind.add(kind)
        seen_path.add(norm)
        out.append((kind, path))
    return tuple(out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    d: dict[str, Any] = {"schema": SCHEMA_VERSION, "model": cfg.model}
    d.update(cfg.params)
    d["bc"] = cfg.bc
    d["n_k"] = cfg.n_k
    th = cfg.thresholds
    d["thresholds"] = {"theta_b": th.theta_b, "theta_d": th.theta_d, "w": th.w,
                       "eps_loop": th.eps_loop, "eps_deg": th.eps_deg}
    if cfg.sweep is not None:
        d["sweep"] = {"parameter": cfg.sweep.parameter, "values": list(cfg.sweep.values)}
    d["outputs"] = [{"kind": k, "path": p} for k, p in cfg.outputs]
    if cfg.n_range is not None:
        d["n_range"] = list(cfg.n_range)
    if cfg.t_range is not None:
        d["t_range"] = list(cfg.t_range)
    if cfg.profiles is not None:
        d["profiles"] = [[z.real, z.imag] for z in cfg.profiles]
    return d


def write_config(cfg: RunConfig, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n", encoding="utf-8")
    return path


def with_sweep(cfg: RunConfig, parameter: str, values) -> RunConfig:
    d = config_to_dict(cfg)
    d["sweep"] = {"parameter": parameter, "values": list(values)}
    return parse_config(d)


__all__ = ["RunConfig", "Sweep", "load_config", "parse_config", "write_config",
           "config_to_dict", "with_sweep", "OUTPUT_KINDS", "SCHEMA_VERSION"]
