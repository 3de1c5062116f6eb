"""
Plain-text ``key=value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment; lists are
comma-separated. Keys use dotted namespaces::

    experiment = ito_verify
    symbol.name = bessel
    symbol.m = 1
    grid.n = 32
    f.coeffs = 0, 0, 0.3        # c0, a1, b1, a2, b2, ...
    times = 0, 0.01, 0.1, 1
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

from .errors import ConfigurationError

EXPERIMENTS = ("ito_verify", "cutoff_convergence", "spectrum", "duhamel", "symbol_check")

DEFAULT_TOLERANCES = {
    "ito_residual": 1e-9,
    "series_agreement": 1e-8,
    "hermitian": 1e-10,
    "psd": 1e-10,
    "spectrum_invariance": 1e-9,
    "cutoff_inactive": 1e-12,
    "duhamel_ratio": 3.5,
    "duhamel_inactive": 1e-12,
    "estimate_stability": 0.1,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    symbol_name: str
    symbol_params: tuple = ()
    grid_n: int = 32
    grid_period: float = 1.0
    fiber_m: int = 16
    fiber_period: Optional[float] = None
    times: tuple = (0.0, 0.01, 0.1, 1.0)
    lambdas: tuple = ()
    f_coeffs: Optional[tuple] = None
    v_coeffs: Optional[tuple] = None
    v_fiber_coeffs: Optional[tuple] = None
    u_mode: Optional[int] = None
    u_coeffs: Optional[tuple] = None
    method: str = "eig"
    series_k: int = 20
    seed: int = 0
    samples: int = 1
    duhamel_steps: tuple = (8, 16)
    estimate_k_max: int = 2
    estimate_kp_max: int = 2
    ellipticity_threshold: float = 0.0
    tolerances: tuple = ()
    output_path: Optional[str] = None

    @property
    def params(self) -> dict:
        return dict(self.symbol_params)

    def tolerance(self, name: str) -> float:
        return dict(self.tolerances).get(name, DEFAULT_TOLERANCES[name])

    def resolved_tolerances(self) -> dict:
        return {**DEFAULT_TOLERANCES, **dict(self.tolerances)}

    @property
    def csv_path(self) -> str:
        return self.output_path or f"{self.experiment}.csv"

    def replace(self, **changes) -> "ExperimentConfig":
        return ExperimentConfig(**{**asdict(self), **changes})


def _float(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigurationError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigurationError(f"{key}: value {text!r} is not finite")
    return v


def _int(text: str, key: str) -> int:
    v = _float(text, key)
    if v != int(v):
        raise ConfigurationError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def _floats(text: str, key: str) -> tuple:
    items = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(_float(s, key) for s in items)


def _ints(text: str, key: str) -> tuple:
    return tuple(_int(s.strip(), key) for s in text.split(",") if s.strip())


def _choice(options):
    def parse(text, key):
        if text not in options:
            raise ConfigurationError(f"{key}: expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


def _auto_float(text, key):
    return None if text == "auto" else _float(text, key)


def _string(text, key):
    if not text:
        raise ConfigurationError(f"{key}: empty value")
    return text


# key -> (field name, parser)
_KEYS = {
    "experiment": ("experiment", _choice(EXPERIMENTS)),
    "symbol.name": ("symbol_name", _string),
    "grid.n": ("grid_n", _int),
    "grid.period": ("grid_period", _float),
    "fiber.m": ("fiber_m", _int),
    "fiber.period": ("fiber_period", _auto_float),
    "times": ("times", _floats),
    "lambdas": ("lambdas", _floats),
    "f.coeffs": ("f_coeffs", _floats),
    "v.coeffs": ("v_coeffs", _floats),
    "v.fiber_coeffs": ("v_fiber_coeffs", _floats),
    "u.mode": ("u_mode", _int),
    "u.coeffs": ("u_coeffs", _floats),
    "method": ("method", _choice(("eig", "series"))),
    "series.k": ("series_k", _int),
    "seed": ("seed", _int),
    "samples": ("samples", _int),
    "duhamel.steps": ("duhamel_steps", _ints),
    "estimate.k_max": ("estimate_k_max", _int),
    "estimate.kp_max": ("estimate_kp_max", _int),
    "ellipticity.threshold": ("ellipticity_threshold", _float),
    "output.path": ("output_path", _string),
}
_FIELD_TO_KEY = {fname: key for key, (fname, _) in _KEYS.items()}


def _validate(values: dict) -> None:
    def need(cond, msg):
        if not cond:
            raise ConfigurationError(msg)

    need(values.get("grid_n", 32) >= 2, "grid.n must be ≥ 2")
    need(values.get("fiber_m", 16) >= 2, "fiber.m must be ≥ 2")
    need(values.get("grid_period", 1.0) > 0, "grid.period must be > 0")
    fp = values.get("fiber_period")
    need(fp is None or fp > 0, "fiber.period must be > 0")
    need(len(values.get("times", (0.0,))) > 0, "times must not be empty")
    need(all(t >= 0 for t in values.get("times", ())), "times must be ≥ 0")
    lams = values.get("lambdas", ())
    need(all(v > 0 for v in lams), "lambdas must be > 0")
    need(list(lams) == sorted(lams), "lambdas must be ascending")
    need(values.get("series_k", 20) >= 1, "series.k must be ≥ 1")
    need(values.get("samples", 1) >= 1, "samples must be ≥ 1")
    need(values.get("seed", 0) >= 0, "seed must be ≥ 0")
    need(len(values.get("duhamel_steps", (8,))) > 0, "duhamel.steps must not be empty")
    need(all(n >= 2 for n in values.get("duhamel_steps", (8,))), "duhamel.steps must be ≥ 2")
    need(0 <= values.get("estimate_k_max", 2) <= 3, "estimate.k_max must be in 0..3")
    need(0 <= values.get("estimate_kp_max", 2) <= 3, "estimate.kp_max must be in 0..3")
    need(values.get("ellipticity_threshold", 0.0) >= 0, "ellipticity.threshold must be ≥ 0")
    for name in ("f_coeffs", "v_coeffs", "v_fiber_coeffs", "u_coeffs"):
        if name in values:
            need(len(values[name]) > 0, f"{_FIELD_TO_KEY[name]} must not be empty")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text; defaults fill omitted keys."""
    values: dict = {}
    params: dict = {}
    tolerances: dict = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        where = f"line {lineno}: {key}"
        if key in _KEYS:
            fname, parser = _KEYS[key]
            values[fname] = parser(value, where)
        elif key.startswith("symbol.") and key.count(".") == 1:
            params[key.split(".", 1)[1]] = _float(value, where)
        elif key.startswith("tolerances."):
            name = key.split(".", 1)[1]
            if name not in DEFAULT_TOLERANCES:
                raise ConfigurationError(f"line {lineno}: unknown tolerance {name!r}")
            tolerances[name] = _float(value, where)
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    for required in ("experiment", "symbol_name"):
        if required not in values:
            raise ConfigurationError(f"missing required key {_FIELD_TO_KEY[required]!r}")
    _validate(values)
    # fail early on unusable symbol parameters
    from .symbols import builtin_symbol

    builtin_symbol(values["symbol_name"], params)
    return ExperimentConfig(
        symbol_params=tuple(sorted(params.items())),
        tolerances=tuple(sorted(tolerances.items())),
        **values,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config` (every field written explicitly)."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if f.name == "symbol_params":
            lines += [f"symbol.{k} = {_fmt(v)}" for k, v in value]
        elif f.name == "tolerances":
            lines += [f"tolerances.{k} = {_fmt(v)}" for k, v in value]
        elif value is None:
            if f.name == "fiber_period":
                lines.append("fiber.period = auto")
        elif isinstance(value, tuple) and not value:
            continue
        else:
            lines.append(f"{_FIELD_TO_KEY[f.name]} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
