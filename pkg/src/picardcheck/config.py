"""Experiment configuration: an INI-style file merged under command-line flags.

Sections group keys only for readability; every key maps to one field of
ExperimentConfig. Parse and validation errors name the key and its line.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, field, fields
from typing import Callable

from .certificates import CERTIFICATE_KINDS
from .metric import METRIC_KINDS, SAMPLER_STRATEGIES
from .verifier import THEOREM_IDS

COMMANDS = ("iterate", "certify", "verify", "classify", "sweep", "gallery-run")
OUT_ENV = "PICARDCHECK_OUT"
DEFAULT_OUT = "picardcheck-out"


class ConfigError(ValueError):
    pass


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def parse_points(text: str) -> tuple[tuple[float, ...], ...]:
    """Points separated by ';', coordinates by ','; e.g. ``"1;2;10"`` or ``"0,0;1,1"``."""
    pts = tuple(parse_floats(p) for p in text.split(";") if p.strip())
    if not pts or any(not p for p in pts):
        raise ValueError(f"cannot read points from {text!r}")
    return pts


def parse_names(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def parse_grid(text: str) -> tuple[float, float, int]:
    lo, hi, n = text.split(",")
    return float(lo), float(hi), int(n)


def _bounded_float(lo: float, hi: float = math.inf, strict_lo: bool = False) -> Callable[[str], float]:
    def conv(text: str) -> float:
        v = float(text)
        if (v <= lo if strict_lo else v < lo) or v > hi:
            raise ValueError(f"{v} outside the documented range")
        return v
    return conv


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise ValueError("must be a positive integer")
    return v


def _choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def conv(text: str) -> str:
        if text not in options:
            raise ValueError(f"{text!r} is not one of {', '.join(options)}")
        return text
    return conv


def _families(text: str) -> tuple[str, ...]:
    names = parse_names(text)
    for n in names:
        if n not in ("dyadic", "harmonic"):
            raise ValueError(f"unknown sequence family {n!r}")
    return names


@dataclass
class ExperimentConfig:
    command: str = "iterate"
    # target
    gallery: str | None = None
    expr: str | None = None
    name: str | None = None
    dim: int = 1
    lower: float | None = None
    upper: float | None = None
    metric: str = "euclidean"
    p: float = 2.0
    reach: float = 100.0
    # certificate / theorem
    cert: str | None = None
    theorem: str | None = None
    mode: str = "picard"
    lam: float | None = None
    alpha: float | None = None
    phi: str | None = None
    E: str | None = None
    F: str | None = None
    delta: str | None = None
    condition_set: str = "i_ii_iii"
    # iteration
    x0: tuple | None = None
    starts: tuple | None = None
    max_iter: int = 10_000
    residual_tol: float = 1e-12
    cauchy_window: int = 16
    cauchy_tol: float = 1e-10
    divergence_bound: float = 1e12
    # sampling and grids
    strategy: str = "uniform"
    count: int = 2000
    seed: int = 0
    seeds: tuple[int, ...] = (0, 1, 2)
    grid: tuple[float, float, int] = (1e-6, 1e6, 200)
    anchors: tuple[float, ...] = (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0)
    family: tuple[str, ...] = ("dyadic", "harmonic")
    eps: tuple[float, ...] = (0.05, 0.1, 0.5, 1.0, 2.0)
    # output
    out: str = field(default_factory=lambda: os.environ.get(OUT_ENV, DEFAULT_OUT))

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.gallery and self.expr:
            raise ConfigError("give either a gallery name or an expression, not both")
        if self.command != "gallery-run" and not (self.gallery or self.expr):
            raise ConfigError(f"{self.command} needs a target: gallery=<name> or expr=<expression>")
        if self.expr and (self.lower is None or self.upper is None):
            raise ConfigError("an expression target needs lower and upper bounds")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ConfigError("lower must not exceed upper")
        if self.cert is not None and self.cert not in CERTIFICATE_KINDS:
            raise ConfigError(f"unknown certificate kind {self.cert!r}")
        if self.theorem is not None and self.theorem not in THEOREM_IDS:
            raise ConfigError(f"unknown theorem {self.theorem!r}")
        if self.command == "certify" and self.cert is None:
            raise ConfigError("certify needs cert=<kind>")
        if self.command == "iterate" and self.x0 is None and self.gallery is None:
            raise ConfigError("iterate needs x0 for an expression target")
        return self


# key -> converter; keys match ExperimentConfig fields (and long CLI flags with '-' for '_')
CONVERTERS: dict[str, Callable[[str], object]] = {
    "command": _choice(COMMANDS),
    "gallery": str, "expr": str, "name": str,
    "dim": _positive_int, "lower": float, "upper": float,
    "metric": _choice(tuple(k for k in METRIC_KINDS if k != "custom")),
    "p": _bounded_float(1.0), "reach": _bounded_float(0.0, strict_lo=True),
    "cert": _choice(CERTIFICATE_KINDS), "theorem": _choice(THEOREM_IDS),
    "mode": _choice(("picard", "counterexample")),
    "lam": _bounded_float(0.0, 1.0), "alpha": _bounded_float(0.0, 1.0),
    "phi": str, "E": str, "F": str, "delta": str,
    "condition_set": _choice(("i_ii_iii", "iii_prime", "iii_doubleprime")),
    "x0": parse_points, "starts": parse_points,
    "max_iter": _positive_int, "residual_tol": _bounded_float(0.0, strict_lo=True),
    "cauchy_window": _positive_int, "cauchy_tol": _bounded_float(0.0, strict_lo=True),
    "divergence_bound": _bounded_float(0.0, strict_lo=True),
    "strategy": _choice(SAMPLER_STRATEGIES), "count": _positive_int, "seed": int, "seeds": parse_ints,
    "grid": parse_grid, "anchors": parse_floats, "family": _families, "eps": parse_floats,
    "out": str,
}
assert set(CONVERTERS) == {f.name for f in fields(ExperimentConfig)}

SECTIONS = ("run", "target", "space", "certificate", "iteration", "sampler", "grids", "output")


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            continue
        if current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line, re.IGNORECASE):
            return i
    return None


def read_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse config text into {field: value}; values are converted and range-checked."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        where = f"{source}:{line}" if line else source
        raise ConfigError(f"{where}: {exc.message if hasattr(exc, 'message') else exc}") from None
    values: dict[str, object] = {}
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]; known: {', '.join(SECTIONS)}")
        for key, raw in cp.items(section):
            line = _line_of(text, section, key)
            where = f"{source}:{line}" if line else source
            if key not in CONVERTERS:
                raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
            if key in values:
                raise ConfigError(f"{where}: key {key!r} given twice")
            try:
                values[key] = CONVERTERS[key](raw.strip())
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{where}: bad value for key {key!r}: {exc}") from None
    return values


def load_config(path: str) -> dict[str, object]:
    with open(path, encoding="utf-8") as fh:
        return read_config_text(fh.read(), path)


def build_config(values: dict[str, object]) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for k, v in values.items():
        setattr(cfg, k, v)
    return cfg.validate()
