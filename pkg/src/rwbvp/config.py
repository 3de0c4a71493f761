"""Run configuration: flat TOML files, overridden by command-line values.

Each subcommand has a dataclass of typed fields.  Unknown keys and values that
fail validation raise :class:`ConfigError` before any walk is simulated.
"""
from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .rng import DEFAULT_SEED

SEED_ENV = "RWBVP_SEED"


class ConfigError(ValueError):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


@dataclass
class Common:
    seed: int = field(default_factory=default_seed)
    output: str = "-"
    plot: bool = False
    threads: int = 0

    def validate(self):
        _check(self.threads >= 0, "threads must be >= 0 (0 = all cores)")


@dataclass
class WalkConfig(Common):
    domain: str = "circular-annulus"
    domain_params: list = field(default_factory=lambda: [1.0, 3.0])
    points: list = field(default_factory=list)       # flattened coordinates
    segment: list = field(default_factory=list)      # [x0, (y0,) x1, (y1)]
    segment_count: int = 21
    segment_interior: bool = False
    h: float = 0.1
    nt: int = 5000
    scheme: str = "axis"
    diffusion: float = 1.0
    max_steps: int = 10**8

    def validate(self):
        super().validate()
        _check(self.h > 0, "h must be positive")
        _check(self.nt >= 1, "nt must be >= 1")
        _check(self.diffusion > 0, "diffusion must be positive")
        _check(self.max_steps >= 1, "max_steps must be >= 1")
        _check(self.scheme in ("axis", "diagonal"), "scheme must be 'axis' or 'diagonal'")
        _check(self.segment_count >= 1, "segment_count must be >= 1")
        _check(bool(self.points) != bool(self.segment), "give either points or segment")


@dataclass
class LinearConfig(WalkConfig):
    source: str = "zero"              # zero | constant | sin-pi-x
    source_value: float = 1.0
    g_left: float = 0.0
    g_right: float = 0.0
    g_inner: float = 0.0
    g_outer: float = 0.0
    g_sphere: float = 0.0
    laplacian_form: str = "half"

    def validate(self):
        super().validate()
        _check(self.source in ("zero", "constant", "sin-pi-x"),
               "source must be zero, constant or sin-pi-x")
        _check(self.laplacian_form in ("half", "full"), "laplacian_form must be half or full")


@dataclass
class HittingConfig(WalkConfig):
    segment: list = field(default_factory=lambda: [1.0, 0.0, 3.0, 0.0])
    fit: bool = True


@dataclass
class NonlinearConfig(Common):
    problem: str = "cubic"           # cubic | validation-exp | zero
    a: float = 1.0
    maxpt: int = 50
    nt: int = 2000
    mode: str = "sweep"
    stop: str = "auto"
    slack: float = 0.0
    tol: float = 1e-3
    miter: int = 500
    m_div: float = 1e3
    initial_file: str = ""
    snapshot_every: int = 0
    compare_fd: bool = True

    def validate(self):
        super().validate()
        _check(self.problem in ("cubic", "validation-exp", "zero"),
               "problem must be cubic, validation-exp or zero")
        _check(self.maxpt >= 2, "maxpt must be >= 2")
        _check(self.nt >= 1, "nt must be >= 1")
        _check(self.mode in ("sweep", "relaxed"), "mode must be sweep or relaxed")
        _check(self.stop in ("auto", "envelope", "max-update", "none"),
               "stop must be auto, envelope, max-update or none")
        _check(self.miter >= 1, "miter must be >= 1")
        _check(self.m_div > 0, "m_div must be positive")
        _check(self.slack >= 0 and self.tol > 0, "slack must be >= 0 and tol > 0")
        _check(self.snapshot_every >= 0, "snapshot_every must be >= 0")
        _check(not (self.stop == "envelope" and not (self.problem == "cubic" and self.a == 1)),
               "the envelope stop rule is only known for the cubic problem with a = 1")


@dataclass
class SweepAConfig(NonlinearConfig):
    a_values: list = field(default_factory=lambda: [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    maxpt: int = 20
    mode: str = "relaxed"
    stop: str = "none"
    output: str = "sweep-a"

    def validate(self):
        super().validate()
        _check(len(self.a_values) >= 1, "a_values must not be empty")
        _check(self.output not in ("", "-"), "sweep-a writes several files; output must be a directory")


@dataclass
class ProbeConfig(NonlinearConfig):
    a: float = -6.0
    maxpt: int = 20
    nt: int = 2000
    stop: str = "max-update"
    fd_guess: str = "trough"
    fd_n: int = 200
    snapshot_every: int = 1

    def validate(self):
        super().validate()
        _check(self.fd_n >= 4, "fd_n must be >= 4")


@dataclass
class FitConfig(Common):
    input: str = ""
    model: str = "log-annulus"
    x_column: str = "r"
    y_column: str = ""

    def validate(self):
        super().validate()
        _check(bool(self.input), "fit needs an input file")
        _check(self.model in ("log-annulus", "quadratic"), "model must be log-annulus or quadratic")


@dataclass
class OracleConfig(Common):
    kind: str = "annulus"
    points: list = field(default_factory=lambda: [2.0, 0.0])
    radii: list = field(default_factory=list)
    a: float = 1.0
    n: int = 200
    init: str = "line"
    target: float = 0.0
    bracket: list = field(default_factory=lambda: [-4.0, -3.0])
    r: float = 1.0
    d: int = 2
    diffusion: float = 1.0
    maxpt: int = 8
    dt: float = 1.0
    f_value: float = 0.0
    g_left: float = 0.0
    g_right: float = 1.0

    def validate(self):
        super().validate()
        kinds = ("annulus", "validation", "ball-hitting", "discrete-linear", "fd-cubic", "slope-root")
        _check(self.kind in kinds, f"kind must be one of {', '.join(kinds)}")
        _check(self.n >= 4, "n must be >= 4")
        _check(self.maxpt >= 2, "maxpt must be >= 2")
        _check(len(self.bracket) == 2, "bracket needs two values")


COMMAND_CONFIGS = {
    "solve-linear": LinearConfig,
    "hitting-times": HittingConfig,
    "solve-nonlinear": NonlinearConfig,
    "fit": FitConfig,
    "oracle": OracleConfig,
    "sweep-a": SweepAConfig,
    "stability-probe": ProbeConfig,
}


def _check(cond, message):
    if not cond:
        raise ConfigError(message)


def parse_value(text: str):
    """Parse a command-line value as a TOML value, falling back to a string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _coerce(name, value, default):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            value = [value]
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"{name}: expected a list of numbers, got {value!r}") from None
    if not isinstance(value, str):
        raise ConfigError(f"{name}: expected a string, got {value!r}")
    return value


def load_config(command: str, path: Optional[str] = None, overrides: Optional[dict] = None):
    cls = COMMAND_CONFIGS[command]
    values = {}
    if path:
        try:
            with open(path, "rb") as fh:
                values.update(tomllib.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = cls()
    known = {f.name for f in dataclasses.fields(cls)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} for {command}")
        setattr(cfg, key, _coerce(key, value, getattr(cfg, key)))
    cfg.validate()
    return cfg
