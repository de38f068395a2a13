"""
Run configuration for the command-line tool.

Configs are JSON objects with a ``schema_version`` field. Every block is a
dataclass; unknown keys and wrong types are reported with the dotted path of
the offending field.
"""
from __future__ import annotations

import dataclasses
import json
import math
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .couplings import Geometry

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class GeometryConfig:
    eta: float | None = None
    r_over_lambda: float | None = None
    theta: float = math.pi / 2
    phi: float = 0.0

    def validate(self, path="geometry"):
        if (self.eta is None) == (self.r_over_lambda is None):
            raise ConfigError(path, "give exactly one of eta and r_over_lambda")
        try:
            self.geometry()
        except ValueError as e:
            raise ConfigError(path, str(e)) from None

    @property
    def eta_value(self) -> float:
        return self.eta if self.eta is not None else 2 * math.pi * self.r_over_lambda

    def geometry(self) -> Geometry:
        return Geometry(self.eta_value, self.theta, self.phi)


@dataclass
class LaserConfig:
    polarization: str = "y"
    rabi: float = 5.0
    detuning: float = 0.0

    def validate(self, path="drive"):
        if self.polarization not in ("x", "y"):
            raise ConfigError(f"{path}.polarization", "must be 'x' or 'y'")


@dataclass
class PulseConfig:
    delta0: float
    phi_rf: float
    duration: float
    detuning_rf: float = 0.0


@dataclass
class RFConfig:
    """RF drive. ``omega_rf`` defaults to the qubit frequency plus ``detuning_rf``.

    Either a single pulse (``delta0``, ``phi_rf``, ``detuning_rf``, lasting
    ``simulation.t_end``) or an explicit ``pulses`` list.
    """

    delta0: float | None = None
    phi_rf: float = 0.0
    detuning_rf: float = 0.0
    pulses: list[PulseConfig] | None = None

    def validate(self, path="rf"):
        if (self.delta0 is None) == (self.pulses is None):
            raise ConfigError(path, "give either delta0 or a pulses list")
        if self.delta0 is not None and self.delta0 <= 0:
            raise ConfigError(f"{path}.delta0", "must be positive")
        for k, p in enumerate(self.pulses or []):
            if p.delta0 <= 0:
                raise ConfigError(f"{path}.pulses[{k}].delta0", "must be positive")
            if p.duration <= 0:
                raise ConfigError(f"{path}.pulses[{k}].duration", "must be positive")


@dataclass
class SimulationConfig:
    t_end: float = 20.0
    dt_out: float = 0.1
    rtol: float = 1e-9
    atol: float = 1e-12
    method: str = "RK45"
    # state label, or a 16x16 matrix of [re, im] pairs
    initial: str | list = "ground"
    observables: list[str] = field(default_factory=lambda: [
        "psi_a1", "psi_a2", "psi_a3", "psi_s1", "psi_s2", "psi_s3", "ground"])

    def validate(self, path="simulation"):
        if self.t_end <= 0:
            raise ConfigError(f"{path}.t_end", "must be positive")
        if self.dt_out <= 0:
            raise ConfigError(f"{path}.dt_out", "must be positive")


@dataclass
class SweepConfig:
    """Independent runs over one geometry parameter.

    ``values`` lists the parameter values explicitly; otherwise ``start``,
    ``stop`` and ``num`` give an inclusive linear grid.
    """

    analysis: str = "couplings"
    parameter: str = "r_over_lambda"
    values: list[float] | None = None
    start: float | None = None
    stop: float | None = None
    num: int | None = None
    workers: int | None = None

    def validate(self, path="sweep"):
        if self.analysis not in ("couplings", "spectrum", "dfs", "steady", "evolve"):
            raise ConfigError(f"{path}.analysis", f"unknown analysis {self.analysis!r}")
        if self.parameter not in ("eta", "r_over_lambda", "theta", "phi", "zeeman"):
            raise ConfigError(f"{path}.parameter", f"unknown parameter {self.parameter!r}")
        if self.values is None and None in (self.start, self.stop, self.num):
            raise ConfigError(path, "give values or start/stop/num")

    def grid(self) -> list[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


@dataclass
class SurfaceConfig:
    delta: float = 1.0
    l_min: float = -0.5
    l_max: float = 0.5
    z_min: float = -0.5
    z_max: float = 0.5
    num: int = 40
    phi: float = 0.0


@dataclass
class OutputConfig:
    directory: str | None = None
    stem: str | None = None


@dataclass
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    geometry: GeometryConfig | None = None
    zeeman: float = 0.0
    drive: LaserConfig | None = None
    rf: RFConfig | None = None
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    sweep: SweepConfig | None = None
    surface: SurfaceConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "RunConfig":
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"unsupported version {self.schema_version}")
        if self.drive is not None and self.rf is not None:
            raise ConfigError("", "at most one of drive and rf may be given")
        if self.geometry is not None:
            self.geometry.validate()
        for name in ("drive", "rf", "simulation", "sweep"):
            block = getattr(self, name)
            if block is not None:
                block.validate()
        return self

    @property
    def mode(self) -> str:
        if self.drive is not None:
            return "laser"
        if self.rf is not None:
            return "rf"
        return "free"

    def to_dict(self) -> dict:
        return _prune(dataclasses.asdict(self))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data, "").validate()

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError("", f"{path}: invalid JSON ({e})") from None
        return cls.from_dict(data)

    def save(self, path):
        Path(path).write_text(self.dumps())


def _prune(d):
    if isinstance(d, dict):
        return {k: _prune(v) for k, v in d.items() if v is not None}
    if isinstance(d, list):
        return [_prune(v) for v in d]
    return d


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(path, f"unknown field(s) {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        sub = f"{path}.{name}" if path else name
        kwargs[name] = _coerce(hints[name], value, sub)
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(path, str(e)) from None


def _coerce(tp, value, path):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union or origin is types.UnionType:
        if value is None:
            if type(None) in args:
                return None
            raise ConfigError(path, "must not be null")
        options = [a for a in args if a is not type(None)]
        if len(options) == 1:
            return _coerce(options[0], value, path)
        for a in options:
            try:
                return _coerce(a, value, path)
            except ConfigError:
                pass
        raise ConfigError(path, f"invalid value {value!r}")
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path)
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(path, "expected a list")
        item = args[0] if args else typing.Any
        return [_coerce(item, v, f"{path}[{k}]") for k, v in enumerate(value)]
    if tp is typing.Any or tp is list:
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    return value
