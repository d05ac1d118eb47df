"""Sectioned key-value run configuration.

Example::

    [params]
    kappa1 = 0.08

    [rates.deposit]
    mean = 0.04
    sin_amp = 0.02

    [scenario]
    d0 = [0.7, 6, 10]
    ratios = 0.2:2.0:0.2

Missing keys take the defaults below; unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Union

from .errors import ConfigError
from .integrator import IntegratorConfig
from .model import ModelParams, RateSet, SinusoidalRate
from .regulation import RegulationParams
from .scenario import DEFAULT_RATIOS, DEFAULT_THETA, ScenarioSet, build_set

RATE_SECTIONS = {"rates.deposit": "deposit", "rates.loan": "loan", "rates.interbank": "interbank"}
SCENARIO_KEYS = ("d0", "names", "ratios", "theta", "workers")


@dataclass(frozen=True)
class ScenarioConfig:
    d0: tuple[float, ...] = (0.7, 6.0, 10.0)
    names: tuple[str, ...] = ()
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    theta: float = DEFAULT_THETA
    workers: int = 1

    def set_names(self) -> list[str]:
        return list(self.names) if self.names else [f"set{i + 1}" for i in range(len(self.d0))]

    def sets(self) -> list[ScenarioSet]:
        return [build_set(n, d, self.ratios) for n, d in zip(self.set_names(), self.d0)]


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    rates: RateSet = field(default_factory=RateSet)
    regulation: RegulationParams = field(default_factory=RegulationParams)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)


def _parse_float(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{where}: value must be finite, got {text!r}")
    return value


def _parse_bool(text: str, where: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {text!r}")


def _parse_list(text: str, where: str) -> list:
    text = text.strip()
    if not text.startswith("["):
        text = "[" + text + "]"
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"{where}: expected a list like [1, 2], got {text!r}") from None
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    return value


def _parse_ratios(text: str, where: str) -> tuple[float, ...]:
    # either an explicit list or start:stop:step
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{where}: grid spec must be start:stop:step, got {text!r}")
        start, stop, step = (_parse_float(p, where) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"{where}: grid needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(n))
    values = _parse_list(text, where)
    return tuple(_parse_float(str(v), where) for v in values)


def _typed_section(cls, items: dict[str, str], section: str):
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, raw in items.items():
        where = f"[{section}] {key}"
        if key not in known:
            raise ConfigError(f"{where}: unknown key (allowed: {', '.join(known)})")
        # annotations are strings under postponed evaluation
        kind = str(known[key].type)
        if kind == "bool":
            kwargs[key] = _parse_bool(raw, where)
        elif kind in ("float", "int"):
            kwargs[key] = _parse_float(raw, where)
        else:
            kwargs[key] = raw.strip()
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def _scenario_section(items: dict[str, str]) -> ScenarioConfig:
    kwargs = {}
    for key, raw in items.items():
        where = f"[scenario] {key}"
        if key == "d0":
            kwargs["d0"] = tuple(_parse_float(str(v), where) for v in _parse_list(raw, where))
        elif key == "names":
            kwargs["names"] = tuple(str(v) for v in _parse_list(raw, where))
        elif key == "ratios":
            kwargs["ratios"] = _parse_ratios(raw, where)
        elif key == "theta":
            kwargs["theta"] = _parse_float(raw, where)
        elif key == "workers":
            w = _parse_float(raw, where)
            if w < 1 or w != int(w):
                raise ConfigError(f"{where}: must be a positive integer")
            kwargs["workers"] = int(w)
        else:
            raise ConfigError(f"{where}: unknown key (allowed: {', '.join(SCENARIO_KEYS)})")
    sc = ScenarioConfig(**kwargs)
    if not sc.d0:
        raise ConfigError("[scenario] d0 must list at least one deposit volume")
    if sc.names and len(sc.names) != len(sc.d0):
        raise ConfigError("[scenario] names must match d0 in length")
    if len(set(sc.set_names())) != len(sc.set_names()):
        raise ConfigError("[scenario] set names must be unique")
    try:
        sc.sets()
    except ValueError as exc:
        raise ConfigError(f"[scenario] {exc}") from None
    return sc


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
        elif "=" in stripped and not stripped.startswith(("#", ";")):
            lines.setdefault((section, stripped.split("=", 1)[0].strip()), n)
    return lines


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        return _parse(text, source)
    except ConfigError as exc:
        msg = str(exc)
        if msg.startswith("[") and "] " in msg:
            section, rest = msg[1:].split("] ", 1)
            key = rest.split(":", 1)[0].strip()
            line = _key_lines(text).get((section, key))
            if line is not None:
                raise ConfigError(f"{source}, line {line}: {msg}") from None
        raise


def _parse(text: str, source: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from None

    allowed = {"params", "regulation", "integrator", "scenario", *RATE_SECTIONS}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"{source}: unknown section [{section}]")
    if parser.defaults():
        raise ConfigError(f"{source}: keys outside any section are not allowed")

    def items(name):
        return dict(parser.items(name)) if parser.has_section(name) else {}

    defaults = RateSet()
    rates = {}
    for section, attr in RATE_SECTIONS.items():
        base = getattr(defaults, attr)
        sec = items(section)
        if sec:
            merged = {**{k: repr(v) for k, v in asdict(base).items()}, **sec}
            rates[attr] = _typed_section(SinusoidalRate, merged, section)
        else:
            rates[attr] = base
    rate_set = RateSet(**rates)
    freqs = {rate_set.deposit.freq, rate_set.loan.freq, rate_set.interbank.freq}
    if len(freqs) != 1:
        raise ConfigError("rates: all three rates must share the same freq")

    return RunConfig(
        params=_typed_section(ModelParams, items("params"), "params"),
        rates=rate_set,
        regulation=_typed_section(RegulationParams, items("regulation"), "regulation"),
        integrator=_typed_section(IntegratorConfig, items("integrator"), "integrator"),
        scenario=_scenario_section(items("scenario")),
    )


def load_config(path: Union[str, Path, None] = None) -> RunConfig:
    """Load a run config; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def dump_config(cfg: RunConfig) -> str:
    """Serialize ``cfg`` so that ``parse_config(dump_config(cfg)) == cfg``."""

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    out = []

    def section(name, obj):
        out.append(f"[{name}]")
        for f in fields(obj):
            out.append(f"{f.name} = {fmt(getattr(obj, f.name))}")
        out.append("")

    section("params", cfg.params)
    for name, attr in RATE_SECTIONS.items():
        section(name, getattr(cfg.rates, attr))
    section("regulation", cfg.regulation)
    section("integrator", cfg.integrator)
    sc = cfg.scenario
    out.append("[scenario]")
    out.append("d0 = " + json.dumps(list(sc.d0)))
    if sc.names:
        out.append("names = " + json.dumps(list(sc.names)))
    out.append("ratios = " + json.dumps(list(sc.ratios)))
    out.append(f"theta = {sc.theta!r}")
    out.append(f"workers = {sc.workers}")
    out.append("")
    return "\n".join(out)
