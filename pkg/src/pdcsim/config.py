"""Flat key=value configuration files for the command-line front end.

The grammar is deliberately small: one ``key = value`` pair per line,
``#`` comments, blank lines ignored.  Frequencies accept the suffixes
Hz, kHz, MHz and GHz (bare numbers are Hz).  Unknown keys, duplicate
keys, missing required keys and malformed numbers are errors that
carry the offending line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import SystemParams

_UNIT_FACTORS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

SCENARIOS = ("params", "dynamics", "scan", "validate")

#: key -> (kind, default); kind in {freq, float, int, str, freq_list, str_list}
_SCHEMA: dict[str, tuple[str, object]] = {
    "nu_a": ("freq", None),
    "nu_b": ("freq", None),
    "delta": ("freq", None),
    "delta_r": ("freq", None),
    "g_d": ("freq", None),
    "g_gr": ("freq", None),
    "g_er": ("freq", None),
    "gamma_a": ("freq", None),
    "gamma_b": ("freq", None),
    "epsilon": ("freq", 0.0),
    "phi": ("float", -math.pi / 2),
    "factor": ("float", 10.0),
    "seed": ("int", 42),
    "cutoff_a": ("int", 3),
    "cutoff_b": ("int", 6),
    "scenario": ("str", "params"),
    "t_end": ("float", None),
    "n_samples": ("int", 2001),
    "eps_values": ("freq_list", None),
    "methods": ("str_list", ["linearized"]),
    "n_traj": ("int", 10_000),
    "dt": ("float", None),
    "t_max": ("float", None),
    "lindblad_cutoff_a": ("int", None),
    "lindblad_cutoff_b": ("int", None),
    "out": ("str", None),
}

_REQUIRED = ("nu_a", "nu_b", "delta", "delta_r", "g_d", "g_gr", "g_er",
             "gamma_a", "gamma_b")


@dataclass
class RunConfig:
    """Validated configuration for one CLI run."""

    params: SystemParams
    scenario: str = "params"
    factor: float = 10.0
    seed: int = 42
    cutoff_a: int = 3
    cutoff_b: int = 6
    t_end: float | None = None
    n_samples: int = 2001
    eps_values: list[float] | None = None
    methods: list[str] = field(default_factory=lambda: ["linearized"])
    n_traj: int = 10_000
    dt: float | None = None
    t_max: float | None = None
    lindblad_cutoff_a: int | None = None
    lindblad_cutoff_b: int | None = None
    out: str | None = None


def _parse_frequency(text: str, line: int) -> float:
    parts = text.split()
    if len(parts) == 1:
        word = parts[0].lower()
        for suffix in sorted(_UNIT_FACTORS, key=len, reverse=True):
            if word.endswith(suffix) and len(word) > len(suffix):
                number, unit = word[: -len(suffix)], suffix
                break
        else:
            number, unit = word, "hz"
    elif len(parts) == 2:
        number, unit = parts[0], parts[1].lower()
        if unit not in _UNIT_FACTORS:
            raise ConfigError(f"unknown frequency unit {parts[1]!r}", line)
    else:
        raise ConfigError(f"malformed frequency {text!r}", line)
    try:
        value = float(number)
    except ValueError:
        raise ConfigError(f"malformed number {text!r}", line) from None
    return value * _UNIT_FACTORS[unit]


def _parse_value(kind: str, text: str, line: int):
    if kind == "freq":
        return _parse_frequency(text, line)
    if kind == "float":
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"malformed number {text!r}", line) from None
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"malformed integer {text!r}", line) from None
    if kind == "str":
        return text
    if kind == "freq_list":
        items = [item.strip() for item in text.split(",")]
        return [_parse_frequency(item, line) for item in items if item]
    if kind == "str_list":
        return [item.strip() for item in text.split(",") if item.strip()]
    raise AssertionError(kind)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration file body."""
    raw: dict[str, object] = {}
    seen_lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first seen on line {seen_lines[key]})",
                              lineno)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno)
        raw[key] = _parse_value(_SCHEMA[key][0], value, lineno)
        seen_lines[key] = lineno

    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    values: dict[str, object] = {}
    for key, (kind, default) in _SCHEMA.items():
        values[key] = raw.get(key, default)

    if values["scenario"] not in SCENARIOS:
        raise ConfigError(f"unknown scenario {values['scenario']!r}; choose from {SCENARIOS}")
    for method in values["methods"]:
        if method not in ("linearized", "lindblad", "sde"):
            raise ConfigError(f"unknown method {method!r}")

    params = SystemParams(
        nu_a=values["nu_a"], nu_b=values["nu_b"],
        delta=values["delta"], delta_r=values["delta_r"],
        g_d=values["g_d"], g_gr=values["g_gr"], g_er=values["g_er"],
        gamma_a=values["gamma_a"], gamma_b=values["gamma_b"],
        epsilon=values["epsilon"], phi=values["phi"],
    )
    return RunConfig(
        params=params,
        scenario=values["scenario"],
        factor=values["factor"],
        seed=values["seed"],
        cutoff_a=values["cutoff_a"],
        cutoff_b=values["cutoff_b"],
        t_end=values["t_end"],
        n_samples=values["n_samples"],
        eps_values=values["eps_values"],
        methods=list(values["methods"]),
        n_traj=values["n_traj"],
        dt=values["dt"],
        t_max=values["t_max"],
        lindblad_cutoff_a=values["lindblad_cutoff_a"],
        lindblad_cutoff_b=values["lindblad_cutoff_b"],
        out=values["out"],
    )
