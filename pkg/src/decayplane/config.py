"""Run configuration stored as plain-text ``key=value`` lines.

Blank lines and lines starting with ``#`` are ignored. Reals are written
with ``repr`` so a parse/serialize round trip is exact. Keys left unset
(``None``) are omitted on output and fall back to per-command defaults.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from typing import Optional

from .constants import A_LAMBDA, N_BINS
from .errors import DecayPlaneError


class ConfigError(DecayPlaneError, ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "QM"
    n_events: Optional[int] = None
    seed: int = 0
    chunk_size: int = 65536
    a: float = A_LAMBDA
    hvt_pol_magnitude: float = 1.0
    sz_weights: tuple = (2.0 / 3.0, 1.0 / 3.0)  # (sz = +-1 combined, sz = 0)
    workers: int = 1
    n_bins: int = N_BINS
    n_toys: int = 1000
    quad_depth: int = 256
    inject_fault: str = "none"
    input: Optional[str] = None
    out: Optional[str] = None

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


_INT_KEYS = {"n_events", "seed", "chunk_size", "workers", "n_bins", "n_toys", "quad_depth"}
_REAL_KEYS = {"a", "hvt_pol_magnitude"}
_KEYS = {f.name for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _REAL_KEYS:
        x = float(raw)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {raw!r}")
        return x
    if key == "model":
        return raw.upper()
    if key == "sz_weights":
        w = tuple(float(x) for x in raw.split(","))
        if len(w) != 2:
            raise ValueError("sz_weights needs two comma-separated reals")
        return w
    return raw


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key=value")
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: {exc}") from None
    return RunConfig(**values)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if isinstance(v, float):
            v = repr(v)
        elif isinstance(v, tuple):
            v = ",".join(repr(float(x)) for x in v)
        lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
