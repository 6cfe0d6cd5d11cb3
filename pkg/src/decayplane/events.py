"""Event records and the comma-separated event file format.

File layout: one header line, then one record per event with the fields
``event_id, model, sz, cos_theta_lambda, phi_lambda, cos_theta_m, phi_m,
cos_theta_p, phi_p, alpha``. Reals are written with 17 significant digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import DecayPlaneError

FIELDS = (
    "event_id",
    "model",
    "sz",
    "cos_theta_lambda",
    "phi_lambda",
    "cos_theta_m",
    "phi_m",
    "cos_theta_p",
    "phi_p",
    "alpha",
)
HEADER = ",".join(FIELDS)
_REALS = FIELDS[3:]
MODELS = ("QM", "HVT")


class MalformedEventFile(DecayPlaneError, ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


@dataclass(frozen=True)
class Event:
    event_id: int
    model: str
    sz: int
    cos_theta_lambda: float
    phi_lambda: float
    cos_theta_m: float
    phi_m: float
    cos_theta_p: float
    phi_p: float
    alpha: float
    seed: int = 0

    @property
    def stream_index(self) -> int:
        return self.event_id


@dataclass
class EventTable:
    """Columnar batch of events; iterating yields :class:`Event` rows."""

    model: str
    seed: int
    event_id: np.ndarray
    sz: np.ndarray
    cos_theta_lambda: np.ndarray
    phi_lambda: np.ndarray
    cos_theta_m: np.ndarray
    phi_m: np.ndarray
    cos_theta_p: np.ndarray
    phi_p: np.ndarray
    alpha: np.ndarray
    n_attempts: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.event_id)

    def __getitem__(self, i: int) -> Event:
        return Event(
            int(self.event_id[i]),
            self.model,
            int(self.sz[i]),
            *(float(getattr(self, name)[i]) for name in _REALS),
            seed=self.seed,
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def concatenate(cls, parts: list["EventTable"]) -> "EventTable":
        first = parts[0]
        cols = {
            f.name: np.concatenate([getattr(p, f.name) for p in parts])
            for f in fields(cls)
            if f.name not in ("model", "seed", "n_attempts")
        }
        order = np.argsort(cols["event_id"], kind="stable")
        cols = {k: v[order] for k, v in cols.items()}
        return cls(
            model=first.model,
            seed=first.seed,
            n_attempts=sum(p.n_attempts for p in parts),
            **cols,
        )


def format_real(x: float) -> str:
    return "%.17g" % x


def write_events(table: EventTable, path) -> None:
    cols = [table.event_id, table.sz] + [getattr(table, n) for n in _REALS]
    rows = zip(*(c.tolist() for c in cols))
    fmt = "%d," + table.model + ",%d," + ",".join(["%.17g"] * len(_REALS)) + "\n"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(HEADER + "\n")
        fh.writelines(fmt % row for row in rows)


def read_events(path) -> EventTable:
    """Parse an event file, raising :class:`MalformedEventFile` with the line number."""
    path = Path(path)
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if header != HEADER:
            raise MalformedEventFile(1, f"unexpected header {header!r}")
        ids, szs, reals, models = [], [], [], set()
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(FIELDS):
                raise MalformedEventFile(lineno, f"expected {len(FIELDS)} fields, got {len(parts)}")
            try:
                ids.append(int(parts[0]))
                szs.append(int(parts[2]))
                vals = [float(x) for x in parts[3:]]
            except ValueError as exc:
                raise MalformedEventFile(lineno, str(exc)) from None
            if parts[1] not in MODELS:
                raise MalformedEventFile(lineno, f"unknown model {parts[1]!r}")
            if not all(math.isfinite(v) for v in vals):
                raise MalformedEventFile(lineno, "non-finite value")
            if not 0.0 <= vals[-1] <= math.pi:
                raise MalformedEventFile(lineno, f"alpha={vals[-1]} outside [0, pi]")
            models.add(parts[1])
            reals.append(vals)
    if len(models) > 1:
        raise MalformedEventFile(0, "mixed models in one file")
    arr = np.array(reals, dtype=float).reshape(-1, len(_REALS))
    return EventTable(
        model=models.pop() if models else "QM",
        seed=0,
        event_id=np.array(ids, dtype=np.int64),
        sz=np.array(szs, dtype=np.int64),
        **{name: arr[:, i].copy() for i, name in enumerate(_REALS)},
    )
