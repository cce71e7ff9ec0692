"""Comparison records shared by the oracles and the experiment runners."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

REL_FLOOR = 1e-10


@dataclass
class LimitReport:
    """Simulated versus predicted values on a grid of ``(t, x, r)``.

    Relative errors are only defined where ``|predicted| > rel_floor``; other
    rows carry ``nan``.
    """

    t: np.ndarray
    x: np.ndarray
    r: np.ndarray
    simulated: np.ndarray
    predicted: np.ndarray
    label: str = ""
    rel_floor: float = REL_FLOOR
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        n = np.asarray(self.simulated).size
        self.t = np.broadcast_to(np.asarray(self.t, dtype=np.int64), (n,)).copy()
        self.x = np.broadcast_to(np.asarray(self.x, dtype=np.int64), (n,)).copy()
        self.r = np.broadcast_to(np.asarray(self.r, dtype=np.int64), (n,)).copy()
        self.simulated = np.asarray(self.simulated, dtype=float).ravel()
        self.predicted = np.asarray(self.predicted, dtype=float).ravel()

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.simulated - self.predicted)

    @property
    def rel_err(self) -> np.ndarray:
        out = np.full(self.abs_err.shape, np.nan)
        m = np.abs(self.predicted) > self.rel_floor
        out[m] = self.abs_err[m] / np.abs(self.predicted[m])
        return out

    @property
    def max_abs_err(self) -> float:
        return float(self.abs_err.max()) if self.abs_err.size else 0.0

    @property
    def max_rel_err(self) -> float:
        rel = self.rel_err
        return float(np.nanmax(rel)) if np.any(np.isfinite(rel)) else 0.0

    def summary(self) -> dict:
        out = {
            "rows": int(self.simulated.size),
            "max_abs_err": self.max_abs_err,
            "mean_abs_err": float(self.abs_err.mean()) if self.abs_err.size else 0.0,
            "max_rel_err": self.max_rel_err,
        }
        out.update(self.extra)
        return out

    @classmethod
    def concat(cls, reports, label: str = "") -> "LimitReport":
        reports = list(reports)
        extra = {}
        for rep in reports:
            extra.update(rep.extra)
        return cls(
            t=np.concatenate([r.t for r in reports]),
            x=np.concatenate([r.x for r in reports]),
            r=np.concatenate([r.r for r in reports]),
            simulated=np.concatenate([r.simulated for r in reports]),
            predicted=np.concatenate([r.predicted for r in reports]),
            label=label,
            extra=extra,
        )

    def to_csv(self, footer: dict | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "r", "simulated", "predicted", "abs_err", "rel_err"])
        for row in zip(self.t, self.x, self.r, self.simulated, self.predicted,
                       self.abs_err, self.rel_err):
            w.writerow([int(row[0]), int(row[1]), int(row[2])] + [_fmt(v) for v in row[3:]])
        info = self.summary()
        if footer:
            info.update(footer)
        return buf.getvalue() + format_footer(info)


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else repr(float(v))


def format_footer(info: dict) -> str:
    """Render ``key=value`` pairs as ``#``-prefixed summary lines."""
    lines = []
    for k, v in info.items():
        if isinstance(v, (float, np.floating)):
            v = _fmt(v)
        lines.append(f"# {k}={v}\n")
    return "".join(lines)
