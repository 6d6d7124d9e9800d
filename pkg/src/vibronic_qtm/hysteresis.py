"""Spin-flip probability from the zero-field step of a hysteresis sweep."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

DEFAULT_FIT_WINDOW = 0.1  # T
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class HysteresisTrace:
    """Magnetisation ``M`` (any units) against field ``B`` (T) and time ``t`` (s)."""

    t: NDArray[np.float64]
    B: NDArray[np.float64]
    M: NDArray[np.float64]
    msat: float

    def __post_init__(self):
        for name in ("t", "B", "M"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (len(self.t) == len(self.B) == len(self.M)):
            raise ValueError("t, B and M must have equal length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time stamps must be strictly increasing")
        if not self.msat > 0:
            raise ValueError("Msat must be positive")

    @classmethod
    def from_csv(cls, path, msat: float) -> "HysteresisTrace":
        """Read columns ``t``, ``B``, ``M`` (header row required, ``#`` lines skipped)."""
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
        missing = {"t", "B", "M"} - set(rows[0] if rows else ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
        return cls(*(np.array([float(r[c]) for r in rows]) for c in ("t", "B", "M")), msat=msat)


@dataclass(frozen=True)
class SpinFlipResult:
    M: float
    Mprime: float
    P: float
    clamped: bool


def _descending_crossing(B):
    """Index range of the descending run that passes through ``B = 0``."""
    desc = np.diff(B) < 0
    start = None
    for i in range(len(desc) + 1):
        if i < len(desc) and desc[i]:
            if start is None:
                start = i
        elif start is not None:
            seg = slice(start, i + 1)
            if B[seg].max() > 0 > B[seg].min():
                return seg
            start = None
    raise ValueError("trace has no descending sweep through zero field")


def _intercept(x, y):
    """Value at ``x = 0`` of the least-squares line; exact for constant ``y``."""
    xc = x - x.mean()
    dy = y - y[0]
    slope = np.dot(xc, dy) / np.dot(xc, xc)
    return y[0] + (dy.mean() - slope * x.mean())


def extract_spin_flip(trace: HysteresisTrace, fit_window: float = DEFAULT_FIT_WINDOW) -> SpinFlipResult:
    """``P = (M - M') / (2 Msat)`` from straight-line fits either side of zero field.

    On the descending branch ``M`` is extrapolated to ``B = 0`` from
    ``B in (0, fit_window]`` and ``M'`` from ``B in [-fit_window, 0)``.
    ``P`` is clamped to ``[0, 1]``; ``clamped`` records an overshoot beyond
    rounding (1e-12).
    """
    seg = _descending_crossing(trace.B)
    b, m = trace.B[seg], trace.M[seg]
    values = []
    for mask in ((b > 0) & (b <= fit_window), (b < 0) & (b >= -fit_window)):
        if mask.sum() < MIN_FIT_POINTS:
            raise ValueError(f"need at least {MIN_FIT_POINTS} points on each side within {fit_window} T of zero")
        values.append(_intercept(b[mask], m[mask]))
    hi, lo = values
    p = 0.5 * (hi - lo) / trace.msat
    pc = min(max(p, 0.0), 1.0)
    return SpinFlipResult(M=float(hi), Mprime=float(lo), P=float(pc), clamped=bool(abs(pc - p) > 1e-12))
