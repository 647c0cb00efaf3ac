"""Mergeable sample statistics and log-log power-law fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "SampleAccumulator",
    "PowerLawFit",
    "fit_power_law",
]


class SampleAccumulator:
    """Per-key running (count, sum, sum of squares).

    Merging accumulators from disjoint seed ranges is associative and
    commutative, so trajectories can be sharded freely.
    """

    def __init__(self):
        self._data: Dict[Hashable, List[float]] = {}

    def add(self, key: Hashable, value: float):
        slot = self._data.get(key)
        if slot is None:
            self._data[key] = [1, float(value), float(value) ** 2]
        else:
            slot[0] += 1
            slot[1] += value
            slot[2] += value * value

    def merge(self, other: "SampleAccumulator") -> "SampleAccumulator":
        out = SampleAccumulator()
        for src in (self, other):
            for key, (n, s, ss) in src._data.items():
                slot = out._data.get(key)
                if slot is None:
                    out._data[key] = [n, s, ss]
                else:
                    slot[0] += n
                    slot[1] += s
                    slot[2] += ss
        return out

    def keys(self):
        return self._data.keys()

    def count(self, key) -> int:
        return self._data[key][0]

    def mean(self, key) -> float:
        n, s, _ = self._data[key]
        return s / n

    def stderr(self, key) -> float:
        n, s, ss = self._data[key]
        if n < 2:
            return 0.0
        var = (ss - s * s / n) / (n - 1)
        return math.sqrt(max(var, 0.0) / n)

    def __len__(self):
        return len(self._data)


@dataclass
class PowerLawFit:
    exponent: float
    amplitude: float
    r_squared: float
    exponent_stderr: float
    window: Tuple[float, float]
    n_points: int
    n_excluded: int = 0

    def to_json_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "r_squared": self.r_squared,
            "exponent_stderr": self.exponent_stderr,
            "window": list(self.window),
            "n_points": self.n_points,
            "n_excluded": self.n_excluded,
        }


def fit_power_law(
    points: Sequence[Tuple[float, float, float]],
    window: Optional[Tuple[float, float]] = None,
) -> PowerLawFit:
    """Weighted least squares of ln(value) on ln(abscissa).

    points: (abscissa, value, weight) triples; nonpositive values are
    excluded (counted in n_excluded).  Requires >= 4 usable in-window
    points.  The exponent standard error comes from the fit covariance.
    """
    xs, ys, ws = [], [], []
    excluded = 0
    for x, y, w in points:
        if x <= 0:
            raise ValueError("abscissa must be positive")
        if window is not None and not (window[0] <= x <= window[1]):
            continue
        if y <= 0 or w <= 0:
            excluded += 1
            continue
        xs.append(math.log(x))
        ys.append(math.log(y))
        ws.append(w)
    if len(xs) < 4:
        raise ValueError(f"need >= 4 usable points, got {len(xs)}")
    lx = np.asarray(xs)
    ly = np.asarray(ys)
    w = np.asarray(ws, float)
    sw = w.sum()
    mx = (w * lx).sum() / sw
    my = (w * ly).sum() / sw
    sxx = (w * (lx - mx) ** 2).sum()
    sxy = (w * (lx - mx) * (ly - my)).sum()
    if sxx == 0:
        raise ValueError("degenerate abscissae")
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ss_res = (w * resid**2).sum()
    ss_tot = (w * (ly - my) ** 2).sum()
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    dof = max(len(xs) - 2, 1)
    sigma2 = ss_res / dof
    slope_err = math.sqrt(sigma2 / sxx) if sxx > 0 else float("inf")
    lo = min(points, key=lambda p: p[0])[0] if window is None else window[0]
    hi = max(points, key=lambda p: p[0])[0] if window is None else window[1]
    return PowerLawFit(
        exponent=slope,
        amplitude=math.exp(intercept),
        r_squared=r2,
        exponent_stderr=slope_err,
        window=(lo, hi),
        n_points=len(xs),
        n_excluded=excluded,
    )
