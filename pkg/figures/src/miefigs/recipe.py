"""Recipe parsing and artifact loading.

A recipe is a small JSON document selecting rows from mielab result files
and describing how to plot them.  Two kinds exist:

    loglog     series of (x, mean, stderr) points from results.csv rows,
               optionally with dashed power-law slope guides
    histogram  the outcome-entropy density from mie_histogram.csv

Example:

    {
      "kind": "loglog",
      "title": "measurement-only critical point",
      "x": "eta",
      "series": [
        {"csv": "runs/xzz/results.csv", "observable": "mi", "label": "MI"},
        {"csv": "runs/xzz/results.csv", "observable": "mie_x",
         "label": "MIE_X", "filters": {"basis": "x"}}
      ],
      "guides": [{"slope": 0.3333, "label": "1/3"}]
    }
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

__all__ = ["FigureRecipe", "RecipeError", "SeriesData", "load_series",
           "load_histogram"]


class RecipeError(ValueError):
    """Malformed recipe or input that does not match the expected schema."""


_KINDS = ("loglog", "histogram")
_X_COLUMNS = ("eta", "x3")


@dataclass(frozen=True)
class SlopeGuide:
    slope: float
    label: str


@dataclass(frozen=True)
class SeriesSpec:
    csv_path: str
    observable: str
    label: str
    filters: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    title: str
    x: str
    series: Tuple[SeriesSpec, ...]
    guides: Tuple[SlopeGuide, ...]
    histogram_csv: Optional[str] = None
    histogram_json: Optional[str] = None

    @classmethod
    def from_file(cls, path: str) -> "FigureRecipe":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise RecipeError(f"cannot read recipe {path}: {exc}") from exc
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str = ".") -> "FigureRecipe":
        if not isinstance(raw, dict):
            raise RecipeError("recipe must be a JSON object")
        kind = raw.get("kind")
        if kind not in _KINDS:
            raise RecipeError(f"kind must be one of {_KINDS}, got {kind!r}")
        title = str(raw.get("title", ""))

        def resolve(p: str) -> str:
            return p if os.path.isabs(p) else os.path.join(base_dir, p)

        if kind == "histogram":
            hist = raw.get("csv")
            if not hist:
                raise RecipeError("histogram recipe needs a csv path")
            meta = raw.get("json")
            return cls(kind=kind, title=title, x="entropy", series=(),
                       guides=(), histogram_csv=resolve(hist),
                       histogram_json=resolve(meta) if meta else None)

        x = raw.get("x", "eta")
        if x not in _X_COLUMNS:
            raise RecipeError(f"x must be one of {_X_COLUMNS}, got {x!r}")
        series_raw = raw.get("series")
        if not series_raw or not isinstance(series_raw, list):
            raise RecipeError("loglog recipe needs a nonempty series list")
        series = []
        for item in series_raw:
            if "csv" not in item or "observable" not in item:
                raise RecipeError(f"series entry needs csv and observable: {item}")
            series.append(SeriesSpec(
                csv_path=resolve(item["csv"]),
                observable=str(item["observable"]),
                label=str(item.get("label", item["observable"])),
                filters={str(k): str(v)
                         for k, v in item.get("filters", {}).items()},
            ))
        guides = tuple(
            SlopeGuide(float(g["slope"]), str(g.get("label", g["slope"])))
            for g in raw.get("guides", []))
        return cls(kind=kind, title=title, x=x, series=tuple(series),
                   guides=guides)


@dataclass
class SeriesData:
    spec: SeriesSpec
    xs: List[float]
    means: List[float]
    stderrs: List[float]
    seeds: List[int]

    @property
    def seed_range(self) -> Tuple[int, int]:
        return min(self.seeds), max(self.seeds)


_REQUIRED_COLUMNS = {"observable", "mean", "stderr", "eta", "seed"}


def load_series(spec: SeriesSpec, x_column: str) -> SeriesData:
    try:
        with open(spec.csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not _REQUIRED_COLUMNS.issubset(
                    reader.fieldnames):
                missing = _REQUIRED_COLUMNS - set(reader.fieldnames or ())
                raise RecipeError(
                    f"{spec.csv_path}: missing columns {sorted(missing)}")
            rows = list(reader)
    except OSError as exc:
        raise RecipeError(f"cannot read {spec.csv_path}: {exc}") from exc
    data = SeriesData(spec, [], [], [], [])
    for row in rows:
        if row["observable"] != spec.observable:
            continue
        if any(row.get(k) != v for k, v in spec.filters.items()):
            continue
        data.xs.append(float(row[x_column]))
        data.means.append(float(row["mean"]))
        data.stderrs.append(float(row["stderr"]))
        data.seeds.append(int(row["seed"]))
    if not data.xs:
        raise RecipeError(
            f"{spec.csv_path}: no rows match observable {spec.observable!r} "
            f"with filters {spec.filters}")
    order = sorted(range(len(data.xs)), key=lambda i: data.xs[i])
    data.xs = [data.xs[i] for i in order]
    data.means = [data.means[i] for i in order]
    data.stderrs = [data.stderrs[i] for i in order]
    return data


def load_histogram(csv_path: str, json_path: Optional[str]):
    try:
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            need = {"entropy_bin_lo", "entropy_bin_hi", "probability_density"}
            if reader.fieldnames is None or not need.issubset(reader.fieldnames):
                raise RecipeError(f"{csv_path}: not a histogram file")
            rows = list(reader)
    except OSError as exc:
        raise RecipeError(f"cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise RecipeError(f"{csv_path}: empty histogram")
    lo = [float(r["entropy_bin_lo"]) for r in rows]
    hi = [float(r["entropy_bin_hi"]) for r in rows]
    dens = [float(r["probability_density"]) for r in rows]
    meta = None
    if json_path is not None:
        try:
            with open(json_path) as fh:
                meta = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise RecipeError(f"cannot read {json_path}: {exc}") from exc
    return lo, hi, dens, meta
