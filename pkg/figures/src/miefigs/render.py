"""Deterministic SVG rendering of figure recipes.

Output is byte-stable across re-runs: fixed hashsalt, glyphs embedded as
paths, no date metadata.  Every figure gets a sibling caption .txt citing
the source files and seed ranges.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .recipe import (FigureRecipe, RecipeError, SeriesData, load_histogram,
                     load_series)

__all__ = ["render", "main"]

_RC = {
    "svg.hashsalt": "miefigs",
    "svg.fonttype": "path",
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
}

_MARKERS = ("o", "s", "^", "d", "v", "*")


def _guide_anchor(series: List[SeriesData]):
    xs = [x for s in series for x in s.xs]
    ys = [y for s in series for y in s.means if y > 0]
    if not ys:
        raise RecipeError("no positive values to anchor slope guides")
    return min(xs), max(xs), min(ys), max(ys)


def _render_loglog(recipe: FigureRecipe, out_path: str) -> str:
    series = [load_series(spec, recipe.x) for spec in recipe.series]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        for k, data in enumerate(series):
            xs, ys, es = [], [], []
            for x, y, e in zip(data.xs, data.means, data.stderrs):
                if x > 0 and y > 0:
                    xs.append(x)
                    ys.append(y)
                    es.append(e)
            if not xs:
                raise RecipeError(
                    f"series {data.spec.label!r} has no positive points")
            ax.errorbar(xs, ys, yerr=es, marker=_MARKERS[k % len(_MARKERS)],
                        markersize=4, linestyle="none", capsize=2,
                        label=data.spec.label)
        x_lo, x_hi, y_lo, y_hi = _guide_anchor(series)
        for guide in recipe.guides:
            # dashed guide through the lower-left data corner
            gx = [x_lo, x_hi]
            gy = [y_lo, y_lo * (x_hi / x_lo) ** guide.slope]
            ax.plot(gx, gy, "k--", linewidth=0.9)
            ax.annotate(guide.label, (gx[1], gy[1]), fontsize=8,
                        textcoords="offset points", xytext=(2, 0))
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("cross-ratio" if recipe.x == "eta" else recipe.x)
        ax.set_ylabel("entropy / information")
        if recipe.title:
            ax.set_title(recipe.title, fontsize=10)
        ax.legend(fontsize=8, frameon=False)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    lines = [recipe.title or "log-log figure"]
    for data in series:
        lo, hi = data.seed_range
        seed_txt = str(lo) if lo == hi else f"{lo}-{hi}"
        lines.append(f"{data.spec.label}: {data.spec.observable} from "
                     f"{data.spec.csv_path} (seeds {seed_txt}, "
                     f"{len(data.xs)} points)")
    if recipe.guides:
        slopes = ", ".join(g.label for g in recipe.guides)
        lines.append(f"dashed guides: power laws with slopes {slopes}")
    return "\n".join(lines) + "\n"


def _render_histogram(recipe: FigureRecipe, out_path: str) -> str:
    lo, hi, dens, meta = load_histogram(recipe.histogram_csv,
                                        recipe.histogram_json)
    centers = [(a + b) / 2 for a, b in zip(lo, hi)]
    widths = [b - a for a, b in zip(lo, hi)]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        ax.bar(centers, dens, width=widths, align="center",
               edgecolor="black", linewidth=0.4)
        ax.set_xlabel("post-measurement entanglement entropy")
        ax.set_ylabel("probability density")
        if recipe.title:
            ax.set_title(recipe.title, fontsize=10)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    mean = sum(c * d * w for c, d, w in zip(centers, dens, widths))
    lines = [recipe.title or "outcome-entropy histogram",
             f"source: {recipe.histogram_csv}",
             f"density-weighted mean entropy: {mean:.6f}"]
    if meta and "mean" in meta:
        lines.append(f"exact enumeration mean: {meta['mean']:.6f} "
                     f"({recipe.histogram_json})")
    return "\n".join(lines) + "\n"


def render(recipe: FigureRecipe, out_path: str) -> str:
    """Render the recipe to out_path (SVG) plus a caption text file.

    Returns the caption path.  On any schema or data error nothing is
    written.
    """
    if not out_path.endswith(".svg"):
        raise RecipeError("output path must end in .svg")
    tmp = out_path + ".tmp"
    if recipe.kind == "loglog":
        caption = _render_loglog(recipe, tmp)
    else:
        caption = _render_histogram(recipe, tmp)
    os.replace(tmp, out_path)
    caption_path = out_path[:-4] + ".txt"
    with open(caption_path, "w") as fh:
        fh.write(caption)
    return caption_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render a mielab figure recipe to SVG")
    parser.add_argument("--recipe", required=True, help="recipe JSON path")
    parser.add_argument("--out", required=True, help="output SVG path")
    args = parser.parse_args(argv)
    try:
        recipe = FigureRecipe.from_file(args.recipe)
        caption = render(recipe, args.out)
    except RecipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} and {caption}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
