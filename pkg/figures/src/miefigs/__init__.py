"""Figure rendering for mielab artifacts (CSV/JSON in, SVG + caption out)."""

from .recipe import FigureRecipe, RecipeError
from .render import render

__all__ = ["FigureRecipe", "RecipeError", "render"]

__version__ = "0.1.0"
