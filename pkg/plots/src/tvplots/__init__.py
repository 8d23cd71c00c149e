"""Figure pipeline for tvgames experiment CSVs.

Deterministic SVG rendering (golden-file testable) with matplotlib-backed PNG
as the convenience format.
"""

from .render import FigureSpec, SchemaError, discover_figures, load_csv, render

__version__ = "0.1.0"
