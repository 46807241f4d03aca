"""Log-log figure rendering for herdnoise run artifacts."""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, overlay_line, render

__all__ = ["FigureSpec", "SchemaError", "overlay_line", "render",
           "__version__"]
