"""Sum-rate-versus-SNR figure rendering for sweep result CSVs."""

from .data import SchemaError, read_results, build_series
from .render import PlotSpec, render, style_map

__all__ = ["SchemaError", "read_results", "build_series",
           "PlotSpec", "render", "style_map"]
__version__ = "0.1.0"
