"""Figure rendering for cavity self-organization output bundles."""

from .bundle import Bundle, BundleError, Run, load_bundle, read_csv_columns
from .render import KINDS, PlotSpec, render

__version__ = "0.1.0"

__all__ = [
    "Bundle",
    "BundleError",
    "KINDS",
    "PlotSpec",
    "Run",
    "load_bundle",
    "read_csv_columns",
    "render",
    "__version__",
]
