"""Histogram rendering for zurn CSV outputs."""

from .render import PlotSpec, SchemaError, fit_overlay_params, load_values, render

__version__ = "0.1.0"
