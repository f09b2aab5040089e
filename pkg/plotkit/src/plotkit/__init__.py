"""Offline figure toolkit for rootpacket harness CSV outputs."""

from .render import PLOT_KINDS, PlotSpec, SchemaError, ols_slope, render

__version__ = "0.1.0"
