"""Renderer for arcfit plot-data bundles."""

from .render import BundleError, constraint_intervals, load_bundle, render, render_file

__version__ = "0.1.0"

__all__ = ["BundleError", "constraint_intervals", "load_bundle", "render", "render_file"]
