"""Rendering of corridorsim sweep outputs: per-scenario median heatmaps,
pooled CDFs with bootstrap bands, and the stress-case delay comparison."""

__version__ = "0.1.0"

from .figures import FigureJob, FigureKind, MalformedInputError, default_jobs, render  # noqa: F401
