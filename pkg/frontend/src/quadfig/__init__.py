"""Renders kernel-quadrature sweep CSVs into convergence figures.

Consumes only the sweep harness's external interfaces: its result CSV
schema and the aggregation CSV emitted by `dppquad aggregate`.
"""

from .records import SchemaError, SweepRecord, aggregate, read_records, read_records_file
from .figure import PlotSpec, RenderResult, render

__all__ = [
    "SchemaError",
    "SweepRecord",
    "aggregate",
    "read_records",
    "read_records_file",
    "PlotSpec",
    "RenderResult",
    "render",
]
