"""Signature kernels of time series by tile-wise power-series propagation."""

from .errors import (FactorizationError, InconsistentBoundaryError, InvalidArgumentError,
                     NumericOverflowError, ParseError, ResourceError)
from .gram import GramResult, gram_matrix, mape
from .paths import IncrementTable, TileGrid, TimeSeries, load_csv, save_csv
from .truncation import TruncationPolicy, estimate_order, gram_error_bound
from .wavefront import KernelResult, propagate, propagate_grid

__version__ = "0.1.0"

__all__ = [
    "FactorizationError", "InconsistentBoundaryError", "InvalidArgumentError",
    "NumericOverflowError", "ParseError", "ResourceError",
    "GramResult", "gram_matrix", "mape",
    "IncrementTable", "TileGrid", "TimeSeries", "load_csv", "save_csv",
    "TruncationPolicy", "estimate_order", "gram_error_bound",
    "KernelResult", "propagate", "propagate_grid",
]
