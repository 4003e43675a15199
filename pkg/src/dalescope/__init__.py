"""Propagation operations on quadrilateral tilings of ordered levels."""

from .grid import BorderPolicy, Grid, Neighborhood, UsageError
from .kernels import CATALOG, Guard, KernelSchema, Mode, eval_kernel, lookup_kernel
from .engine import RunStats, Schedule, run_fixpoint, run_slope_ray, run_waterfall

__all__ = [
    "BorderPolicy",
    "CATALOG",
    "Grid",
    "Guard",
    "KernelSchema",
    "Mode",
    "Neighborhood",
    "RunStats",
    "Schedule",
    "UsageError",
    "eval_kernel",
    "lookup_kernel",
    "run_fixpoint",
    "run_slope_ray",
    "run_waterfall",
]

__version__ = "0.1.0"
