"""Zero counting, bound tables, Wronskian certificates and realizations."""

from .bounds import BoundEntry, bound_rows, bound_table, bounds_csv
from .counting import SCAN, ZeroLocation, ZeroReport, count_zeros, make_grid, melnikov_function, melnikov_zeros
from .realize import Realization, cgp_realize, default_targets, realize_perturbation, witness_count
from .wronskian import CHARTS, ChainReport, Chart, WronskianEntry, chart_for, wronskian_chain

__all__ = [
    "BoundEntry", "bound_rows", "bound_table", "bounds_csv",
    "SCAN", "ZeroLocation", "ZeroReport", "count_zeros", "make_grid", "melnikov_function", "melnikov_zeros",
    "Realization", "cgp_realize", "default_targets", "realize_perturbation", "witness_count",
    "CHARTS", "ChainReport", "Chart", "WronskianEntry", "chart_for", "wronskian_chain",
]
