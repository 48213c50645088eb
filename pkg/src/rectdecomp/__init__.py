"""Exact decomposition tools for persistence modules over finite 2-d grids."""
from .bimodule import GridModule, direct_sum, indicator, load, random_module, save, shape_indicator, validate
from .decomposer import (
    Decomposition,
    decompose_rectangles,
    end_dim,
    hom_space,
    interval_decompose,
    local_condition_check,
    strong_exact,
    weak_exact,
)
from .filtration import all_filtrates, counting_dim, filt_submodule, t_skeleton
from .shapes import IntervalShape, RectangleShape

__all__ = [
    "GridModule", "direct_sum", "indicator", "load", "random_module", "save", "shape_indicator", "validate",
    "Decomposition", "decompose_rectangles", "end_dim", "hom_space", "interval_decompose",
    "local_condition_check", "strong_exact", "weak_exact",
    "all_filtrates", "counting_dim", "filt_submodule", "t_skeleton",
    "IntervalShape", "RectangleShape",
]
