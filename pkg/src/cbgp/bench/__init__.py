"""Benchmark problems and their runtime value classes."""

from cbgp.bench.problems import (
    PENALTY,
    Case,
    Problem,
    all_problems,
    get_problem,
    make_days_between,
    make_filter_bounds,
    make_first_three,
    make_prefix_paths,
    make_psb_subset,
)
from cbgp.bench.values import PathValue

__all__ = [
    "PENALTY",
    "Case",
    "PathValue",
    "Problem",
    "all_problems",
    "get_problem",
    "make_days_between",
    "make_filter_bounds",
    "make_first_three",
    "make_prefix_paths",
    "make_psb_subset",
]
