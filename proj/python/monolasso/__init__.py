"""Least angle, lasso and monotone (forward stagewise) coefficient paths."""

from ._core import (
    ConfigError,
    ConsistencyError,
    DataError,
    MonolassoError,
    Path,
    SolverError,
    check_condition,
    compare_paths,
    exhaustive_check,
    fs_epsilon,
    gen_block,
    gen_sine,
    integrate_monotone_path,
    kkt_certify,
    load_path,
    monotone_incremental,
    pc_gram,
    pc_inverse_gram,
    rss_profile,
    save_path,
    solve_path,
    stagewise,
    total_variation_at_norm,
)

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "DataError",
    "MonolassoError",
    "Path",
    "SolverError",
    "check_condition",
    "compare_paths",
    "exhaustive_check",
    "fs_epsilon",
    "gen_block",
    "gen_sine",
    "integrate_monotone_path",
    "kkt_certify",
    "load_path",
    "monotone_incremental",
    "pc_gram",
    "pc_inverse_gram",
    "rss_profile",
    "save_path",
    "solve_path",
    "stagewise",
    "total_variation_at_norm",
]
