"""Exact solvers for two-player discounted-sum graph games."""
from .arith import (
    DiscountFactor,
    InvalidLassoError,
    LassoSeq,
    ThresholdDigits,
    UnsupportedDiscountError,
    dsum_finite,
    dsum_lasso,
    format_rational,
    gap,
    gap_step,
    max_dsum_bound,
    parse_rational,
    to_threshold_digits,
)
from .comparator import Comparator, Kind, PrefixClass, Relation, build, build_leq
from .game import Owner, QuantitativeGame, parse_game, serialize_game
from .product import comp_satisfice, product, solve_reachability, solve_safety, verify_strategy
from .vi import iteration_budget, reconstruct_rational, vi_optimize, vi_satisfice

__version__ = "0.1.0"
