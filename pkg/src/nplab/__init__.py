"""Heat-semigroup fractional seminorms and nonlocal perimeters for reflection-group weights."""

__version__ = "0.1.0"

from .quad import AccuracyError, DivergenceError, QuadSpec, UnsupportedError
from .regions import IntervalSet, Region, ball, half_space, interval, interval_union, whole
from .fields import ScalarField, gaussian, indicator, tent
from .dunkl import RootSystemSpec, WeightedMeasure, measure_of, mm_constant
from .heat import HeatKernel, completeness_check, semigroup_apply, semigroup_check
from .extrapolate import LimitEstimate, extrapolate_limit
from .seminorm import SeminormRequest, besov, gagliardo, lattice_check, ms_limit
from .perimeter import (converse_xi_recover, interaction, iota_estimate, lambda_tail, perimeter_classical,
                        perimeter_dunkl, relative_limit_verify, weighted_perimeter, xi_estimate)
from .fractal import WeierstrassSpec, box_count_dimension, boundary_condition_fit, weierstrass_eval

__all__ = [
    "AccuracyError", "DivergenceError", "QuadSpec", "UnsupportedError",
    "IntervalSet", "Region", "ball", "half_space", "interval", "interval_union", "whole",
    "ScalarField", "gaussian", "indicator", "tent",
    "RootSystemSpec", "WeightedMeasure", "measure_of", "mm_constant",
    "HeatKernel", "completeness_check", "semigroup_apply", "semigroup_check",
    "LimitEstimate", "extrapolate_limit",
    "SeminormRequest", "besov", "gagliardo", "lattice_check", "ms_limit",
    "converse_xi_recover", "interaction", "iota_estimate", "lambda_tail", "perimeter_classical",
    "perimeter_dunkl", "relative_limit_verify", "weighted_perimeter", "xi_estimate",
    "WeierstrassSpec", "box_count_dimension", "boundary_condition_fit", "weierstrass_eval",
]
