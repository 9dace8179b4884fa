"""Executable Menger 2-probabilistic normed spaces.

Submodules: :mod:`dfalgebra` (distribution functions), :mod:`geometry`
(2-norms in R^d), :mod:`menger2pn` (spaces and axiom sweeps),
:mod:`sequences` (convergence and convex series), :mod:`dbound`
(probabilistic radius and D-boundedness) and :mod:`cli`.
"""

from .dfalgebra import (
    DistributionFn,
    MinOf,
    PiecewiseConstant,
    Scaled,
    StandardRatio,
    StepAt,
    epsilon,
    evaluate,
    left_limit,
    pointwise_min,
)
from .geometry import Point, two_norm
from .menger2pn import Prob2Norm, custom_space, indicator_space, standard_space

__version__ = "0.1.0"

__all__ = [
    "DistributionFn",
    "MinOf",
    "PiecewiseConstant",
    "Point",
    "Prob2Norm",
    "Scaled",
    "StandardRatio",
    "StepAt",
    "custom_space",
    "epsilon",
    "evaluate",
    "indicator_space",
    "left_limit",
    "pointwise_min",
    "standard_space",
    "two_norm",
]
