"""Weighted SVD bases for radial basis function approximation."""

from .approx import (
    Approximant,
    StandardInterpolant,
    evaluate,
    l2w_error_bound,
    loo_optimize,
    project,
    standard_interpolant,
    truncate,
)
from .basis import (
    WsvdBasis,
    build_basis,
    eval_basis,
    nystrom_spectrum,
    power_function,
)
from .cubature import CubatureRule, gauss_legendre_1d, polar_rule, rule_for_budget, square_rule
from .geometry import CUTDISK, DISK, LENS, SQUARE, Domain, get_domain
from .kernels import Kernel, kernel_column, kernel_matrix, phi

__version__ = "0.1.0"
