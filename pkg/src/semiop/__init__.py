"""Operators on finite-dimensional semi-Hilbertian spaces.

A positive semidefinite weight ``A`` induces the seminorm
``||x||_A = <Ax, x>^(1/2)``. The package computes A-seminorms, A-numerical
and A-spectral radii, the A-adjoint, operator-class predicates and the
A-joint spectral radius, and checks the classical inequalities between them.
"""

__version__ = "0.1.0"

from .classify import ClassificationResult, classify_full
from .errors import (
    ChainViolation,
    ConvergenceError,
    NotAdjointable,
    NotFiniteError,
    NotHermitian,
    NotPositive,
    SemiopError,
    ShapeError,
    ZeroOperator,
)
from .numerics import DEFAULT_CONFIG, ToleranceConfig
from .radii import (
    INFINITE,
    a_joint_spectral_radius,
    a_maximal_numerical_radius,
    a_numerical_radius,
    a_operator_seminorm,
    a_spectral_radius,
    analyze,
)
from .semispace import is_a_bounded, make_context, sharp_adjoint
