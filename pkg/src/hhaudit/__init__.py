"""Numerical audit toolkit for Hermite-Hadamard type product inequalities
over h-convex function classes, their corollaries and special means."""

__version__ = "0.1.0"

from .engine import (  # noqa: F401
    InequalityReport,
    check_hypotheses,
    closed_form_rhs,
    evaluate,
)
from .errors import (  # noqa: F401
    ConfigurationError,
    ConvergenceError,
    DivergentMomentError,
    DomainError,
    EvaluationError,
    ExhaustionError,
    NonEvaluableError,
    SpecParseError,
)
from .falsifier import CounterExample, FalsificationResult, SearchSpace, confirm, falsify  # noqa: F401
from .functions import Interval, ScalarFunction, check_class, make_function  # noqa: F401
from .kernels import HKernel, PropertyReport, Sampler, kernel_properties, make_kernel  # noqa: F401
from .means import ChainReport, MeanValue, mean, verify_chain, verify_proposition  # noqa: F401
from .quadrature import HMoments, QuadratureResult, beta, beta_integral, h_moments, integrate  # noqa: F401
