"""Discriminant divisors, fiber integrals and their asymptotics for monomial fibrations."""

__version__ = "0.1.0"

from .divisor import DivisorQ, MonomialValuation, PrimeComponent, add, round_up_negative_part, valuation_of
from .model import FibrationModel, VariableGroups, Violation, classify_variables, pullback, validate
from .discriminant import (
    DiscriminantResult,
    discriminant_divisor,
    horizontal_irrelevance_check,
    is_klt_over,
    translated,
    verify_translation_identity,
)
from .kodaira import (
    KodairaFiberData,
    elliptic_degree,
    kodaira_preset,
    multiple_fiber_coefficient,
    sigma_coefficient,
)
from .fiber_integral import (
    BasePoint,
    FiberIntegralParams,
    c_group_factor,
    evaluate_batch,
    evaluate_monte_carlo,
    evaluate_quadrature,
    reduce,
)
from .asymptotics import Ray, fit, lelong_zero_check, sample_ray, verify_prediction
from .errors import (
    CBFError,
    DegenerateRegionError,
    DomainError,
    FitError,
    ModelError,
    NonKltError,
    QuadratureError,
)
