"""Spectral density of Jacobi operators with paired power-law weights.

The weight pattern b(2k-1) = b(2k) = k**alpha, alpha in (1/2, 1), gives a
purely absolutely continuous spectrum whose density f obeys a small-energy
power law with exponent (3 alpha - 2)/(1 - alpha); the sign of that
exponent flips at alpha = 2/3.  This package computes f from the
three-term recurrence, verifies the transfer-block asymptotics behind the
law, and fits the transition exponent.
"""

from .asymptotics import (
    EigenData,
    ProductFactorization,
    RegimeError,
    TailReport,
    complex_regime_min_k,
    eigen_A,
    factorize_product,
    phase_sum,
    reconstruct,
    residual_snapshots,
    rotation,
    rotation_angle,
    tail_check,
    weight_sum_constant,
)
from .continuum import (
    ClosedFormLimit,
    ComparisonRecord,
    FrobeniusExponents,
    IntegrationError,
    OscillatoryParams,
    ScalingComparison,
    closed_form_limit,
    discrete_vs_continuum,
    frobenius_exponents,
    integrate_matrix_ode,
    oscillatory_integral,
    scaling_ladder,
    w_matrix,
)
from .density import (
    DensityEstimate,
    TruncationPolicy,
    amplitude_estimator,
    estimate_density,
    sweep,
)
from .oscillatory import DivergentIntegralError, cos_over_y, sin_over_y
from .recurrence import (
    DeltaSample,
    PolyState,
    block_A,
    delta_n,
    delta_stream,
    initial_state,
    step,
    transfer_B,
    zero_energy_profile,
)
from .transition import (
    ExponentFit,
    InsufficientDataError,
    TransitionClass,
    classify,
    fit_exponent,
    predicted_exponent,
)
from .weights import ConditionReport, WeightSequence, check_conditions, weight

__version__ = "0.1.0"

__all__ = [
    "ClosedFormLimit",
    "ComparisonRecord",
    "ConditionReport",
    "DeltaSample",
    "DensityEstimate",
    "DivergentIntegralError",
    "EigenData",
    "ExponentFit",
    "FrobeniusExponents",
    "InsufficientDataError",
    "IntegrationError",
    "OscillatoryParams",
    "PolyState",
    "ProductFactorization",
    "RegimeError",
    "ScalingComparison",
    "TailReport",
    "TransitionClass",
    "TruncationPolicy",
    "WeightSequence",
    "amplitude_estimator",
    "block_A",
    "check_conditions",
    "classify",
    "closed_form_limit",
    "complex_regime_min_k",
    "cos_over_y",
    "delta_n",
    "delta_stream",
    "discrete_vs_continuum",
    "eigen_A",
    "estimate_density",
    "factorize_product",
    "fit_exponent",
    "initial_state",
    "integrate_matrix_ode",
    "oscillatory_integral",
    "phase_sum",
    "predicted_exponent",
    "reconstruct",
    "residual_snapshots",
    "rotation",
    "rotation_angle",
    "scaling_ladder",
    "sin_over_y",
    "step",
    "sweep",
    "tail_check",
    "transfer_B",
    "w_matrix",
    "weight",
    "weight_sum_constant",
    "zero_energy_profile",
]
