"""Quadrature, special functions, and truncated-series arithmetic."""

from .quadrature import (
    Estimate,
    QuadratureSpec,
    ToleranceNotMetError,
    integrate,
    integrate_semi_infinite,
)
from .series import (
    TruncatedSeries,
    series_add,
    series_exp,
    series_exp_batch,
    series_lift,
    series_mul,
)
from .special import (
    HypergeometricError,
    gauss_2f1,
    gauss_2f1_scaled_shift_table,
    gauss_2f1_shift_table,
    upper_incomplete_gamma_reg,
)

__all__ = [
    "Estimate",
    "QuadratureSpec",
    "ToleranceNotMetError",
    "integrate",
    "integrate_semi_infinite",
    "TruncatedSeries",
    "series_add",
    "series_exp",
    "series_exp_batch",
    "series_lift",
    "series_mul",
    "HypergeometricError",
    "gauss_2f1",
    "gauss_2f1_scaled_shift_table",
    "gauss_2f1_shift_table",
    "upper_incomplete_gamma_reg",
]
