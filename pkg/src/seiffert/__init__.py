"""Bivariate means, the second Seiffert mean and its sharp power-mean bounds."""

from .expr import MeanExpr, parse_chain, parse_term
from .means import (arithmetic_mean, contraharmonic, geometric_mean, identric_mean,
                    lehmer_mean, logarithmic_mean, neuman_sandor, power_mean,
                    q2_over_lehmer, quadratic_mean, sandor_transform, seiffert_p,
                    seiffert_t)

__version__ = "0.1.0"

__all__ = [
    "MeanExpr",
    "parse_chain",
    "parse_term",
    "arithmetic_mean",
    "contraharmonic",
    "geometric_mean",
    "identric_mean",
    "lehmer_mean",
    "logarithmic_mean",
    "neuman_sandor",
    "power_mean",
    "q2_over_lehmer",
    "quadratic_mean",
    "sandor_transform",
    "seiffert_p",
    "seiffert_t",
]
