"""Anisotropy estimation from level curves of Gaussian random fields."""

from ._core import (
    AffineModel,
    CovarianceStack,
    CovFamily,
    EstimateCase,
    EstimateResult,
    FunctionalTriple,
    GridField,
    IsotropicCovariance,
    LevelCurve,
    TestResult,
    build_stack,
    elliptic_I,
    estimate,
    estimate_from_field,
    estimate_lambda1,
    estimate_tau,
    extract_level_curve,
    f_map,
    functional_triple,
    hermite,
    isotropy_test,
    limit_density_fU,
    sample_field,
)

__all__ = [
    "AffineModel",
    "CovarianceStack",
    "CovFamily",
    "EstimateCase",
    "EstimateResult",
    "FunctionalTriple",
    "GridField",
    "IsotropicCovariance",
    "LevelCurve",
    "TestResult",
    "build_stack",
    "elliptic_I",
    "estimate",
    "estimate_from_field",
    "estimate_lambda1",
    "estimate_tau",
    "extract_level_curve",
    "f_map",
    "functional_triple",
    "hermite",
    "isotropy_test",
    "limit_density_fU",
    "sample_field",
]
