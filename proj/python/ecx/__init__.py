"""Euler characteristics of 2D excursion sets: identities and estimators.

Thin wrapper over the compiled _ecx module.
"""

from _ecx import (  # noqa: F401
    Jet2,
    ScalarField2D,
    coarea,
    derive_seed,
    empirical_cf,
    euler_char,
    euler_primitive,
    kac_rice,
    make_field,
    mc_gamma_at_origin,
    moment_experiment,
    psi,
    stationary_limit_density,
    validate,
)

__all__ = [
    "Jet2",
    "ScalarField2D",
    "coarea",
    "derive_seed",
    "empirical_cf",
    "euler_char",
    "euler_primitive",
    "kac_rice",
    "make_field",
    "mc_gamma_at_origin",
    "moment_experiment",
    "psi",
    "stationary_limit_density",
    "validate",
]
