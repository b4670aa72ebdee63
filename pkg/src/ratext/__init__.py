"""Rational extensions of the harmonic oscillator, Morse and effective radial
Kepler-Coulomb potentials via Darboux-Bäcklund transformations.

Typical use::

    from ratext import FamilySpec, extend, extended_eigenstate

    ext = extend(FamilySpec.ho(2.0), 2)
    ext.spectrum.levels          # (("-", -6.0), (0, 0.0), (1, 2.0), ...)
    psi = extended_eigenstate(ext, "-")
"""
from .dbt import (
    EXTRA,
    ClosedFormEigenstate,
    ExtendedPotential,
    OrthogonalFamily,
    SpectrumReport,
    dbt_rs,
    extend,
    extended_eigenstate,
    extended_spectrum,
    m_polynomial,
    n_polynomial,
    orthogonal_family,
    p_polynomial,
    superpartner,
)
from .errors import (
    CoincidenceError,
    NoExtraStateError,
    NoSuchStateError,
    ParameterError,
    RatextError,
    RegularityError,
    UnsupportedError,
)
from .families import (
    FamilySpec,
    Regularity,
    RSFunction,
    base_energy,
    bound_state_count,
    gamma_map,
    potential_value,
    regularity_check,
    rs_continued_fraction_eval,
    rs_physical,
    rs_regularized,
)
from .oracle import GridSpec, integrate, schrodinger_residual, solve_bound_states
from .polynomials import Polynomial, klh_zero_counts, laguerre_eval, laguerre_poly
from .verify import VerificationReport, verify_case, verify_matrix

__version__ = "0.1.0"

__all__ = [
    "EXTRA",
    "ClosedFormEigenstate",
    "CoincidenceError",
    "ExtendedPotential",
    "FamilySpec",
    "GridSpec",
    "NoExtraStateError",
    "NoSuchStateError",
    "OrthogonalFamily",
    "ParameterError",
    "Polynomial",
    "RSFunction",
    "RatextError",
    "Regularity",
    "RegularityError",
    "SpectrumReport",
    "UnsupportedError",
    "VerificationReport",
    "base_energy",
    "bound_state_count",
    "dbt_rs",
    "extend",
    "extended_eigenstate",
    "extended_spectrum",
    "gamma_map",
    "integrate",
    "klh_zero_counts",
    "laguerre_eval",
    "laguerre_poly",
    "m_polynomial",
    "n_polynomial",
    "orthogonal_family",
    "p_polynomial",
    "potential_value",
    "regularity_check",
    "rs_continued_fraction_eval",
    "rs_physical",
    "rs_regularized",
    "schrodinger_residual",
    "solve_bound_states",
    "superpartner",
    "verify_case",
    "verify_matrix",
]
