"""Jacobi forms, pluriharmonic polynomials and the lift to vector-valued
Siegel modular forms, with exact group algebra and numerical certification."""

from .errors import (
    DimensionError,
    DomainError,
    JacobiLiftError,
    NotInSpanError,
    SingularError,
    TruncationError,
)
from .forms import (
    E8_GRAM,
    EisensteinSpec,
    EvenUnimodularForm,
    FourierCoeffTable,
    HalfIntegralIndex,
    SeriesValue,
    ThetaForm,
    TruncationPolicy,
    coset_reps,
    eisenstein_eval,
    jacobi_invariance_check,
    slash_action,
    theta_eval,
    theta_fourier,
)
from .lattice import lattice_points
from .lift import (
    LiftSpec,
    LiftValue,
    identity_I_check,
    identity_II_check,
    lift_fP,
    lift_ftau,
    main_theorem_check,
)
from .matgroup import (
    HeisenbergElement,
    JacobiDomainPoint,
    JacobiElement,
    SiegelPoint,
    SymplecticElement,
    cocycle_residual,
    factor_decomposition,
    jacobi_action,
    jacobi_mul,
    psd_check_exact,
    siegel_action,
    symplectic_check,
)
from .polyharm import (
    PluriharmonicBasis,
    QuadFormS,
    SparsePoly,
    bilinear_form,
    gl_action,
    is_pluriharmonic,
    lemma43_residual,
    pluriharmonic_basis,
    tau_matrix,
)
from .report import VerificationReport

__all__ = [
    "DimensionError",
    "DomainError",
    "JacobiLiftError",
    "NotInSpanError",
    "SingularError",
    "TruncationError",
    "E8_GRAM",
    "EisensteinSpec",
    "EvenUnimodularForm",
    "FourierCoeffTable",
    "HalfIntegralIndex",
    "SeriesValue",
    "ThetaForm",
    "TruncationPolicy",
    "coset_reps",
    "eisenstein_eval",
    "jacobi_invariance_check",
    "slash_action",
    "theta_eval",
    "theta_fourier",
    "lattice_points",
    "LiftSpec",
    "LiftValue",
    "identity_I_check",
    "identity_II_check",
    "lift_fP",
    "lift_ftau",
    "main_theorem_check",
    "HeisenbergElement",
    "JacobiDomainPoint",
    "JacobiElement",
    "SiegelPoint",
    "SymplecticElement",
    "cocycle_residual",
    "factor_decomposition",
    "jacobi_action",
    "jacobi_mul",
    "psd_check_exact",
    "siegel_action",
    "symplectic_check",
    "PluriharmonicBasis",
    "QuadFormS",
    "SparsePoly",
    "bilinear_form",
    "gl_action",
    "is_pluriharmonic",
    "lemma43_residual",
    "pluriharmonic_basis",
    "tau_matrix",
    "VerificationReport",
]

__version__ = "0.1.0"
