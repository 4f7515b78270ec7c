"""Nonzero-discord marker Q for two-mode continuous-variable states.

Quadrature convention: ``x = (a + a^dag)/2``, ``p = -i(a - a^dag)/2``, so the
vacuum has variance 1/4. Phase-space ordering is ``(x1, p1, x2, p2)``.
"""

from .covariance import (
    CovarianceMatrix,
    GaussianParams,
    ValidationVerdict,
    local_transform,
    standard_form_reduce,
    symplectic_single_mode,
    validate_covariance,
)
from .errors import (
    ComplexResidue,
    Degenerate,
    DegenerateInvariants,
    DiscordQError,
    Divergent,
    IllConditioned,
    NonConverged,
    NonPhysical,
    ParamMismatch,
    SingularCovariance,
    TruncationError,
)
from .fock import FockState, converge_q, fock_photon_number_mixed, fock_q, fock_squeezed_thermal
from .gauss import ComplexGaussPoly, GaussMoments, det_sqrt_branch, gauss_moments, integrate, scalar_moment
from .marker import (
    DiscordVerdict,
    Method,
    QReport,
    Verdict,
    classify,
    gaussian_zero_discord,
    q_gaussian_closed,
    q_general,
    q_mixture_closed,
    q_photon_added_n0,
    scan_photon_added,
)
from .poly import SparsePoly
from .wigner import (
    WignerComponent,
    WignerState,
    eval_wigner,
    make_gaussian_vacuum_mixture,
    make_photon_added_squeezed_thermal,
    make_photon_number_mixed,
    make_squeezed_thermal,
    normalization,
    purity,
    wigner_of_gaussian,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
