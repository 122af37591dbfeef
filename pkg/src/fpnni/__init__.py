"""Fractional-order projection neural networks with impulses.

Simulation of Caputo-derivative projection networks with state jumps,
their equilibria and boundedness envelopes, and checkers for the
existence/uniqueness and Mittag-Leffler stability certificates.
"""

__version__ = "0.1.0"

from .convex import Ball, Box, ConvexSet, Halfspace, PolyIntersection, contains, project
from .fode import ImpulseSchedule, SolverConfig, Trajectory, integrate
from .linalg import SymEigen, is_negative_semidefinite, spd_sqrt, spectral_norm, sym_eigen
from .mlf import gamma_fn, mittag_leffler, ml_decay
from .model import (
    BoundParams,
    EquilibriumResult,
    FpnniSystem,
    GenericImpulses,
    SigmaImpulses,
    boundedness_envelope,
    equilibrium,
    equilibrium_residual,
    resolve_anchor,
    rhs,
    sigma_bound_params,
    sigma_jump,
    simulate,
)
from .stability import (
    CertificateReport,
    EnvelopeCheck,
    check_boundedness,
    check_eigenvalue_certificate,
    check_existence,
    check_lmi_certificate,
    check_lmi_certificate_schur,
    check_uniqueness,
    search_q,
    verify_decay_envelope,
)

__all__ = [
    "__version__",
    "Ball", "Box", "ConvexSet", "Halfspace", "PolyIntersection",
    "contains", "project",
    "ImpulseSchedule", "SolverConfig", "Trajectory", "integrate",
    "SymEigen", "is_negative_semidefinite", "spd_sqrt", "spectral_norm",
    "sym_eigen",
    "gamma_fn", "mittag_leffler", "ml_decay",
    "BoundParams", "EquilibriumResult", "FpnniSystem", "GenericImpulses",
    "SigmaImpulses", "boundedness_envelope", "equilibrium",
    "equilibrium_residual", "resolve_anchor", "rhs", "sigma_bound_params",
    "sigma_jump", "simulate",
    "CertificateReport", "EnvelopeCheck", "check_boundedness",
    "check_eigenvalue_certificate", "check_existence",
    "check_lmi_certificate", "check_lmi_certificate_schur",
    "check_uniqueness", "search_q", "verify_decay_envelope",
]
