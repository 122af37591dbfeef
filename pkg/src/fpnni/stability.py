"""Certificate checkers for the quantitative solvability and stability conditions.

Each checker assembles the matrices/scalars of one sufficient condition and
reports signed margins instead of bare booleans, so callers can print the
slack.  All conditions are sufficient only: a failed check never disproves
the property, and the reports say so.

The two decay certificates share the growth matrix M = I - rho*A:

* eigenvalue form: with S1 = -Q^{-1/2} (-2Q + rho1^{-1} Q^2 + rho1 M^T M) Q^{-1/2}
  and S2 = Q^{-1/2} (I-sigma)^T Q (I-sigma) Q^{-1/2} - eta1 I, the system is
  Mittag-Leffler stable when lambda_min(S1) > 0 and S2 <= 0; the certified
  decay rate is lambda_min(S1).
* LMI form: -2Q + rho2^{-1} Q^2 + rho2 M^T M + mu2 Q <= 0 together with
  (I-sigma)^T Q (I-sigma) - eta2 Q <= 0 certifies decay rate mu2.  The
  Q^2 nonlinearity also admits an equivalent Schur-complement block form,
  kept as a cross-validation oracle.

No SDP solver is used anywhere: ``search_q`` is a bounded deterministic
heuristic (identity, diagonal log-grid coordinate descent, random SPD
perturbations) and returning None never proves infeasibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mlf, model
from .errors import NotPositiveDefinite
from .fode import Trajectory
from .linalg import as_matrix, as_vector, spd_sqrt, spectral_norm, sym_eigen

EXISTENCE = "existence-sadovskii"
UNIQUENESS = "uniqueness-banach"
BOUNDEDNESS = "boundedness"
ML_EIGENVALUE = "ml-stability-eigenvalue"
ML_LMI = "ml-stability-lmi"

SUFFICIENT_ONLY = (
    "condition is sufficient, not necessary: failure does not disprove the property"
)


def _psd_tol(s: np.ndarray) -> float:
    """Boundary policy: lambda_max <= 1e-10 * max(1, ||S||_F) counts as <= 0."""
    return 1e-10 * max(1.0, float(np.linalg.norm(s)))


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one certificate check.

    ``margins`` maps condition names to their signed slack values;
    ``computed`` holds the assembled certificate matrices; ``decay_rate`` is
    set only when a stability certificate passes.
    """

    theorem: str
    passed: bool
    margins: dict
    computed: dict
    decay_rate: float | None = None
    notes: tuple = ()


def _scalar_positive(name: str, value: float) -> float:
    value = float(value)
    if value <= 0.0:
        raise ValueError(f"{name} must be positive, got {value:g}")
    return value


def _scalar_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {value:g}")
    return value


def growth_matrix(sys: model.FpnniSystem) -> np.ndarray:
    """M = I - rho*A, the Lipschitz factor of the projected update."""
    return np.eye(sys.dimension) - sys.rho * sys.A


def growth_norm(sys: model.FpnniSystem) -> float:
    """||I - rho*A||, the spectral norm of the growth matrix."""
    return spectral_norm(growth_matrix(sys))


def _impulse_matrix(sys: model.FpnniSystem) -> np.ndarray:
    """sigma of the configured impulse form; zero when there are no jumps."""
    if isinstance(sys.impulses, model.SigmaImpulses):
        return sys.impulses.sigma
    if sys.impulses is None:
        return np.zeros((sys.dimension, sys.dimension))
    raise ValueError("certificate needs sigma-form (or no) impulses")


def check_existence(sys: model.FpnniSystem, t_final: float,
                    bounds: model.BoundParams,
                    m: int | None = None) -> CertificateReport:
    """Solvability by the condensing-map route.

    Passes when both (1 + ||I - rho A||) T^alpha / Gamma(alpha+1) < 1 and
    m*l2 + T^alpha / Gamma(alpha+1) < 1, with strict inequality.
    """
    if t_final <= 0.0:
        raise ValueError("t_final must be positive")
    m = len(sys.impulse_times) if m is None else int(m)
    scale = t_final**sys.alpha / math.gamma(sys.alpha + 1.0)
    growth = (1.0 + growth_norm(sys)) * scale
    contraction = m * bounds.l2 + scale
    return CertificateReport(
        theorem=EXISTENCE,
        passed=growth < 1.0 and contraction < 1.0,
        margins={"growth_condition": growth, "impulse_condition": contraction},
        computed={},
        notes=(SUFFICIENT_ONLY, "both margins must be < 1"),
    )


def check_uniqueness(sys: model.FpnniSystem, t_final: float, l2: float,
                     m: int | None = None) -> CertificateReport:
    """Uniqueness via the Banach contraction constant
    kappa2 = m*l2 + (1 + ||I - rho A||) T^alpha / Gamma(alpha+1) < 1."""
    if t_final <= 0.0:
        raise ValueError("t_final must be positive")
    if l2 < 0.0:
        raise ValueError("l2 must be nonnegative")
    m = len(sys.impulse_times) if m is None else int(m)
    kappa2 = (
        m * l2
        + (1.0 + growth_norm(sys))
        * t_final**sys.alpha / math.gamma(sys.alpha + 1.0)
    )
    return CertificateReport(
        theorem=UNIQUENESS,
        passed=kappa2 < 1.0,
        margins={"contraction_constant": kappa2},
        computed={},
        notes=(SUFFICIENT_ONLY, "contraction constant must be < 1"),
    )


def check_eigenvalue_certificate(sys: model.FpnniSystem, q,
                                 rho1: float = 1.0,
                                 eta1: float = 1.0) -> CertificateReport:
    """Eigenvalue-form Mittag-Leffler stability certificate (see module doc)."""
    rho1 = _scalar_positive("rho1", rho1)
    eta1 = _scalar_unit("eta1", eta1)
    q = as_matrix(q)
    q_half, q_neg_half = spd_sqrt(q)  # raises NotPositiveDefinite
    m_mat = growth_matrix(sys)
    sigma = _impulse_matrix(sys)
    n = sys.dimension

    pi = -2.0 * q + (q @ q) / rho1 + rho1 * (m_mat.T @ m_mat)
    s1 = -q_neg_half @ pi @ q_neg_half
    s1 = 0.5 * (s1 + s1.T)
    contraction = np.eye(n) - sigma
    s2 = q_neg_half @ contraction.T @ q @ contraction @ q_neg_half - eta1 * np.eye(n)
    s2 = 0.5 * (s2 + s2.T)

    decay_margin = sym_eigen(s1).lambda_min
    impulse_margin = sym_eigen(s2).lambda_max
    passed = decay_margin > 0.0 and impulse_margin <= _psd_tol(s2)
    return CertificateReport(
        theorem=ML_EIGENVALUE,
        passed=passed,
        margins={"decay_margin": decay_margin, "impulse_margin": impulse_margin},
        computed={"decay_form_raw": pi, "decay_form": s1, "impulse_form": s2},
        decay_rate=decay_margin if passed else None,
        notes=(
            SUFFICIENT_ONLY,
            "requires decay_margin > 0 and impulse_margin <= 0",
        ),
    )


def _lmi_matrices(sys: model.FpnniSystem, q: np.ndarray, rho2: float,
                  mu2: float, eta2: float):
    m_mat = growth_matrix(sys)
    sigma = _impulse_matrix(sys)
    w1 = -2.0 * q + (q @ q) / rho2 + rho2 * (m_mat.T @ m_mat) + mu2 * q
    contraction = np.eye(sys.dimension) - sigma
    w2 = contraction.T @ q @ contraction - eta2 * q
    return 0.5 * (w1 + w1.T), 0.5 * (w2 + w2.T)


def _require_spd(q: np.ndarray):
    if sym_eigen(q).lambda_min <= 1e-12:
        raise NotPositiveDefinite("Q must be symmetric positive definite")


def check_lmi_certificate(sys: model.FpnniSystem, q, rho2: float = 1.0,
                          mu2: float = 0.1,
                          eta2: float = 1.0) -> CertificateReport:
    """LMI-form Mittag-Leffler stability certificate with decay rate mu2."""
    rho2 = _scalar_positive("rho2", rho2)
    mu2 = _scalar_positive("mu2", mu2)
    eta2 = _scalar_unit("eta2", eta2)
    q = as_matrix(q)
    _require_spd(q)
    w1, w2 = _lmi_matrices(sys, q, rho2, mu2, eta2)
    decay_margin = sym_eigen(w1).lambda_max
    impulse_margin = sym_eigen(w2).lambda_max
    passed = decay_margin <= _psd_tol(w1) and impulse_margin <= _psd_tol(w2)
    return CertificateReport(
        theorem=ML_LMI,
        passed=passed,
        margins={"decay_margin": decay_margin, "impulse_margin": impulse_margin},
        computed={"decay_lmi": w1, "impulse_lmi": w2},
        decay_rate=mu2 if passed else None,
        notes=(
            SUFFICIENT_ONLY,
            "requires both margins <= 0 (matrices negative semidefinite)",
        ),
    )


def check_lmi_certificate_schur(sys: model.FpnniSystem, q, rho2: float = 1.0,
                                mu2: float = 0.1,
                                eta2: float = 1.0) -> CertificateReport:
    """Schur-complement reformulation of the LMI certificate.

    The block matrix [[-2Q + rho2 M^T M + mu2 Q, Q], [Q, -rho2 I]] <= 0 is
    equivalent to the Q^2 form (rho2 > 0) but linear in Q; it doubles as a
    correctness oracle for ``check_lmi_certificate``.
    """
    rho2 = _scalar_positive("rho2", rho2)
    mu2 = _scalar_positive("mu2", mu2)
    eta2 = _scalar_unit("eta2", eta2)
    q = as_matrix(q)
    _require_spd(q)
    n = sys.dimension
    m_mat = growth_matrix(sys)
    top_left = -2.0 * q + rho2 * (m_mat.T @ m_mat) + mu2 * q
    block = np.block([[top_left, q], [q, -rho2 * np.eye(n)]])
    block = 0.5 * (block + block.T)
    _, w2 = _lmi_matrices(sys, q, rho2, mu2, eta2)
    decay_margin = sym_eigen(block).lambda_max
    impulse_margin = sym_eigen(w2).lambda_max
    passed = decay_margin <= _psd_tol(block) and impulse_margin <= _psd_tol(w2)
    return CertificateReport(
        theorem=ML_LMI,
        passed=passed,
        margins={"decay_margin": decay_margin, "impulse_margin": impulse_margin},
        computed={"decay_lmi_block": block, "impulse_lmi": w2},
        decay_rate=mu2 if passed else None,
        notes=(SUFFICIENT_ONLY, "schur-complement block form"),
    )


def search_q(sys: model.FpnniSystem, rho2: float = 1.0, mu2: float = 0.1,
             eta2: float = 1.0, budget: int = 2000, seed: int = 0):
    """Bounded heuristic search for a Q passing the LMI certificate.

    Candidate order: identity, then per-entry coordinate descent of a
    diagonal Q over a log grid in [1e-2, 1e2], then seeded random SPD
    perturbations of the best diagonal found.  Returns (Q, report) for the
    first passing candidate, or None once the budget is exhausted --
    absence of a certificate is NOT a proof of infeasibility.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n = sys.dimension
    evaluated = 0

    def attempt(q):
        nonlocal evaluated
        if evaluated >= budget:
            return None, math.inf
        evaluated += 1
        try:
            report = check_lmi_certificate(sys, q, rho2, mu2, eta2)
        except NotPositiveDefinite:
            return None, math.inf
        score = max(report.margins["decay_margin"], report.margins["impulse_margin"])
        return (report if report.passed else None), score

    report, _ = attempt(np.eye(n))
    if report is not None:
        return np.eye(n), report

    grid = np.logspace(-2.0, 2.0, 13)
    diag = np.ones(n)
    _, best_score = attempt(np.diag(diag))
    for _ in range(3):
        improved = False
        for i in range(n):
            for g in grid:
                if evaluated >= budget:
                    break
                candidate = diag.copy()
                candidate[i] = g
                report, score = attempt(np.diag(candidate))
                if report is not None:
                    return np.diag(candidate), report
                if score < best_score:
                    best_score = score
                    diag = candidate
                    improved = True
        if not improved:
            break

    rng = np.random.default_rng(seed)
    base = np.diag(diag)
    scale = 0.1 * float(diag.min())
    while evaluated < budget:
        noise = rng.standard_normal((n, n))
        candidate = base + scale * (noise + noise.T) / 2.0
        report, score = attempt(candidate)
        if report is not None:
            return candidate, report
        if score < best_score:
            best_score = score
            base = candidate
    return None


@dataclass(frozen=True)
class EnvelopeCheck:
    """Result of the empirical decay-envelope verification."""

    ok: bool
    worst_ratio: float
    worst_time: float
    impulse_worst_ratio: float
    slack: float


def _safe_ratio(value: float, reference: float) -> float:
    if reference > 1e-300:
        return value / reference
    return 0.0 if value <= 1e-16 else math.inf


def verify_decay_envelope(traj: Trajectory, q, x_star, rate: float,
                          alpha: float, slack: float = 0.05) -> EnvelopeCheck:
    """Check V(t) = (x-x*)^T Q (x-x*) against its Mittag-Leffler envelope.

    Passes iff V(t) <= (1+slack) * V(0) * E_alpha(-rate * t^alpha) at every
    stored sample (both one-sided limits) and V(t_k+) <= (1+slack) V(t_k-)
    at every impulse.  The reported ratios are taken against the unslacked
    envelope.  ``slack`` exists to absorb quadrature error and is never
    applied silently; the default is 5%.
    """
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    q = as_matrix(q)
    x_star = as_vector(x_star)

    def lyap(x):
        d = x - x_star
        return float(d @ q @ d)

    v0 = lyap(traj.left[0])
    worst = 0.0
    worst_time = 0.0
    for i, t in enumerate(traj.times):
        envelope = v0 * mlf.ml_decay(alpha, rate, float(t))
        for x in (traj.left[i], traj.right[i]):
            ratio = _safe_ratio(lyap(x), envelope)
            if ratio > worst:
                worst, worst_time = ratio, float(t)
    impulse_worst = 0.0
    for idx in traj.impulse_indices:
        ratio = _safe_ratio(lyap(traj.right[idx]), lyap(traj.left[idx]))
        impulse_worst = max(impulse_worst, ratio)
    limit = 1.0 + slack
    return EnvelopeCheck(
        ok=worst <= limit and impulse_worst <= limit,
        worst_ratio=worst,
        worst_time=worst_time,
        impulse_worst_ratio=impulse_worst,
        slack=slack,
    )


def check_boundedness(sys: model.FpnniSystem, traj: Trajectory, x0,
                      bounds: model.BoundParams,
                      slack: float = 0.0) -> CertificateReport:
    """Verify every trajectory sample against the growth envelope.

    Margin is the worst observed ||x(t)|| / envelope(t) ratio; the check
    passes when it stays <= 1 + slack.  Equality is allowed (the envelope
    starts at ||x0|| + m*l1, which the t=0 sample can attain).
    """
    x0 = as_vector(x0)
    worst = 0.0
    worst_time = 0.0
    for i, t in enumerate(traj.times):
        envelope = model.boundedness_envelope(sys, x0, bounds, float(t))
        for x in (traj.left[i], traj.right[i]):
            ratio = _safe_ratio(float(np.linalg.norm(x)), envelope)
            if ratio > worst:
                worst, worst_time = ratio, float(t)
    notes = [SUFFICIENT_ONLY, f"worst ratio at t = {worst_time:g}"]
    if isinstance(sys.impulses, model.SigmaImpulses):
        notes.append(model.SIGMA_BOUND_CAVEAT)
    return CertificateReport(
        theorem=BOUNDEDNESS,
        passed=worst <= 1.0 + slack + 1e-12,
        margins={"worst_ratio": worst},
        computed={},
        notes=tuple(notes),
    )
