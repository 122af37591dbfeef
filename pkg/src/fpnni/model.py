"""The projection network model and its derived quantities.

A system couples Caputo dynamics of order alpha with a convex constraint:

    D^alpha x = -x + P_K(x - rho*A*x - rho*b),        t != t_k,
    x(t_k+)   = x(t_k-) + U_k(x(t_k-)),

where P_K is the nearest-point projection.  Impulses either follow the
anchored affine form U_k(x) = -sigma (x - x*) (x* an equilibrium) or an
arbitrary caller-supplied jump rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from . import convex, fode, mlf
from .errors import AnchorUnresolved, DimensionMismatch, NoConvergence
from .linalg import as_matrix, as_vector, spectral_norm

EQUILIBRIUM_TOL = 1e-8
# Damping schedule for the fixed-point iteration: halve after this many
# iterations without residual progress, never below the floor.
STALL_WINDOW = 50
DAMPING_FLOOR = 1.0 / 16.0


@dataclass(frozen=True)
class SigmaImpulses:
    """Affine jumps U_k(x) = -sigma (x - anchor), contracting toward anchor.

    ``anchor=None`` means "the equilibrium", resolved via ``resolve_anchor``
    before any jump is evaluated.
    """

    sigma: np.ndarray
    anchor: np.ndarray | None = None

    def __post_init__(self):
        s = as_matrix(self.sigma)
        if s.shape[0] != s.shape[1]:
            raise DimensionMismatch("sigma must be square")
        object.__setattr__(self, "sigma", s)
        if self.anchor is not None:
            object.__setattr__(self, "anchor", as_vector(self.anchor))


@dataclass(frozen=True)
class GenericImpulses:
    """Arbitrary jump rule (k, left limit) -> jump vector."""

    jump: Callable[[int, np.ndarray], np.ndarray]


ImpulseForm = Union[SigmaImpulses, GenericImpulses]


@dataclass(frozen=True)
class FpnniSystem:
    """Immutable model definition; validated on construction."""

    alpha: float
    A: np.ndarray
    b: np.ndarray
    rho: float
    K: convex.ConvexSet
    impulse_times: tuple[float, ...] = ()
    impulses: ImpulseForm | None = None

    def __post_init__(self):
        a = as_matrix(self.A)
        bvec = as_vector(self.b)
        n = bvec.size
        if a.shape != (n, n):
            raise DimensionMismatch(f"A must be {n}x{n}, got {a.shape}")
        if convex.dimension(self.K) != n:
            raise DimensionMismatch("constraint set dimension does not match b")
        if not 0.0 < float(self.alpha) < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if float(self.rho) <= 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", bvec)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(
            self, "impulse_times", tuple(float(t) for t in self.impulse_times)
        )
        if isinstance(self.impulses, SigmaImpulses):
            if self.impulses.sigma.shape != (n, n):
                raise DimensionMismatch("sigma dimension does not match the system")
            if self.impulses.anchor is not None:
                if self.impulses.anchor.size != n:
                    raise DimensionMismatch("anchor dimension does not match")
                res = equilibrium_residual(self, self.impulses.anchor)
                if res > EQUILIBRIUM_TOL:
                    raise ValueError(
                        f"anchor has equilibrium residual {res:.3e} > "
                        f"{EQUILIBRIUM_TOL:.0e}"
                    )

    @property
    def dimension(self) -> int:
        return self.b.size


def _fast_projector(k: convex.ConvexSet):
    """Projection closure without per-call validation, for hot loops."""
    if isinstance(k, convex.Box):
        lower, upper = k.lower, k.upper
        # ufunc pair beats np.clip by ~20% at these sizes
        return lambda v: np.minimum(np.maximum(v, lower), upper)
    return lambda v: convex.project(k, v)


def rhs(sys: FpnniSystem, x) -> np.ndarray:
    """-x + P_K(x - rho*(A x + b)); autonomous in t."""
    x = as_vector(x)
    if x.size != sys.dimension:
        raise DimensionMismatch(f"state has dimension {x.size}, expected {sys.dimension}")
    return -x + convex.project(sys.K, x - sys.rho * (sys.A @ x + sys.b))


def rhs_closure(sys: FpnniSystem):
    """(t, x) -> rhs(sys, x) with the validation hoisted out of the loop.

    Keeps the literal x - rho*(A x + b) form: at an equilibrium with
    A x* + b = 0 the projection argument is exactly x*, so the right-hand
    side vanishes to the bit and equilibria stay exactly stationary.
    """
    project = _fast_projector(sys.K)
    a_mat, b_vec, rho = sys.A, sys.b, sys.rho
    return lambda t, x: project(x - rho * (a_mat @ x + b_vec)) - x


def equilibrium_residual(sys: FpnniSystem, x) -> float:
    """Euclidean norm of -x + P_K(x - rho*(A x + b))."""
    return float(np.linalg.norm(rhs(sys, x)))


@dataclass(frozen=True)
class EquilibriumResult:
    point: np.ndarray
    residual: float
    iterations: int
    start: np.ndarray
    damping: float


def equilibrium(sys: FpnniSystem, x_init=None, tol: float = EQUILIBRIUM_TOL,
                max_iter: int = 20_000) -> EquilibriumResult:
    """Equilibrium via the projection fixed-point map x <- P_K(x - rho(Ax+b)).

    Runs undamped first; if the residual stalls for STALL_WINDOW iterations
    the damping factor is halved, down to DAMPING_FLOOR, after which
    ``NoConvergence`` is raised with the last residual.  Uniqueness is not
    assumed: the result records the start point that was used.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    x = np.zeros(sys.dimension) if x_init is None else as_vector(x_init)
    if x.size != sys.dimension:
        raise DimensionMismatch("x_init has the wrong dimension")
    start = x.copy()
    project = _fast_projector(sys.K)
    # fixed-point map P_K(x - rho (A x + b)) = P_K((I - rho A) x - rho b)
    m_mat = np.eye(sys.dimension) - sys.rho * sys.A
    shift = -sys.rho * sys.b
    theta = 1.0
    best = math.inf
    stall = 0
    for it in range(max_iter):
        proposal = project(m_mat @ x + shift)
        step = proposal - x
        res = math.sqrt(float(step @ step))
        if res <= tol:
            return EquilibriumResult(
                point=x, residual=res, iterations=it, start=start, damping=theta
            )
        if res < best * (1.0 - 1e-12):
            best = res
            stall = 0
        else:
            stall += 1
            if stall >= STALL_WINDOW:
                theta *= 0.5
                stall = 0
                best = res
                if theta < DAMPING_FLOOR:
                    raise NoConvergence(
                        "equilibrium iteration cycled at the damping floor",
                        residual=res,
                    )
        x = (1.0 - theta) * x + theta * proposal
    raise NoConvergence(
        f"equilibrium iteration hit max_iter = {max_iter}",
        residual=equilibrium_residual(sys, x),
    )


def resolve_anchor(sys: FpnniSystem, x_init=None) -> FpnniSystem:
    """Return a system whose sigma-form anchor is a validated equilibrium."""
    if not isinstance(sys.impulses, SigmaImpulses) or sys.impulses.anchor is not None:
        return sys
    eq = equilibrium(sys, x_init=x_init)
    return replace(sys, impulses=replace(sys.impulses, anchor=eq.point))


def sigma_jump(sys: FpnniSystem, k: int, x_left) -> np.ndarray:
    """Jump -sigma (x_left - x*); the equilibrium x* is impulse-invariant."""
    if not isinstance(sys.impulses, SigmaImpulses):
        raise AnchorUnresolved("system does not carry sigma-form impulses")
    if sys.impulses.anchor is None:
        raise AnchorUnresolved(
            "anchor not resolved; call resolve_anchor before evaluating jumps"
        )
    x_left = as_vector(x_left)
    return -sys.impulses.sigma @ (x_left - sys.impulses.anchor)


def jump_rule(sys: FpnniSystem) -> Callable[[int, np.ndarray], np.ndarray] | None:
    """The (k, left limit) -> jump callable realized by the impulse form."""
    if sys.impulses is None or not sys.impulse_times:
        return None
    if isinstance(sys.impulses, GenericImpulses):
        return sys.impulses.jump
    return lambda k, x_left: sigma_jump(sys, k, x_left)


def simulate(sys: FpnniSystem, x0, t_final: float,
             config: fode.SolverConfig | None = None) -> fode.Trajectory:
    """Integrate the network from x0 over [0, t_final]."""
    sys = resolve_anchor(sys)
    rule = jump_rule(sys)
    # impulses scheduled at or beyond the horizon never fire within [0, T]
    times = tuple(
        t for t in sys.impulse_times if t < t_final * (1.0 - 1e-12)
    ) if rule is not None else ()
    schedule = fode.ImpulseSchedule(times=times, jump=rule)
    return fode.integrate(
        rhs_closure(sys), sys.alpha, x0, t_final,
        impulses=schedule, config=config,
    )


@dataclass(frozen=True)
class BoundParams:
    """Impulse bounds and the designated constraint-set point psi.

    l1 bounds every ||U_k(x)||, l2 is the jump Lipschitz constant, and psi
    is any point of K (the envelope uses ||psi||).
    """

    psi: np.ndarray
    l1: float = 0.0
    l2: float = 0.0

    def __post_init__(self):
        if self.l1 < 0.0 or self.l2 < 0.0:
            raise ValueError("l1 and l2 must be nonnegative")
        object.__setattr__(self, "psi", as_vector(self.psi))


SIGMA_BOUND_CAVEAT = (
    "impulse bound l1 = ||sigma||*(R + ||x*||) assumes trajectories stay "
    "within radius R of the origin; the affine jump -sigma(x - x*) is "
    "unbounded on R^n, so this bound is a reachable-set estimate, not global"
)


def sigma_bound_params(sys: FpnniSystem, radius: float) -> BoundParams:
    """Bound parameters for sigma-form impulses over a radius-R reachable set.

    psi is fixed to P_K(0), the tightest natural choice of a point of K.
    """
    if not isinstance(sys.impulses, SigmaImpulses) or sys.impulses.anchor is None:
        raise AnchorUnresolved("sigma_bound_params needs a resolved sigma form")
    norm_sigma = spectral_norm(sys.impulses.sigma)
    anchor_norm = float(np.linalg.norm(sys.impulses.anchor))
    psi = convex.project(sys.K, np.zeros(sys.dimension))
    return BoundParams(
        l1=norm_sigma * (float(radius) + anchor_norm),
        l2=norm_sigma,
        psi=psi,
    )


def boundedness_envelope(sys: FpnniSystem, x0, bounds: BoundParams,
                         t: float) -> float:
    """Growth envelope a(t) * E_alpha(b * Gamma(alpha) * t^alpha).

    a(t) = ||x0|| + m*l1 + (rho*||b|| + ||psi||) t^alpha / Gamma(alpha+1) and
    b = (1 + ||I - rho*A||) / Gamma(alpha); every solution of the system is
    bounded by it.  Monotone nondecreasing in t.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    x0 = as_vector(x0)
    if not convex.contains(sys.K, bounds.psi, tol=1e-9):
        raise ValueError("bounds.psi must be a point of the constraint set")
    alpha = sys.alpha
    m = len(sys.impulse_times)
    growth = 1.0 + spectral_norm(np.eye(sys.dimension) - sys.rho * sys.A)
    a_t = (
        float(np.linalg.norm(x0))
        + m * bounds.l1
        + (sys.rho * float(np.linalg.norm(sys.b)) + float(np.linalg.norm(bounds.psi)))
        * t**alpha / math.gamma(alpha + 1.0)
    )
    # b(t)*Gamma(alpha)*t^alpha collapses to (1 + ||I - rho A||) t^alpha
    return a_t * mlf.mittag_leffler(alpha, growth * t**alpha)
