"""Closed convex sets with exact nearest-point projections.

The supported variants all admit either closed-form projections (box, ball,
halfspace) or a rapidly convergent Dykstra iteration (intersection of
halfspaces).  Sets are immutable after construction and projections are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, NoConvergence
from .linalg import as_vector

UNIT_NORMAL_TOL = 1e-12
DYKSTRA_BUDGET = 10_000
DYKSTRA_STEP_TOL = 1e-12
FEASIBLE_TOL = 1e-10


@dataclass(frozen=True)
class Box:
    """Axis-aligned box {x : lower <= x <= upper} (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower)
        hi = as_vector(self.upper)
        if lo.shape != hi.shape:
            raise DimensionMismatch("box bounds have different lengths")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class Ball:
    """Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vector(self.center)
        r = float(self.radius)
        if r <= 0.0:
            raise ValueError(f"ball radius must be positive, got {r:g}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dimension(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Halfspace:
    """Halfspace {x : normal . x <= offset} with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if abs(float(np.linalg.norm(n)) - 1.0) > UNIT_NORMAL_TOL:
            raise ValueError("halfspace normal must have unit norm (within 1e-12)")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self) -> int:
        return self.normal.size


@dataclass(frozen=True)
class PolyIntersection:
    """Intersection of halfspaces; nonemptiness is certified at construction.

    The caller must supply a point strictly satisfying every constraint; the
    library never solves a feasibility program itself.
    """

    halfspaces: tuple
    interior_point: np.ndarray

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValueError("intersection needs at least one halfspace")
        dims = {h.dimension for h in hs}
        if len(dims) != 1:
            raise DimensionMismatch("halfspaces have mixed dimensions")
        p = as_vector(self.interior_point)
        if p.size != hs[0].dimension:
            raise DimensionMismatch("interior point has the wrong dimension")
        worst = max(float(h.normal @ p - h.offset) for h in hs)
        if worst >= 0.0:
            raise ValueError(
                f"certificate point is not strictly interior (worst slack {worst:g})"
            )
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "interior_point", p)

    @property
    def dimension(self) -> int:
        return self.interior_point.size


ConvexSet = Union[Box, Ball, Halfspace, PolyIntersection]


def dimension(k: ConvexSet) -> int:
    return k.dimension


def _check_dim(k: ConvexSet, x: np.ndarray):
    if x.size != k.dimension:
        raise DimensionMismatch(
            f"point has dimension {x.size}, set has dimension {k.dimension}"
        )


def violation(k: ConvexSet, x) -> float:
    """Largest constraint residual of x; <= 0 means x is in the set."""
    x = as_vector(x)
    _check_dim(k, x)
    if isinstance(k, Box):
        return float(np.maximum(k.lower - x, x - k.upper).max())
    if isinstance(k, Ball):
        return float(np.linalg.norm(x - k.center)) - k.radius
    if isinstance(k, Halfspace):
        return float(k.normal @ x - k.offset)
    return max(float(h.normal @ x - h.offset) for h in k.halfspaces)


def contains(k: ConvexSet, x, tol: float = 1e-12) -> bool:
    """True iff the constraint violation of x is at most tol."""
    return violation(k, x) <= tol


def project(k: ConvexSet, y) -> np.ndarray:
    """Nearest point of the set to y in the Euclidean norm."""
    y = as_vector(y)
    _check_dim(k, y)
    if isinstance(k, Box):
        return np.clip(y, k.lower, k.upper)
    if isinstance(k, Ball):
        d = y - k.center
        dist = float(np.linalg.norm(d))
        if dist <= k.radius:
            return y.copy()
        return k.center + d * (k.radius / dist)
    if isinstance(k, Halfspace):
        slack = float(k.normal @ y - k.offset)
        if slack <= 0.0:
            return y.copy()
        return y - slack * k.normal
    return _dykstra(k, y)


def _dykstra(k: PolyIntersection, y: np.ndarray) -> np.ndarray:
    """Dykstra's alternating projections onto an intersection of halfspaces."""
    x = y.copy()
    corrections = [np.zeros_like(y) for _ in k.halfspaces]
    for _ in range(DYKSTRA_BUDGET):
        x_prev = x.copy()
        for i, h in enumerate(k.halfspaces):
            w = x + corrections[i]
            slack = float(h.normal @ w - h.offset)
            x = w - slack * h.normal if slack > 0.0 else w.copy()
            corrections[i] = w - x
        if float(np.linalg.norm(x - x_prev)) <= DYKSTRA_STEP_TOL:
            if violation(k, x) <= FEASIBLE_TOL:
                return x
    raise NoConvergence(
        f"Dykstra projection did not converge within {DYKSTRA_BUDGET} sweeps",
        residual=violation(k, x),
    )
