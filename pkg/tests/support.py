"""Property-suite bodies shared between the unit tests and the acceptance gate."""

import math

import numpy as np

from fpnni import convex, linalg, mlf


def sample_sets(dim=2):
    """One instance of every supported set variant in the given dimension.

    The polytope normals are kept well separated in angle: Dykstra's rate
    degrades as cos^2 of the angle between faces, and near-parallel pairs
    are a documented NoConvergence case, not something to bake into the
    shared fixture.
    """
    rng = np.random.default_rng(7)
    angles = np.deg2rad([15.0, 105.0, 200.0, 305.0]) + rng.uniform(-0.15, 0.15, 4)
    halfspaces = []
    for theta in angles:
        n = np.zeros(dim)
        n[0], n[1] = math.cos(theta), math.sin(theta)
        halfspaces.append(
            convex.Halfspace(normal=n, offset=float(rng.uniform(0.4, 1.6)))
        )
    poly = convex.PolyIntersection(
        halfspaces=tuple(halfspaces), interior_point=np.zeros(dim)
    )
    return {
        "box": convex.Box(lower=[-2.0] * dim, upper=[2.0] * dim),
        "ball": convex.Ball(center=np.zeros(dim), radius=1.5),
        "halfspace": convex.Halfspace(
            normal=np.ones(dim) / math.sqrt(dim), offset=1.0
        ),
        "poly": poly,
    }


def run_projection_property_suite(pairs_per_variant=1000):
    """Non-expansiveness, idempotence, fixed points, variational inequality."""
    rng = np.random.default_rng(2024)
    for name, k in sample_sets().items():
        dim = convex.dimension(k)
        for _ in range(pairs_per_variant):
            u = rng.uniform(-6.0, 6.0, dim)
            v = rng.uniform(-6.0, 6.0, dim)
            pu, pv = convex.project(k, u), convex.project(k, v)
            # non-expansiveness
            assert np.linalg.norm(pu - pv) <= np.linalg.norm(u - v) + 1e-12, name
            # idempotence and membership
            assert np.linalg.norm(convex.project(k, pu) - pu) <= 1e-12, name
            assert convex.violation(k, pu) <= 1e-10, name
        # fixed points: anything already in K stays put
        for _ in range(100):
            z = convex.project(k, rng.uniform(-6.0, 6.0, dim))
            assert np.linalg.norm(convex.project(k, z) - z) <= 1e-12, name
        # variational characterization of the nearest point
        for _ in range(100):
            y = rng.uniform(-6.0, 6.0, dim)
            py = convex.project(k, y)
            z = convex.project(k, rng.uniform(-6.0, 6.0, dim))
            assert float((y - py) @ (z - py)) <= 1e-10, name


def run_exp_identity_suite():
    """E_{1,1} must agree with exp to 1e-9 across [-10, 10]."""
    for z in np.arange(-10.0, 10.0 + 1e-9, 0.5):
        assert abs(mlf.mittag_leffler(1.0, float(z)) - math.exp(z)) <= 1e-9


def run_eigen_reconstruction_suite(draws=100):
    """V diag(w) V^T must reproduce random symmetric matrices to 1e-9."""
    rng = np.random.default_rng(99)
    for _ in range(draws):
        n = int(rng.integers(1, 7))
        raw = rng.standard_normal((n, n)) * float(rng.uniform(0.1, 5.0))
        s = 0.5 * (raw + raw.T)
        eig = linalg.sym_eigen(s)
        recon = (eig.vectors * eig.values) @ eig.vectors.T
        scale = max(1.0, float(np.linalg.norm(s)))
        assert np.linalg.norm(recon - s) <= 1e-9 * scale
        assert np.linalg.norm(eig.vectors.T @ eig.vectors - np.eye(n)) <= 1e-9
        assert np.all(np.diff(eig.values) >= -1e-12)
