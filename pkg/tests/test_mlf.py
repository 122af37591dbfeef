import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpnni import mlf
from fpnni.errors import DomainError, PoleError

from support import run_exp_identity_suite


def series_oracle(alpha, beta, z, terms=200, dps=50):
    """Plain partial sum of the defining series in 50-digit arithmetic.

    Extended precision stands in for compensated summation: with 50 digits
    there is nothing left to compensate at these magnitudes.  Independent of
    the package's evaluator (mpmath gamma, fixed term count).
    """
    with mp.workdps(dps):
        total = mp.mpf(0)
        for k in range(terms):
            total += mp.mpf(z) ** k / mp.gamma(mp.mpf(alpha) * k + mp.mpf(beta))
        return float(total)


def test_gamma_classical_values():
    assert mlf.gamma_fn(1.0) == 1.0
    assert abs(mlf.gamma_fn(0.5) - math.sqrt(math.pi)) <= 1e-15
    assert abs(mlf.gamma_fn(5.0) - 24.0) <= 1e-12


def test_gamma_point_nine_vs_recurrence():
    g19 = mlf.gamma_fn(1.9)
    assert abs(g19 - 0.9617658319) <= 1e-10
    # Gamma(2.9) = 1.9 * Gamma(1.9)
    assert abs(mlf.gamma_fn(2.9) / 1.9 - g19) <= 1e-14 * g19


def test_gamma_reflection_to_negative_arguments():
    # Gamma(-0.5) = -2 sqrt(pi)
    assert abs(mlf.gamma_fn(-0.5) + 2.0 * math.sqrt(math.pi)) <= 1e-12
    # reflection identity at a deeper negative point
    q = -3.3
    reflected = math.pi / (math.sin(math.pi * q) * mlf.gamma_fn(1.0 - q))
    assert abs(mlf.gamma_fn(q) - reflected) <= 1e-12 * abs(reflected)


def test_gamma_poles_raise():
    for q in (0.0, -1.0, -2.0, -17.0):
        with pytest.raises(PoleError):
            mlf.gamma_fn(q)


def test_gamma_large_argument():
    assert math.isfinite(mlf.gamma_fn(171.0))
    assert mlf.gamma_fn(172.0) == math.inf


def test_exponential_identity_grid():
    run_exp_identity_suite()


def test_value_at_zero_is_reciprocal_gamma():
    for alpha in (0.3, 0.9, 1.7):
        assert mlf.mittag_leffler(alpha, 0.0) == 1.0
        for beta in (0.5, 1.0, 2.4):
            got = mlf.mittag_leffler(alpha, 0.0, beta=beta)
            assert abs(got - 1.0 / math.gamma(beta)) <= 1e-15


def test_against_series_oracle():
    cases = [(0.9, 1.0, -1.0), (0.7, 1.0, -1.0), (0.5, 1.0, -2.0),
             (0.9, 0.9, 0.3), (1.5, 2.0, 3.0), (0.7, 1.0, -8.0)]
    for alpha, beta, z in cases:
        got = mlf.mittag_leffler(alpha, z, beta=beta)
        want = series_oracle(alpha, beta, z)
        assert abs(got - want) <= 1e-12, (alpha, beta, z)


def test_frozen_oracle_value():
    # series_oracle(0.9, 1, -1) evaluated once and pinned
    assert abs(series_oracle(0.9, 1.0, -1.0) - 0.37606602142464188) <= 1e-15
    assert abs(mlf.mittag_leffler(0.9, -1.0) - 0.37606602142464188) <= 1e-12


@pytest.mark.parametrize("alpha", [0.5, 0.7, 0.9])
def test_decay_is_strictly_decreasing(alpha):
    grid = np.linspace(0.1, 10.0, 100)
    values = [mlf.mittag_leffler(alpha, -float(t) ** alpha) for t in grid]
    diffs = np.diff(values)
    assert np.all(diffs < 0.0)
    assert values[0] < 1.0


def test_ml_decay_helper():
    assert mlf.ml_decay(0.9, 0.0349, 0.0) == 1.0
    assert mlf.ml_decay(0.9, 0.0349, 2.0) < 1.0
    with pytest.raises(DomainError):
        mlf.ml_decay(0.9, 1.0, -1.0)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.35, 2.0),
    beta=st.floats(0.2, 4.0),
    z=st.floats(-8.0, 8.0),
)
def test_recurrence_identity(alpha, beta, z):
    # E_{a,b}(z) = z * E_{a,a+b}(z) + 1/Gamma(b), straight from the series
    lhs = mlf.mittag_leffler(alpha, z, beta=beta)
    rhs = z * mlf.mittag_leffler(alpha, z, beta=alpha + beta) + 1.0 / math.gamma(beta)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_heavy_cancellation_region():
    # alternating series loses ~42 digits here; must still be accurate
    got = mlf.mittag_leffler(0.5, -10.0)
    with mp.workdps(80):
        want = mp.mpf(0)
        prev = mp.inf
        for k in range(4000):
            t = mp.mpf(-10) ** k / mp.gamma(mp.mpf("0.5") * k + 1)
            if abs(t) < mp.mpf(10) ** -70 * (1 + abs(want)) and abs(t) <= prev:
                break
            prev = abs(t)
            want += t
    assert abs(got - float(want)) <= 1e-12


def test_asymptotic_negative_tail():
    # far-left evaluations agree with a high-precision series reference
    refs = {
        (0.9, -30.0): 0.0037137076984598521,
        (0.7, -30.0): 0.011444251527526972,
        (1.0, -20.0): math.exp(-20.0),
    }
    for (alpha, z), want in refs.items():
        assert abs(mlf.mittag_leffler(alpha, z) - want) <= 1e-8


def test_oscillatory_orders_use_the_series():
    # for alpha in (1, 2] the series covers the whole domain
    assert abs(mlf.mittag_leffler(2.0, -36.0) - math.cos(6.0)) <= 1e-12
    assert abs(mlf.mittag_leffler(2.0, 16.0) - math.cosh(4.0)) <= 1e-12
    got = mlf.mittag_leffler(1.5, -20.0)
    assert abs(got - series_oracle(1.5, 1.0, -20.0, terms=400, dps=60)) <= 1e-10


def test_positive_growth_branch():
    # E_alpha(z) ~ exp(z^(1/alpha))/alpha for large positive z
    z = 15.0
    got = mlf.mittag_leffler(0.9, z)
    assert abs(got / series_oracle(0.9, 1.0, z, terms=400, dps=60) - 1.0) <= 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        mlf.mittag_leffler(0.9, 51.0)
    with pytest.raises(DomainError):
        mlf.mittag_leffler(2.5, 1.0)
    with pytest.raises(DomainError):
        mlf.mittag_leffler(-0.1, 1.0)
    with pytest.raises(DomainError):
        mlf.mittag_leffler(0.9, 1.0, beta=0.0)
    with pytest.raises(DomainError):
        mlf.mittag_leffler(0.9, math.nan)
    # tiny alpha near the switch point would destroy hundreds of digits
    with pytest.raises(DomainError):
        mlf.mittag_leffler(0.2, -9.9)
