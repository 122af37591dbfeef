import numpy as np
import numpy.testing as npt
import pytest

from fpnni import fode, mlf
from fpnni.errors import NonFiniteState, OutOfRange, ScheduleError


def linear_decay(lam):
    return lambda t, x: -lam * x


def max_rel_error_vs_ml(traj, alpha, lam, stride=50):
    """Error against the closed-form solution x0 * E_alpha(-lam t^alpha)."""
    worst = 0.0
    for i in range(1, len(traj.times), stride):
        t = float(traj.times[i])
        exact = mlf.mittag_leffler(alpha, -lam * t**alpha)
        worst = max(worst, abs(traj.left[i, 0] - exact) / abs(exact))
    return worst


@pytest.mark.parametrize("alpha", [0.7, 0.9])
def test_linear_decay_matches_mittag_leffler(alpha):
    cfg = fode.SolverConfig(steps_per_unit_time=400)  # 2000 nodes over [0, 5]
    traj = fode.integrate(linear_decay(0.5), alpha, [1.0], 5.0, config=cfg)
    assert max_rel_error_vs_ml(traj, alpha, 0.5) <= 1e-3


@pytest.mark.parametrize("alpha", [0.7, 0.9])
def test_halving_step_reduces_error(alpha):
    coarse = fode.integrate(
        linear_decay(0.5), alpha, [1.0], 5.0,
        config=fode.SolverConfig(steps_per_unit_time=400),
    )
    fine = fode.integrate(
        linear_decay(0.5), alpha, [1.0], 5.0,
        config=fode.SolverConfig(steps_per_unit_time=800),
    )
    e_coarse = max_rel_error_vs_ml(coarse, alpha, 0.5)
    e_fine = max_rel_error_vs_ml(fine, alpha, 0.5)
    assert e_coarse / e_fine >= 1.5


def test_rectangle_scheme_is_consistent_but_coarser():
    alpha = 0.9
    rect = fode.integrate(
        linear_decay(0.5), alpha, [1.0], 5.0,
        config=fode.SolverConfig(steps_per_unit_time=400,
                                 quadrature=fode.PRODUCT_RECTANGLE),
    )
    trap = fode.integrate(
        linear_decay(0.5), alpha, [1.0], 5.0,
        config=fode.SolverConfig(steps_per_unit_time=400),
    )
    e_rect = max_rel_error_vs_ml(rect, alpha, 0.5)
    e_trap = max_rel_error_vs_ml(trap, alpha, 0.5)
    assert e_rect <= 5e-2
    assert e_trap < e_rect


def test_alpha_near_one_matches_rk4():
    lam, t_final, n = 0.5, 5.0, 2000
    traj = fode.integrate(
        linear_decay(lam), 0.999, [1.0], t_final,
        config=fode.SolverConfig(steps_per_unit_time=n // 5),
    )
    # classical RK4 oracle for dx/dt = -lam x on the same grid
    h = t_final / n
    x = 1.0
    rk = [x]
    for _ in range(n):
        k1 = -lam * x
        k2 = -lam * (x + 0.5 * h * k1)
        k3 = -lam * (x + 0.5 * h * k2)
        k4 = -lam * (x + h * k3)
        x += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        rk.append(x)
    worst = max(
        abs(traj.left[i, 0] - rk[i]) for i in range(0, n + 1, 25)
    )
    assert worst <= 5e-3


def test_zero_rhs_with_zero_jumps_stays_constant():
    schedule = fode.ImpulseSchedule(times=(1.0, 2.0), jump=lambda k, x: 0.0 * x)
    traj = fode.integrate(
        lambda t, x: 0.0 * x, 0.8, [2.0, -1.0], 3.0, impulses=schedule
    )
    npt.assert_array_equal(traj.left, np.tile([2.0, -1.0], (len(traj.times), 1)))
    npt.assert_array_equal(traj.right, traj.left)


def test_jump_identity_exact():
    sigma = 0.4
    schedule = fode.ImpulseSchedule(
        times=(0.75, 1.5, 2.25), jump=lambda k, x: -sigma * x
    )
    traj = fode.integrate(linear_decay(0.3), 0.9, [1.0], 3.0, impulses=schedule)
    assert len(traj.impulse_indices) == 3
    for k, idx in enumerate(traj.impulse_indices):
        jump = traj.right[idx] - traj.left[idx]
        npt.assert_array_equal(jump, traj.jumps[k])
        npt.assert_array_equal(jump, -sigma * traj.left[idx])
    # segment jump log accumulates the recorded jumps
    npt.assert_allclose(traj.jump_log[-1], traj.jumps.sum(axis=0), atol=0)


def test_impulse_times_are_grid_nodes():
    schedule = fode.ImpulseSchedule(times=(0.333, 1.234567), jump=lambda k, x: x * 0)
    traj = fode.integrate(linear_decay(1.0), 0.6, [1.0], 2.0, impulses=schedule)
    for tk in (0.333, 1.234567):
        assert np.min(np.abs(traj.times - tk)) == 0.0


def test_determinism_bit_identical():
    schedule = fode.ImpulseSchedule(times=(1.0,), jump=lambda k, x: -0.5 * x)
    runs = [
        fode.integrate(linear_decay(0.5), 0.9, [1.0, 2.0], 4.0, impulses=schedule)
        for _ in range(2)
    ]
    assert np.array_equal(runs[0].left, runs[1].left)
    assert np.array_equal(runs[0].right, runs[1].right)
    assert np.array_equal(runs[0].times, runs[1].times)


def test_sample_endpoints_and_interpolation():
    traj = fode.integrate(linear_decay(0.5), 0.9, [1.0], 2.0)
    npt.assert_array_equal(traj.sample(0.0), [1.0])
    t_mid = 0.5 * (traj.times[3] + traj.times[4])
    expected = 0.5 * (traj.right[3] + traj.left[4])
    npt.assert_allclose(traj.sample(float(t_mid)), expected, atol=1e-15)
    with pytest.raises(OutOfRange):
        traj.sample(2.5)
    with pytest.raises(OutOfRange):
        traj.sample(-0.1)
    with pytest.raises(ValueError):
        traj.sample(1.0, side="middle")


def test_sample_one_sided_limits_at_impulse():
    schedule = fode.ImpulseSchedule(times=(1.0,), jump=lambda k, x: x + 1.0)
    traj = fode.integrate(linear_decay(0.0), 0.9, [1.0], 2.0, impulses=schedule)
    left = traj.sample(1.0, side="left")
    right = traj.sample(1.0, side="right")
    npt.assert_allclose(right, 2.0 * left + 1.0, atol=1e-12)


def test_schedule_validation():
    bad = [
        (0.5, 0.5),      # not strictly increasing
        (0.0, 1.0),      # touches t = 0
        (1.0, 2.0),      # last one at t_final
        (-0.5,),         # negative
    ]
    for times in bad:
        schedule = fode.ImpulseSchedule(times=times, jump=lambda k, x: x)
        with pytest.raises(ScheduleError):
            fode.integrate(linear_decay(1.0), 0.5, [1.0], 2.0, impulses=schedule)
    with pytest.raises(ScheduleError):
        fode.ImpulseSchedule(times=(1.0,), jump=None)


def test_blowup_detected():
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFiniteState):
            fode.integrate(lambda t, x: x * x * 1e6, 0.9, [10.0], 5.0)


def test_config_validation():
    with pytest.raises(ValueError):
        fode.SolverConfig(steps_per_unit_time=5)
    with pytest.raises(ValueError):
        fode.SolverConfig(corrector_iterations=0)
    with pytest.raises(ValueError):
        fode.SolverConfig(quadrature="simpson")
    with pytest.raises(ValueError):
        fode.integrate(linear_decay(1.0), 1.0, [1.0], 1.0)
    with pytest.raises(ValueError):
        fode.integrate(linear_decay(1.0), 0.5, [1.0], 0.0)


def test_extreme_orders_stay_stable():
    for alpha in (0.05, 0.95):
        traj = fode.integrate(linear_decay(0.5), alpha, [1.0], 1.0,
                              config=fode.SolverConfig(steps_per_unit_time=100))
        assert np.all(np.isfinite(traj.left))
        # decaying problem: the solution never exceeds its initial value
        assert float(traj.left.max()) <= 1.0 + 1e-12
        assert 0.0 < float(traj.left[-1, 0]) < 1.0


def test_memory_kernel_weights_match_uniform_formula():
    # on a uniform grid the rectangle weights reduce to the classical
    # ((n-j+1)^a - (n-j)^a) h^a / a form; cross-check one step's predictor
    alpha, h = 0.7, 0.25
    times = np.arange(0.0, 1.0 + 1e-12, h)
    n = len(times) - 2
    t = times[n + 1]
    d = t - times[: n + 2]
    pa = d**alpha
    i0 = (pa[:-1] - pa[1:]) / alpha
    j = np.arange(n + 1)
    classical = (h**alpha / alpha) * ((n + 1 - j) ** alpha - (n - j) ** alpha)
    npt.assert_allclose(i0, classical, rtol=1e-12)
