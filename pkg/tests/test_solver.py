import math
import time

import numpy as np
import pytest

from fracchaos.control import FeedbackLaw
from fracchaos.core import ContractError, OrderVector, SystemModel
from fracchaos.solver import DivergenceError, SolverConfig, rk4, solve_controlled, solve_pece, spread


def mittag_leffler(alpha, z):
    """Power series E_alpha(z), summed until terms drop below machine precision."""
    total, k = 0.0, 0
    while True:
        term = z**k / math.gamma(alpha * k + 1)
        total += term
        if k > 10 and abs(term) < 1e-17 * max(1.0, abs(total)):
            return total
        k += 1


def decay(n=1):
    return SystemModel.linear(-np.eye(n))


def test_series_oracle_sanity():
    # E_{1/2}(-1) = e * erfc(1)
    assert abs(mittag_leffler(0.5, -1.0) - math.e * math.erfc(1.0)) < 1e-14
    assert abs(mittag_leffler(1.0, -1.0) - math.exp(-1)) < 1e-15


@pytest.mark.parametrize("alpha", [0.3, 0.77, 0.9, 1.0])
def test_constant_solution_for_zero_field(alpha):
    tr = solve_pece(SystemModel.zero(3), [5, -2, 1], SolverConfig.commensurate(alpha, 0.01, 2))
    assert np.all(tr.states == np.array([5.0, -2.0, 1.0]))


def test_linear_decay_matches_mittag_leffler():
    tr = solve_pece(decay(), [1.0], SolverConfig(h=1e-3, T=1, orders=OrderVector([0.5])))
    assert abs(tr.final[0] - mittag_leffler(0.5, -1.0)) < 1e-3


def test_integer_order_limit_matches_exponential():
    tr = solve_pece(decay(), [1.0], SolverConfig(h=1e-3, T=1, orders=OrderVector([1])))
    assert abs(tr.final[0] - math.exp(-1)) < 1e-4


def test_convergence_order_on_mittag_leffler_problem():
    ref = mittag_leffler(0.5, -1.0)
    hs = [0.02, 0.01, 0.005, 0.0025]
    errs = [abs(solve_pece(decay(), [1.0], SolverConfig(h=h, T=1, orders=OrderVector([0.5]))).final[0] - ref)
            for h in hs]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    assert all(p >= 1.0 for p in orders), orders


def test_incommensurate_orders_are_per_component():
    tr = solve_pece(decay(2), [1.0, 1.0], SolverConfig(h=1e-3, T=1, orders=OrderVector(["1/2", 1])))
    assert abs(tr.final[0] - mittag_leffler(0.5, -1.0)) < 1e-3
    assert abs(tr.final[1] - math.exp(-1)) < 1e-4


def test_near_unit_order_agrees_with_rk4(flagship):
    x0 = [5.0, -2.0, 1.0]
    tr = solve_pece(flagship, x0, SolverConfig.commensurate(1 - 1e-9, 1e-3, 1.0))
    ref = rk4(flagship, x0, 1e-4, 1.0)[-1]
    assert np.abs(tr.final - ref).max() < 1e-3


def test_grid_and_initial_condition(flagship):
    x0 = np.array([5.0, -2.0, 1.0])
    tr = solve_pece(flagship, x0, SolverConfig.commensurate(0.9, 0.005, 1.0))
    assert tr.states.shape == (201, 3)
    np.testing.assert_array_equal(tr.states[0], x0)
    dt = np.diff(tr.times)
    assert np.all(dt > 0)
    np.testing.assert_allclose(dt, 0.005, rtol=1e-12)


def test_determinism(flagship):
    cfg = SolverConfig.commensurate(0.9, 0.005, 5.0)
    a = solve_pece(flagship, [5, -2, 1], cfg)
    b = solve_pece(flagship, [5, -2, 1], cfg)
    assert np.array_equal(a.states, b.states)


def test_blowup_reports_divergence():
    quad = SystemModel(n=1, f=lambda s: s**2, jacobian=lambda s: np.diag(2 * s))
    with pytest.raises(DivergenceError) as info:
        solve_pece(quad, [1.0], SolverConfig(h=0.01, T=5, orders=OrderVector([1])))
    err = info.value
    assert 0 < err.last_index < 500
    assert len(err.trajectory.states) == err.last_index + 1
    assert np.all(np.isfinite(err.trajectory.states))


@pytest.mark.parametrize(
    "kwargs",
    [dict(h=0.0, T=1.0), dict(h=-0.1, T=1.0), dict(h=0.1, T=0.0), dict(h=1.0, T=0.2)],
)
def test_invalid_config(kwargs):
    with pytest.raises(ContractError):
        SolverConfig(orders=OrderVector([0.5]), **kwargs)


def test_dimension_mismatch(flagship):
    with pytest.raises(ContractError):
        solve_pece(flagship, [1.0, 2.0], SolverConfig.commensurate(0.9, 0.01, 1.0))
    with pytest.raises(ContractError):
        solve_pece(flagship, [1.0, 2.0, 3.0], SolverConfig.commensurate(0.9, 0.01, 1.0, n=2))


def test_zero_gains_reproduce_open_loop(flagship, q2):
    cfg = SolverConfig.commensurate(0.9, 0.005, 5.0)
    open_loop = solve_pece(flagship, [5, -2, 1], cfg)
    closed = solve_controlled(flagship, FeedbackLaw((0, 0, 0), q2), [5, -2, 1], cfg)
    assert np.array_equal(open_loop.states, closed.states)


def test_controlled_convergence_to_q2(flagship, q2):
    law = FeedbackLaw.for_model(flagship, (16.96, 0, 0), q2)
    tr = solve_controlled(flagship, law, [5, 2, 2], SolverConfig.commensurate(0.9, 0.005, 20))
    assert np.linalg.norm(tr.final - [5.1260, 2.0794, 2.3687]) < 0.05


def test_open_loop_chaotic_regime(flagship):
    tr = solve_pece(flagship, [5, -2, 1], SolverConfig.commensurate(0.9, 0.005, 50))
    assert np.abs(tr.states).max() < 100
    assert spread(tr.tail(0.25)) > 0.5


def test_performance_budget(flagship):
    t0 = time.perf_counter()
    solve_pece(flagship, [5, -2, 1], SolverConfig.commensurate(0.9, 0.005, 50))
    assert time.perf_counter() - t0 < 10.0
