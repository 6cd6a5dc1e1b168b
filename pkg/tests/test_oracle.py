import numpy as np
import pytest

from raccord import (
    AlignmentError,
    Cosine,
    RaccordationProblem,
    Triangle,
    compare,
    discrete_cost,
    discretize,
    gluskabi_map,
    oracle_solve,
    solve_continuous,
    solve_step,
)
from raccord.signals import PeriodicTrajectory


class ConstantWave(PeriodicTrajectory):
    def __init__(self, value, period=1):
        super().__init__(period)
        self.value = float(value)

    def _eval_phase(self, s):
        return np.full_like(s, self.value)

    def _deriv_phase(self, s):
        return np.zeros_like(s)


def constants_problem(b, norm="l2", rho=None):
    return RaccordationProblem(ConstantWave(0.0), ConstantWave(1.0),
                               0.0, float(b), norm=norm, rho=rho)


def test_discretize_layout():
    dp = discretize(constants_problem(2.0), 10)
    assert dp.h == pytest.approx(0.1)
    assert dp.n_steps == 20
    assert dp.fixed_left.shape == (10,)
    assert dp.fixed_right.shape == (11,)
    assert dp.unknown_times.shape == (20,)
    assert dp.unknown_times[0] == pytest.approx(0.0)
    assert dp.unknown_times[-1] == pytest.approx(1.9)


def test_alignment_error_carries_suggestion():
    with pytest.raises(AlignmentError) as err:
        discretize(constants_problem(2.5), 3)
    m2 = err.value.suggested_m
    assert m2 is not None
    dp = discretize(constants_problem(2.5), m2)  # suggestion must work
    assert dp.m == m2


def test_oracle_reproduces_constants_staircase():
    problem = constants_problem(2.0)
    sampled = oracle_solve(problem, 50)
    closed = gluskabi_map(problem, solve_step(problem))
    assert compare(closed, sampled) <= 1e-9
    assert abs(sampled.cost - 1.0 / 3.0) <= 1e-9


def test_oracle_reproduces_fractional_staircase():
    problem = constants_problem(2.5)
    sampled = oracle_solve(problem, 40)
    closed = gluskabi_map(problem, solve_step(problem))
    assert compare(closed, sampled) <= 1e-9
    assert abs(sampled.cost - 7.0 / 24.0) <= 1e-9


def test_oracle_matches_step_solver_generic():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1), 0.0, 2.5)
    sampled = oracle_solve(problem, 200)
    closed = gluskabi_map(problem, solve_step(problem))
    assert compare(closed, sampled) <= 1e-9


def test_lag_advance_conventions_agree():
    for problem in (constants_problem(2.0),
                    RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                        0.0, 2.5)):
        lag = oracle_solve(problem, 100, direction="lag")
        adv = oracle_solve(problem, 100, direction="advance")
        assert np.max(np.abs(lag.values - adv.values)) <= 1e-9
        assert abs(lag.cost - adv.cost) <= 1e-9


def test_random_feasible_points_cost_at_least_optimum():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1), 0.0, 2.5)
    dp = discretize(problem, 60)
    best = oracle_solve(problem, 60)
    rng = np.random.default_rng(21)
    for _ in range(100):
        trial = rng.normal(scale=1.5, size=dp.n_steps)
        assert discrete_cost(dp, trial) >= best.cost - 1e-12


def test_oracle_quadratic_minimum_is_interior():
    # nudging the optimum along random directions raises the discrete cost
    problem = constants_problem(2.0)
    dp = discretize(problem, 30)
    best = oracle_solve(problem, 30)
    base = discrete_cost(dp, best.values[:-1])
    rng = np.random.default_rng(22)
    for _ in range(50):
        d = rng.normal(size=dp.n_steps)
        assert discrete_cost(dp, best.values[:-1] + 1e-3 * d) >= base


def test_sobolev_oracle_converges_to_closed_form():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                  0.0, 4.0, norm="sobolev", rho=1.0)
    closed = gluskabi_map(problem, solve_continuous(problem))
    sups = []
    for m in (100, 200, 400):
        sampled = oracle_solve(problem, m)
        sups.append(compare(closed, sampled))
    # first-order convergence of the backward-difference slope penalty
    assert sups[1] <= sups[0] / 1.5
    assert sups[2] <= sups[1] / 1.5


def test_compare_skips_cells_next_to_jumps():
    # closed form jumps inside a grid cell; those cells say nothing about
    # agreement and are excluded from the sup
    problem = constants_problem(2.5)
    sampled = oracle_solve(problem, 40)
    closed = gluskabi_map(problem, solve_step(problem))
    sup = compare(closed, sampled)
    # raw sup over all grid points includes cells straddling the jumps
    raw = np.max(np.abs(closed.eval(sampled.times) - sampled.values))
    assert sup <= 1e-9
    assert raw <= 1e-9  # jumps land exactly on grid nodes here, so raw agrees


def test_compare_requires_surviving_points():
    problem = constants_problem(2.0)
    sampled = oracle_solve(problem, 20)
    bad = gluskabi_map(problem, solve_step(problem))
    bad = type(bad)(bad.eval, None,
                    lambda lo, hi: np.linspace(lo, hi, 100000))
    with pytest.raises(ValueError):
        compare(bad, sampled)


def test_oracle_rejects_tiny_m():
    with pytest.raises(ValueError):
        discretize(constants_problem(2.0), 1)
    with pytest.raises(ValueError):
        discretize(constants_problem(2.0), 10, direction="diagonal")
