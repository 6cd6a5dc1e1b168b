import math

import numpy as np
import pytest

from raccord import (
    Cosine,
    FourierSeries,
    IntervalError,
    PeriodMismatchError,
    PiecewiseRaccordation,
    ContinuousRaccordation,
    RaccordationProblem,
    Triangle,
    UnsupportedPeriodError,
    breakpoints,
    cost_l2,
    cost_sobolev,
    defect,
    gluskabi_map,
    lift_periods,
    solve_auto,
    solve_continuous,
    solve_step,
)
from raccord.signals import PeriodicTrajectory


class ConstantWave(PeriodicTrajectory):
    """Constant signal; periodic with any period label."""

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


def test_staircase_constants_two_periods():
    sol = solve_step(constants_problem(2.0))
    assert sol.n == 2 and sol.split == 0.0
    # two equal steps of one third each
    assert sol.eval(0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert sol.eval(1.5) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert sol.eval(-0.1) == 0.0
    assert sol.eval(2.0) == 1.0
    assert abs(sol.cost() - 1.0 / 3.0) <= 1e-12


def test_staircase_constants_fractional_window():
    sol = solve_step(constants_problem(2.5))
    assert sol.n == 2 and sol.split == pytest.approx(0.5, abs=1e-15)
    levels = [sol.eval(t) for t in (0.25, 0.75, 1.25, 1.75, 2.25)]
    assert levels == pytest.approx([0.25, 1 / 3, 0.5, 2 / 3, 0.75], abs=1e-14)
    assert abs(sol.cost() - 7.0 / 24.0) <= 1e-12


def test_breakpoint_table_fractional_window():
    sol = solve_step(constants_problem(2.5))
    table = breakpoints(sol)
    times = [t for t, _ in table]
    jumps = [j for _, j in table]
    assert times == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0, 2.5], abs=1e-12)
    assert jumps == pytest.approx([1 / 4, 1 / 12, 1 / 6, 1 / 6, 1 / 12, 1 / 4],
                                  abs=1e-12)
    # jumps across the full window must telescope to the endpoint gap
    assert sum(jumps) == pytest.approx(1.0, abs=1e-12)


def test_whole_window_profile_is_flat():
    # with no leftover split the two-branch profile collapses to one level
    sol = solve_step(constants_problem(3.0))
    thetas = np.linspace(0, 1, 50, endpoint=False)
    prof = sol.defect_profile(thetas)
    assert np.max(np.abs(prof - 0.25)) <= 1e-15


def test_interval_snap_tolerance():
    sol = solve_step(constants_problem(2.0 + 5e-10))
    assert sol.n == 2 and sol.split == 0.0
    sol2 = solve_step(constants_problem(2.0 + 1e-6))
    assert sol2.n == 2 and sol2.split == pytest.approx(1e-6, rel=1e-6)


def test_staircase_chain_telescopes():
    # summing the defect along each residue chain recovers the endpoint gap
    xa = Cosine(period=1)
    xb = Triangle(period=1)
    problem = RaccordationProblem(xa, xb, 0.0, 2.5)
    sol = solve_step(problem)
    x = gluskabi_map(problem, sol)
    u = defect(x, 1.0)
    rng = np.random.default_rng(12)
    for s in rng.uniform(0.0, 1.0, size=25):
        total = sum(u.eval(s + j) for j in range(4))  # covers [0, 3.5)
        assert abs(total - (xb.eval(s) - xa.eval(s))) <= 1e-12


def test_staircase_defect_constant_along_chain():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1), 0.0, 2.5)
    sol = solve_step(problem)
    x = gluskabi_map(problem, sol)
    u = defect(x, 1.0)
    rng = np.random.default_rng(13)
    for s in rng.uniform(0.0, 1.0, size=25):
        # support ends at b + tau = 3.5; chains are one step shorter
        # for phases past the leftover split
        chain = [u.eval(s + j) for j in range(4) if s + j < 3.5]
        assert len(chain) == (4 if s < 0.5 else 3)
        assert max(chain) - min(chain) <= 1e-12


def test_gluskabi_map_tails_exact():
    xa = Cosine(period=1, phase=0.2)
    xb = Triangle(period=1)
    rng = np.random.default_rng(14)
    for norm, rho in (("l2", None), ("sobolev", 1.0)):
        b = 2.5 if norm == "l2" else 3.0
        problem, sol = solve_auto(xa, xb, 0.0, b, norm=norm, rho=rho)
        left = rng.uniform(-20, 0, size=100)
        left = left[left < 0]
        right = rng.uniform(b, b + 20, size=100)
        assert np.max(np.abs(sol.eval(left) - xa.eval(left))) == 0.0
        assert np.max(np.abs(sol.eval(right) - xb.eval(right))) == 0.0


def test_defect_supported_only_on_window():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1), 0.0, 2.5)
    sol = solve_step(problem)
    u = defect(gluskabi_map(problem, sol), 1.0)
    rng = np.random.default_rng(15)
    outside = np.concatenate([rng.uniform(-10, -1e-9, 50),
                              rng.uniform(3.5 + 1e-9, 13.5, 50)])
    assert np.max(np.abs(u.eval(outside))) <= 1e-12


def test_identity_connection_is_free():
    w = Cosine(period=1)
    problem = RaccordationProblem(w, w, 0.0, 2.0)
    sol = solve_step(problem)
    ts = np.linspace(-1, 3, 201)
    assert np.max(np.abs(sol.eval(ts) - w.eval(ts))) <= 1e-12
    assert sol.cost() <= 1e-18

    problem2 = RaccordationProblem(w, w, 0.0, 2.0, norm="sobolev", rho=1.0)
    sol2 = solve_continuous(problem2)
    assert np.max(np.abs(sol2.eval(ts) - w.eval(ts))) <= 1e-9
    # residual cost is squared interpolation noise, slope term dominates
    assert sol2.cost() <= 1e-12


def test_continuous_single_period_analytic():
    # independent derivation for 0 -> 1 on [0, 1], rho = 1: the stationarity
    # relation (1 - 2*x0) = c1*exp(t) - c2*exp(-t) pinned at x0(0)=0,
    # x0(1)=1 is a 2x2 linear system for (c1, c2)
    A = np.array([[1.0, -1.0], [math.e, -1.0 / math.e]])
    rhs = np.array([1.0, -1.0])
    c1_ref, c2_ref = np.linalg.solve(A, rhs)
    assert c1_ref == pytest.approx(-1.0 / (math.e - 1.0), abs=1e-14)
    assert c2_ref == pytest.approx(-math.e / (math.e - 1.0), abs=1e-14)

    problem = constants_problem(1.0, norm="sobolev", rho=1.0)
    sol = solve_continuous(problem)
    assert sol.n == 1
    assert sol.c1 == pytest.approx(c1_ref, abs=1e-10)
    assert sol.c2 == pytest.approx(c2_ref, abs=1e-10)

    ts = np.linspace(0.0, 1.0, 401)
    exact = 0.5 + (np.exp(ts) - np.exp(1.0 - ts)) / (2.0 * (math.e - 1.0))
    assert np.max(np.abs(sol.eval(ts) - exact)) <= 1e-9


def test_continuous_invariants_generic_case():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                  0.0, 3.0, norm="sobolev", rho=0.7)
    sol = solve_continuous(problem)
    assert sol.n == 3
    assert sol.junction_gap() <= 1e-9
    assert max(abs(e) for e in sol.endpoint_errors()) <= 1e-9
    assert sol.el_residual_max() <= 1e-7


def test_continuous_multiplier_recurrence():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                  0.0, 4.0, norm="sobolev", rho=1.0)
    sol = solve_continuous(problem)
    c1s, c2s = sol.segment_multipliers()
    scale = max(abs(sol.c1), abs(sol.c2))
    for k in range(sol.n):
        assert abs(c1s[k] - sol.c1 * math.exp(k * 1.0)) <= 1e-6 * max(scale, abs(c1s[k]))
        assert abs(c2s[k] - sol.c2 * math.exp(-k * 1.0)) <= 1e-6 * max(scale, abs(c2s[k]))


def test_continuous_map_is_continuous():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                  0.0, 3.0, norm="sobolev", rho=1.0)
    sol = solve_continuous(problem)
    assert breakpoints(sol) == []
    # no visible jump at the window edges or interior junctions
    for t0 in (0.0, 1.0, 2.0, 3.0):
        lo = sol.eval(t0 - 1e-9)
        hi = sol.eval(t0 + 1e-9)
        assert abs(hi - lo) <= 1e-6


def test_scaled_profile_costs_more():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1), 0.0, 2.5)
    sol = solve_step(problem)
    base = sol.cost()
    for factor in (0.9, 1.1, 1.5):
        worse = sol.with_profile_scaled(factor)
        x = gluskabi_map(problem, worse)
        c = cost_l2(x, 0.0, 2.5, 1.0)
        assert c > base + 1e-6


def test_problem_validation():
    w = Cosine(period=1)
    with pytest.raises(ValueError):
        RaccordationProblem(w, w, 1.0, 1.0)
    with pytest.raises(ValueError):
        RaccordationProblem(w, w, 0.0, 2.0, norm="l7")
    with pytest.raises(ValueError):
        RaccordationProblem(w, w, 0.0, 2.0, norm="sobolev")  # rho missing
    with pytest.raises(PeriodMismatchError):
        RaccordationProblem(Cosine(period=1), Triangle(period=2), 0.0, 2.0)


def test_continuous_needs_whole_periods():
    with pytest.raises(IntervalError):
        solve_continuous(constants_problem(2.5, norm="sobolev", rho=1.0))
    with pytest.raises(IntervalError):
        solve_continuous(constants_problem(0.5, norm="sobolev", rho=1.0))


def test_lift_to_common_period():
    xa = Cosine(period="1/2")
    xb = Triangle(period="1/3")
    problem = lift_periods(xa, xb, 0.0, 2.0)
    assert problem.tau == 1.0
    sol = solve_step(problem)
    assert sol.n == 2
    ts = np.linspace(-1, 0, 40, endpoint=False)
    assert np.max(np.abs(sol.eval(ts) - xa.eval(ts))) == 0.0
    ts = np.linspace(2, 3, 40)
    assert np.max(np.abs(sol.eval(ts) - xb.eval(ts))) == 0.0


def test_lift_rejects_float_periods():
    with pytest.raises(UnsupportedPeriodError):
        lift_periods(Cosine(period=0.5), Triangle(period="1/3"), 0.0, 2.0)
    with pytest.raises(UnsupportedPeriodError):
        solve_auto(Cosine(period=0.5), Triangle(period=1 / 3), 0.0, 2.0)


def test_solve_auto_dispatch():
    xa, xb = Cosine(period=1), Triangle(period=1)
    _, sol = solve_auto(xa, xb, 0.0, 2.0)
    assert isinstance(sol, PiecewiseRaccordation)
    _, sol2 = solve_auto(xa, xb, 0.0, 2.0, norm="sobolev", rho=1.0)
    assert isinstance(sol2, ContinuousRaccordation)
    # same-period fast path and lifted path agree pointwise
    problem, sol3 = solve_auto(Cosine(period="1/2"), Triangle(period="1/3"),
                               0.0, 2.0)
    assert problem.tau == 1.0
    assert isinstance(sol3, PiecewiseRaccordation)


def test_continuous_cost_below_scaled_variants():
    problem = RaccordationProblem(Cosine(period=1), Triangle(period=1),
                                  0.0, 3.0, norm="sobolev", rho=1.0)
    sol = solve_continuous(problem)
    x = gluskabi_map(problem, sol)
    base = cost_sobolev(x, 0.0, 3.0, 1.0, rho=1.0)
    assert abs(base - sol.cost()) <= 1e-6 * max(1.0, base)

    # blending toward a straight-line crossfade should not reduce the cost
    xa, xb = problem.xa, problem.xb

    def crossfade(t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t / 3.0, 0.0, 1.0)
        return (1 - s) * xa.eval(t) + s * xb.eval(t)

    from raccord import Trajectory, composite
    mid = Trajectory(crossfade, dfn=lambda t: _fd(crossfade, t))
    cf = composite(Trajectory.from_periodic(xa), mid,
                   Trajectory.from_periodic(xb), 0.0, 3.0)
    c2 = cost_sobolev(cf, 0.0, 3.0, 1.0, rho=1.0, subdivision=512)
    assert c2 >= base - 1e-9


def _fd(f, t, h=1e-6):
    t = np.asarray(t, dtype=float)
    return (f(t + h) - f(t - h)) / (2 * h)
