"""Independent grid check on the closed-form connections.

The persistence cost is discretized on a uniform grid of m samples per
period and minimized exactly (sparse normal equations, direct solve).
Nothing in this module uses the staircase or boundary-value formulas, so
agreement between the two paths is evidence, not bookkeeping.

Discretization conventions: grid point j sits at t = a + j*h and stands
for the cell [t, t + h).  Samples with j < 0 are pinned to the first
wave, samples with j >= N = (b-a)/h to the second; the N cells in
between are the unknowns.  The lag-form cost sums

    h * (x_j - x_{j-m})^2                        over j = 0 .. N+m

plus, for the Sobolev norm with weight rho,

    rho^2 * h * ((u_j - u_{j-1}) / h)^2          over the same rows

with u taken as zero before the window (the tails are periodic there).
The advance form shifts the same sums by one period and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .errors import AlignmentError, IntervalError

_DIRECTIONS = ("lag", "advance")


@dataclass(frozen=True)
class DiscretizedProblem:
    """Grid realization of a connection problem; see module docstring."""

    problem: object
    m: int
    direction: str
    h: float
    n_steps: int  # N: number of unknown cells
    times: np.ndarray  # sample times for j = -m .. N+m
    fixed_left: np.ndarray  # first-wave samples, j = -m .. -1
    fixed_right: np.ndarray  # second-wave samples, j = N .. N+m

    @property
    def unknown_times(self):
        return self.times[self.m : self.m + self.n_steps]


def _suggest_m(problem, m):
    ratio = Fraction(problem.b - problem.a) / Fraction(problem.tau)
    q = ratio.limit_denominator(10**6).denominator
    return int(np.ceil(m / q)) * q


def discretize(problem, m, direction="lag"):
    m = int(m)
    if m < 2:
        raise ValueError(f"need at least 2 samples per period, got {m}")
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}, got {direction!r}")
    tau = problem.tau
    h = tau / m
    ratio = (problem.b - problem.a) / h
    n_steps = int(round(ratio))
    if abs(ratio - n_steps) > 1e-9 * max(1.0, abs(ratio)):
        raise AlignmentError(
            f"interval [{problem.a}, {problem.b}] does not align with the "
            f"grid of {m} samples per period {tau}",
            suggested_m=_suggest_m(problem, m),
        )
    if n_steps < 1:
        raise IntervalError("interval shorter than one grid cell")
    if problem.norm == "sobolev" and n_steps % m != 0:
        raise IntervalError(
            "sobolev discretization needs the interval to span whole periods"
        )
    j = np.arange(-m, n_steps + m + 1)
    times = problem.a + j * h
    fixed_left = problem.xa.eval(times[:m])
    fixed_right = problem.xb.eval(times[m + n_steps :])
    return DiscretizedProblem(
        problem=problem,
        m=m,
        direction=direction,
        h=h,
        n_steps=n_steps,
        times=times,
        fixed_left=fixed_left,
        fixed_right=fixed_right,
    )


def _defect_matrix(dp):
    """Sparse map from the full sample vector to the defect rows."""
    m, n = dp.m, dp.n_steps
    if dp.direction == "lag":
        j = np.arange(0, n + m + 1)
        plus, minus = j, j - m
    else:
        j = np.arange(-m, n + 1)
        plus, minus = j + m, j
    rows = np.arange(j.size)
    col = lambda idx: idx + m  # noqa: E731 - tiny index shift
    data = np.concatenate([np.ones(j.size), -np.ones(j.size)])
    rc = (np.concatenate([rows, rows]), np.concatenate([col(plus), col(minus)]))
    total = n + 2 * m + 1
    return sparse.coo_matrix((data, rc), shape=(j.size, total)).tocsr()


def _slope_matrix(nrows, h):
    """Backward differences across defect rows; zero defect before row 0."""
    main = np.full(nrows, 1.0 / h)
    lower = np.full(nrows - 1, -1.0 / h)
    return sparse.diags([main, lower], [0, -1], format="csr")


def _full_vector(dp, unknown):
    return np.concatenate([dp.fixed_left, unknown, dp.fixed_right])


def _cost_terms(dp):
    d = _defect_matrix(dp)
    terms = [(dp.h, d)]
    if dp.problem.norm == "sobolev":
        g = _slope_matrix(d.shape[0], dp.h)
        rho = float(dp.problem.rho)
        terms.append((rho * rho * dp.h, g @ d))
    return terms


def discrete_cost(dp, unknown):
    """Cost of an arbitrary feasible sample vector (length N of unknowns)."""
    unknown = np.asarray(unknown, dtype=float)
    if unknown.shape != (dp.n_steps,):
        raise ValueError(f"expected {dp.n_steps} unknown samples, got {unknown.shape}")
    x = _full_vector(dp, unknown)
    total = 0.0
    for weight, mat in _cost_terms(dp):
        r = mat @ x
        total += weight * float(r @ r)
    return total


@dataclass(frozen=True)
class SampledSolution:
    """Oracle minimizer on the grid over [a, b] (last sample pinned to xb)."""

    times: np.ndarray
    values: np.ndarray
    cost: float
    dp: DiscretizedProblem


def oracle_solve(problem, m, direction="lag"):
    """Minimize the discretized cost exactly and return the grid solution."""
    dp = discretize(problem, m, direction)
    n, mm = dp.n_steps, dp.m
    iu = np.arange(mm, mm + n)
    ifix = np.concatenate([np.arange(0, mm), np.arange(mm + n, n + 2 * mm + 1)])
    xfix = np.concatenate([dp.fixed_left, dp.fixed_right])

    k = None
    for weight, mat in _cost_terms(dp):
        block = weight * (mat.T @ mat)
        k = block if k is None else k + block
    k = k.tocsr()
    k_uu = k[iu][:, iu].tocsc()
    k_uf = k[iu][:, ifix]
    unknown = spsolve(k_uu, -k_uf @ xfix)

    cost = discrete_cost(dp, unknown)
    times = dp.times[mm : mm + n + 1]
    values = np.concatenate([unknown, [dp.fixed_right[0]]])
    return SampledSolution(times=times, values=values, cost=cost, dp=dp)


def compare(closed, sampled):
    """Sup difference between a trajectory and an oracle grid solution.

    Grid points within one cell of a known breakpoint of the trajectory
    are skipped: a jump's location is ambiguous within one cell on the
    grid, so disagreement there carries no information.
    """
    t, v = sampled.times, sampled.values
    h = sampled.dp.h
    bps = closed.breakpoints_in(t[0] - h, t[-1] + h)
    keep = np.ones(t.size, dtype=bool)
    for bp in np.atleast_1d(bps):
        keep &= np.abs(t - bp) >= h * (1.0 - 1e-9)
    if not keep.any():
        raise ValueError("every grid point sits next to a breakpoint")
    return float(np.max(np.abs(closed.eval(t[keep]) - v[keep])))
