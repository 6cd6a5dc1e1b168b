"""Closed-form constructions of maximally persistent connections.

Given two waves sharing a period tau and a handover interval [a, b], the
connection is the trajectory that equals the first wave before a, the
second after b, and in between minimizes the persistence cost of the
period defect u(t) = x(t) - x(t - tau):

* plain L2 cost: the minimizer is a staircase that spreads the gap
  between the waves evenly across the periods of the interval, one
  constant fraction per period (`solve_step`);
* Sobolev cost (u^2 + rho^2 du/dt^2): the minimizer is continuous and
  solves, period by period, a second-difference boundary-value problem
  driven by a two-parameter exponential forcing (`solve_continuous`).

Waves with different but rational periods are first relabeled with the
least common multiple period (`lift_periods`), after which either solver
applies unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.linalg import solve_banded

from .errors import (
    ConditioningError,
    IntervalError,
    PeriodMismatchError,
    UnsupportedPeriodError,
)
from .operators import Trajectory, cost_l2, cost_sobolev, periodic_kink_times
from .signals import PeriodicTrajectory, RelabeledPeriodic, lcm_period

SNAP_TOL = 1e-9  # |(b-a)/tau - n| below this counts as an exact multiple
DEFAULT_THETA_SAMPLES = 513
_NORMS = ("l2", "sobolev")


def _periods_equal(xa, xb):
    ra, rb = xa.rational_period, xb.rational_period
    if ra is not None and rb is not None:
        return ra == rb
    return abs(xa.period - xb.period) <= 1e-12 * max(xa.period, xb.period)


@dataclass(frozen=True)
class RaccordationProblem:
    """Connect wave `xa` (holds for t <= a) to wave `xb` (holds for t >= b)."""

    xa: PeriodicTrajectory
    xb: PeriodicTrajectory
    a: float
    b: float
    norm: str = "l2"
    rho: float | None = None

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got [{self.a}, {self.b}]")
        if self.norm not in _NORMS:
            raise ValueError(f"norm must be one of {_NORMS}, got {self.norm!r}")
        if self.norm == "sobolev":
            if self.rho is None or not float(self.rho) > 0:
                raise ValueError("sobolev norm needs rho > 0")
        if not _periods_equal(self.xa, self.xb):
            raise PeriodMismatchError(
                f"waves have periods {self.xa.period} and {self.xb.period}; "
                "lift to a common period first"
            )

    @property
    def tau(self):
        return self.xa.period


def _interval_split(a, b, tau):
    """Whole periods n and leftover split of the interval [a, b].

    Returns (n, split) with b - a = n*tau + split, 0 <= split < tau.
    Ratios within SNAP_TOL of an integer snap to it, so split is then
    exactly zero.
    """
    r = (b - a) / tau
    n = int(round(r))
    if abs(r - n) <= SNAP_TOL:
        return n, 0.0
    n = int(math.floor(r))
    return n, (b - a) - n * tau


@dataclass(frozen=True)
class PiecewiseRaccordation:
    """Staircase connection minimizing the plain L2 persistence cost.

    On [a, b) the connection is

        x(t) = xa(t) + (1 + k) * u((t - a) mod tau),    k = floor((t-a)/tau)

    where the defect profile u splits one period into two constant-factor
    branches:

        u(theta) = (xb - xa)(a + theta) / (n + 2)   for theta in [0, split)
        u(theta) = (xb - xa)(a + theta) / (n + 1)   for theta in [split, tau)

    with n, split as in `_interval_split`.  Values at jumps are the
    right-hand limits.  `profile_scale` is a verification hook (see
    `with_profile_scaled`) and is 1 for genuine solutions.
    """

    problem: RaccordationProblem
    n: int
    split: float
    profile_scale: float = 1.0

    def _coef(self, theta):
        n = self.n
        return np.where(theta < self.split, 1.0 / (n + 2), 1.0 / (n + 1))

    def defect_profile(self, theta):
        """Defect value over one period; theta in [0, tau)."""
        p = self.problem
        arr = np.asarray(theta, dtype=float)
        t = p.a + arr
        gap = p.xb.eval(t) - p.xa.eval(t)
        out = self.profile_scale * self._coef(arr) * gap
        return float(out) if arr.ndim == 0 else out

    def _middle(self, t):
        p = self.problem
        tau = p.tau
        rel = t - p.a
        k = np.floor(rel / tau)
        theta = rel - k * tau
        bad = theta >= tau
        if np.any(bad):
            k = np.where(bad, k + 1, k)
            theta = np.where(bad, theta - tau, theta)
        theta = np.maximum(theta, 0.0)
        gap = p.xb.eval(t) - p.xa.eval(t)
        return p.xa.eval(t) + (k + 1) * self.profile_scale * self._coef(theta) * gap

    def eval(self, t):
        p = self.problem
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        lo = flat < p.a
        hi = flat >= p.b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = p.xa.eval(flat[lo])
        if hi.any():
            out[hi] = p.xb.eval(flat[hi])
        if mid.any():
            out[mid] = self._middle(flat[mid])
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    __call__ = eval

    def deriv(self, t):
        p = self.problem
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        lo = flat < p.a
        hi = flat >= p.b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = p.xa.deriv(flat[lo])
        if hi.any():
            out[hi] = p.xb.deriv(flat[hi])
        if mid.any():
            tm = flat[mid]
            tau = p.tau
            rel = tm - p.a
            k = np.floor(rel / tau)
            theta = rel - k * tau
            wrap = theta >= tau
            if np.any(wrap):
                k = np.where(wrap, k + 1, k)
                theta = np.where(wrap, theta - tau, theta)
            dgap = p.xb.deriv(tm) - p.xa.deriv(tm)
            out[mid] = p.xa.deriv(tm) + (k + 1) * self.profile_scale * self._coef(theta) * dgap
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def jump_times(self):
        """Candidate discontinuity times: period marks and branch switches."""
        p = self.problem
        tau = p.tau
        ks = np.arange(self.n + 1, dtype=float)
        times = [p.a + ks * tau]
        if self.split > 0.0:
            switch = p.a + self.split + ks * tau
            times.append(switch[switch <= p.b + 1e-12 * tau])
        out = np.unique(np.concatenate(times))
        return out[out <= p.b + 1e-12 * tau]

    def breakpoints_in(self, lo, hi):
        p = self.problem
        jumps = self.jump_times()
        parts = [jumps[(jumps >= lo) & (jumps <= hi)]]
        parts.append(periodic_kink_times(p.xa, lo, min(hi, p.b)))
        parts.append(periodic_kink_times(p.xb, max(lo, p.a), hi))
        return np.unique(np.concatenate(parts))

    def cost(self, subdivision=None):
        """Persistence cost of the assembled connection."""
        p = self.problem
        traj = gluskabi_map(p, self)
        kwargs = {} if subdivision is None else {"subdivision": subdivision}
        return cost_l2(traj, p.a, p.b, p.tau, **kwargs)

    def with_profile_scaled(self, factor):
        """Verification hook: a deliberately spoiled copy (factor != 1)."""
        return replace(self, profile_scale=float(factor))


def solve_step(problem):
    """Staircase connection for the plain L2 norm; arbitrary interval length."""
    if problem.norm != "l2":
        raise ValueError("solve_step handles the l2 norm; use solve_continuous")
    n, split = _interval_split(problem.a, problem.b, problem.tau)
    return PiecewiseRaccordation(problem, n, split)


class PiecewiseCubic:
    """Cubic interpolant that keeps corners sharp.

    Independent splines are fit between consecutive kink locations (which
    must be grid nodes), so the interpolant is exact at nodes, smooth
    inside pieces, and evaluation or differentiation at a kink returns
    the right-hand piece.
    """

    def __init__(self, grid, values, kinks=()):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        inner = np.asarray(sorted(set(float(k) for k in kinks)), dtype=float)
        inner = inner[(inner > grid[0]) & (inner < grid[-1])]
        self._bounds = inner
        self._lo, self._hi = grid[0], grid[-1]
        edges = np.concatenate([[grid[0]], inner, [grid[-1]]])
        self._splines = []
        for p, q in zip(edges[:-1], edges[1:]):
            mask = (grid >= p) & (grid <= q)
            x, y = grid[mask], values[mask]
            k = min(3, x.size - 1)
            self._splines.append(make_interp_spline(x, y, k=k))
        self._derivs = [s.derivative() for s in self._splines]

    def _dispatch(self, theta, tables):
        arr = np.asarray(theta, dtype=float)
        flat = np.clip(np.atleast_1d(arr), self._lo, self._hi)
        idx = np.searchsorted(self._bounds, flat, side="right")
        out = np.empty_like(flat)
        for i, table in enumerate(tables):
            mask = idx == i
            if mask.any():
                out[mask] = table(flat[mask])
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def __call__(self, theta):
        return self._dispatch(theta, self._splines)

    def derivative_at(self, theta):
        return self._dispatch(theta, self._derivs)


@dataclass(frozen=True)
class ContinuousRaccordation:
    """Continuous connection minimizing the Sobolev persistence cost.

    The interval must span whole periods: b - a = n*tau.  Segment k
    (k = 0..n-1) is the restriction theta -> x(a + k*tau + theta) on
    [0, tau].  The segments satisfy the second-difference equations

        rho * (x_{k+1} + x_{k-1} - 2 x_k)(theta)
            = c1 * exp((theta + k*tau)/rho) - c2 * exp(-(theta + k*tau)/rho)

    with x_{-1}(theta) = xa(a - tau + theta) and x_n(theta) = xb(b + theta),
    and the two constants are pinned by x_0(0) = xa(a), x_{n-1}(tau) = xb(b).
    """

    problem: RaccordationProblem
    n: int
    c1: float
    c2: float
    theta: np.ndarray = field(repr=False)
    segment_values: np.ndarray = field(repr=False)  # (n, len(theta))
    segments: tuple = field(repr=False)
    _xa_seg: np.ndarray = field(repr=False)
    _xb_seg: np.ndarray = field(repr=False)

    def _locate(self, t):
        p = self.problem
        tau = p.tau
        k = np.floor((t - p.a) / tau)
        k = np.clip(k, 0, self.n - 1)
        theta = t - p.a - k * tau
        return k.astype(int), np.clip(theta, 0.0, tau)

    def eval(self, t):
        p = self.problem
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        lo = flat < p.a
        hi = flat >= p.b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = p.xa.eval(flat[lo])
        if hi.any():
            out[hi] = p.xb.eval(flat[hi])
        if mid.any():
            k, theta = self._locate(flat[mid])
            vals = np.empty_like(theta)
            for seg in np.unique(k):
                mask = k == seg
                vals[mask] = self.segments[seg](theta[mask])
            out[mid] = vals
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    __call__ = eval

    def deriv(self, t):
        p = self.problem
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        lo = flat < p.a
        hi = flat >= p.b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = p.xa.deriv(flat[lo])
        if hi.any():
            out[hi] = p.xb.deriv(flat[hi])
        if mid.any():
            k, theta = self._locate(flat[mid])
            vals = np.empty_like(theta)
            for seg in np.unique(k):
                mask = k == seg
                vals[mask] = self.segments[seg].derivative_at(theta[mask])
            out[mid] = vals
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def breakpoints_in(self, lo, hi):
        """Kink candidates; the connection itself is continuous."""
        p = self.problem
        tau = p.tau
        junctions = p.a + tau * np.arange(self.n + 1, dtype=float)
        mapped = []
        for theta in self.segments[0]._bounds if self.segments else ():
            mapped.append(p.a + theta + tau * np.arange(self.n, dtype=float))
        parts = [junctions[(junctions >= lo) & (junctions <= hi)]]
        for block in mapped:
            parts.append(block[(block >= lo) & (block <= hi)])
        parts.append(periodic_kink_times(p.xa, lo, min(hi, p.a)))
        parts.append(periodic_kink_times(p.xb, max(lo, p.b), hi))
        return np.unique(np.concatenate(parts)) if parts else np.empty(0)

    # diagnostics used by verification

    def junction_gap(self):
        """Largest mismatch x_k(0) - x_{k-1}(tau) across interior junctions."""
        v = self.segment_values
        if self.n < 2:
            return 0.0
        return float(np.max(np.abs(v[1:, 0] - v[:-1, -1])))

    def endpoint_errors(self):
        p = self.problem
        v = self.segment_values
        return (
            float(abs(v[0, 0] - p.xa.eval(p.a))),
            float(abs(v[-1, -1] - p.xb.eval(p.b))),
        )

    def _stacked(self):
        return np.vstack([self._xa_seg, self.segment_values, self._xb_seg])

    def el_residual_max(self):
        """Largest violation of the second-difference equations on the grid."""
        p = self.problem
        rho = float(p.rho)
        x = self._stacked()
        lhs = rho * (x[2:] + x[:-2] - 2.0 * x[1:-1])
        karr = np.arange(self.n, dtype=float)[:, None]
        phase = (self.theta[None, :] + karr * p.tau) / rho
        rhs = self.c1 * np.exp(phase) - self.c2 * np.exp(-phase)
        return float(np.max(np.abs(lhs - rhs)))

    def segment_multipliers(self):
        """Least-squares fit of (c1_k, c2_k) from each segment's forcing."""
        p = self.problem
        rho = float(p.rho)
        x = self._stacked()
        force = rho * (x[2:] + x[:-2] - 2.0 * x[1:-1])  # (n, ntheta)
        basis = np.column_stack(
            [np.exp(self.theta / rho), -np.exp(-self.theta / rho)]
        )
        coef, *_ = np.linalg.lstsq(basis, force.T, rcond=None)
        return coef[0], coef[1]

    def cost(self, subdivision=None):
        p = self.problem
        traj = gluskabi_map(p, self)
        kwargs = {} if subdivision is None else {"subdivision": subdivision}
        return cost_sobolev(traj, p.a, p.b, p.tau, p.rho, **kwargs)


def _theta_grid(problem, n, theta_samples):
    """Uniform grid on [0, tau] plus the wave kink phases mapped to theta."""
    tau = problem.tau
    base = np.linspace(0.0, tau, theta_samples)
    extra = []
    for wave in (problem.xa, problem.xb):
        for p in wave.kink_phases():
            extra.append((p - problem.a) % tau)
    if extra:
        grid = np.sort(np.concatenate([base, np.asarray(extra, dtype=float)]))
        keep = np.concatenate([[True], np.diff(grid) > 1e-12 * tau])
        grid = grid[keep]
        grid[0], grid[-1] = 0.0, tau
    else:
        grid = base
    kinks = sorted(set(float(e) for e in extra))
    return grid, [k for k in kinks if 0.0 < k < tau]


def solve_continuous(problem, theta_samples=DEFAULT_THETA_SAMPLES):
    """Continuous connection for the Sobolev norm over a whole-period interval."""
    if problem.norm != "sobolev":
        raise ValueError("solve_continuous handles the sobolev norm; use solve_step")
    a, b, tau, rho = problem.a, problem.b, problem.tau, float(problem.rho)
    n, split = _interval_split(a, b, tau)
    if split != 0.0 or n < 1:
        raise IntervalError(
            f"interval length {b - a} is not a whole positive multiple of "
            f"the period {tau}"
        )

    grid, kinks = _theta_grid(problem, n, theta_samples)
    ntheta = grid.size
    xa_seg = problem.xa.eval(a - tau + grid)
    xb_seg = problem.xb.eval(b + grid)

    karr = np.arange(n, dtype=float)[:, None]
    phase = (grid[None, :] + karr * tau) / rho
    r1 = np.exp(phase) / rho
    r2 = -np.exp(-phase) / rho
    r0 = np.zeros((n, ntheta))
    r0[0] -= xa_seg
    r0[n - 1] -= xb_seg

    rhs = np.hstack([r0, r1, r2])
    if n == 1:
        sol = rhs / -2.0
    else:
        band = np.zeros((3, n))
        band[0, 1:] = 1.0
        band[1, :] = -2.0
        band[2, :-1] = 1.0
        sol = solve_banded((1, 1), band, rhs)
    x0, x1, x2 = sol[:, :ntheta], sol[:, ntheta : 2 * ntheta], sol[:, 2 * ntheta :]

    pin = np.array([[x1[0, 0], x2[0, 0]], [x1[-1, -1], x2[-1, -1]]])
    target = np.array(
        [problem.xa.eval(a) - x0[0, 0], problem.xb.eval(b) - x0[-1, -1]]
    )
    cond = np.linalg.cond(pin)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConditioningError(
            f"endpoint system is numerically singular (cond {cond:.3e})"
        )
    c1, c2 = np.linalg.solve(pin, target)

    values = x0 + c1 * x1 + c2 * x2
    segments = tuple(PiecewiseCubic(grid, values[k], kinks) for k in range(n))
    return ContinuousRaccordation(
        problem=problem,
        n=n,
        c1=float(c1),
        c2=float(c2),
        theta=grid,
        segment_values=values,
        segments=segments,
        _xa_seg=xa_seg,
        _xb_seg=xb_seg,
    )


def lift_periods(xa, xb, a, b, norm="l2", rho=None):
    """Relabel two rational-period waves with their least common period.

    Pointwise both waves are unchanged; only the period label grows, so
    the staircase and boundary-value solvers can treat them as sharing
    one period.
    """
    ra, rb = xa.rational_period, xb.rational_period
    if ra is None or rb is None:
        raise UnsupportedPeriodError(
            "both waves need exact rational periods to share a common period; "
            "construct them from int, Fraction, or 'p/q' strings"
        )
    common = lcm_period(ra, rb)
    lifted_a = xa if ra == common else RelabeledPeriodic(xa, common)
    lifted_b = xb if rb == common else RelabeledPeriodic(xb, common)
    return RaccordationProblem(lifted_a, lifted_b, a, b, norm, rho)


def solve_auto(xa, xb, a, b, norm="l2", rho=None, theta_samples=DEFAULT_THETA_SAMPLES):
    """Dispatch: equal periods solve directly, rational periods lift first."""
    if _periods_equal(xa, xb):
        problem = RaccordationProblem(xa, xb, a, b, norm, rho)
    elif xa.rational_period is not None and xb.rational_period is not None:
        problem = lift_periods(xa, xb, a, b, norm, rho)
    else:
        raise UnsupportedPeriodError(
            f"periods {xa.period} and {xb.period} differ and are not both "
            "declared as exact rationals"
        )
    if norm == "l2":
        return problem, solve_step(problem)
    return problem, solve_continuous(problem, theta_samples)


def gluskabi_map(problem, solution):
    """Full real-line trajectory: xa before a, the connection, xb after b."""
    return Trajectory(solution.eval, solution.deriv, solution.breakpoints_in)


def breakpoints(solution):
    """Discontinuity table [(time, jump)] of the assembled staircase map.

    The jump is the right-hand minus the left-hand limit; entries smaller
    than 1e-12 in magnitude are dropped.  Continuous connections yield an
    empty table.
    """
    if not isinstance(solution, PiecewiseRaccordation):
        return []
    times = solution.jump_times()
    right = solution.eval(times)
    left = solution.eval(np.nextafter(times, -np.inf))
    jumps = np.atleast_1d(right - left)
    out = []
    for t, j in zip(np.atleast_1d(times), jumps):
        if abs(j) > 1e-12:
            out.append((float(t), float(j)))
    return out
