"""Real-line trajectories, the period-defect operator, and persistence costs.

The defect u(t) = x(t) - x(t - tau) vanishes exactly on tau-periodic
trajectories, so the integral of u^2 (optionally plus rho^2 * du/dt^2)
over the window where a connection can force it to zero measures how far
the connection strays from periodic behavior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError

DEFAULT_SUBDIVISION = 256
_MAX_PIECES = 100_000
_DIRECTIONS = ("lag", "advance")


class Trajectory:
    """Signal evaluable at every real t; jumps take the right-hand value.

    `fn` (and `dfn` when given) must accept float ndarrays.  Breakpoints
    are the times where the signal jumps or kinks; they may be supplied
    as a fixed sequence or as a callable (lo, hi) -> array so periodic
    tails can enumerate theirs lazily per window.
    """

    def __init__(self, fn, dfn=None, breakpoints=None):
        self._fn = fn
        self._dfn = dfn
        self._breakpoints = breakpoints

    def eval(self, t):
        arr = np.asarray(t, dtype=float)
        out = self._fn(arr)
        return float(out) if arr.ndim == 0 else np.asarray(out, dtype=float)

    __call__ = eval

    def deriv(self, t):
        if self._dfn is None:
            raise ValueError("trajectory has no derivative rule")
        arr = np.asarray(t, dtype=float)
        out = self._dfn(arr)
        return float(out) if arr.ndim == 0 else np.asarray(out, dtype=float)

    @property
    def has_deriv(self):
        return self._dfn is not None

    def breakpoints_in(self, lo, hi):
        """Sorted unique breakpoint times within [lo, hi]."""
        if self._breakpoints is None:
            return np.empty(0)
        if callable(self._breakpoints):
            pts = np.asarray(self._breakpoints(lo, hi), dtype=float)
        else:
            pts = np.asarray(self._breakpoints, dtype=float)
        pts = pts[(pts >= lo) & (pts <= hi)]
        return np.unique(pts)

    @classmethod
    def from_periodic(cls, wave):
        """Wrap a periodic wave as a real-line trajectory."""
        return cls(
            wave.eval,
            wave.deriv,
            lambda lo, hi: periodic_kink_times(wave, lo, hi),
        )

    @classmethod
    def constant(cls, value):
        v = float(value)
        return cls(
            lambda t: np.full_like(np.asarray(t, dtype=float), v),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            (),
        )


def periodic_kink_times(wave, lo, hi):
    """All replicas of the wave's kink phases that land inside [lo, hi]."""
    tau = wave.period
    out = []
    for p in wave.kink_phases():
        k0 = int(np.ceil((lo - p) / tau))
        k1 = int(np.floor((hi - p) / tau))
        if k1 >= k0:
            out.append(p + tau * np.arange(k0, k1 + 1))
    if not out:
        return np.empty(0)
    return np.unique(np.concatenate(out))


def composite(left, middle, right, a, b):
    """Trajectory equal to `left` for t < a, `middle` on [a, b), `right` for t >= b.

    All three parts must be Trajectory instances.  The values at a and b
    follow the right-limit convention: middle at a, right at b.
    """
    if not b > a:
        raise ValueError("need b > a")

    def fn(t):
        arr = np.asarray(t, dtype=float)
        t1 = np.atleast_1d(arr)
        out = np.empty_like(t1)
        lo = t1 < a
        hi = t1 >= b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = left.eval(t1[lo])
        if mid.any():
            out[mid] = middle.eval(t1[mid])
        if hi.any():
            out[hi] = right.eval(t1[hi])
        return out.reshape(arr.shape)

    def dfn(t):
        arr = np.asarray(t, dtype=float)
        t1 = np.atleast_1d(arr)
        out = np.empty_like(t1)
        lo = t1 < a
        hi = t1 >= b
        mid = ~lo & ~hi
        if lo.any():
            out[lo] = left.deriv(t1[lo])
        if mid.any():
            out[mid] = middle.deriv(t1[mid])
        if hi.any():
            out[hi] = right.deriv(t1[hi])
        return out.reshape(arr.shape)

    def bps(lo, hi):
        parts = [np.asarray([a, b], dtype=float)]
        parts.append(left.breakpoints_in(lo, min(hi, a)))
        parts.append(middle.breakpoints_in(max(lo, a), min(hi, b)))
        parts.append(right.breakpoints_in(max(lo, b), hi))
        pts = np.concatenate(parts)
        return pts[(pts >= lo) & (pts <= hi)]

    have_deriv = left.has_deriv and middle.has_deriv and right.has_deriv
    return Trajectory(fn, dfn if have_deriv else None, bps)


@dataclass(frozen=True)
class DefectSignal:
    """Difference between a trajectory and its shifted copy.

    direction "lag":     u(t) = x(t) - x(t - tau)
    direction "advance": u(t) = x(t + tau) - x(t)
    """

    source: Trajectory
    tau: float
    direction: str = "lag"

    def eval(self, t):
        x = self.source.eval
        if self.direction == "lag":
            return x(t) - x(np.asarray(t, dtype=float) - self.tau)
        return x(np.asarray(t, dtype=float) + self.tau) - x(t)

    __call__ = eval

    def deriv(self, t):
        dx = self.source.deriv
        if self.direction == "lag":
            return dx(t) - dx(np.asarray(t, dtype=float) - self.tau)
        return dx(np.asarray(t, dtype=float) + self.tau) - dx(t)

    @property
    def has_deriv(self):
        return self.source.has_deriv

    def breakpoints_in(self, lo, hi):
        shift = -self.tau if self.direction == "lag" else self.tau
        own = self.source.breakpoints_in(lo, hi)
        shifted = self.source.breakpoints_in(lo + shift, hi + shift) - shift
        return np.unique(np.concatenate([own, shifted]))


def defect(x, tau, direction="lag"):
    """Apply the period-defect operator to a trajectory."""
    tau = float(tau)
    if not tau > 0:
        raise ValueError(f"shift must be positive, got {tau}")
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}, got {direction!r}")
    return DefectSignal(x, tau, direction)


def _pieces(lo, hi, interior):
    edges = np.concatenate([[lo], interior, [hi]])
    edges = np.unique(edges[(edges >= lo) & (edges <= hi)])
    if edges.size > _MAX_PIECES:
        raise AlignmentError(
            f"integrand has {edges.size} breakpoints in [{lo}, {hi}]; "
            "quadrature grid cannot be aligned"
        )
    return edges


def _integrate_square(fn, lo, hi, interior, subdivision):
    """Integral of fn(t)^2 over [lo, hi], exact on constant pieces.

    Composite trapezoid per smooth piece.  Both edge nodes are pulled
    inward so a jump sitting on (or within rounding of) a piece edge is
    sampled from inside the piece, even after fn shifts its argument by
    a period.  A one-ulp nudge is not enough for that: it can be absorbed
    when the shift is added.
    """
    edges = _pieces(lo, hi, interior)
    eps = np.finfo(float).eps
    total = 0.0
    for p, q in zip(edges[:-1], edges[1:]):
        width = q - p
        if width <= 0:
            continue
        scale = max(abs(p), abs(q), 1.0)
        delta = min(0.25 * width, max(1e-12 * width, 32 * eps * scale))
        nodes = np.linspace(p, q, subdivision + 1)
        nodes[0] = p + delta
        nodes[-1] = q - delta
        vals = fn(nodes)
        spread = np.max(vals) - np.min(vals)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if spread <= 1e-13 * scale:
            total += float(vals[0]) ** 2 * width
        else:
            sq = vals * vals
            h = width / subdivision
            total += h * (0.5 * sq[0] + sq[1:-1].sum() + 0.5 * sq[-1])
    return total


def _window(a, b, tau, direction):
    return (a, b + tau) if direction == "lag" else (a - tau, b)


def cost_l2(x, a, b, tau, direction="lag", subdivision=DEFAULT_SUBDIVISION):
    """Integral of the squared defect over its maximal support window.

    The window is [a, b + tau] for the lag convention and [a - tau, b]
    for advance; outside it a connection pinned to periodic tails leaves
    the defect at zero.
    """
    if not b > a:
        raise ValueError("need b > a")
    u = defect(x, tau, direction)
    lo, hi = _window(a, b, tau, direction)
    return _integrate_square(u.eval, lo, hi, u.breakpoints_in(lo, hi), subdivision)


def cost_sobolev(x, a, b, tau, rho, direction="lag", subdivision=DEFAULT_SUBDIVISION):
    """Like cost_l2 plus rho^2 times the integral of the defect's slope squared."""
    if not b > a:
        raise ValueError("need b > a")
    rho = float(rho)
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    u = defect(x, tau, direction)
    lo, hi = _window(a, b, tau, direction)
    interior = u.breakpoints_in(lo, hi)
    value = _integrate_square(u.eval, lo, hi, interior, subdivision)
    slope = _integrate_square(u.deriv, lo, hi, interior, subdivision)
    return value + rho * rho * slope
