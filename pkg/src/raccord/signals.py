"""Periodic waveforms evaluable on the whole real line.

Every wave reduces its argument modulo the period before evaluating, so
periodicity holds to rounding error no matter how far out t sits.  Waves
constructed from an exact rational period (int, Fraction, "p/q" string,
or RationalPeriod) remember it, which is what makes two waves with
different periods connectable through a common multiple later on.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * math.pi


class RationalPeriod:
    """Exact positive rational period p/q, stored in lowest terms."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=1):
        frac = Fraction(numerator, denominator)
        if frac <= 0:
            raise ValueError(f"period must be positive, got {frac}")
        object.__setattr__(self, "numerator", frac.numerator)
        object.__setattr__(self, "denominator", frac.denominator)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPeriod is immutable")

    @classmethod
    def coerce(cls, value):
        """Build from RationalPeriod, int, Fraction, or a 'p/q' string."""
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, Fraction, str)):
            return cls(Fraction(value))
        raise TypeError(f"cannot interpret {value!r} as an exact period")

    @property
    def value(self):
        return self.numerator / self.denominator

    def as_fraction(self):
        return Fraction(self.numerator, self.denominator)

    def __eq__(self, other):
        if isinstance(other, RationalPeriod):
            return (self.numerator, self.denominator) == (
                other.numerator,
                other.denominator,
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __repr__(self):
        return f"RationalPeriod({self.numerator}, {self.denominator})"

    def __str__(self):
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def lcm_period(r1, r2):
    """Smallest rational that is an integer multiple of both periods.

    lcm(p1/q1, p2/q2) = lcm(p1, p2) / gcd(q1, q2).
    """
    r1 = RationalPeriod.coerce(r1)
    r2 = RationalPeriod.coerce(r2)
    return RationalPeriod(
        math.lcm(r1.numerator, r2.numerator),
        math.gcd(r1.denominator, r2.denominator),
    )


def _coerce_period(period):
    """Return (float value, RationalPeriod or None).

    Plain floats are accepted for evaluation but carry no exactness
    claim, so they cannot take part in common-period lifting.
    """
    if isinstance(period, (RationalPeriod, int, Fraction, str)):
        rational = RationalPeriod.coerce(period)
        return rational.value, rational
    value = float(period)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"period must be a positive finite number, got {period}")
    return value, None


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


class PeriodicTrajectory:
    """Base class: fixed-period signal defined for every real t.

    Subclasses implement `_eval_phase` and `_deriv_phase` on one period
    [0, period) and report their non-smooth phase locations through
    `kink_phases`.  At a jump or kink the value and the derivative are
    the right-hand ones.
    """

    def __init__(self, period):
        self._period, self._rational = _coerce_period(period)

    @property
    def period(self):
        return self._period

    @property
    def rational_period(self):
        """Exact period if one was declared at construction, else None."""
        return self._rational

    def eval(self, t):
        arr, scalar = _as_array(t)
        out = self._eval_phase(np.mod(arr, self._period))
        return float(out) if scalar else out

    __call__ = eval

    def deriv(self, t):
        arr, scalar = _as_array(t)
        out = self._deriv_phase(np.mod(arr, self._period))
        return float(out) if scalar else out

    def kink_phases(self):
        """Phases in [0, period) where the wave is not smooth."""
        return ()

    def _eval_phase(self, s):
        raise NotImplementedError

    def _deriv_phase(self, s):
        raise NotImplementedError


class Cosine(PeriodicTrajectory):
    """amplitude * cos(2*pi*t/period + phase)."""

    def __init__(self, period=1, amplitude=1.0, phase=0.0):
        super().__init__(period)
        self.amplitude = float(amplitude)
        self.phase = float(phase)

    def _eval_phase(self, s):
        return self.amplitude * np.cos(TWO_PI * s / self._period + self.phase)

    def _deriv_phase(self, s):
        w = TWO_PI / self._period
        return -self.amplitude * w * np.sin(w * s + self.phase)


class Triangle(PeriodicTrajectory):
    """Piecewise-linear wave: 0 -> +1 at period/4 -> 0 -> -1 at 3*period/4 -> 0."""

    def __init__(self, period=1):
        super().__init__(period)

    def _eval_phase(self, s):
        q = s / self._period
        return np.where(q < 0.25, 4.0 * q, np.where(q < 0.75, 2.0 - 4.0 * q, 4.0 * q - 4.0))

    def _deriv_phase(self, s):
        q = s / self._period
        c = 4.0 / self._period
        return np.where(q < 0.25, c, np.where(q < 0.75, -c, c))

    def kink_phases(self):
        return (0.25 * self._period, 0.75 * self._period)


class Square(PeriodicTrajectory):
    """+1 on [0, period/2), -1 on [period/2, period)."""

    def __init__(self, period=1):
        super().__init__(period)

    def _eval_phase(self, s):
        return np.where(s < 0.5 * self._period, 1.0, -1.0)

    def _deriv_phase(self, s):
        return np.zeros_like(s)

    def kink_phases(self):
        return (0.0, 0.5 * self._period)


class FourierSeries(PeriodicTrajectory):
    """a0 + sum_k a_k cos(2 pi k t/period) + b_k sin(2 pi k t/period)."""

    def __init__(self, period=1, a0=0.0, an=(), bn=()):
        super().__init__(period)
        self.a0 = float(a0)
        k = max(len(an), len(bn))
        self.an = np.zeros(k)
        self.an[: len(an)] = an
        self.bn = np.zeros(k)
        self.bn[: len(bn)] = bn
        self._k = np.arange(1, k + 1)

    def _angles(self, s):
        flat = np.atleast_1d(s).ravel()
        return flat, TWO_PI * np.outer(flat, self._k) / self._period

    def _eval_phase(self, s):
        if self._k.size == 0:
            return np.full_like(np.asarray(s, dtype=float), self.a0)
        flat, ang = self._angles(s)
        out = self.a0 + np.cos(ang) @ self.an + np.sin(ang) @ self.bn
        return out.reshape(np.shape(s))

    def _deriv_phase(self, s):
        if self._k.size == 0:
            return np.zeros_like(np.asarray(s, dtype=float))
        flat, ang = self._angles(s)
        w = TWO_PI * self._k / self._period
        out = -np.sin(ang) @ (w * self.an) + np.cos(ang) @ (w * self.bn)
        return out.reshape(np.shape(s))


class SampledWave(PeriodicTrajectory):
    """Linear interpolation through one period of samples, wrapping around.

    `phases` are sample locations in [0, period); the first one must be 0.
    When omitted the samples are taken as uniformly spaced.  The derivative
    is the slope of the containing segment, right-hand at the nodes.
    """

    def __init__(self, period=1, values=(), phases=None):
        super().__init__(period)
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("need at least two samples on one period")
        if phases is None:
            ph = np.arange(vals.size) * (self._period / vals.size)
        else:
            ph = np.asarray(phases, dtype=float)
            if ph.shape != vals.shape:
                raise ValueError("phases and values must have matching length")
            if ph[0] != 0.0:
                raise ValueError("first sample must sit at phase 0")
            if np.any(np.diff(ph) <= 0) or ph[-1] >= self._period:
                raise ValueError("phases must be strictly increasing within one period")
        self.values = vals
        self.phases = ph
        # wrap segment closes the period back to the first sample
        dx = np.diff(np.append(ph, self._period))
        dy = np.diff(np.append(vals, vals[0]))
        self._slopes = dy / dx

    def _eval_phase(self, s):
        return np.interp(s, self.phases, self.values, period=self._period)

    def _deriv_phase(self, s):
        idx = np.searchsorted(self.phases, s, side="right") - 1
        return self._slopes[np.clip(idx, 0, self._slopes.size - 1)]

    def kink_phases(self):
        return tuple(self.phases)


class RelabeledPeriodic(PeriodicTrajectory):
    """Same pointwise signal as `inner`, labeled with a coarser period.

    The new period must be an exact integer multiple of the inner one;
    evaluation semantics are unchanged.
    """

    def __init__(self, inner, period):
        rational = RationalPeriod.coerce(period)
        if inner.rational_period is None:
            raise ValueError("inner wave has no exact period to relabel")
        ratio = rational.as_fraction() / inner.rational_period.as_fraction()
        if ratio.denominator != 1 or ratio < 1:
            raise ValueError(
                f"{rational} is not an integer multiple of {inner.rational_period}"
            )
        super().__init__(rational)
        self.inner = inner
        self._copies = int(ratio)

    def eval(self, t):
        return self.inner.eval(t)

    __call__ = eval

    def deriv(self, t):
        return self.inner.deriv(t)

    def kink_phases(self):
        inner_tau = self.inner.period
        return tuple(
            p + k * inner_tau
            for k in range(self._copies)
            for p in self.inner.kink_phases()
        )
