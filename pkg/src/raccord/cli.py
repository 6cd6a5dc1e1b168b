"""Command-line front end.

Subcommands:

* connect      solve a connection problem, emit CSV samples and optional SVG
* verify       solve, then run the full invariant suite against the oracle
* demo         canned example figures 1-4
* breakpoints  discontinuity table of the staircase connection

Waveforms are given as expressions like ``cos(period=1, phase=1/2)``;
see `parse_waveform`.  Exit codes: 0 success, 1 usage error, 2 solver
error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AlignmentError, RaccordError, WaveformSyntaxError
from .operators import Trajectory, cost_l2, cost_sobolev, defect
from .oracle import compare, discrete_cost, discretize, oracle_solve
from .signals import Cosine, FourierSeries, SampledWave, Square, Triangle
from .solvers import PiecewiseRaccordation, breakpoints, gluskabi_map, solve_auto

PINCH_THRESHOLD = 0.8
_WAVE_NAMES = ("cos", "triangle", "square", "fourier", "samples")


# ---------------------------------------------------------------- grammar

_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<RATIONAL>[-+]?\d+/\d+)
      | (?P<NUMBER>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
      | (?P<NAME>[A-Za-z_][A-Za-z_0-9.\\-]*)
      | (?P<STRING>'[^']*'|"[^"]*")
      | (?P<SYM>[()\[\],=])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise WaveformSyntaxError(
                f"unexpected character {text[pos]!r}", pos, "a token"
            )
        kind = m.lastgroup
        if kind != "WS":
            value = m.group()
            if kind == "SYM":
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise WaveformSyntaxError(f"got {tok[1]!r}", tok[2], kind)
        self.i += 1
        return tok

    def number(self):
        tok = self.peek()
        if tok[0] in ("RATIONAL", "NUMBER"):
            self.i += 1
            return Fraction(tok[1])
        raise WaveformSyntaxError(f"got {tok[1]!r}", tok[2], "a number")

    def value(self):
        tok = self.peek()
        if tok[0] in ("RATIONAL", "NUMBER"):
            return self.number()
        if tok[0] == "STRING":
            self.i += 1
            return tok[1][1:-1]
        if tok[0] == "NAME":  # bare word, e.g. an unquoted file path
            self.i += 1
            return tok[1]
        if tok[0] == "[":
            self.i += 1
            items = []
            if self.peek()[0] != "]":
                items.append(self.number())
                while self.peek()[0] == ",":
                    self.i += 1
                    items.append(self.number())
            self.take("]")
            return [float(x) for x in items]
        raise WaveformSyntaxError(f"got {tok[1]!r}", tok[2], "a value")


def _read_samples_csv(path):
    phases, values = [], []
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise ValueError(f"cannot read samples file {path}: {exc}") from exc
    with handle:
        for row in csv.reader(handle):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                ph, v = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not phases:
                    continue  # header row
                raise ValueError(f"malformed samples row {row!r} in {path}")
            phases.append(ph)
            values.append(v)
    if len(values) < 2:
        raise ValueError(f"samples file {path} needs at least two rows")
    if phases[0] != 0.0 or any(p < 0.0 or p >= 1.0 for p in phases):
        raise ValueError("sample phases must start at 0 and stay in [0, 1)")
    return np.asarray(phases), np.asarray(values)


def _build_wave(name, pos, kwargs):
    def pop_number(key, default):
        v = kwargs.pop(key, default)
        if isinstance(v, (list, str)):
            raise ValueError(f"{name}: key {key} expects a number")
        return v

    period = kwargs.pop("period", Fraction(1))
    if isinstance(period, (list, str)):
        raise ValueError(f"{name}: key period expects a number")
    if period <= 0:
        raise ValueError(f"{name}: period must be positive, got {period}")

    if name == "cos":
        wave = Cosine(
            period=period,
            amplitude=float(pop_number("amp", 1)),
            phase=float(pop_number("phase", 0)),
        )
    elif name == "triangle":
        wave = Triangle(period=period)
    elif name == "square":
        wave = Square(period=period)
    elif name == "fourier":
        a0 = float(pop_number("a0", 0))
        an = kwargs.pop("a", [])
        bn = kwargs.pop("b", [])
        if not isinstance(an, list) or not isinstance(bn, list):
            raise ValueError("fourier: keys a and b expect lists like a=[1,0.5]")
        wave = FourierSeries(period=period, a0=a0, an=an, bn=bn)
    elif name == "samples":
        path = kwargs.pop("file", None)
        if not isinstance(path, str):
            raise ValueError("samples: needs file=PATH")
        frac, vals = _read_samples_csv(path)
        wave = SampledWave(period=period, values=vals, phases=frac * float(period))
    else:
        raise WaveformSyntaxError(
            f"unknown waveform {name!r}", pos, "one of " + ", ".join(_WAVE_NAMES)
        )
    if kwargs:
        raise ValueError(f"{name}: unknown keys {sorted(kwargs)}")
    return wave


def parse_waveform(text):
    """Parse a waveform expression into a periodic trajectory.

    Grammar: ``name(key=value, ...)`` with names cos, triangle, square,
    fourier, samples; numbers may be decimals or exact rationals p/q.
    Examples: ``cos(period=1, phase=1.5707963)``,
    ``fourier(period=2, a0=0.5, a=[1, 0.5], b=[0.25])``,
    ``samples(period=1/3, file=wave.csv)``.
    """
    p = _Parser(text)
    name_tok = p.take("NAME")
    p.take("(")
    kwargs = {}
    if p.peek()[0] != ")":
        while True:
            key = p.take("NAME")
            p.take("=")
            kwargs[key[1]] = p.value()
            if p.peek()[0] != ",":
                break
            p.take(",")
    p.take(")")
    p.take("EOF")
    return _build_wave(name_tok[1], name_tok[2], kwargs)


# ------------------------------------------------------------ CSV and SVG

def _fmt(x):
    return f"{x:.17g}"


def sample_grid(problem, per_period):
    tau = problem.tau
    lo, hi = problem.a - 2 * tau, problem.b + 2 * tau
    count = int(round((hi - lo) * per_period / tau))
    return lo + (hi - lo) * np.arange(count + 1) / count


def write_csv(stream, problem, solution, per_period):
    """Emit `t,x,u` rows; u is blank outside the defect's support window."""
    traj = gluskabi_map(problem, solution)
    u = defect(traj, problem.tau)
    ts = sample_grid(problem, per_period)
    xs = traj.eval(ts)
    us = u.eval(ts)
    lo, hi = problem.a, problem.b + problem.tau
    stream.write("t,x,u\n")
    for t, x, uv in zip(ts, xs, us):
        tail = _fmt(uv) if lo <= t <= hi else ""
        stream.write(f"{_fmt(t)},{_fmt(x)},{tail}\n")


def _svg_polylines(ts, xs, cut_times):
    """Split the sampled curve wherever it crosses a jump time."""
    cuts = sorted(cut_times)
    runs, start = [], 0
    for c in cuts:
        idx = int(np.searchsorted(ts, c, side="left"))
        if start < idx:
            runs.append((start, idx))
        start = idx
    if start < ts.size:
        runs.append((start, ts.size))
    return [(ts[i:j], xs[i:j]) for i, j in runs if j - i >= 2]


def write_svg(stream, problem, solution, per_period):
    """Standalone 800x400 plot of the assembled connection.

    Deterministic output: same problem, same bytes.  Polylines break at
    the jump times so discontinuities render as gaps.
    """
    width, height = 800, 400
    mleft, mright, mtop, mbot = 45, 15, 15, 30
    ts = sample_grid(problem, per_period)
    traj = gluskabi_map(problem, solution)
    xs = traj.eval(ts)
    x0, x1 = float(ts[0]), float(ts[-1])
    ylo, yhi = float(np.min(xs)), float(np.max(xs))
    pad = 0.05 * max(yhi - ylo, 1e-12)
    ylo, yhi = ylo - pad, yhi + pad

    def px(t):
        return mleft + (t - x0) / (x1 - x0) * (width - mleft - mright)

    def py(v):
        return height - mbot - (v - ylo) / (yhi - ylo) * (height - mtop - mbot)

    jumps = [t for t, _ in breakpoints(solution)]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- x: t in [{_fmt(x0)}, {_fmt(x1)}] -> px [{mleft}, {width - mright}]; "
        f"y: value in [{_fmt(ylo)}, {_fmt(yhi)}] -> px [{height - mbot}, {mtop}] -->",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if ylo < 0.0 < yhi:
        y = py(0.0)
        lines.append(
            f'<line x1="{mleft}" y1="{y:.2f}" x2="{width - mright}" y2="{y:.2f}" '
            'stroke="#999999" stroke-width="1"/>'
        )
    for t in (problem.a, problem.b):
        x = px(t)
        lines.append(
            f'<line x1="{x:.2f}" y1="{mtop}" x2="{x:.2f}" y2="{height - mbot}" '
            'stroke="#bbbbbb" stroke-width="1" stroke-dasharray="4 3"/>'
        )
    for run_t, run_x in _svg_polylines(ts, xs, jumps):
        pts = " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in zip(run_t, run_x))
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="#1f77b4" '
            'stroke-width="1.5"/>'
        )
    lines.append(
        f'<text x="{px(problem.a):.2f}" y="{height - 10}" font-size="12" '
        f'fill="#555555" text-anchor="middle">a={_fmt(problem.a)}</text>'
    )
    lines.append(
        f'<text x="{px(problem.b):.2f}" y="{height - 10}" font-size="12" '
        f'fill="#555555" text-anchor="middle">b={_fmt(problem.b)}</text>'
    )
    lines.append("</svg>")
    stream.write("\n".join(lines) + "\n")


# ------------------------------------------------------------ verification

@dataclass
class RunReport:
    """Outcome of a verification run: one (name, passed, detail) per check."""

    solver: str
    cost: float
    oracle_cost: float | None = None
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail):
        self.checks.append((name, bool(passed), detail))

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.checks)

    def lines(self):
        out = [f"solver: {self.solver}", f"cost: {_fmt(self.cost)}"]
        if self.oracle_cost is not None:
            out.append(f"oracle cost: {_fmt(self.oracle_cost)}")
        for name, passed, detail in self.checks:
            out.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        out.append("verification " + ("PASSED" if self.ok else "FAILED"))
        return out


def _oracle_with_adjustment(problem, m, direction="lag", log=None):
    try:
        return oracle_solve(problem, m, direction), m
    except AlignmentError as exc:
        if exc.suggested_m is None:
            raise
        if log is not None:
            log(f"note: adjusted oracle samples per period from {m} to {exc.suggested_m}")
        return oracle_solve(problem, exc.suggested_m, direction), exc.suggested_m


def _boundary_checks(report, problem, traj, rng):
    tau = problem.tau
    t_left = problem.a - 2 * tau + 2 * tau * rng.random(100)
    t_right = problem.b + 2 * tau * rng.random(100)
    gap_l = float(np.max(np.abs(traj.eval(t_left) - problem.xa.eval(t_left))))
    gap_r = float(np.max(np.abs(traj.eval(t_right) - problem.xb.eval(t_right))))
    report.add("left_tail_match", gap_l == 0.0, f"sup={_fmt(gap_l)} (exact)")
    report.add("right_tail_match", gap_r == 0.0, f"sup={_fmt(gap_r)} (exact)")


def _staircase_perturbations(problem, solution, traj, rng, count=100):
    base = cost_l2(traj, problem.a, problem.b, problem.tau, subdivision=64)
    edges = np.unique(np.concatenate([solution.jump_times(), [problem.b]]))
    worst = np.inf
    for _ in range(count):
        deltas = rng.uniform(-1.0, 1.0, edges.size - 1)
        deltas *= 0.1 / np.max(np.abs(deltas))

        def bump(t, e=edges, d=deltas):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(e, t, side="right") - 1, 0, d.size - 1)
            return np.where((t >= e[0]) & (t < e[-1]), d[idx], 0.0)

        pert = Trajectory(
            lambda t, f=bump: traj.eval(t) + f(t),
            breakpoints=lambda lo, hi, e=edges: np.concatenate(
                [traj.breakpoints_in(lo, hi), e[(e >= lo) & (e <= hi)]]
            ),
        )
        c = cost_l2(pert, problem.a, problem.b, problem.tau, subdivision=64)
        worst = min(worst, c - base)
    return worst


def _smooth_perturbations(problem, traj, rng, count=100, nodes_per_period=4):
    rho = float(problem.rho)
    base = cost_sobolev(traj, problem.a, problem.b, problem.tau, rho, subdivision=64)
    n_nodes = max(3, int(nodes_per_period * (problem.b - problem.a) / problem.tau) + 1)
    nodes = np.linspace(problem.a, problem.b, n_nodes)
    worst = np.inf
    for _ in range(count):
        vals = rng.uniform(-1.0, 1.0, nodes.size)
        vals[0] = vals[-1] = 0.0
        vals *= 0.1 / np.max(np.abs(vals))
        slopes = np.diff(vals) / np.diff(nodes)

        def bump(t, nd=nodes, vv=vals):
            t = np.asarray(t, dtype=float)
            return np.interp(t, nd, vv, left=0.0, right=0.0)

        def dbump(t, nd=nodes, sl=slopes):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(nd, t, side="right") - 1, 0, sl.size - 1)
            return np.where((t >= nd[0]) & (t < nd[-1]), sl[idx], 0.0)

        pert = Trajectory(
            lambda t, f=bump: traj.eval(t) + f(t),
            dfn=lambda t, f=dbump: traj.deriv(t) + f(t),
            breakpoints=lambda lo, hi, nd=nodes: np.concatenate(
                [traj.breakpoints_in(lo, hi), nd[(nd >= lo) & (nd <= hi)]]
            ),
        )
        c = cost_sobolev(pert, problem.a, problem.b, problem.tau, rho, subdivision=64)
        worst = min(worst, c - base)
    return worst


def run_verification(problem, solution, oracle_m, log=None, seed=20240901):
    """Execute the invariant suite for a solved problem; returns a RunReport."""
    rng = np.random.default_rng(seed)
    traj = gluskabi_map(problem, solution)
    piecewise = isinstance(solution, PiecewiseRaccordation)

    if piecewise:
        cost = cost_l2(traj, problem.a, problem.b, problem.tau)
        report = RunReport(solver="staircase", cost=cost)
    else:
        cost = cost_sobolev(traj, problem.a, problem.b, problem.tau, problem.rho)
        report = RunReport(solver="boundary-value", cost=cost)

    _boundary_checks(report, problem, traj, rng)

    if piecewise:
        oracle_sol, m_used = _oracle_with_adjustment(problem, oracle_m, log=log)
        report.oracle_cost = oracle_sol.cost
        sup = compare(traj, oracle_sol)
        report.add("oracle_agreement", sup <= 1e-9, f"sup={_fmt(sup)} (tol 1e-9)")
        dp = discretize(problem, m_used)
        dc = discrete_cost(dp, traj.eval(dp.unknown_times))
        gap = abs(dc - oracle_sol.cost)
        report.add(
            "oracle_cost_agreement", gap <= 1e-9, f"|diff|={_fmt(gap)} (tol 1e-9)"
        )
        worst = _staircase_perturbations(problem, solution, traj, rng)
        report.add(
            "optimality_100_perturbations",
            worst >= -1e-9,
            f"worst cost change={_fmt(worst)} (tol -1e-9)",
        )
    else:
        gap = solution.junction_gap()
        report.add("junction_continuity", gap <= 1e-9, f"max gap={_fmt(gap)} (tol 1e-9)")
        e_l, e_r = solution.endpoint_errors()
        report.add(
            "endpoint_conditions",
            max(e_l, e_r) <= 1e-9,
            f"|left|={_fmt(e_l)} |right|={_fmt(e_r)} (tol 1e-9)",
        )
        res = solution.el_residual_max()
        report.add("stationarity_residual", res <= 1e-7, f"max={_fmt(res)} (tol 1e-7)")
        c1s, c2s = solution.segment_multipliers()
        k = np.arange(solution.n, dtype=float)
        tau, rho = problem.tau, float(problem.rho)
        scale1 = np.maximum(np.abs(c1s), 1e-30)
        scale2 = np.maximum(np.abs(c2s), 1e-30)
        drift = 0.0
        if abs(solution.c1) > 1e-30 or np.max(np.abs(c1s)) > 1e-12:
            drift = float(np.max(np.abs(c1s - solution.c1 * np.exp(k * tau / rho)) / scale1))
        if abs(solution.c2) > 1e-30 or np.max(np.abs(c2s)) > 1e-12:
            drift = max(
                drift,
                float(np.max(np.abs(c2s - solution.c2 * np.exp(-k * tau / rho)) / scale2)),
            )
        report.add(
            "multiplier_recurrence", drift <= 1e-6, f"rel err={_fmt(drift)} (tol 1e-6)"
        )
        coarse, m_used = _oracle_with_adjustment(problem, oracle_m, log=log)
        fine, _ = _oracle_with_adjustment(problem, 2 * m_used, log=log)
        report.oracle_cost = fine.cost
        e_coarse = compare(traj, coarse)
        e_fine = compare(traj, fine)
        ratio = e_coarse / e_fine if e_fine > 0 else np.inf
        report.add(
            "oracle_convergence",
            ratio >= 1.5,
            f"err({m_used})={_fmt(e_coarse)} err({2 * m_used})={_fmt(e_fine)} "
            f"ratio={ratio:.3f} (need >=1.5)",
        )
        worst = _smooth_perturbations(problem, traj, rng)
        report.add(
            "optimality_100_perturbations",
            worst >= -1e-9,
            f"worst cost change={_fmt(worst)} (tol -1e-9)",
        )
    return report


def pinch_ratio(problem, solution, samples=768):
    """Amplitude of the middle third of [a, b] relative to the first third.

    A ratio under PINCH_THRESHOLD means the connection passes through a
    visibly flattened stretch on its way from one wave to the other.
    """
    a, b = problem.a, problem.b
    third = (b - a) / 3.0
    ts = np.linspace(a, b, samples, endpoint=False)
    xs = np.abs(np.asarray(solution.eval(ts)))
    first = float(np.max(xs[ts < a + third]))
    middle = float(np.max(xs[(ts >= a + third) & (ts < a + 2 * third)]))
    if first <= 1e-15:
        return math.inf
    return middle / first


# ------------------------------------------------------------- subcommands

class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _number(text):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _solve_from_args(args):
    xa = parse_waveform(args.xa)
    xb = parse_waveform(args.xb)
    rho = getattr(args, "rho", None)
    if args.norm == "sobolev" and rho is None:
        raise _UsageError("--norm sobolev needs --rho")
    return solve_auto(xa, xb, args.a, args.b, norm=args.norm, rho=rho)


def _open_or_stdout(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_connect(args):
    problem, solution = _solve_from_args(args)
    stream, close = _open_or_stdout(args.csv)
    try:
        write_csv(stream, problem, solution, args.samples_per_period)
    finally:
        if close:
            stream.close()
    if args.svg:
        with open(args.svg, "w", newline="") as svg_stream:
            write_svg(svg_stream, problem, solution, args.samples_per_period)
    traj = gluskabi_map(problem, solution)
    if problem.norm == "l2":
        cost = cost_l2(traj, problem.a, problem.b, problem.tau)
        print(f"staircase over {solution.n} whole periods, cost {_fmt(cost)}",
              file=sys.stderr)
    else:
        cost = cost_sobolev(traj, problem.a, problem.b, problem.tau, problem.rho)
        print(
            f"boundary-value connection over {solution.n} periods, cost {_fmt(cost)}, "
            f"max junction mismatch {_fmt(solution.junction_gap())}",
            file=sys.stderr,
        )
    return 0


def cmd_verify(args):
    problem, solution = _solve_from_args(args)
    if args.corrupt_scale != 1.0:
        if not isinstance(solution, PiecewiseRaccordation):
            raise _UsageError("--corrupt-scale only applies to the l2 staircase")
        solution = solution.with_profile_scaled(args.corrupt_scale)
    report = run_verification(
        problem, solution, args.oracle_m, log=lambda s: print(s, file=sys.stderr)
    )
    for line in report.lines():
        print(line)
    return 0 if report.ok else 3


DEMOS = {
    1: dict(xa="cos(period=1)", xb="triangle(period=1)", a=0.0, b=2.5, norm="l2",
            rho=None),
    2: dict(xa="cos(period=1)", xb="triangle(period=1)", a=0.0, b=4.0,
            norm="sobolev", rho=1.0),
    3: dict(xa=f"cos(period=1, phase={math.pi / 2!r})", xb="triangle(period=1)",
            a=0.0, b=6.0, norm="sobolev", rho=1.0),
    4: dict(xa=f"cos(period=1, phase={-math.pi / 2!r})", xb="triangle(period=1)",
            a=0.0, b=6.0, norm="sobolev", rho=1.0),
}


def cmd_demo(args):
    cfg = DEMOS.get(args.index)
    if cfg is None:
        raise _UsageError(f"demo index must be one of {sorted(DEMOS)}")
    xa = parse_waveform(cfg["xa"])
    xb = parse_waveform(cfg["xb"])
    problem, solution = solve_auto(
        xa, xb, cfg["a"], cfg["b"], norm=cfg["norm"], rho=cfg["rho"]
    )
    csv_path = args.csv or f"demo{args.index}.csv"
    svg_path = args.svg or f"demo{args.index}.svg"
    with open(csv_path, "w", newline="") as stream:
        write_csv(stream, problem, solution, args.samples_per_period)
    with open(svg_path, "w", newline="") as stream:
        write_svg(stream, problem, solution, args.samples_per_period)
    print(f"demo {args.index}: {cfg['xa']} -> {cfg['xb']} on "
          f"[{cfg['a']}, {cfg['b']}], norm {cfg['norm']}")
    print(f"wrote {csv_path} and {svg_path}")
    if cfg["norm"] == "l2":
        print("breakpoints (time, jump):")
        for t, j in breakpoints(solution):
            print(f"  {_fmt(t)},{_fmt(j)}")
    else:
        print(f"max junction mismatch: {_fmt(solution.junction_gap())}")
        ratio = pinch_ratio(problem, solution)
        flagged = ratio < PINCH_THRESHOLD
        print(
            f"pinch ratio: {ratio:.4f} -> "
            + ("FLAGGED" if flagged else "not flagged")
            + f" (threshold {PINCH_THRESHOLD})"
        )
    return 0


def cmd_breakpoints(args):
    problem, solution = _solve_from_args(args)
    if not isinstance(solution, PiecewiseRaccordation):
        raise _UsageError("breakpoints apply to the l2 staircase connection")
    print("time,jump")
    for t, j in breakpoints(solution):
        print(f"{_fmt(t)},{_fmt(j)}")
    return 0


def _add_problem_flags(sub, norm=True):
    sub.add_argument("--xa", required=True, help="left wave, e.g. 'cos(period=1)'")
    sub.add_argument("--xb", required=True, help="right wave, e.g. 'triangle(period=1)'")
    sub.add_argument("--a", required=True, type=_number, help="handover start")
    sub.add_argument("--b", required=True, type=_number, help="handover end")
    if norm:
        sub.add_argument("--norm", choices=("l2", "sobolev"), default="l2")
        sub.add_argument("--rho", type=_number, default=None,
                         help="slope weight for the sobolev norm")


def build_parser():
    parser = _ArgumentParser(
        prog="raccord",
        description="Connect two periodic waves with a maximally persistent "
        "trajectory.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("connect", help="solve and emit CSV/SVG samples")
    _add_problem_flags(c)
    c.add_argument("--samples-per-period", type=int, default=200)
    c.add_argument("--csv", default=None, help="CSV output path (default stdout)")
    c.add_argument("--svg", default=None, help="SVG output path (optional)")
    c.set_defaults(func=cmd_connect)

    v = subs.add_parser("verify", help="solve and run the invariant suite")
    _add_problem_flags(v)
    v.add_argument("--oracle-m", type=int, default=200,
                   help="oracle samples per period")
    v.add_argument("--corrupt-scale", type=_number, default=1.0,
                   help=argparse.SUPPRESS)  # test hook: spoil the staircase
    v.set_defaults(func=cmd_verify)

    d = subs.add_parser("demo", help="run a canned example (1-4)")
    d.add_argument("index", type=int)
    d.add_argument("--samples-per-period", type=int, default=200)
    d.add_argument("--csv", default=None)
    d.add_argument("--svg", default=None)
    d.set_defaults(func=cmd_demo)

    b = subs.add_parser("breakpoints", help="discontinuity table of the staircase")
    _add_problem_flags(b, norm=False)
    b.set_defaults(func=cmd_breakpoints)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "norm"):
            args.norm = "l2"
            args.rho = None
        return args.func(args)
    except (_UsageError, WaveformSyntaxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RaccordError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
