"""Maximally persistent connections between periodic trajectories.

Build two periodic waves, pick a handover interval, and get the
trajectory that follows the first wave before it, the second after it,
and in between keeps the period defect as small as the chosen norm
allows.  Closed-form solvers are checked against an independent grid
oracle; a CLI (`raccord`) wraps the same operations.
"""

from .errors import (
    AlignmentError,
    ConditioningError,
    IntervalError,
    PeriodMismatchError,
    RaccordError,
    UnsupportedPeriodError,
    WaveformSyntaxError,
)
from .operators import (
    DefectSignal,
    Trajectory,
    composite,
    cost_l2,
    cost_sobolev,
    defect,
)
from .oracle import (
    DiscretizedProblem,
    SampledSolution,
    compare,
    discrete_cost,
    discretize,
    oracle_solve,
)
from .signals import (
    Cosine,
    FourierSeries,
    PeriodicTrajectory,
    RationalPeriod,
    RelabeledPeriodic,
    SampledWave,
    Square,
    Triangle,
    lcm_period,
)
from .solvers import (
    ContinuousRaccordation,
    PiecewiseRaccordation,
    RaccordationProblem,
    breakpoints,
    gluskabi_map,
    lift_periods,
    solve_auto,
    solve_continuous,
    solve_step,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ConditioningError",
    "ContinuousRaccordation",
    "Cosine",
    "DefectSignal",
    "DiscretizedProblem",
    "FourierSeries",
    "IntervalError",
    "PeriodMismatchError",
    "PeriodicTrajectory",
    "PiecewiseRaccordation",
    "RaccordError",
    "RaccordationProblem",
    "RationalPeriod",
    "RelabeledPeriodic",
    "SampledSolution",
    "SampledWave",
    "Square",
    "Trajectory",
    "Triangle",
    "UnsupportedPeriodError",
    "WaveformSyntaxError",
    "breakpoints",
    "compare",
    "composite",
    "cost_l2",
    "cost_sobolev",
    "defect",
    "discrete_cost",
    "discretize",
    "gluskabi_map",
    "lcm_period",
    "lift_periods",
    "oracle_solve",
    "solve_auto",
    "solve_continuous",
    "solve_step",
    "__version__",
]
