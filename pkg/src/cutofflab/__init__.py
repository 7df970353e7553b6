"""Exact-arithmetic testbed for interpolator aggregation in realizable
regression under the cutoff loss."""

from .core import (
    Atom,
    CantorClass,
    CantorHypothesis,
    FiniteClass,
    FiniteDistribution,
    LabeledExample,
    Point,
    Rational,
    SplitCantorClass,
    SplitCantorHypothesis,
    TableHypothesis,
    cutoff_loss,
    empirical_cutoff_loss,
    evaluate,
    is_realizable,
    sample_iid,
)
from .errors import (
    BudgetExceededError,
    CutoffLabError,
    DomainMismatchError,
    EmptySampleError,
    NotRealizableError,
    ParseError,
    PreconditionError,
)

__version__ = "0.1.0"
