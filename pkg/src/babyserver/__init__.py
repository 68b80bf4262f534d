"""Exact experiments on the two-server problem over three points on a line.

Points A, B, C sit at 0, 1 and 1 + d with d > 1; two servers start on A
and C.  The package simulates online algorithms on request sequences,
computes offline optima, builds worst orderings and evaluates several
quality measures, all in exact rational arithmetic.
"""

from .algorithms import (
    BAL,
    DC,
    DUMMY,
    GREEDY,
    LDC,
    OPT,
    AlgorithmSpec,
    a_dc,
    a_ldc,
    lazy,
    opt_cost,
    run,
    spec_from_name,
)
from .core import (
    CostReport,
    Move,
    Point,
    ProblemParams,
    RequestMultiset,
    format_rational,
    parse_rational,
    parse_sequence,
)
from .enumeration import BudgetExceeded, EnumerationBudget

__version__ = "0.1.0"

__all__ = [
    "BAL", "DC", "DUMMY", "GREEDY", "LDC", "OPT",
    "AlgorithmSpec", "a_dc", "a_ldc", "lazy", "opt_cost", "run", "spec_from_name",
    "CostReport", "Move", "Point", "ProblemParams", "RequestMultiset",
    "format_rational", "parse_rational", "parse_sequence",
    "BudgetExceeded", "EnumerationBudget",
    "__version__",
]
