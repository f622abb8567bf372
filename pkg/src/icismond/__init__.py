"""Exact local algebra for map germs on isolated complete intersections.

The top level re-exports the pieces most callers need; the submodules hold
the rest (``engine`` for standard bases, ``germ`` for the pipeline stages).
"""

from .errors import (ContainmentError, IcisError, IdentityFailure,
                     InconsistencyError, ParseError, ResourceError,
                     RingMismatchError, ValidationError)
from .germ import GermSpec, UnfoldingSpec
from .ideals import Ideal, QuotientDimension
from .orderings import MonomialOrdering
from .report import InvariantReport, Options, load_germ, run_corpus, run_report
from .ring import Polynomial, RingSpec

__version__ = "0.1.0"

__all__ = [
    "ContainmentError", "GermSpec", "IcisError", "Ideal", "IdentityFailure",
    "InconsistencyError", "InvariantReport", "MonomialOrdering", "Options",
    "ParseError", "Polynomial", "QuotientDimension", "ResourceError",
    "RingMismatchError", "RingSpec", "UnfoldingSpec", "ValidationError",
    "load_germ", "run_corpus", "run_report",
]
