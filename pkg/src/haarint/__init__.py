"""Exact Haar-measure and random-matrix moment integration."""

from .algebra import (
    DimPoly,
    ExactScalar,
    LaurentSeries,
    RationalFunction,
    bareiss_solve,
    laurent_expand,
    ratfunc_eval,
    ratfunc_normalize,
)
from .asymptotics import TraceSeries, asymptotic
from .entrywise import Monomial, MonomialFactor, integrate_monomial
from .errors import (
    ArgumentError,
    DegenerateSpectrumError,
    DegreeGuardError,
    DesignOrderError,
    DimensionError,
    DispatchError,
    HaarIntError,
    InvalidInputError,
    MeasureError,
    NotRationalError,
    ParseError,
    PoleError,
    SingularSystemError,
    UnsupportedFormError,
)
from .expression import evaluate, expand, integrate, integrate_detailed, normalize, parse, render
from .hciz import hciz_eigen, hciz_formal, hciz_matrices, perturb_degenerate
from .measures import MeasureSpec, parse_measure
from .tracelogic import (
    TraceExpr,
    library_lookup,
    matrix_integrate,
    partial_trace,
    pure_trace_moment,
    purity,
    trace_integrate,
)
from .weingarten import clear_caches, wg_orthogonal, wg_symplectic, wg_unitary

__version__ = "0.1.0"
