"""Exact rational homotopy computations: Sullivan models, KS-extensions and invariants."""

from .algebra import CDGA, Element, FreeGCA, Generator, check_d_squared
from .cohomology import DGMorphism, cohomology, is_quasi_iso, solve_exact
from .derivations import derivation_space, meier_verdict
from .elliptic import (
    Presentation,
    PureModel,
    check_hplus_zero,
    euler_report,
    pure_model_from_presentation,
    regularity_certificate,
)
from .errors import (
    CapError,
    ChainMapViolation,
    DomainMismatch,
    GradingUnavailable,
    IncompleteContext,
    NotMaximalSequence,
    NotRegular,
    ParseError,
    PreconditionError,
    SullivanError,
    TheoryViolation,
)
from .fibration import (
    BasisChange,
    KSExtension,
    change_basis,
    check_pure,
    check_tncz,
    filtered_normalize,
    formality_certificate_of_total,
    normalize_over_odd_sphere,
    product_extension,
    pushout,
    trivialize_over_odd_wedge,
    validate,
)
from .invariants import (
    InvariantReport,
    check_fibration_inequalities,
    cl0_upper_via_acyclic_quotient,
    cup_length,
    make_report,
    nil0,
    toomer,
)
from .io import ModelDocument, load, parse, serialize

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
