"""Desk-scale toolkit for prime gaps in Beatty and floor-function sequences."""

from .errors import (
    CacheIOError,
    CapExceeded,
    CapacityExceeded,
    FloorUncertified,
    InsufficientElements,
    InvalidCurvature,
    NotCoprime,
    NotMember,
    PrecisionExhausted,
    PrimegapsError,
    QTooLarge,
    QuadratureFailure,
    RangeError,
    ValidationFailed,
)
from .irrational import (
    Convergent,
    IrrationalSpec,
    NamedConstant,
    PartialQuotientIrrational,
    QuadraticSurd,
    cf_expand,
    convergents,
    estimate_type,
    floor_linear,
    frac_compare,
    parse_irrational,
    quadratic_from_cf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
