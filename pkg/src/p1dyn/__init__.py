"""Arithmetic dynamics of quadratic rational maps on P^1 over Q.

Exact arithmetic throughout: valuations and S-units, binary forms and
resultants, points and Moebius maps, periodic points and cycles, good
reduction, the quadratic normal form, explicit families, and a census.
"""
from .arith import PlaceSet, SIdeal, factor, is_s_unit, outside_s_part, vp
from .dynamics import (
    Cycle,
    RationalMap,
    apply_map,
    conjugacy_via_cycles,
    conjugate_map,
    make_map,
    orbit,
    periodic_points,
    power_map,
    rational_cycles,
)
from .errors import (
    DegenerateMapError,
    DomainError,
    InfiniteDistanceError,
    ResourceError,
    UndefinedValuationError,
    UnsupportedLengthError,
)
from .forms import BinaryForm, resultant
from .proj import Mobius, ProjPoint, apply_mobius, normalize, point
from .reduction import reduction_report, to_normal_form, vp_disc

__version__ = "0.1.0"
