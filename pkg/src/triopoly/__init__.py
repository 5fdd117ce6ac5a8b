"""Certified chaos detection for a heterogeneous triopoly market map."""

from .boxes import Box, HalfBoxes, InvalidBoxError, OrientedBox
from .certificate import Certificate, certify_box
from .core import (
    DomainError,
    Params,
    State,
    boundary_fixed_point,
    eval_jacobian,
    eval_map,
    eval_map_xyz,
    fixed_point_residual,
    fixed_points,
    interior_fixed_point,
)
from .presets import PAPER_BOX, PAPER_PARAMS, get_preset
from .search import NearMiss, SearchResult, search_boxes

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Certificate",
    "HalfBoxes",
    "InvalidBoxError",
    "OrientedBox",
    "certify_box",
    "DomainError",
    "Params",
    "State",
    "boundary_fixed_point",
    "eval_jacobian",
    "eval_map",
    "eval_map_xyz",
    "fixed_point_residual",
    "fixed_points",
    "interior_fixed_point",
    "PAPER_BOX",
    "PAPER_PARAMS",
    "get_preset",
    "NearMiss",
    "SearchResult",
    "search_boxes",
    "__version__",
]
