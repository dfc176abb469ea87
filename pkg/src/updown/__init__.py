"""Updown categories: exact up/down operator algebra on ranked combinatorial families."""

from .core import (CoveringRecord, FormalVector, LevelData, ObjectKey, RankedStructure,
                   build_truncation, down_apply, extended_multiplicity, inner_product,
                   product_structure, up_apply, verify_structure)
from .examples import make_generator

__all__ = [
    "CoveringRecord", "FormalVector", "LevelData", "ObjectKey", "RankedStructure",
    "build_truncation", "down_apply", "extended_multiplicity", "inner_product",
    "make_generator", "product_structure", "up_apply", "verify_structure",
]
