"""Spectral variational analysis toolkit.

Transfer formulas for projections, distances, normal cones, subdifferentials,
and orbit-hull majorization over eigenvalue / singular-value decomposition
systems, each paired with an independent brute-force numerical oracle.
"""

__version__ = "0.1.0"

from . import errors, invariants, majorize, oracle, systems, varcalc
from .systems import (
    Decomposition,
    GroupElement,
    eig_sym,
    parse_system,
    product_lift,
    signed_svd,
    svd_system,
    trivial_norm,
)

__all__ = [
    "__version__",
    "errors",
    "invariants",
    "majorize",
    "oracle",
    "systems",
    "varcalc",
    "Decomposition",
    "GroupElement",
    "eig_sym",
    "parse_system",
    "product_lift",
    "signed_svd",
    "svd_system",
    "trivial_norm",
]
