"""Sparse resultants, their matrix formulas and their Newton polytopes."""
from .arith import GF, QQ, Field, MultiPoly
from .canny_emiris import build_ce_matrices, ce_pair, resultant_ce
from .elimination import essential_families, restrict_to, sparse_resultant
from .errors import HypothesisFailure, SparseResError
from .family import SupportFamily
from .geometry import Polytope, convex_hull, lattice_points, mixed_volume
from .interp import interpolate, sample_on_resultant
from .koszul import det_complex, koszul_complex
from .respoly import compute_pi, lift_to_full, preprocess_specialized
from .subdivision import mixed_subdivision, regular_subdivision

__version__ = "0.1.0"

__all__ = [
    "Field", "GF", "QQ", "MultiPoly", "SupportFamily", "Polytope",
    "HypothesisFailure", "SparseResError",
    "build_ce_matrices", "ce_pair", "resultant_ce",
    "essential_families", "restrict_to", "sparse_resultant",
    "convex_hull", "lattice_points", "mixed_volume",
    "interpolate", "sample_on_resultant",
    "det_complex", "koszul_complex",
    "compute_pi", "lift_to_full", "preprocess_specialized",
    "mixed_subdivision", "regular_subdivision",
]
