"""Exact arithmetic in skew power series rings over p-adic division algebras.

Submodules: ``tower`` (unramified towers), ``cyclic`` (the division algebra
and its automorphism), ``series`` (skew series and Weierstrass theory),
``norms`` (the embedding Phi and reduced norms), ``linalg`` (matrices and
Dieudonne determinants), ``reduction`` (norm checks and dimension reduction)
and ``cli``.
"""

from .cyclic import AlgebraDescriptor, DElement, extend_tau, make_algebra
from .linalg import DetNormalForm, LaurentEntry, SkewMatrix, dieudonne_det, diagonal_reduce
from .reduction import dimension_reduce, monic_norm_check, nr_det_compat, reduced_norm_center
from .series import DistinguishedPoly, SkewSeries, skew_mul, weierstrass_divide, weierstrass_prepare
from .tower import TowerDescriptor, TowerElement, make_tower

__all__ = [
    "AlgebraDescriptor", "DElement", "DetNormalForm", "DistinguishedPoly", "LaurentEntry", "SkewMatrix",
    "SkewSeries", "TowerDescriptor", "TowerElement", "diagonal_reduce", "dieudonne_det", "dimension_reduce",
    "extend_tau", "make_algebra", "make_tower", "monic_norm_check", "nr_det_compat", "reduced_norm_center",
    "skew_mul", "weierstrass_divide", "weierstrass_prepare",
]
