"""Reduced norms of matrices, the norm/determinant compatibility check and dimension reduction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadParameters,
    InternalConsistencyError,
    PrecisionExhausted,
    SingularAtPrecision,
    WPositiveViolation,
)
from .linalg import (
    DetNormalForm,
    LaurentEntry,
    SkewMatrix,
    det_from_reduction,
    entry_normal_form,
    laurent,
    reduce_full,
)
from .norms import CenterFraction, RRing, center_poly_degree, make_fraction, reduced_norm_entries, require_t_precision
from .series import SkewSeries, context, pi_left, skew_mul


@dataclass(frozen=True)
class NormReport:
    value: CenterFraction
    integral: bool
    galois_invariant: bool
    monic: bool | None = None

    def to_json(self) -> dict:
        return {"value": self.value.to_json(),
                "precision": {"p": self.value.prec_p, "t": self.value.prec_t},
                "checks": {"integral": self.integral, "galois_invariant": self.galois_invariant,
                           "monic": self.monic}}


def reduced_norm_center(A: SkewMatrix) -> CenterFraction:
    """nr(A) = det Phi(A) in Frac(O_k[[T]]); integrality is asserted for integral A."""
    if A.rows != A.cols:
        raise BadParameters("reduced norm needs a square matrix")
    nr = reduced_norm_entries(A.alg, A.M, A.entries)
    if A.is_integral() and not nr.is_integral():
        raise InternalConsistencyError("reduced norm of an integral matrix has a p-denominator")
    return nr


def norm_report(A: SkewMatrix) -> NormReport:
    nr = reduced_norm_center(A)
    return NormReport(nr, nr.is_integral(), nr.over_k)


def nr_of_normal_form(D: DetNormalForm, alg, M: int) -> CenterFraction:
    """p^v * u_nr * nr_F as a center fraction (u_nr carries the sign of nr(pi_D)^w)."""
    R = RRing(alg.tower, context(alg, M).m)
    num = D.u_nr if D.nr_F is None else R.mul(D.u_nr, D.nr_F)
    if D.v >= 0:
        num = R.scale(num, alg.tower.p ** D.v)
        return make_fraction(R, num, 0, D.prec + D.v, R.m)
    return make_fraction(R, num, -D.v, D.prec + D.v, R.m)


@dataclass(frozen=True)
class CompatReport:
    direct: CenterFraction
    via_det: CenterFraction
    det: DetNormalForm
    prec_p: int
    prec_t: int

    def to_json(self) -> dict:
        return {"direct": self.direct.to_json(), "via_det": self.via_det.to_json(),
                "precision": {"p": self.prec_p, "t": self.prec_t}, "agree": True}


def nr_det_compat(A: SkewMatrix, det: DetNormalForm | None = None) -> CompatReport:
    """Check nr(A) = nr(det A) along both routes; raises on disagreement."""
    direct = reduced_norm_center(A)
    if det is None:
        det = det_from_reduction(reduce_full(A))
    via = nr_of_normal_form(det, A.alg, A.M)
    pp = min(direct.prec_p, via.prec_p)
    pt = min(direct.prec_t, via.prec_t)
    if pp < 1:
        raise PrecisionExhausted("no common p-adic precision for the compatibility check")
    if not direct.same_value(via, pp, pt):
        raise InternalConsistencyError("reduced norm and determinant norm disagree")
    return CompatReport(direct, via, det, pp, pt)


@dataclass(frozen=True)
class DimensionReduction:
    C: SkewMatrix
    exponent: int  # net pi_D-exponent W of det A
    w: Fraction  # -W / (m n)
    det_A: DetNormalForm
    det_C: DetNormalForm
    nr_A: CenterFraction
    nr_C: CenterFraction

    def to_json(self) -> dict:
        return {"C": self.C.to_json(), "w": str(self.w), "exponent": self.exponent,
                "det_A": self.det_A.to_json(), "det_C": self.det_C.to_json(),
                "nr": self.nr_A.to_json(),
                "checks": {"integral": self.C.is_integral(), "w_nonpositive": self.w <= 0,
                           "det_agree": True, "nr_agree": True}}


def dimension_reduce(A: SkewMatrix, n: int) -> DimensionReduction:
    """Replace an invertible mn x mn integral matrix by an n x n one with the same determinant."""
    if A.rows != A.cols or n < 1 or A.rows % n:
        raise BadParameters("matrix size must be a multiple of the block size")
    if not A.is_integral():
        raise BadParameters("dimension reduction needs an integral matrix")
    alg, M = A.alg, A.M
    red = reduce_full(A)
    det_A = det_from_reduction(red)
    # pi_D^W body may still be integral when W < 0 (d > 1, body divisible by pi_D)
    top = laurent(-det_A.w, _representative(red, det_A))
    W = top.valuation()
    w = Fraction(-W, A.rows)
    if top.a:
        raise WPositiveViolation(f"det A has no integral representative at pi_D-exponent {-top.a}")
    one = laurent(0, SkewSeries.one(alg, M))
    C = SkewMatrix.diagonal([top] + [one] * (n - 1))
    det_C = entry_normal_form(top)
    if not det_A.agrees(det_C):
        raise InternalConsistencyError("determinant normal forms of A and C differ")
    nr_A = nr_det_compat(A, det_A).direct
    nr_C = nr_det_compat(C, det_C).direct
    if not nr_A.same_value(nr_C, min(nr_A.prec_p, nr_C.prec_p, det_A.prec, det_C.prec), min(nr_A.prec_t, nr_C.prec_t)):
        raise InternalConsistencyError("reduced norms of A and C differ")
    return DimensionReduction(C, W, w, det_A, det_C, nr_A, nr_C)


def _representative(red, det: DetNormalForm) -> SkewSeries:
    """Integral element eps F, or the plain product of the content-free factors."""
    alg, M = red.B.alg, red.B.M
    if det.eps is not None and det.F is not None:
        return skew_mul(det.eps, det.F.as_series(M))
    out = SkewSeries.one(alg, M)
    for g in list(red.units) + [part[1] for part in red.diag_parts]:
        out = skew_mul(out, g)
    return -out if red.sign < 0 else out


@dataclass(frozen=True)
class MonicReport:
    value: CenterFraction
    degree: int
    expected_degree: int
    monic: bool

    def to_json(self) -> dict:
        return NormReport(self.value, self.value.is_integral(), self.value.over_k, self.monic).to_json() | {
            "degree": self.degree, "expected_degree": self.expected_degree}


def monic_norm_check(G: SkewSeries) -> MonicReport:
    """nr of a monic integral G of degree e should be monic of T-degree s*e."""
    alg = G.alg
    e = G.degree()
    if e < 0 or G.c[e] != alg.rone:
        raise BadParameters("G must be monic")
    m = context(alg, G.M).m
    require_t_precision(m, alg.s * e)
    nr = reduced_norm_entries(alg, G.M, [[laurent(0, G)]])
    R = RRing(alg.tower, m)
    deg = center_poly_degree(R, nr.numerator)
    lead = nr.numerator[deg] if deg >= 0 else None
    monic = nr.is_integral() and deg == alg.s * e and lead == R.scalar(alg.tower.one().c)[0]
    return MonicReport(nr, deg, alg.s * e, monic)
