"""The embedding Phi of the skew fraction field into matrices over O_M[T], and reduced norms.

Elements of R = O_M[T]/(p^N, T^m) are tuples of m coefficient vectors.  For a
series f = sum_r c_r(T) Y^r (Y = 1+X) the image Phi(f) has d x d blocks of size
s; block (l, l+r mod d) is phi(tau^l c_r(T)), times (1+T) when l + r >= d.
pi_D-denominators are cleared with Phi(pi_D)^-1 = Phi(pi_D^(s-1)) / p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .commalg import berkowitz
from .cyclic import AlgebraDescriptor
from .errors import BadParameters, NotGaloisInvariant, PrecisionExhausted
from .series import SkewSeries, _kron_multi, context
from .tower import TowerElement, _vadd, _vmul, _vscale, _vsub, _vval

# --- arithmetic in R = O_M[T]/(p^N, T^m) -------------------------------------------


class RRing:
    """Helpers for truncated power series over O_M with T-precision m."""

    def __init__(self, tower, m: int):
        self.tower = tower
        self.m = m
        self.f = tower.f_M
        self.mod = tower.mod
        z = (0,) * self.f
        self.zvec = z
        self.zero = (z,) * m
        self.one = (tower.one().c,) + (z,) * (m - 1)

    def scalar(self, v) -> tuple:
        return (tuple(v),) + (self.zvec,) * (self.m - 1)

    def from_int(self, n: int) -> tuple:
        return self.scalar(_vscale(self.tower.one().c, n, self.mod))

    def add(self, a, b):
        mod = self.mod
        return tuple(_vadd(x, y, mod) for x, y in zip(a, b))

    def sub(self, a, b):
        mod = self.mod
        return tuple(_vsub(x, y, mod) for x, y in zip(a, b))

    def neg(self, a):
        mod = self.mod
        return tuple(tuple((-v) % mod for v in x) for x in a)

    def scale(self, a, n: int):
        mod = self.mod
        return tuple(_vscale(x, n, mod) for x in a)

    def mul(self, a, b):
        if not self.nonzero(a) or not self.nonzero(b):
            return self.zero
        return tuple(_kron_multi(a, [b], self.m, self.tower)[0])

    def mul_many(self, a, bs):
        return [tuple(r) for r in _kron_multi(a, list(bs), self.m, self.tower)]

    def shift(self, a, k: int = 1):
        """T^k a."""
        return (self.zvec,) * k + tuple(a[: self.m - k])

    def one_plus_t(self, a):
        return self.add(a, self.shift(a))

    def nonzero(self, a) -> bool:
        return any(any(x) for x in a)

    def is_unit(self, a) -> bool:
        p = self.tower.p
        return any(v % p for v in a[0])

    def frob(self, a, k: int):
        t = self.tower
        return tuple(t.frob_vec(x, k) for x in a)

    def inv(self, a):
        """Inverse of a unit: invert the constant term, then Newton in T."""
        t = self.tower
        c0 = t._unit_inverse_vec(a[0])
        y = self.scalar(c0)
        two = self.from_int(2)
        prec = 1
        while prec < self.m:
            y = self.mul(y, self.sub(two, self.mul(a, y)))
            prec *= 2
        return y

    def val_p(self, a) -> int:
        """Least p-adic valuation over the coefficients (N for zero)."""
        t = self.tower
        return min((_vval(x, t.p, t.N) for x in a if any(x)), default=t.N)

    def div_p(self, a, k: int):
        pk = self.tower.p ** k
        return tuple(tuple(v // pk for v in x) for x in a)


class _RElem:
    """Adaptor so that commalg.berkowitz can run over R."""

    __slots__ = ("R", "v")

    def __init__(self, R: RRing, v):
        self.R = R
        self.v = v

    def __add__(self, o):
        return _RElem(self.R, self.R.add(self.v, o.v))

    def __sub__(self, o):
        return _RElem(self.R, self.R.sub(self.v, o.v))

    def __neg__(self):
        return _RElem(self.R, self.R.neg(self.v))

    def __mul__(self, o):
        return _RElem(self.R, self.R.mul(self.v, o.v))


def det_local(R: RRing, A: list):
    """Determinant over the local ring R: unit-pivot elimination, Berkowitz on the rest."""
    A = [list(row) for row in A]
    n = len(A)
    det = R.one
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if R.is_unit(A[i][k])), None)
        if piv is None:
            block = [[_RElem(R, x) for x in row[k:]] for row in A[k:]]
            size = n - k
            c = berkowitz(block, _RElem(R, R.one), _RElem(R, R.zero))[-1].v
            if size % 2:
                c = R.neg(c)
            det = R.mul(det, c)
            break
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        pv = A[k][k]
        det = R.mul(det, pv)
        inv = R.inv(pv)
        row_k = A[k]
        for i in range(k + 1, n):
            if not R.nonzero(A[i][k]):
                continue
            factor = R.mul(A[i][k], inv)
            prods = R.mul_many(factor, row_k[k + 1:])
            A[i] = A[i][: k + 1] + [R.sub(x, y) for x, y in zip(A[i][k + 1:], prods)]
            A[i][k] = R.zero
    return det if sign == 1 else R.neg(det)


# --- center fractions ----------------------------------------------------------


@dataclass(frozen=True)
class CenterFraction:
    """numerator / (p^p_denom T^t_denom) with numerator in O_M[T] (tagged when in O_k[T]).

    ``prec_p`` and ``prec_t`` are the guaranteed absolute p- and T-precisions
    of the value: it is known modulo (p^prec_p, T^prec_t).
    """

    tower: object = field(repr=False)
    numerator: tuple
    p_denom: int = 0
    t_denom: int = 0
    prec_p: int = 0
    prec_t: int = 0
    over_k: bool = False

    @property
    def m(self) -> int:
        return len(self.numerator)

    def is_integral(self) -> bool:
        return self.p_denom <= 0 and self.t_denom <= 0

    def coefficient(self, j: int) -> TowerElement:
        return TowerElement(self.tower, self.numerator[j], self.p_denom)

    def coefficients(self) -> list:
        return [self.coefficient(j) for j in range(self.m)]

    def truncated(self, prec_p: int, prec_t: int) -> "CenterFraction":
        """Same value reduced to lower absolute precision (for comparisons)."""
        prec_p = min(prec_p, self.prec_p)
        prec_t = min(prec_t, self.prec_t)
        mod = self.tower.p ** max(prec_p + self.p_denom, 0)
        num = tuple(tuple(v % mod for v in x) if j < prec_t else (0,) * len(x)
                    for j, x in enumerate(self.numerator))
        return CenterFraction(self.tower, num, self.p_denom, self.t_denom, prec_p, prec_t, self.over_k)

    def same_value(self, other: "CenterFraction", prec_p: int | None = None, prec_t: int | None = None) -> bool:
        pp = min(self.prec_p, other.prec_p) if prec_p is None else prec_p
        pt = min(self.prec_t, other.prec_t) if prec_t is None else prec_t
        if self.t_denom != other.t_denom:
            return False
        e = max(self.p_denom, other.p_denom)
        mod = self.tower.p ** max(pp + e, 0)
        p = self.tower.p
        for j in range(pt):
            a = self.numerator[j] if j < self.m else (0,) * self.tower.f_M
            b = other.numerator[j] if j < other.m else (0,) * self.tower.f_M
            sa, sb = p ** (e - self.p_denom), p ** (e - other.p_denom)
            if any((x * sa - y * sb) % mod for x, y in zip(a, b)):
                return False
        return True

    def to_json(self) -> dict:
        coeffs = [TowerElement(self.tower, x, 0, False).to_json() for x in self.numerator[: self.prec_t]]
        return {"numerator": {"prec_t": self.prec_t, "coeffs": coeffs},
                "p_denom": self.p_denom, "t_denom": self.t_denom, "prec_p": self.prec_p,
                "field": "O_k" if self.over_k else "O_M"}

    def __repr__(self):
        terms = [f"({TowerElement(self.tower, x, 0, False)!r})*T^{j}" for j, x in enumerate(self.numerator) if any(x)]
        body = " + ".join(terms) or "0"
        return f"[{body}] / p^{self.p_denom}" if self.p_denom else body


def center_fraction_from_json(tower, data: dict) -> CenterFraction:
    num = data["numerator"]
    coeffs = tuple(tuple(int(v) for v in c["coeffs"]) for c in num["coeffs"])
    return CenterFraction(tower, coeffs, data["p_denom"], data["t_denom"], data["prec_p"],
                          num["prec_t"], data["field"] == "O_k")


def make_fraction(R: RRing, num: tuple, p_denom: int, prec_p: int, prec_t: int) -> CenterFraction:
    """Canonical form: strip common p-factors from the numerator into p_denom."""
    tower = R.tower
    if R.nonzero(num) and p_denom > 0:
        k = min(R.val_p(num), p_denom)
        if k:
            num = R.div_p(num, k)
            p_denom -= k
    over_k = all(tower.frob_vec(x, tower.f_k) == x for x in num)
    return CenterFraction(tower, tuple(num), p_denom, 0, prec_p, prec_t, over_k)


# --- the embedding Phi -------------------------------------------------------------


def _phi_d_series(alg: AlgebraDescriptor, R: RRing, coeffs: Sequence[tuple]) -> list:
    """phi(sum_j c_j T^j) for raw D coefficients c_j: an s x s grid over R."""
    s, t = alg.s, alg.tower
    p, mod = t.p, t.mod
    m = R.m
    grid = [[None] * s for _ in range(s)]
    for k in range(s):
        for i in range(s):
            l = k + i
            factor = 1
            if l >= s:
                l -= s
                factor = p
            col = []
            for j in range(m):
                z = coeffs[j][i]
                if any(z):
                    z = alg.sigma_vec(z, k)
                    if factor != 1:
                        z = _vscale(z, factor, mod)
                col.append(z)
            grid[k][l] = tuple(col)
    return grid


def phi_series(g: SkewSeries, R: RRing | None = None) -> list:
    """Phi(g) for an integral series: a (d s) x (d s) grid over R."""
    alg = g.alg
    d, s = alg.d, alg.s
    ctx = context(alg, g.M)
    m = ctx.m
    if R is None:
        R = RRing(alg.tower, m)
    parts = [list(g.c)] if d == 1 else ctx.to_ty(g.c)
    n = d * s
    out = [[R.zero] * n for _ in range(n)]
    for l in range(d):
        for r in range(d):
            part = parts[r]
            if not any(any(any(z) for z in x) for x in part):
                continue
            twisted = part if l == 0 else [alg.rtau_pow(x, l) for x in part]
            block = _phi_d_series(alg, R, twisted)
            col_block = l + r
            wrap = col_block >= d
            col_block %= d
            for a in range(s):
                for b in range(s):
                    v = block[a][b]
                    if wrap:
                        v = R.one_plus_t(v)
                    out[l * s + a][col_block * s + b] = v
    return out


def phi_entry(a: int, g: SkewSeries, R: RRing):
    """Phi(pi_D^-a g) = Phi(pi_D^(s k - a) g) / p^k; returns (grid, k)."""
    alg = g.alg
    if a <= 0:
        if a < 0:
            g = SkewSeries(alg, g.M, [alg.rmul_pi_left(x, -a) for x in g.c])
        return phi_series(g, R), 0
    s = alg.s
    k = -(-a // s)
    shift = s * k - a
    if shift:
        g = SkewSeries(alg, g.M, [alg.rmul_pi_left(x, shift) for x in g.c])
    return phi_series(g, R), k


def phi_big(entry, R: RRing | None = None):
    """Phi of a LaurentEntry (or integral series): (grid over R, p-denominator exponent)."""
    if isinstance(entry, SkewSeries):
        g, a = entry, 0
    else:
        g, a = entry.g, entry.a
    if R is None:
        R = RRing(g.alg.tower, context(g.alg, g.M).m)
    return phi_entry(a, g, R)


def phi_y(alg: AlgebraDescriptor, R: RRing) -> list:
    """Phi(1+X): identity blocks on the superdiagonal, (1+T) 1_s in the corner."""
    d, s = alg.d, alg.s
    n = d * s
    out = [[R.zero] * n for _ in range(n)]
    for l in range(d):
        nxt = (l + 1) % d
        val = R.one if l + 1 < d else R.one_plus_t(R.one)
        for a in range(s):
            out[l * s + a][nxt * s + a] = val
    return out


# --- reduced norms ------------------------------------------------------------------


def _check_invariant(tower, num) -> None:
    fk = tower.f_k
    for x in num:
        if tower.frob_vec(x, fk) != x:
            raise NotGaloisInvariant("reduced norm has a coefficient outside O_k")


def reduced_norm_entries(alg: AlgebraDescriptor, M: int, entries: Sequence[Sequence], prec_p: int | None = None,
                         check: bool = True) -> CenterFraction:
    """det Phi of a square grid of LaurentEntry values, as a center fraction."""
    n = len(entries)
    m = context(alg, M).m
    R = RRing(alg.tower, m)
    ds = alg.d * alg.s
    big = [[None] * (n * ds) for _ in range(n * ds)]
    total_k = 0
    for i, row in enumerate(entries):
        if len(row) != n:
            raise BadParameters("reduced norm needs a square matrix")
        ks = []
        grids = []
        for e in row:
            grid, k = phi_big(e, R)
            ks.append(k)
            grids.append(grid)
        kmax = max(ks)
        total_k += kmax
        for j, (grid, k) in enumerate(zip(grids, ks)):
            scale = alg.tower.p ** (kmax - k)
            for a in range(ds):
                for b in range(ds):
                    v = grid[a][b]
                    big[i * ds + a][j * ds + b] = R.scale(v, scale) if scale != 1 else v
    det = det_local(R, big)
    if check:
        _check_invariant(alg.tower, det)
    p_denom = total_k * ds
    N = alg.tower.N if prec_p is None else prec_p
    return make_fraction(R, det, p_denom, N - p_denom, m)


def series_norm(g: SkewSeries, check: bool = True) -> tuple:
    """nr(g) in R for an integral series (raw tuple)."""
    R = RRing(g.alg.tower, context(g.alg, g.M).m)
    det = det_local(R, phi_series(g, R))
    if check:
        _check_invariant(g.alg.tower, det)
    return det


def nr_pi(alg: AlgebraDescriptor) -> int:
    """nr(pi_D) = ((-1)^(s-1) p)^d as an integer."""
    return ((-1) ** (alg.s - 1) * alg.tower.p) ** alg.d


def center_poly_degree(R: RRing, num) -> int:
    for j in range(R.m - 1, -1, -1):
        if any(num[j]):
            return j
    return -1


def require_t_precision(m: int, needed: int):
    if m <= needed:
        raise PrecisionExhausted(f"T-precision {m} must exceed {needed}")
