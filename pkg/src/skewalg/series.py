"""Truncated skew power series over O_D with X r = tau(r) X + delta(r), delta = tau - id.

A :class:`SkewSeries` of X-precision M is an element of the finite ring
O/(p^N, T^m) with T = (1+X)^d - 1 central and m = M/d, stored as the unique
representative sum_{i<M} a_i X^i (coefficients on the left).  For d = 1 this
is plain truncation mod X^M.

Products are computed in the basis T^j Y^r (Y = 1+X, r < d), where Y b = tau(b) Y
and Y^d = 1+T; there the product is d^2 ordinary convolutions in T, evaluated
by Kronecker substitution.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .cyclic import AlgebraDescriptor, DElement, d_element_from_json
from .errors import BadParameters, InfiniteReducedOrder, NoConvergence, NotUnit
from .tower import TowerElement, element_from_json

INFINITE = math.inf


# --- Kronecker convolution of M-coefficient sequences -----------------------

def _pack_words(values: list, words: int) -> bytes:
    if words == 1:
        return array("Q", values).tobytes()
    mask = (1 << 64) - 1
    out = array("Q", bytes(16 * len(values)))
    out[0::2] = array("Q", [v & mask for v in values])
    out[1::2] = array("Q", [v >> 64 for v in values])
    return out.tobytes()


def _unpack_words(raw: bytes, words: int) -> list:
    arr = array("Q")
    arr.frombytes(raw)
    if words == 1:
        return arr.tolist()
    lo, hi = arr[0::2].tolist(), arr[1::2].tolist()
    return [a | (b << 64) for a, b in zip(lo, hi)]


def _kron_multi(A: Sequence[tuple], Bs: Sequence[Sequence[tuple]], n: int, tower,
                reduce: bool = True) -> list:
    """First n terms of A * B for every B in Bs (sequences of O_M vectors).

    With ``reduce=False`` the terms are returned as unreduced integer lists of
    length 2 f_M - 1 (polynomials in t of degree < 2 f_M - 1).

    All products come out of one integer multiplication: the B's are packed
    side by side with enough zero padding that their products do not overlap.
    """
    f, mod, red = tower.f_M, tower.mod, tower.red
    la = min(len(A), n)
    zero = (0,) * f
    lb = max((min(len(B), n) for B in Bs), default=0)
    if la == 0 or lb == 0:
        return [[zero] * n for _ in Bs]
    S = 2 * f - 1
    L = la + lb - 1  # stride between products, in series terms
    bits = 2 * mod.bit_length() + (min(la, lb) * f).bit_length() + 1
    words = -(-bits // 64)
    if words > 2:
        raise BadParameters("p-adic precision too large for the packed product")
    pad = [0] * (f - 1)

    vals = []
    for v in A[:la]:
        vals.extend(v)
        vals.extend(pad)
    a_int = int.from_bytes(_pack_words(vals, words), "little")
    vals = []
    blank = [0] * S
    for B in Bs:
        k = min(len(B), n)
        for v in B[:k]:
            vals.extend(v)
            vals.extend(pad)
        vals.extend(blank * (L - k))
    prod = a_int * int.from_bytes(_pack_words(vals, words), "little")
    total = (len(Bs) * L + la + 1) * S
    slots = _unpack_words(prod.to_bytes(total * 8 * words, "little"), words)
    nout = min(n, L)
    results = []
    for idx in range(len(Bs)):
        out = []
        if not reduce:
            for k in range(nout):
                base = (idx * L + k) * S
                out.append(slots[base:base + S])
            out.extend([[0] * S] * (n - nout))
            results.append(out)
            continue
        for k in range(nout):
            base = (idx * L + k) * S
            if f > 1:
                acc = slots[base:base + f]
                for j in range(f, S):
                    c = slots[base + j]
                    if c:
                        for i, r in enumerate(red[j - f]):
                            acc[i] += c * r
                out.append(tuple(v % mod for v in acc))
            else:
                out.append((slots[base] % mod,))
        out.extend([zero] * (n - nout))
        results.append(out)
    return results


def _dconv_multi(alg: AlgebraDescriptor, A: Sequence[tuple], Bs: Sequence[Sequence[tuple]], n: int) -> list:
    """First n terms of A * B for every B in Bs (sequences of raw D elements)."""
    s = alg.s
    t = alg.tower
    f, mod, p, red = t.f_M, t.mod, t.p, t.red
    if s == 1:
        res = _kron_multi([a[0] for a in A], [[b[0] for b in B] for B in Bs], n, t)
        return [[(v,) for v in r] for r in res]
    S = 2 * f - 1
    acc = [[[[0] * S for _ in range(n)] for _ in range(s)] for _ in Bs]
    for u in range(s):
        comp_a = [a[u] for a in A]
        if not any(any(z) for z in comp_a):
            continue
        blocks = []
        targets = []
        for bi, B in enumerate(Bs):
            for v in range(s):
                comp_b = [b[v] for b in B]
                if not any(any(z) for z in comp_b):
                    continue
                if u:
                    comp_b = [alg.sigma_vec(z, u) if any(z) else z for z in comp_b]
                blocks.append(comp_b)
                targets.append((bi, v))
        if not blocks:
            continue
        for (bi, v), prod in zip(targets, _kron_multi(comp_a, blocks, n, t, reduce=False)):
            w = u + v
            factor = 1
            if w >= s:
                w -= s
                factor = p
            target = acc[bi][w]
            for k, vec in enumerate(prod):
                row = target[k]
                for i, c in enumerate(vec):
                    if c:
                        row[i] += factor * c
    out = []
    for a in acc:
        series = []
        for k in range(n):
            terms = []
            for u in range(s):
                vals = a[u][k]
                red_vals = vals[:f]
                for j in range(f, S):
                    c = vals[j]
                    if c:
                        for i, r in enumerate(red[j - f]):
                            red_vals[i] += c * r
                terms.append(tuple(v % mod for v in red_vals))
            series.append(tuple(terms))
        out.append(series)
    return out


def _dconv(alg: AlgebraDescriptor, A: Sequence[tuple], B: Sequence[tuple], n: int) -> list:
    """First n terms of the convolution of two sequences of raw D elements."""
    return _dconv_multi(alg, A, [B], n)[0]


# --- precision context -------------------------------------------------------

class _Ctx:
    """Conversion tables for the quotient O/(p^N, T^m) of X-precision M."""

    def __init__(self, alg: AlgebraDescriptor, M: int):
        d = alg.d
        if M < 1 or M % d:
            raise BadParameters(f"X-precision {M} must be a positive multiple of d = {d}")
        self.alg = alg
        self.M = M
        self.m = M // d
        self.d = d
        mod = alg.tower.mod
        self.mod = mod
        if d > 1:
            self.x_to_ty, self.ty_to_x = self._conversion_tables()
        self._p_table = None
        self._t_power = None

    def _conversion_tables(self):
        d, m, M, mod = self.d, self.m, self.M, self.mod
        # X^i = (Y - 1)^i, Y^k = (1+T)^(k div d) Y^(k mod d)
        x_to_ty = [[] for _ in range(M)]  # target index r*m + j -> [(i, c)]
        cols = {}
        for i in range(M):
            for k in range(i + 1):
                cy = comb(i, k) * (-1) ** (i - k)
                a, r = divmod(k, d)
                for j in range(a + 1):
                    key = (r * m + j, i)
                    cols[key] = cols.get(key, 0) + cy * comb(a, j)
        for (tgt, i), c in cols.items():
            if c % mod:
                x_to_ty[tgt].append((i, c % mod))
        # T^j Y^r = sum_l C(j,l)(-1)^(j-l) Y^(l d + r), Y^k = sum_i C(k,i) X^i
        ty_to_x = [[] for _ in range(M)]
        cols = {}
        for r in range(d):
            for j in range(m):
                src = r * m + j
                for l in range(j + 1):
                    cl = comb(j, l) * (-1) ** (j - l)
                    k = l * d + r
                    for i in range(k + 1):
                        key = (i, src)
                        cols[key] = cols.get(key, 0) + cl * comb(k, i)
        for (i, src), c in cols.items():
            if c % mod:
                ty_to_x[i].append((src, c % mod))
        return x_to_ty, ty_to_x

    @property
    def p_table(self):
        """P[rho][l] = [(i, c)]: X^i b = sum_rho tau^rho(b) P_{i,rho}(X)."""
        if self._p_table is None:
            d, M, mod = self.d, self.M, self.mod
            table = [[dict() for _ in range(M)] for _ in range(d)]
            for i in range(M):
                for k in range(i + 1):
                    c0 = comb(i, k) * (-1) ** (i - k)
                    rho = k % d
                    for l in range(k + 1):
                        dct = table[rho][l]
                        dct[i] = dct.get(i, 0) + c0 * comb(k, l)
            self._p_table = [[[(i, c % mod) for i, c in dct.items() if c % mod] for dct in row]
                             for row in table]
        return self._p_table

    @property
    def t_power(self) -> list:
        """Integer coefficients of T^m in X."""
        if self._t_power is None:
            self._t_power = _t_power_coeffs(self.d, self.m)
        return self._t_power

    # packed linear maps
    def _linear(self, rows, vecs: Sequence[tuple]) -> list:
        alg = self.alg
        s, f, mod = alg.s, alg.tower.f_M, self.mod
        wb = (2 * mod.bit_length() + self.M.bit_length() + 8) // 8
        packed = []
        for x in vecs:
            if any(any(z) for z in x):
                packed.append(int.from_bytes(b"".join(c.to_bytes(wb, "little") for z in x for c in z), "little"))
            else:
                packed.append(0)
        zero = alg.rzero
        out = []
        nb = s * f * wb
        for row in rows:
            acc = 0
            for i, c in row:
                v = packed[i]
                if v:
                    acc += c * v
            if not acc:
                out.append(zero)
                continue
            bs = acc.to_bytes(nb, "little")
            vals = [int.from_bytes(bs[k * wb:(k + 1) * wb], "little") % mod for k in range(s * f)]
            out.append(tuple(tuple(vals[u * f:(u + 1) * f]) for u in range(s)))
        return out

    def to_ty(self, coeffs: Sequence[tuple]) -> list:
        flat = self._linear(self.x_to_ty, coeffs)
        m = self.m
        return [flat[r * m:(r + 1) * m] for r in range(self.d)]

    def from_ty(self, parts: Sequence[Sequence[tuple]]) -> list:
        flat = [x for part in parts for x in part]
        return self._linear(self.ty_to_x, flat)

    def ty_mul(self, F: list, G: list) -> list:
        alg, d, m = self.alg, self.d, self.m
        out = [[alg.rzero] * m for _ in range(d)]
        nonzero_g = [r for r in range(d) if any(any(any(z) for z in x) for x in G[r])]
        if not nonzero_g:
            return out
        for rho in range(d):
            if not any(any(any(z) for z in x) for x in F[rho]):
                continue
            Bs = [G[r] if rho == 0 else [alg.rtau_pow(x, rho) for x in G[r]] for r in nonzero_g]
            for rho2, prod in zip(nonzero_g, _dconv_multi(alg, F[rho], Bs, m)):
                k = rho + rho2
                if k >= d:
                    k -= d
                    prod = [alg.radd(prod[j], prod[j - 1]) if j else prod[0] for j in range(m)]
                out[k] = [alg.radd(a, b) for a, b in zip(out[k], prod)]
        return out

    def mul(self, A: Sequence[tuple], B: Sequence[tuple]) -> list:
        M, zero = self.M, self.alg.rzero
        A = list(A[:M]) + [zero] * (M - len(A))
        B = list(B[:M]) + [zero] * (M - len(B))
        if self.d == 1:
            return _dconv(self.alg, A, B, self.M)
        return self.from_ty(self.ty_mul(self.to_ty(A), self.to_ty(B)))

    def to_right(self, coeffs: Sequence[tuple]) -> list:
        """Left-form coefficients -> right-form (f = sum X^l b_l)."""
        if self.d == 1:
            return list(coeffs)
        alg = self.alg
        out = [alg.rzero] * self.M
        for rho in range(self.d):
            part = self._linear(self.p_table[rho], coeffs)
            out = [alg.radd(o, alg.rtau_pow(x, -rho)) for o, x in zip(out, part)]
        return out

    def to_left(self, coeffs: Sequence[tuple]) -> list:
        if self.d == 1:
            return list(coeffs)
        alg = self.alg
        out = [alg.rzero] * self.M
        for rho in range(self.d):
            part = self._linear(self.p_table[rho], coeffs)
            out = [alg.radd(o, alg.rtau_pow(x, rho)) for o, x in zip(out, part)]
        return out


def _t_power_coeffs(d: int, m: int) -> list:
    base = [comb(d, i) for i in range(d + 1)]
    base[0] -= 1
    out = [1]
    for _ in range(m):
        new = [0] * (len(out) + d)
        for i, a in enumerate(out):
            if a:
                for j, b in enumerate(base):
                    new[i + j] += a * b
        out = new
    return out


def context(alg: AlgebraDescriptor, M: int) -> _Ctx:
    key = ("series_ctx", M)
    ctx = alg._cache.get(key)
    if ctx is None:
        ctx = _Ctx(alg, M)
        alg._cache[key] = ctx
    return ctx


# --- the series type -----------------------------------------------------------

class SkewSeries:
    """sum_{i<M} a_i X^i with integral a_i, exact mod (p^N, T^(M/d))."""

    __slots__ = ("alg", "M", "c")

    def __init__(self, alg: AlgebraDescriptor, M: int, coeffs: Sequence[tuple] = ()):
        self.alg = alg
        self.M = M
        c = list(coeffs[:M])
        if len(coeffs) > M:
            extra = [x for x in coeffs[M:] if any(any(z) for z in x)]
            if extra:
                c = _reduce_xpoly(alg, list(coeffs), M)
        c.extend([alg.rzero] * (M - len(c)))
        self.c = tuple(c)

    @classmethod
    def from_elements(cls, alg, M: int, elems: Sequence) -> "SkewSeries":
        raws = []
        for x in elems:
            if isinstance(x, int):
                x = alg.element([x])
            elif isinstance(x, TowerElement):
                x = alg.scalar(x)
            if x.e:
                raise BadParameters("series coefficients must be integral")
            raws.append(x.x)
        return cls(alg, M, raws)

    @classmethod
    def zero(cls, alg, M: int) -> "SkewSeries":
        return cls(alg, M)

    @classmethod
    def one(cls, alg, M: int) -> "SkewSeries":
        return cls(alg, M, [alg.rone])

    @classmethod
    def x(cls, alg, M: int) -> "SkewSeries":
        return cls(alg, M, [alg.rzero, alg.rone] if M > 1 else [])

    @classmethod
    def constant(cls, alg, M: int, a: DElement) -> "SkewSeries":
        return cls.from_elements(alg, M, [a])

    def coeff(self, i: int) -> DElement:
        return DElement(self.alg, self.c[i], 0, False)

    def coeffs(self) -> list:
        return [self.coeff(i) for i in range(self.M)]

    def is_zero(self) -> bool:
        return not any(any(any(z) for z in x) for x in self.c)

    def __bool__(self):
        return not self.is_zero()

    def degree(self) -> int:
        for i in range(self.M - 1, -1, -1):
            if any(any(z) for z in self.c[i]):
                return i
        return -1

    def _check(self, other: "SkewSeries"):
        if self.alg is not other.alg and self.alg != other.alg:
            raise BadParameters("series over different algebras")
        if self.M != other.M:
            raise BadParameters(f"X-precisions differ: {self.M} vs {other.M}")

    def __add__(self, other):
        self._check(other)
        return SkewSeries(self.alg, self.M, [self.alg.radd(a, b) for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        self._check(other)
        return SkewSeries(self.alg, self.M, [self.alg.rsub(a, b) for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return SkewSeries(self.alg, self.M, [self.alg.rneg(a) for a in self.c])

    def __mul__(self, other):
        if isinstance(other, SkewSeries):
            return skew_mul(self, other)
        return NotImplemented

    def scale_left(self, a: DElement) -> "SkewSeries":
        """a * f for a constant a."""
        return skew_mul(SkewSeries.constant(self.alg, self.M, a), self)

    def __eq__(self, other):
        if not isinstance(other, SkewSeries):
            return NotImplemented
        return self.M == other.M and self.c == other.c

    def __hash__(self):
        return hash((self.M, self.c))

    def with_precision(self, M: int) -> "SkewSeries":
        """Reinterpret in the quotient of X-precision M (reducing if M is smaller)."""
        if M == self.M:
            return self
        if M > self.M:
            return SkewSeries(self.alg, M, self.c)
        return SkewSeries(self.alg, M, list(self.c))

    def high(self, e: int) -> "SkewSeries":
        """U with self = U X^e + low."""
        return SkewSeries(self.alg, self.M, self.c[e:])

    def low(self, e: int) -> "SkewSeries":
        return SkewSeries(self.alg, self.M, self.c[:e])

    def __repr__(self):
        terms = [f"({self.coeff(i)!r})*X^{i}" for i in range(self.M) if any(any(z) for z in self.c[i])]
        return " + ".join(terms) or "0"

    def to_json(self) -> dict:
        return {"prec_x": self.M, "coeffs": [self.coeff(i).to_json() for i in range(self.M)]}


def series_from_json(alg: AlgebraDescriptor, data: dict) -> SkewSeries:
    elems = [d_element_from_json(alg, c) for c in data["coeffs"]]
    return SkewSeries.from_elements(alg, data["prec_x"], elems)


def _reduce_xpoly(alg: AlgebraDescriptor, coeffs: list, M: int) -> list:
    """Reduce a left-form polynomial of any degree modulo T^(M/d)."""
    tp = context(alg, M).t_power
    mod = alg.tower.mod
    coeffs = list(coeffs)
    for k in range(len(coeffs) - 1, M - 1, -1):
        c = coeffs[k]
        if not any(any(z) for z in c):
            continue
        for j, tj in enumerate(tp[:-1]):
            if tj % mod:
                i = k - M + j
                coeffs[i] = alg.rsub(coeffs[i], alg.rscale(c, tj))
        coeffs[k] = alg.rzero
    return coeffs[:M]


# --- multiplication --------------------------------------------------------------

def skew_mul(f: SkewSeries, g: SkewSeries) -> SkewSeries:
    f._check(g)
    ctx = context(f.alg, f.M)
    return SkewSeries(f.alg, f.M, ctx.mul(f.c, g.c))


def skew_mul_naive(f: SkewSeries, g: SkewSeries) -> SkewSeries:
    """Reference product: expand X^i r by the commutation rule one X at a time."""
    f._check(g)
    alg, M = f.alg, f.M
    out = [alg.rzero] * (2 * M)
    for i, a in enumerate(f.c):
        if not any(any(z) for z in a):
            continue
        # X^i * g as a left-form polynomial of degree < M + i
        cur = list(g.c) + [alg.rzero] * i
        for _ in range(i):
            nxt = [alg.rzero] * len(cur)
            for k, c in enumerate(cur):
                if not any(any(z) for z in c):
                    continue
                tc = alg.rtau(c)
                nxt[k + 1] = alg.radd(nxt[k + 1], tc)
                nxt[k] = alg.radd(nxt[k], alg.rsub(tc, c))
            cur = nxt
        for k, c in enumerate(cur):
            if any(any(z) for z in c):
                out[k] = alg.radd(out[k], alg.rmul(a, c))
    return SkewSeries(alg, M, _reduce_xpoly(alg, out, M))


# --- orders and units ----------------------------------------------------------------

def reduced_order(f: SkewSeries):
    """Index of the first unit coefficient, or INFINITE."""
    p = f.alg.tower.p
    for i, x in enumerate(f.c):
        if any(v % p for v in x[0]):
            return i
    return INFINITE


def _residue_alg(alg: AlgebraDescriptor) -> AlgebraDescriptor:
    key = "residue_alg"
    res = alg._cache.get(key)
    if res is None:
        res = alg.with_precision(1)
        alg._cache[key] = res
    return res


def _residue_matrix(f: SkewSeries):
    """Left multiplication by f on O/(pi_D, T) = F_{q^s}[X]/(X^d), over F_p."""
    alg = f.alg
    d, fM, p = alg.d, alg.tower.f_M, alg.tower.p
    res = _residue_alg(alg)
    ctx = context(res, d)
    zero_vec = (0,) * fM
    pad = (zero_vec,) * (alg.s - 1)
    fbar = [(tuple(v % p for v in x[0]),) + pad for x in f.c[:d]]
    cols = []
    for i in range(d):
        for j in range(fM):
            e = [res.rzero] * d
            vec = [0] * fM
            vec[j] = 1
            e[i] = (tuple(vec),) + pad
            prod = ctx.mul(fbar, e)
            cols.append([v for x in prod for v in x[0]])
    n = d * fM
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def _solve_mod_p(A: list, b: list, p: int):
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] % p), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = pow(M[col][col], -1, p)
        M[col] = [x * inv % p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] % p:
                c = M[r][col]
                M[r] = [(x - c * y) % p for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def _residue_inverse(f: SkewSeries):
    alg = f.alg
    d, fM, p = alg.d, alg.tower.f_M, alg.tower.p
    A = _residue_matrix(f)
    rhs = [0] * (d * fM)
    rhs[0] = 1
    y = _solve_mod_p(A, rhs, p)
    if y is None:
        return None
    zero_vec = (0,) * fM
    pad = (zero_vec,) * (alg.s - 1)
    return [(tuple(y[i * fM:(i + 1) * fM]),) + pad for i in range(d)]


def is_unit(f: SkewSeries) -> bool:
    if f.alg.d == 1:
        return reduced_order(f) == 0
    return _residue_inverse(f) is not None


def invert_unit(f: SkewSeries) -> SkewSeries:
    """Two-sided inverse: residue inverse lifted by Newton steps y <- y(2 - f y)."""
    alg, M = f.alg, f.M
    if alg.d == 1:
        if reduced_order(f) != 0:
            raise NotUnit("constant coefficient is not a unit")
        y = SkewSeries.constant(alg, M, f.coeff(0).inv())
    else:
        y0 = _residue_inverse(f)
        if y0 is None:
            raise NotUnit("series is not a unit in the residue ring")
        y = SkewSeries(alg, M, y0)
    one = SkewSeries.one(alg, M)
    two = one + one
    steps = (alg.s * alg.tower.N + M).bit_length() + 3
    for _ in range(steps):
        err = one - skew_mul(f, y)
        if err.is_zero():
            return y
        y = skew_mul(y, two - skew_mul(f, y))
    if (one - skew_mul(f, y)).is_zero():
        return y
    raise NoConvergence("Newton iteration for the inverse did not stabilise")


# --- distinguished polynomials ----------------------------------------------------------

@dataclass(frozen=True)
class DistinguishedPoly:
    """Monic X^e + sum_{i<e} c_i X^i with every c_i in rad(O_D)."""

    alg: AlgebraDescriptor
    coeffs: tuple  # raw c_0 .. c_{e-1}, 1

    def __post_init__(self):
        p = self.alg.tower.p
        if not self.coeffs or self.coeffs[-1] != self.alg.rone:
            raise BadParameters("distinguished polynomial must be monic")
        for x in self.coeffs[:-1]:
            if any(v % p for v in x[0]):
                raise BadParameters("lower coefficients must lie in the maximal ideal")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> DElement:
        return DElement(self.alg, self.coeffs[i], 0, False)

    def as_series(self, M: int) -> SkewSeries:
        return SkewSeries(self.alg, M, self.coeffs)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [self.coeff(i).to_json() for i in range(len(self.coeffs))]}


def distinguished_from_json(alg: AlgebraDescriptor, data: dict) -> DistinguishedPoly:
    elems = [d_element_from_json(alg, c) for c in data["coeffs"]]
    return DistinguishedPoly(alg, tuple(x.x for x in elems))


# --- division by monic polynomials --------------------------------------------------------

def divide_by_monic(g: SkewSeries, F: DistinguishedPoly):
    """g = q F + r with deg r < deg F, by long division (exact, no precision loss)."""
    alg, M = g.alg, g.M
    e = F.degree
    if e == 0:
        return g, SkewSeries.zero(alg, M)
    if e >= M:
        return SkewSeries.zero(alg, M), g
    ctx = context(alg, M)
    F_low = list(F.coeffs[:-1])
    q = [alg.rzero] * M
    r = [alg.rzero] * e
    h = list(g.c)
    for _ in range(M + 1):
        H = h[e:]
        for i, x in enumerate(h[:e]):
            r[i] = alg.radd(r[i], x)
        if not any(any(any(z) for z in x) for x in H):
            return SkewSeries(alg, M, q), SkewSeries(alg, M, r)
        q = [alg.radd(a, b) for a, b in zip(q, H + [alg.rzero] * e)]
        # H X^e = H F - H F_low
        h = [alg.rneg(x) for x in ctx.mul(H, F_low)]
    raise NoConvergence("long division did not terminate")


def right_divide_by_monic(g: SkewSeries, F: DistinguishedPoly):
    """g = F q + r with deg r < deg F."""
    alg, M = g.alg, g.M
    e = F.degree
    if e == 0:
        return g, SkewSeries.zero(alg, M)
    if e >= M:
        return SkewSeries.zero(alg, M), g
    ctx = context(alg, M)
    F_low = list(F.coeffs[:-1])
    q_right = [alg.rzero] * M
    r_right = [alg.rzero] * e
    h = ctx.to_right(g.c)
    for _ in range(M + 1):
        H = h[e:]
        for i, x in enumerate(h[:e]):
            r_right[i] = alg.radd(r_right[i], x)
        if not any(any(any(z) for z in x) for x in H):
            q = ctx.to_left(q_right)
            r = ctx.to_left(r_right + [alg.rzero] * (M - e))
            return SkewSeries(alg, M, q), SkewSeries(alg, M, r)
        q_right = [alg.radd(a, b) for a, b in zip(q_right, H + [alg.rzero] * e)]
        # X^e H = F H - F_low H
        Hl = ctx.to_left(H + [alg.rzero] * e)
        h = ctx.to_right([alg.rneg(x) for x in ctx.mul(F_low, Hl)])
    raise NoConvergence("right long division did not terminate")


# --- Weierstrass preparation and division ------------------------------------------------

def _working_margin(alg: AlgebraDescriptor, e: int) -> int:
    """m0 such that T^m0 lies in p^N O + O F for every distinguished F of degree e.

    Mod pi_D, T^c = X^(dc) with c = ceil(e/d), and X^(dc) is congruent to an
    element of pi_D O modulo O F; so T^(c k) lies in pi_D^k O + O F.
    """
    if e == 0:
        return 0
    return -(-e // alg.d) * alg.s * alg.tower.N


@dataclass(frozen=True)
class Preparation:
    unit: SkewSeries
    F: DistinguishedPoly
    unit_inverse: SkewSeries


def _prepare_full(f: SkewSeries) -> Preparation:
    alg, M = f.alg, f.M
    e = reduced_order(f)
    if e == INFINITE:
        raise InfiniteReducedOrder("no unit coefficient within precision")
    if e == 0:
        inv = invert_unit(f)
        return Preparation(f, DistinguishedPoly(alg, (alg.rone,)), inv)
    m_work = M // alg.d + _working_margin(alg, e)
    Mw = m_work * alg.d
    ctx = context(alg, Mw)
    fw = f.with_precision(Mw)
    U = fw.high(e)
    try:
        Uinv = invert_unit(U)
    except NotUnit as exc:
        raise NotUnit("the part of f above its reduced order is not a unit") from exc
    f_low = list(fw.c[:e])
    W = ctx.mul(Uinv.c, f_low)
    # X^e = q f + r, iterating h -> -high(h) U^-1 f_low
    h = [alg.rzero] * Mw
    h[e] = alg.rone
    H_sum = [alg.rzero] * Mw
    r = [alg.rzero] * e
    cap = max(alg.tower.N * M, alg.s * alg.tower.N + 2)
    for _ in range(cap):
        H = h[e:]
        for i, x in enumerate(h[:e]):
            r[i] = alg.radd(r[i], x)
        if not any(any(any(z) for z in x) for x in H):
            break
        H_sum = [alg.radd(a, b) for a, b in zip(H_sum, H + [alg.rzero] * e)]
        h = [alg.rneg(x) for x in ctx.mul(H, W)]
    else:
        raise NoConvergence("preparation iteration did not stabilise")
    q = SkewSeries(alg, Mw, ctx.mul(H_sum, Uinv.c))
    Fc = tuple(alg.rneg(x) for x in r) + (alg.rone,)
    F = DistinguishedPoly(alg, Fc)
    q_out = q.with_precision(M)
    unit = invert_unit(q_out)
    return Preparation(unit, F, q_out)


def weierstrass_prepare(f: SkewSeries):
    """f = unit * F with F distinguished of degree ord^red(f)."""
    prep = _prepare_full(f)
    return prep.unit, prep.F


def weierstrass_divide(g: SkewSeries, f: SkewSeries):
    """g = q f + r with deg r < ord^red(f)."""
    g._check(f)
    prep = _prepare_full(f)
    q1, r = divide_by_monic(g, prep.F)
    return skew_mul(q1, prep.unit_inverse), r


# --- center ---------------------------------------------------------------------------

class CenterSeries:
    """sum_{j<m} h_j T^j with h_j in O_k."""

    __slots__ = ("tower", "m", "c")

    def __init__(self, tower, m: int, coeffs: Sequence[TowerElement] = (), check: bool = True):
        self.tower = tower
        self.m = m
        c = list(coeffs[:m]) + [tower.zero()] * (m - len(coeffs[:m]))
        if check:
            for x in c:
                if x.e:
                    raise BadParameters("center coefficients must be integral")
                if not tower.in_k(x):
                    raise BadParameters("center coefficients must lie in k")
        self.c = tuple(c)

    def __add__(self, other):
        return CenterSeries(self.tower, self.m, [a + b for a, b in zip(self.c, other.c)], False)

    def __sub__(self, other):
        return CenterSeries(self.tower, self.m, [a - b for a, b in zip(self.c, other.c)], False)

    def __mul__(self, other):
        out = [self.tower.zero()] * self.m
        for i, a in enumerate(self.c):
            if a:
                for j in range(self.m - i):
                    if other.c[j]:
                        out[i + j] = out[i + j] + a * other.c[j]
        return CenterSeries(self.tower, self.m, out, False)

    def __eq__(self, other):
        return isinstance(other, CenterSeries) and self.m == other.m and self.c == other.c

    def __hash__(self):
        return hash((self.m, self.c))

    def __repr__(self):
        return " + ".join(f"({x!r})*T^{j}" for j, x in enumerate(self.c) if x) or "0"

    def to_json(self) -> dict:
        return {"prec_t": self.m, "coeffs": [x.to_json() for x in self.c]}


def center_from_json(tower, data: dict) -> CenterSeries:
    return CenterSeries(tower, data["prec_t"], [element_from_json(tower, c) for c in data["coeffs"]])


def center_embed(h: CenterSeries, alg: AlgebraDescriptor) -> SkewSeries:
    """Substitute T -> (1+X)^d - 1."""
    d = alg.d
    M = h.m * d
    ctx = context(alg, M)
    raws = [alg.rscalar(x.c) for x in h.c]
    if d == 1:
        return SkewSeries(alg, M, raws)
    parts = [raws] + [[alg.rzero] * h.m for _ in range(d - 1)]
    return SkewSeries(alg, M, ctx.from_ty(parts))


# --- pi_D scaling and conjugation ---------------------------------------------------------

def pi_left(g: SkewSeries, k: int) -> SkewSeries:
    """pi_D^k g for k >= 0, or the exact quotient pi_D^k g for k < 0 (g must be divisible)."""
    alg = g.alg
    if k == 0:
        return g
    if k > 0:
        return SkewSeries(alg, g.M, [alg.rmul_pi_left(x, k) for x in g.c])
    return SkewSeries(alg, g.M, [alg.rdiv_pi_left(x, -k) for x in g.c])


def content(g: SkewSeries):
    """min_i v_D(a_i); INFINITE for zero."""
    alg = g.alg
    cap = alg.s * alg.tower.N
    v = min((alg.rval(x) for x in g.c), default=cap)
    return INFINITE if v >= cap else v


def conj_pi(g: SkewSeries, k: int) -> SkewSeries:
    """pi_D^k g pi_D^-k."""
    alg = g.alg
    k %= alg.s
    if k == 0:
        return g
    if alg.tau_is_plain:
        # pi_D commutes with X; conjugation acts on coefficients only
        return SkewSeries(alg, g.M, [alg.rconj_pi(x, k) for x in g.c])
    # pi^k g pi^(s-k) / p, computed one p-adic digit higher
    key = "alg_plus_one"
    hi = alg._cache.get(key)
    if hi is None:
        hi = alg.with_precision(alg.tower.N + 1)
        alg._cache[key] = hi
    gh = SkewSeries(hi, g.M, [hi.rmul_pi_left(x, k) for x in g.c])
    piw = [hi.rzero] * g.M
    piw[0] = hi.rmul_pi_left(hi.rone, alg.s - k)
    y = skew_mul(gh, SkewSeries(hi, g.M, piw))
    mod, p = alg.tower.mod, alg.tower.p
    return SkewSeries(alg, g.M, [tuple(tuple((v // p) % mod for v in z) for z in x) for x in y.c])
