"""Fixed-precision arithmetic in an unramified tower Q_p <= k <= K <= M = K(omega).

The largest field M is modelled as Z_p[t]/(g(t)) for a monic lift ``g`` of an
irreducible polynomial over F_p; every element is a coefficient vector in the
basis 1, t, ..., t^(f_M - 1) reduced mod p^N, divided by an explicit power of p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .errors import (
    BadParameters,
    IndexHypothesisViolated,
    NotInvertible,
    PrecisionExhausted,
    ZeroElement,
)

Vec = tuple


# --- coefficient-vector kernels -------------------------------------------

def _vmul(a: Vec, b: Vec, red: tuple, mod: int) -> Vec:
    """Multiply two vectors modulo the defining polynomial and ``mod``.

    ``red[k]`` is the vector of t^(f + k) in the power basis.
    """
    f = len(a)
    if f == 1:
        return ((a[0] * b[0]) % mod,)
    prod = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    out = prod[:f]
    for k in range(f, 2 * f - 1):
        ck = prod[k]
        if ck:
            row = red[k - f]
            for i in range(f):
                out[i] += ck * row[i]
    return tuple(x % mod for x in out)


def _vadd(a: Vec, b: Vec, mod: int) -> Vec:
    return tuple((x + y) % mod for x, y in zip(a, b))


def _vsub(a: Vec, b: Vec, mod: int) -> Vec:
    return tuple((x - y) % mod for x, y in zip(a, b))


def _vscale(a: Vec, n: int, mod: int) -> Vec:
    return tuple((x * n) % mod for x in a)


def _vpow(a: Vec, n: int, red: tuple, mod: int) -> Vec:
    result = (1,) + (0,) * (len(a) - 1)
    base = a
    while n:
        if n & 1:
            result = _vmul(result, base, red, mod)
        n >>= 1
        if n:
            base = _vmul(base, base, red, mod)
    return result


def _vval(a: Vec, p: int, cap: int) -> int:
    """Minimum p-adic valuation of the entries, ``cap`` for the zero vector."""
    best = cap
    for x in a:
        if x:
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            if v < best:
                best = v
    return best


def _reduction_table(poly: Sequence[int], mod: int) -> tuple:
    """Vectors of t^f, ..., t^(2f-2) modulo the monic polynomial ``poly``."""
    f = len(poly) - 1
    low = [(-c) % mod for c in poly[:f]]
    rows = []
    cur = list(low)
    for _ in range(max(f - 1, 0)):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(x + top * y) % mod for x, y in zip(cur, low)]
    return tuple(rows)


def _least_irreducible(p: int, f: int) -> tuple:
    """Lexicographically least monic irreducible of degree f over F_p.

    Candidates are ordered by the integer sum c_i p^i of the lower coefficients.
    """
    for n in range(p ** f):
        low = [(n // p ** i) % p for i in range(f)]
        high_first = [ZZ(1)] + [ZZ(c) for c in reversed(low)]
        if gf_irreducible_p(high_first, p, ZZ):
            return tuple(low) + (1,)
    raise BadParameters(f"no irreducible polynomial of degree {f} over F_{p}")


def _is_p_power(d: int, p: int) -> bool:
    while d % p == 0:
        d //= p
    return d == 1


# --- descriptor -------------------------------------------------------------

@dataclass(frozen=True)
class TowerDescriptor:
    """The tower Q_p <= k <= K <= M with p-adic precision N.

    ``f_k`` is the residue degree of k, ``d = (K:k)``, ``s`` the index of the
    division algebra; M has degree f_M = f_k * d * s over Q_p.
    """

    p: int
    f_k: int
    d: int
    s: int
    N: int
    def_poly: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def f_K(self) -> int:
        return self.f_k * self.d

    @property
    def f_M(self) -> int:
        return self.f_k * self.d * self.s

    @property
    def q(self) -> int:
        return self.p ** self.f_K

    @property
    def q_k(self) -> int:
        return self.p ** self.f_k

    @cached_property
    def mod(self) -> int:
        return self.p ** self.N

    @cached_property
    def red(self) -> tuple:
        return _reduction_table(self.def_poly, self.mod)

    @cached_property
    def red_p(self) -> tuple:
        return _reduction_table(self.def_poly, self.p)

    def with_precision(self, N: int) -> "TowerDescriptor":
        return TowerDescriptor(self.p, self.f_k, self.d, self.s, N, self.def_poly)

    # element constructors
    def zero(self) -> "TowerElement":
        return TowerElement(self, (0,) * self.f_M, 0, False)

    def one(self) -> "TowerElement":
        return TowerElement(self, (1,) + (0,) * (self.f_M - 1), 0, False)

    def from_int(self, n: int) -> "TowerElement":
        if n == 0:
            return self.zero()
        e = 0
        while n % self.p == 0:
            n //= self.p
            e -= 1
        x = TowerElement(self, (n % self.mod,) + (0,) * (self.f_M - 1), 0)
        return x * self.p_power(-e) if e else x

    def element(self, coeffs: Iterable[int], denom_exp: int = 0) -> "TowerElement":
        c = tuple(int(x) for x in coeffs)
        if len(c) != self.f_M:
            raise BadParameters(f"expected {self.f_M} coefficients, got {len(c)}")
        return TowerElement(self, c, denom_exp)

    def gen(self) -> "TowerElement":
        """The power-basis generator t."""
        if self.f_M == 1:
            return TowerElement(self, ((-self.def_poly[0]) % self.mod,), 0)
        return TowerElement(self, (0, 1) + (0,) * (self.f_M - 2), 0, False)

    def p_power(self, k: int) -> "TowerElement":
        """p^k for any integer k."""
        if k >= 0:
            if k >= self.N:
                return self.zero()
            return TowerElement(self, (self.p ** k,) + (0,) * (self.f_M - 1), 0, False)
        return TowerElement(self, (1,) + (0,) * (self.f_M - 1), -k)

    # Frobenius
    @cached_property
    def _frob_images(self) -> tuple:
        """sigma_p^k(t) for k = 0, ..., f_M - 1 (sigma_p the absolute Frobenius)."""
        f, mod = self.f_M, self.mod
        if f == 1:
            return (self.gen().c,)
        t = self.gen().c
        theta = _vpow(t, self.p, self.red, mod)
        theta = self._hensel_root(theta)
        images = [t, theta]
        for _ in range(f - 2):
            images.append(self._apply_linear(self._power_rows(theta), images[-1]))
        return tuple(images)

    def _hensel_root(self, x: Vec) -> Vec:
        # Newton iteration on the defining polynomial, which is separable mod p.
        g = self.def_poly
        dg = tuple(i * g[i] for i in range(1, len(g)))
        for _ in range(4 * self.N.bit_length() + 8):
            gx = self._eval_poly(g, x)
            if not any(gx):
                return x
            inv = self._unit_inverse_vec(self._eval_poly(dg, x))
            x = _vsub(x, _vmul(gx, inv, self.red, self.mod), self.mod)
        raise PrecisionExhausted("Hensel lifting of the Frobenius image did not converge")

    def _eval_poly(self, poly: Sequence[int], x: Vec) -> Vec:
        acc = (0,) * self.f_M
        one = (1,) + (0,) * (self.f_M - 1)
        for c in reversed(poly):
            acc = _vadd(_vmul(acc, x, self.red, self.mod), _vscale(one, c, self.mod), self.mod)
        return acc

    def _power_rows(self, theta: Vec) -> tuple:
        rows = [(1,) + (0,) * (self.f_M - 1)]
        for _ in range(self.f_M - 1):
            rows.append(_vmul(rows[-1], theta, self.red, self.mod))
        return tuple(rows)

    def _apply_linear(self, rows: tuple, x: Vec) -> Vec:
        mod = self.mod
        out = [0] * self.f_M
        for xi, row in zip(x, rows):
            if xi:
                for j, r in enumerate(row):
                    out[j] += xi * r
        return tuple(v % mod for v in out)

    def frob_rows(self, k: int) -> tuple:
        """Matrix rows (images of t^i) of sigma_p^k."""
        k %= self.f_M
        key = ("frob", k)
        rows = self._cache.get(key)
        if rows is None:
            rows = self._power_rows(self._frob_images[k])
            self._cache[key] = rows
        return rows

    def frob_vec(self, x: Vec, k: int) -> Vec:
        k %= self.f_M
        if k == 0 or self.f_M == 1:
            return x
        return self._apply_linear(self.frob_rows(k), x)

    def frobenius(self, x: "TowerElement", k_steps: int) -> "TowerElement":
        return TowerElement(self, self.frob_vec(x.c, k_steps), x.e, False)

    # units
    def _unit_inverse_vec(self, x: Vec) -> Vec:
        p, f = self.p, self.f_M
        xp = tuple(v % p for v in x)
        if not any(xp):
            raise NotInvertible("element is not a unit")
        y = _vpow(xp, p ** f - 2, self.red_p, p)
        two = (2,) + (0,) * (f - 1)
        prec = 1
        while prec < self.N:
            prec *= 2
            y = _vmul(y, _vsub(two, _vmul(x, y, self.red, self.mod), self.mod), self.red, self.mod)
        return y

    # roots of unity
    def teichmuller(self, r) -> "TowerElement":
        """The root of unity of order dividing p^f_M - 1 congruent to ``r`` mod p."""
        if isinstance(r, TowerElement):
            if r.e:
                raise BadParameters("residue representative must be integral")
            x = r.c
        elif isinstance(r, int):
            x = (r % self.mod,) + (0,) * (self.f_M - 1)
        else:
            x = tuple(int(v) % self.mod for v in r)
        x = tuple(v % self.p for v in x)
        if not any(x):
            return self.zero()
        n = self.p ** self.f_M
        for _ in range(self.N + 2):
            nxt = _vpow(x, n, self.red, self.mod)
            if nxt == x:
                return TowerElement(self, x, 0, False)
            x = nxt
        raise PrecisionExhausted("Teichmuller iteration did not stabilise")

    @cached_property
    def residue_generator(self) -> Vec:
        """Least (by digit order) generator of the multiplicative group of the residue field."""
        p, f = self.p, self.f_M
        order = p ** f - 1
        primes = list(factorint(order))
        for n in range(1, p ** f):
            x = tuple((n // p ** i) % p for i in range(f))
            if all(_vpow(x, order // ell, self.red_p, p) != (1,) + (0,) * (f - 1) for ell in primes):
                return x
        raise BadParameters("residue field has no generator")  # unreachable

    @cached_property
    def omega(self) -> "TowerElement":
        """Fixed primitive (q^s - 1)-st root of unity; q^s = p^f_M here."""
        return self.teichmuller(self.residue_generator)

    # subfields
    def in_K(self, x: "TowerElement") -> bool:
        return self.frobenius(x, self.f_K) == x

    def in_k(self, x: "TowerElement") -> bool:
        return self.frobenius(x, self.f_k) == x

    def to_json(self) -> dict:
        return {"p": self.p, "f_k": self.f_k, "d": self.d, "s": self.s, "N": self.N,
                "def_poly": list(self.def_poly)}


def make_tower(p: int, f_k: int, d: int, s: int, N: int) -> TowerDescriptor:
    """Validate parameters and build the descriptor with its fixed defining polynomial."""
    for name, v in (("p", p), ("f_k", f_k), ("d", d), ("s", s), ("N", N)):
        if not isinstance(v, int) or v < 1:
            raise BadParameters(f"{name} must be a positive integer")
    if p == 2 or not isprime(p):
        raise BadParameters(f"p = {p} is not an odd prime")
    if not _is_p_power(d, p):
        raise BadParameters(f"d = {d} is not a power of p = {p}")
    if (p ** f_k - 1) % s:
        raise IndexHypothesisViolated(f"s = {s} does not divide {p}^{f_k} - 1 = {p ** f_k - 1}")
    poly = _least_irreducible(p, f_k * d * s)
    return TowerDescriptor(p, f_k, d, s, N, poly)


def tower_from_json(data: dict) -> TowerDescriptor:
    t = make_tower(data["p"], data["f_k"], data["d"], data["s"], data["N"])
    if "def_poly" in data and tuple(data["def_poly"]) != t.def_poly:
        raise BadParameters("defining polynomial does not match the canonical choice")
    return t


# --- elements -----------------------------------------------------------------

class TowerElement:
    """p^(-e) * (c_0 + c_1 t + ...), coefficients mod p^N.

    Canonical form: zero has e = 0; otherwise e = 0 or some c_i is a unit.
    """

    __slots__ = ("tower", "c", "e")

    def __init__(self, tower: TowerDescriptor, c: Vec, e: int = 0, canon: bool = True):
        self.tower = tower
        if canon:
            mod, p = tower.mod, tower.p
            c = tuple(int(x) % mod for x in c)
            if not any(c):
                e = 0
            elif e < 0:
                c = _vscale(c, p ** (-e), mod)
                e = 0
            else:
                while e > 0 and all(x % p == 0 for x in c):
                    c = tuple(x // p for x in c)
                    e -= 1
            if e > tower.N:
                raise PrecisionExhausted(f"denominator p^{e} exceeds the working precision")
        self.c = c
        self.e = e

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self) -> bool:
        return any(self.c)

    def _coerce(self, other) -> "TowerElement":
        if isinstance(other, TowerElement):
            return other
        if isinstance(other, int):
            return self.tower.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = self.tower
        if self.e == other.e:
            return TowerElement(t, _vadd(self.c, other.c, t.mod), self.e)
        if self.e > other.e:
            a, b = self, other
        else:
            a, b = other, self
        shifted = _vscale(b.c, t.p ** (a.e - b.e), t.mod)
        return TowerElement(t, _vadd(a.c, shifted, t.mod), a.e)

    __radd__ = __add__

    def __neg__(self):
        t = self.tower
        return TowerElement(t, tuple((-x) % t.mod for x in self.c), self.e, False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        t = self.tower
        if isinstance(other, int):
            return self * t.from_int(other) if other % t.p == 0 else \
                TowerElement(t, _vscale(self.c, other, t.mod), self.e)
        if not isinstance(other, TowerElement):
            return NotImplemented
        return TowerElement(t, _vmul(self.c, other.c, t.red, t.mod), self.e + other.e)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        t = self.tower
        return TowerElement(t, _vpow(self.c, n, t.red, t.mod), self.e * n)

    def val(self) -> int:
        """p-adic valuation."""
        if self.is_zero():
            raise ZeroElement("valuation of zero")
        return _vval(self.c, self.tower.p, self.tower.N) - self.e

    def inv(self) -> "TowerElement":
        t = self.tower
        v = _vval(self.c, t.p, t.N)
        if v >= t.N:
            raise NotInvertible("element is zero at the working precision")
        unit = tuple(x // t.p ** v for x in self.c)
        inv_c = t._unit_inverse_vec(unit)
        return TowerElement(t, inv_c, v - self.e)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def frobenius(self, k: int) -> "TowerElement":
        return self.tower.frobenius(self, k)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.tower.from_int(other)
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self.e == other.e and self.c == other.c

    def __hash__(self):
        return hash((self.c, self.e))

    def reduce(self, digits: int) -> "TowerElement":
        """Reduce the numerator modulo p^digits (precision truncation)."""
        m = self.tower.p ** digits
        return TowerElement(self.tower, tuple(x % m for x in self.c), self.e)

    def __repr__(self):
        body = "+".join(f"{x}*t^{i}" for i, x in enumerate(self.c) if x) or "0"
        return f"({body})/p^{self.e}" if self.e else f"({body})"

    def to_json(self) -> dict:
        return {"coeffs": list(self.c), "denom_exp": self.e}


def element_from_json(tower: TowerDescriptor, data: dict) -> TowerElement:
    return tower.element(data["coeffs"], data.get("denom_exp", 0))


def field_arith(x: TowerElement, y: TowerElement | None, op: str):
    """Dispatch ``add``, ``mul``, ``inv`` or ``val``."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    if op == "val":
        return x.val()
    raise BadParameters(f"unknown operation {op!r}")
