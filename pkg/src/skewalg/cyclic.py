"""The cyclic division algebra D = (M/K, sigma, p) of Hasse invariant r/s.

An element is p^(-e) * sum_i x_i pi_D^i with x_i integral in M = K(omega),
subject to pi_D z = sigma(z) pi_D and pi_D^s = p, where sigma = Frob^(r f_K).
The "raw" helpers on tuples of coefficient vectors are the hot path used by
the series and matrix code; :class:`DElement` is the user-facing wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Sequence

from .commalg import berkowitz, solve_field
from .errors import (
    AmbiguousExtension,
    BadParameters,
    CoefficientNotInBaseField,
    NoValidExtension,
    NotInvertible,
    ZeroElement,
)
from .tower import (
    TowerDescriptor,
    TowerElement,
    _vadd,
    _vmul,
    _vscale,
    _vsub,
    _vval,
    element_from_json,
    tower_from_json,
)

Raw = tuple  # s coefficient vectors


@dataclass(frozen=True)
class AlgebraDescriptor:
    """D over K together with the automorphism tau of order d.

    ``tau_a``: tau acts on M as Frob^tau_a; ``tau_c``: tau(pi_D) = tau_c * pi_D.
    """

    tower: TowerDescriptor
    r: int
    tau_a: int = 0
    tau_c: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        s = self.tower.s
        if not 1 <= self.r <= s or gcd(self.r, s) != 1:
            raise BadParameters(f"Hasse numerator r = {self.r} must satisfy 1 <= r <= s, gcd(r, s) = 1")
        if not self.tau_c:
            object.__setattr__(self, "tau_c", self.tower.one().c)

    @property
    def s(self) -> int:
        return self.tower.s

    @property
    def d(self) -> int:
        return self.tower.d

    @property
    def sigma_exp(self) -> int:
        return self.r * self.tower.f_K

    def with_precision(self, N: int) -> "AlgebraDescriptor":
        t = self.tower.with_precision(N)
        return AlgebraDescriptor(t, self.r, self.tau_a, tuple(x % t.mod for x in self.tau_c))

    # --- raw integral arithmetic -----------------------------------------
    @cached_property
    def _zero_vec(self) -> tuple:
        return (0,) * self.tower.f_M

    @cached_property
    def rzero(self) -> Raw:
        return (self._zero_vec,) * self.s

    @cached_property
    def rone(self) -> Raw:
        return (self.tower.one().c,) + (self._zero_vec,) * (self.s - 1)

    def rpi(self) -> Raw:
        if self.s == 1:
            return ((self.tower.p % self.tower.mod,) + self._zero_vec[1:],)
        out = [self._zero_vec] * self.s
        out[1] = self.tower.one().c
        return tuple(out)

    def rscalar(self, z: Sequence[int]) -> Raw:
        return (tuple(z),) + (self._zero_vec,) * (self.s - 1)

    def sigma_vec(self, z, i: int):
        return self.tower.frob_vec(z, (self.sigma_exp * i) % self.tower.f_M)

    def radd(self, x: Raw, y: Raw) -> Raw:
        mod = self.tower.mod
        return tuple(_vadd(a, b, mod) for a, b in zip(x, y))

    def rsub(self, x: Raw, y: Raw) -> Raw:
        mod = self.tower.mod
        return tuple(_vsub(a, b, mod) for a, b in zip(x, y))

    def rneg(self, x: Raw) -> Raw:
        mod = self.tower.mod
        return tuple(tuple((-v) % mod for v in a) for a in x)

    def rscale(self, x: Raw, n: int) -> Raw:
        mod = self.tower.mod
        return tuple(_vscale(a, n, mod) for a in x)

    def rmul(self, x: Raw, y: Raw) -> Raw:
        t = self.tower
        red, mod, s = t.red, t.mod, self.s
        if s == 1:
            return (_vmul(x[0], y[0], red, mod),)
        out = [[0] * t.f_M for _ in range(s)]
        p = t.p
        for j, yj in enumerate(y):
            if not any(yj):
                continue
            for i, xi in enumerate(x):
                if not any(xi):
                    continue
                prod = _vmul(xi, self.sigma_vec(yj, i), red, mod)
                k = i + j
                if k >= s:
                    k -= s
                    prod = _vscale(prod, p, mod)
                acc = out[k]
                for m, v in enumerate(prod):
                    acc[m] += v
        return tuple(tuple(v % mod for v in a) for a in out)

    def rval(self, x: Raw) -> int:
        """v_D; returns s*N for the zero element (precision cap)."""
        t = self.tower
        cap = self.s * t.N
        best = cap
        for i, xi in enumerate(x):
            if any(xi):
                v = self.s * _vval(xi, t.p, t.N) + i
                if v < best:
                    best = v
        return best

    def ris_unit(self, x: Raw) -> bool:
        return any(v % self.tower.p for v in x[0])

    def rreduce_residue(self, x: Raw) -> tuple:
        """Image in the residue field F_{q^s} of an integral element."""
        p = self.tower.p
        return tuple(v % p for v in x[0])

    def rdiv_pi_left(self, x: Raw, k: int) -> Raw:
        """pi_D^(-k) x for x divisible by pi_D^k (low digits beyond precision become 0)."""
        s, p = self.s, self.tower.p
        for _ in range(k):
            x0 = x[0]
            if s == 1:
                x = (tuple(v // p for v in x0),)
                continue
            shifted = list(x[1:]) + [tuple(v // p for v in x0)]
            x = tuple(self.sigma_vec(z, -1) for z in shifted)
        return x

    def rmul_pi_left(self, x: Raw, k: int) -> Raw:
        """pi_D^k x."""
        s, mod, p = self.s, self.tower.mod, self.tower.p
        for _ in range(k):
            if s == 1:
                x = (_vscale(x[0], p, mod),)
                continue
            x = tuple(self.sigma_vec(z, 1) for z in x)
            x = (_vscale(x[-1], p, mod),) + x[:-1]
        return x

    def rconj_pi(self, x: Raw, k: int) -> Raw:
        """pi_D^k x pi_D^(-k): sigma^k applied to every coefficient."""
        if self.s == 1 or k % self.s == 0:
            return x
        return tuple(self.sigma_vec(z, k) for z in x)

    @cached_property
    def _tau_pi_powers(self) -> tuple:
        """(tau_c pi_D)^i = N_i pi_D^i; returns the vectors N_i."""
        t = self.tower
        out = [t.one().c]
        for i in range(1, self.s):
            out.append(_vmul(out[-1], self.sigma_vec(self.tau_c, i - 1), t.red, t.mod))
        return tuple(out)

    @cached_property
    def tau_is_plain(self) -> bool:
        return tuple(self.tau_c) == self.tower.one().c

    def rtau(self, x: Raw) -> Raw:
        t = self.tower
        a = self.tau_a
        if a % t.f_M == 0 and self.tau_is_plain:
            return x
        imgs = tuple(t.frob_vec(z, a) for z in x)
        if self.tau_is_plain:
            return imgs
        return tuple(_vmul(z, n, t.red, t.mod) for z, n in zip(imgs, self._tau_pi_powers))

    def rtau_pow(self, x: Raw, j: int) -> Raw:
        j %= self.d
        for _ in range(j):
            x = self.rtau(x)
        return x

    def rdelta(self, x: Raw) -> Raw:
        return self.rsub(self.rtau(x), x)

    # --- convenience ---------------------------------------------------
    def element(self, coeffs, e: int = 0) -> "DElement":
        t = self.tower
        vecs = []
        for c in coeffs:
            if isinstance(c, TowerElement):
                vecs.append(c)
            elif isinstance(c, int):
                vecs.append(t.from_int(c))
            else:
                vecs.append(t.element(c))
        while len(vecs) < self.s:
            vecs.append(t.zero())
        return DElement.from_tower_coeffs(self, vecs, e)

    def from_raw(self, x: Raw, e: int = 0) -> "DElement":
        return DElement(self, x, e)

    def zero(self) -> "DElement":
        return DElement(self, self.rzero, 0, False)

    def one(self) -> "DElement":
        return DElement(self, self.rone, 0, False)

    def pi(self) -> "DElement":
        return DElement(self, self.rpi(), 0)

    def omega(self) -> "DElement":
        return DElement(self, self.rscalar(self.tower.omega.c), 0, False)

    def scalar(self, z: TowerElement) -> "DElement":
        return DElement(self, self.rscalar(z.c), z.e)

    def to_json(self) -> dict:
        data = self.tower.to_json()
        data.update({"r": self.r, "tau_a": self.tau_a,
                     "tau_c": {"coeffs": list(self.tau_c), "denom_exp": 0}})
        return data


class DElement:
    """p^(-e) * sum_i x_i pi_D^i."""

    __slots__ = ("alg", "x", "e")

    def __init__(self, alg: AlgebraDescriptor, x: Raw, e: int = 0, canon: bool = True):
        self.alg = alg
        if canon:
            t = alg.tower
            mod, p = t.mod, t.p
            x = tuple(tuple(v % mod for v in z) for z in x)
            if not any(any(z) for z in x):
                e = 0
            else:
                while e > 0 and all(v % p == 0 for z in x for v in z):
                    x = tuple(tuple(v // p for v in z) for z in x)
                    e -= 1
        self.x = x
        self.e = e

    @classmethod
    def from_tower_coeffs(cls, alg, coeffs: Sequence[TowerElement], e: int = 0) -> "DElement":
        t = alg.tower
        emax = max(c.e for c in coeffs)
        vecs = tuple(_vscale(c.c, t.p ** (emax - c.e), t.mod) for c in coeffs)
        return cls(alg, vecs, emax + e)

    def coeffs(self) -> list:
        """Coefficients x_i as tower elements (denominator included)."""
        t = self.alg.tower
        return [TowerElement(t, z, self.e) for z in self.x]

    def is_zero(self) -> bool:
        return not any(any(z) for z in self.x)

    def __bool__(self):
        return not self.is_zero()

    def _align(self, other: "DElement"):
        p = self.alg.tower.p
        if self.e == other.e:
            return self.x, other.x, self.e
        if self.e > other.e:
            return self.x, self.alg.rscale(other.x, p ** (self.e - other.e)), self.e
        return self.alg.rscale(self.x, p ** (other.e - self.e)), other.x, other.e

    def _coerce(self, other):
        if isinstance(other, DElement):
            return other
        if isinstance(other, int):
            return self.alg.scalar(self.alg.tower.from_int(other))
        if isinstance(other, TowerElement):
            return self.alg.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._align(other)
        return DElement(self.alg, self.alg.radd(a, b), e)

    __radd__ = __add__

    def __neg__(self):
        return DElement(self.alg, self.alg.rneg(self.x), self.e, False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return d_mul(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return d_mul(other, self)

    def __pow__(self, n: int):
        if n < 0:
            return d_inv(self) ** (-n)
        out = self.alg.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.e == other.e and self.x == other.x

    def __hash__(self):
        return hash((self.x, self.e))

    def val(self) -> int:
        return valuation_d(self)

    def inv(self) -> "DElement":
        return d_inv(self)

    def tau(self, j: int = 1) -> "DElement":
        return DElement(self.alg, self.alg.rtau_pow(self.x, j), self.e)

    def sigma(self) -> "DElement":
        """Conjugation by pi_D."""
        return DElement(self.alg, self.alg.rconj_pi(self.x, 1), self.e)

    def __repr__(self):
        parts = [f"{TowerElement(self.alg.tower, z, 0)!r}*pi^{i}" for i, z in enumerate(self.x) if any(z)]
        body = " + ".join(parts) or "0"
        return f"p^-{self.e}*[{body}]" if self.e else body

    def to_json(self) -> dict:
        t = self.alg.tower
        return {"pi_denom": self.alg.s * self.e,
                "coeffs": [TowerElement(t, z, 0, False).to_json() for z in self.x]}


def d_element_from_json(alg: AlgebraDescriptor, data: dict) -> DElement:
    coeffs = [element_from_json(alg.tower, c) for c in data["coeffs"]]
    x = DElement.from_tower_coeffs(alg, coeffs + [alg.tower.zero()] * (alg.s - len(coeffs)))
    b = data.get("pi_denom", 0)
    if b:
        s = alg.s
        up = -(-b // s)
        x = DElement(alg, alg.rmul_pi_left(x.x, s * up - b), x.e + up)
    return x


# --- operations ------------------------------------------------------------

def d_mul(x: DElement, y: DElement) -> DElement:
    return DElement(x.alg, x.alg.rmul(x.x, y.x), x.e + y.e)


def valuation_d(x: DElement) -> int:
    if x.is_zero():
        raise ZeroElement("v_D of zero")
    return x.alg.rval(x.x) - x.alg.s * x.e


def split_phi(x: DElement) -> list:
    """The s x s matrix phi(x) over M (tower elements)."""
    alg = x.alg
    t, s = alg.tower, alg.s
    mat = [[t.zero() for _ in range(s)] for _ in range(s)]
    p_vec = t.p_power(1)
    for k in range(s):
        for i, xi in enumerate(x.x):
            if not any(xi):
                continue
            z = TowerElement(t, alg.sigma_vec(xi, k), x.e)
            l = k + i
            if l < s:
                mat[k][l] = mat[k][l] + z
            else:
                mat[k][l - s] = mat[k][l - s] + z * p_vec
    return mat


def _tower_val(z: TowerElement):
    return None if z.is_zero() else z.val()


def d_inv(x: DElement) -> DElement:
    """Inverse through one linear solve against phi(x)."""
    alg = x.alg
    t = alg.tower
    if x.is_zero():
        raise NotInvertible("zero is not invertible")
    mat = split_phi(x)
    transposed = [list(col) for col in zip(*mat)]
    rhs = [t.one()] + [t.zero()] * (alg.s - 1)
    try:
        y = solve_field(transposed, rhs, _tower_val)
    except Exception as exc:
        raise NotInvertible("reduced norm vanishes at the working precision") from exc
    return DElement.from_tower_coeffs(alg, y)


def reduced_char_poly(x: DElement) -> list:
    """Coefficients of rcp(x), highest degree first, checked to lie in K."""
    t = x.alg.tower
    coeffs = berkowitz(split_phi(x), t.one(), t.zero())
    for c in coeffs:
        if not t.in_K(c):
            raise CoefficientNotInBaseField(f"coefficient {c!r} is not fixed by Frob^f_K")
    return coeffs


def reduced_norm_local(x: DElement) -> TowerElement:
    c0 = reduced_char_poly(x)[-1]
    return -c0 if x.alg.s % 2 else c0


# --- extension of tau -------------------------------------------------------

@dataclass(frozen=True)
class TauSearchReport:
    tau_a: int
    tau_c: tuple
    valid_pairs: tuple  # (a, k) with c = omega^k
    classes: int


def _validate_tau(alg: AlgebraDescriptor) -> bool:
    """Check the automorphism axioms on generators."""
    t = alg.tower
    s, d, f_k, f_K = alg.s, alg.d, t.f_k, t.f_K
    omega = t.omega.c
    gen = t.gen().c
    # restriction to K is Frob^f_k: test on sum_j Frob^(j f_K)(t^i), which span K
    for i in range(t.f_M):
        ti = t._power_rows(gen)[i]
        z = ti
        for j in range(1, s):
            z = _vadd(z, t.frob_vec(ti, j * f_K), t.mod)
        if t.frob_vec(z, alg.tau_a) != t.frob_vec(z, f_k):
            return False
    pi = alg.rpi()
    tau_pi = alg.rtau(pi)
    for z in (omega, gen):
        zr = alg.rscalar(z)
        # tau(pi_D) tau(z) = tau(sigma(z)) tau(pi_D)
        lhs = alg.rmul(tau_pi, alg.rtau(zr))
        rhs = alg.rmul(alg.rtau(alg.rscalar(alg.sigma_vec(z, 1))), tau_pi)
        if lhs != rhs:
            return False
        # sigma and tau commute on M
        if alg.sigma_vec(t.frob_vec(z, alg.tau_a), 1) != t.frob_vec(alg.sigma_vec(z, 1), alg.tau_a):
            return False
        if alg.rtau_pow(zr, d) != zr and d > 1:
            return False
    # tau(pi_D)^s = p
    acc = alg.rone
    for _ in range(s):
        acc = alg.rmul(acc, tau_pi)
    if acc != alg.rmul(alg.rone, alg.rscalar(t.p_power(1).c)):
        return False
    if d > 1:
        img = pi
        for _ in range(d):
            img = alg.rtau(img)
        if img != pi:
            return False
    if (alg.tau_a * d) % t.f_M:
        return False
    return True


def delta_nilpotency_witness(alg: AlgebraDescriptor) -> bool:
    """delta^d maps the basis t^i pi_D^j of O_D into p O_D."""
    t = alg.tower
    rows = t._power_rows(t.gen().c)
    for j in range(alg.s):
        for i in range(t.f_M):
            x = [alg._zero_vec] * alg.s
            x[j] = rows[i]
            x = tuple(x)
            for _ in range(alg.d):
                x = alg.rdelta(x)
            if any(v % t.p for z in x for v in z):
                return False
    return True


def extend_tau(tower: TowerDescriptor, r: int) -> TauSearchReport:
    """Search for the extension of the generator Frob^f_k of Gal(K/k) to D.

    Candidates: tau|_M = Frob^a with a = f_k (mod f_K), tau(pi_D) = omega^k pi_D.
    Valid pairs are grouped into classes modulo conjugation by Teichmuller
    elements of M; exactly one class is expected.
    """
    d, s, f_k, f_K, f_M = tower.d, tower.s, tower.f_k, tower.f_K, tower.f_M
    if d == 1:
        return TauSearchReport(0, tower.one().c, ((0, 0),), 1)
    order = tower.p ** f_M - 1
    omega = tower.omega
    valid = []
    for a in range(f_k, f_M, f_K):
        for k in range(order):
            c = (omega ** k).c
            alg = AlgebraDescriptor(tower, r, a, c)
            if _cheap_tau_filter(alg) and _validate_tau(alg):
                valid.append((a, k))
    if not valid:
        raise NoValidExtension("no candidate (a, c) passes the automorphism axioms")
    # classes modulo c -> c * z sigma(z)^-1 sigma(tau z) tau(z)^-1, z = omega^j
    q_r = tower.q ** r
    classes = {}
    for a, k in valid:
        g = ((1 - q_r) * (1 - tower.p ** a)) % order
        step = gcd(g, order)
        classes.setdefault((a, k % step), []).append(k)
    if len(classes) != 1:
        raise AmbiguousExtension(f"{len(classes)} inequivalent extensions found: {sorted(classes)}")
    a, k = min(valid, key=lambda ak: (ak[1], ak[0]))
    return TauSearchReport(a, (omega ** k).c, tuple(valid), len(classes))


def _cheap_tau_filter(alg: AlgebraDescriptor) -> bool:
    # exponent conditions for c = omega^k: norm to K is 1 and tau-norm is 1
    t = alg.tower
    c = alg.tau_c
    acc = c
    for i in range(1, alg.s):
        acc = _vmul(acc, alg.sigma_vec(c, i), t.red, t.mod)
    if acc != t.one().c:
        return False
    acc = c
    img = c
    for _ in range(1, alg.d):
        img = t.frob_vec(img, alg.tau_a)
        acc = _vmul(acc, img, t.red, t.mod)
    return acc == t.one().c


def make_algebra(tower: TowerDescriptor, r: int = 1) -> AlgebraDescriptor:
    rep = extend_tau(tower, r)
    alg = AlgebraDescriptor(tower, r, rep.tau_a, rep.tau_c)
    if tower.d > 1 and not _validate_tau(alg):
        raise NoValidExtension("selected extension fails validation")
    return alg


def algebra_from_json(data: dict) -> AlgebraDescriptor:
    tower = tower_from_json(data)
    if "tau_a" in data:
        c = element_from_json(tower, data["tau_c"]) if "tau_c" in data else tower.one()
        alg = AlgebraDescriptor(tower, data.get("r", 1), data["tau_a"], c.c)
        if tower.d > 1 and not _validate_tau(alg):
            raise NoValidExtension("tau data in the record fails validation")
        return alg
    return make_algebra(tower, data.get("r", 1))
