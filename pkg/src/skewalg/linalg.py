"""Matrices over O[pi_D^-1], Jacobson-style diagonal reduction and Dieudonne determinants.

Determinants live in the abelian group D^x / [D^x, D^x]; a representative is
pi_D^w * eps * F with eps a unit series and F distinguished.  Classes are
compared through reduced norms: nr(eps F) is prepared as a commutative series
in T, giving a key that does not depend on the representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import random
from typing import Sequence

from .cyclic import AlgebraDescriptor, d_element_from_json
from .errors import (
    BadParameters,
    InfiniteReducedOrder,
    NotUnit,
    PrecisionExhausted,
    ReductionStalled,
    SingularAtPrecision,
)
from .norms import RRing, nr_pi, series_norm
from .series import (
    INFINITE,
    DistinguishedPoly,
    SkewSeries,
    conj_pi,
    distinguished_from_json,
    content,
    context,
    divide_by_monic,
    invert_unit,
    is_unit,
    pi_left,
    reduced_order,
    right_divide_by_monic,
    series_from_json,
    skew_mul,
    weierstrass_prepare,
    _prepare_full,
)

_MIX_SEED = 0x5EED
_MIX_TRIES = 400

# --- entries ---------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentEntry:
    """The value pi_D^-a * g with g an integral series; content-normalised when a > 0."""

    a: int
    g: SkewSeries

    @property
    def alg(self) -> AlgebraDescriptor:
        return self.g.alg

    @property
    def M(self) -> int:
        return self.g.M

    def is_zero(self) -> bool:
        return self.g.is_zero()

    def __bool__(self):
        return not self.g.is_zero()

    def is_unit(self) -> bool:
        return self.a == 0 and is_unit(self.g)

    def valuation(self):
        """v_D of the value: content(g) - a."""
        c = content(self.g)
        return INFINITE if c == INFINITE else c - self.a

    def __add__(self, other: "LaurentEntry") -> "LaurentEntry":
        a = max(self.a, other.a)
        return laurent(a, pi_left(self.g, a - self.a) + pi_left(other.g, a - other.a))

    def __neg__(self):
        return LaurentEntry(self.a, -self.g)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LaurentEntry") -> "LaurentEntry":
        # pi^-a g pi^-b h = pi^-(a+b) (pi^b g pi^-b) h
        return laurent(self.a + other.a, skew_mul(conj_pi(self.g, other.a), other.g))

    def inverse(self) -> "LaurentEntry":
        """Inverse of pi^-a g with g a unit: pi^a (pi^-a g^-1 pi^a)."""
        if not is_unit(self.g):
            raise NotUnit("entry numerator is not a unit")
        return laurent(-self.a, conj_pi(invert_unit(self.g), -self.a))

    def __eq__(self, other):
        return isinstance(other, LaurentEntry) and self.a == other.a and self.g == other.g

    def __hash__(self):
        return hash((self.a, self.g))

    def __repr__(self):
        return f"pi^-{self.a}*({self.g!r})" if self.a else repr(self.g)

    def to_json(self) -> dict:
        return {"a": self.a, "g": self.g.to_json()}


def laurent(a: int, g: SkewSeries) -> LaurentEntry:
    """Normal form of pi_D^-a g for any integer a."""
    if g.is_zero():
        return LaurentEntry(0, g)
    if a < 0:
        return LaurentEntry(0, pi_left(g, -a))
    if a > 0:
        c = content(g)
        k = min(a, c)
        if k:
            g = pi_left(g, -k)
            a -= k
    return LaurentEntry(a, g)


def entry_from_json(alg: AlgebraDescriptor, data: dict) -> LaurentEntry:
    return laurent(data.get("a", 0), series_from_json(alg, data["g"]))


def const_entry(alg: AlgebraDescriptor, M: int, x) -> LaurentEntry:
    """Constant entry from an int or DElement (denominators allowed)."""
    if isinstance(x, int):
        x = alg.element([x])
    e = x.e
    g = SkewSeries(alg, M, [x.x])
    return laurent(alg.s * e, g)


# --- matrices ---------------------------------------------------------------------


class SkewMatrix:
    """Rectangular grid of LaurentEntry values over one algebra and X-precision."""

    __slots__ = ("alg", "M", "rows", "cols", "entries")

    def __init__(self, alg: AlgebraDescriptor, M: int, entries: Sequence[Sequence[LaurentEntry]]):
        self.alg = alg
        self.M = M
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for r in self.entries:
            if len(r) != self.cols:
                raise BadParameters("ragged matrix")
            for e in r:
                if e.M != M:
                    raise BadParameters("entry precision differs from matrix precision")

    @classmethod
    def from_series(cls, rows: Sequence[Sequence[SkewSeries]]) -> "SkewMatrix":
        first = rows[0][0]
        return cls(first.alg, first.M, [[laurent(0, g) for g in r] for r in rows])

    @classmethod
    def identity(cls, alg, M: int, n: int) -> "SkewMatrix":
        one, zero = SkewSeries.one(alg, M), SkewSeries.zero(alg, M)
        return cls(alg, M, [[laurent(0, one if i == j else zero) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag: Sequence[LaurentEntry]) -> "SkewMatrix":
        first = diag[0]
        zero = laurent(0, SkewSeries.zero(first.alg, first.M))
        n = len(diag)
        return cls(first.alg, first.M, [[diag[i] if i == j else zero for j in range(n)] for i in range(n)])

    def copy(self) -> "SkewMatrix":
        return SkewMatrix(self.alg, self.M, [list(r) for r in self.entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def zero_entry(self) -> LaurentEntry:
        return LaurentEntry(0, SkewSeries.zero(self.alg, self.M))

    def __matmul__(self, other: "SkewMatrix") -> "SkewMatrix":
        if self.cols != other.rows:
            raise BadParameters("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.zero_entry()
                for k in range(self.cols):
                    x, y = self.entries[i][k], other.entries[k][j]
                    if x and y:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return SkewMatrix(self.alg, self.M, out)

    def is_diagonal(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.rows) for j in range(self.cols) if i != j)

    def is_integral(self) -> bool:
        return all(e.a == 0 for r in self.entries for e in r)

    def __eq__(self, other):
        return isinstance(other, SkewMatrix) and self.M == other.M and self.entries == other.entries

    def agrees(self, other: "SkewMatrix", prec_p: int) -> bool:
        """Equality of values modulo p^prec_p (absolute)."""
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        for x, y in zip(self.entries, other.entries):
            for a, b in zip(x, y):
                diff = a - b
                if diff and diff.valuation() < self.alg.s * prec_p:
                    return False
        return True

    def __repr__(self):
        return "SkewMatrix(" + repr(self.entries) + ")"

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[e.to_json() for e in r] for r in self.entries]}


def matrix_from_json(alg: AlgebraDescriptor, data: dict) -> SkewMatrix:
    entries = [[entry_from_json(alg, e) for e in r] for r in data["entries"]]
    M = entries[0][0].M if entries and entries[0] else 0
    mat = SkewMatrix(alg, M, entries)
    if (mat.rows, mat.cols) != (data["rows"], data["cols"]):
        raise BadParameters("declared shape does not match entries")
    return mat


# --- elementary operations ------------------------------------------------------------


@dataclass(frozen=True)
class Op:
    """One logged operation.

    kinds: "add" (line i += lam * line j for rows, line i += line j * lam for
    columns), "swap" (i, j), "scale" (row i <- u row i, column i <- column i u).
    ``inv`` holds u^-1 for scalings.
    """

    side: str  # "row" or "col"
    kind: str
    i: int
    j: int = -1
    lam: LaurentEntry | None = None
    inv: LaurentEntry | None = None

    def to_json(self) -> dict:
        out = {"side": self.side, "kind": self.kind, "i": self.i}
        if self.j >= 0:
            out["j"] = self.j
        if self.lam is not None:
            out["lam"] = self.lam.to_json()
        if self.inv is not None:
            out["inv"] = self.inv.to_json()
        return out


def op_from_json(alg, data: dict) -> Op:
    lam = entry_from_json(alg, data["lam"]) if "lam" in data else None
    inv = entry_from_json(alg, data["inv"]) if "inv" in data else None
    return Op(data["side"], data["kind"], data["i"], data.get("j", -1), lam, inv)


def _apply(A: SkewMatrix, op: Op, inverse: bool = False) -> None:
    """Apply an operation (or its inverse) in place."""
    E = A.entries
    if op.kind == "swap":
        if op.side == "row":
            E[op.i], E[op.j] = E[op.j], E[op.i]
        else:
            for r in E:
                r[op.i], r[op.j] = r[op.j], r[op.i]
        return
    if op.kind == "add":
        lam = -op.lam if inverse else op.lam
        if op.side == "row":
            src = E[op.j]
            E[op.i] = [x + lam * y if y else x for x, y in zip(E[op.i], src)]
        else:
            for r in E:
                if r[op.j]:
                    r[op.i] = r[op.i] + r[op.j] * lam
        return
    if op.kind == "scale":
        u = op.inv if inverse else op.lam
        if op.side == "row":
            E[op.i] = [u * x if x else x for x in E[op.i]]
        else:
            for r in E:
                if r[op.i]:
                    r[op.i] = r[op.i] * u
        return
    raise BadParameters(f"unknown operation {op.kind}")


def row_op(A: SkewMatrix, kind: str, i: int, j: int = -1, lam: LaurentEntry | None = None):
    """Returns (new matrix, determinant contribution).

    The contribution is an int (1 or -1) or the LaurentEntry scale factor.
    """
    return _line_op(A, "row", kind, i, j, lam)


def col_op(A: SkewMatrix, kind: str, i: int, j: int = -1, lam: LaurentEntry | None = None):
    return _line_op(A, "col", kind, i, j, lam)


def _line_op(A, side, kind, i, j, lam):
    n = A.rows if side == "row" else A.cols
    for idx in (i, j) if kind != "scale" else (i,):
        if not 0 <= idx < n:
            raise BadParameters(f"index {idx} out of range")
    B = A.copy()
    if kind == "swap":
        _apply(B, Op(side, "swap", i, j))
        return B, -1 if i != j else 1
    if kind == "add":
        if i == j:
            raise BadParameters("add_multiple needs distinct lines")
        _apply(B, Op(side, "add", i, j, lam))
        return B, 1
    if kind == "scale":
        inv = _scale_inverse(lam)
        _apply(B, Op(side, "scale", i, -1, lam, inv))
        return B, lam
    raise BadParameters(f"unknown operation {kind}")


def _scale_inverse(u: LaurentEntry) -> LaurentEntry:
    """Inverse of a scale factor pi^k * unit (k of either sign)."""
    c = content(u.g)
    if c == INFINITE:
        raise NotUnit("zero scale factor")
    g = pi_left(u.g, -c) if c else u.g
    if not is_unit(g):
        raise NotUnit("scale factor is not a pi_D-power times a unit")
    # u = pi^(c-a) g, u^-1 = g^-1 pi^(a-c)
    return laurent(u.a - c, invert_unit(g)) * laurent(c - u.a, SkewSeries.one(u.alg, u.M))


def replay(ops_left: Sequence[Op], B: SkewMatrix, ops_right: Sequence[Op]) -> SkewMatrix:
    """Undo the logged operations on B, recovering the original matrix."""
    A = B.copy()
    for op in reversed(ops_right):
        _apply(A, op, inverse=True)
    for op in reversed(ops_left):
        _apply(A, op, inverse=True)
    return A


# --- diagonal reduction ---------------------------------------------------------------


@dataclass
class Reduction:
    ops_left: list
    B: SkewMatrix
    ops_right: list
    loss: int  # v_D digits lost along the whole operation log
    sign: int = 1
    pi_exp: int = 0  # det(A) = sign * pi^pi_exp * prod(units) * det(B)
    units: list = field(default_factory=list)
    diag_parts: list = field(default_factory=list)  # per diagonal entry: (w, content-free series)
    err: list | None = None  # per entry of B: v_D of its absolute error

    @property
    def replay_prec(self) -> int:
        """p-adic precision at which ops_left * B * ops_right reproduces A."""
        alg = self.B.alg
        extra = max([0] + [w for w, _ in self.diag_parts])
        return alg.tower.N - (-(-(self.loss + extra) // alg.s))

    @property
    def prec_out(self) -> int:
        """Relative p-adic precision of the diagonal product, min over i, j of err_ij - w_i."""
        if self.err is None:
            return self.replay_prec
        alg = self.B.alg
        rel = min(e - w for (w, _), row in zip(self.diag_parts, self.err) for e in row)
        return min(alg.tower.N, rel // alg.s)


def _preparable(g: SkewSeries) -> bool:
    """Content-free g whose part from the reduced order on is a unit."""
    e = reduced_order(g)
    return e != INFINITE and is_unit(g.high(e))


def _usable(x: LaurentEntry) -> bool:
    if not x:
        return False
    c = content(x.g)
    return _preparable(pi_left(x.g, -c) if c else x.g)


class _Reducer:
    def __init__(self, A: SkewMatrix, max_steps: int | None = None):
        if A.rows != A.cols:
            raise BadParameters("diagonal reduction needs a square matrix")
        self.A = A.copy()
        self.alg = A.alg
        self.n = A.rows
        self.ops_left: list = []
        self.ops_right: list = []
        self.loss = max([0] + [e.a for r in A.entries for e in r])
        self.full = A.alg.s * A.alg.tower.N
        self.err = [[self.full - e.a for e in r] for r in A.entries]
        self.sign = 1
        self.pi_exp = 0
        self.units: list = []
        self.max_steps = max_steps or 40 * (self.n + 1) * (A.M + 1)

    # logging wrappers
    def _row(self, kind, i, j=-1, lam=None, inv=None):
        op = Op("row", kind, i, j, lam, inv)
        _apply(self.A, op)
        self.ops_left.append(op)
        self._note(lam)
        err = self.err
        if kind == "swap":
            err[i], err[j] = err[j], err[i]
        elif kind == "add":
            v = lam.valuation()
            err[i] = [min(a, b + v) for a, b in zip(err[i], err[j])]
        else:
            v = lam.valuation()
            err[i] = [a + v for a in err[i]]
        self._cap()

    def _col(self, kind, i, j=-1, lam=None, inv=None):
        op = Op("col", kind, i, j, lam, inv)
        _apply(self.A, op)
        self.ops_right.append(op)
        self._note(lam)
        for row in self.err:
            if kind == "swap":
                row[i], row[j] = row[j], row[i]
            elif kind == "add":
                row[i] = min(row[i], row[j] + lam.valuation())
            else:
                row[i] += lam.valuation()
        self._cap()

    def _note(self, lam):
        if lam is not None and lam.a > 0:
            self.loss += lam.a

    def _cap(self):
        # stored numerators are only known mod p^N
        for row, er in zip(self.A.entries, self.err):
            for c, e in enumerate(row):
                er[c] = min(er[c], self.full - e.a)

    def _swap_to(self, k, i, j):
        if i != k:
            self._row("swap", k, i)
            self.sign = -self.sign
        if j != k:
            self._col("swap", k, j)
            self.sign = -self.sign

    def _minor_is_zero(self, k) -> bool:
        E = self.A.entries
        return not any(E[i][j] for i in range(k, self.n) for j in range(k, self.n))

    def _cross_clear(self, k) -> bool:
        E = self.A.entries
        return all(not E[i][k] for i in range(k + 1, self.n)) and all(not E[k][j] for j in range(k + 1, self.n))

    # pivot choices
    def _find_unit(self, k):
        E = self.A.entries
        for i in range(k, self.n):
            for j in range(k, self.n):
                if E[i][j].is_unit():
                    return i, j
        return None

    def _candidates(self, k):
        E = self.A.entries
        out = []
        for i in range(k, self.n):
            for j in range(k, self.n):
                e = E[i][j]
                if not e:
                    continue
                c = content(e.g)
                g = pi_left(e.g, -c) if c else e.g
                if _preparable(g):
                    out.append((reduced_order(g), c - e.a, i, j))
        out.sort()
        return out

    def _eliminate_unit(self, k):
        E = self.A.entries
        P = E[k][k]
        Pinv = P.inverse()
        for i in range(k + 1, self.n):
            if E[i][k]:
                self._row("add", i, k, -(E[i][k] * Pinv))
                E[i][k] = self.A.zero_entry()
        for j in range(k + 1, self.n):
            if E[k][j]:
                self._col("add", j, k, -(Pinv * E[k][j]))
                E[k][j] = self.A.zero_entry()
        self._cap()

    def _eliminate_weierstrass(self, k) -> bool | None:
        """Make the pivot distinguished and replace the cross by remainders.

        Returns None when the pivot admits no preparation, otherwise whether the
        cross changed.
        """
        E = self.A.entries
        P = E[k][k]
        c = content(P.g)
        g = pi_left(P.g, -c) if c else P.g
        try:
            prep = _prepare_full(g)
        except NotUnit:
            return None
        eps, F = prep.unit, prep.F
        t = c - P.a  # pivot = pi^t eps F
        M = self.A.M
        if eps != SkewSeries.one(self.alg, M):
            # scale row k by the unit pi^t eps^-1 pi^-t so the pivot becomes pi^t F
            u = laurent(0, conj_pi(prep.unit_inverse, t))
            u_inv = laurent(0, conj_pi(eps, t))
            self._row("scale", k, -1, u, u_inv)
            # det(old) = u^-1 det(new), and u^-1 is conjugate to eps
            self.units.append(eps)
        before = [E[i][k] for i in range(k + 1, self.n)] + [E[k][j] for j in range(k + 1, self.n)]
        pt, pt_inv = laurent(-t, SkewSeries.one(self.alg, M)), laurent(t, SkewSeries.one(self.alg, M))
        E[k][k] = laurent(-t, F.as_series(M))
        for i in range(k + 1, self.n):
            e = E[i][k]
            if not e:
                continue
            # pi^-t e = q F + r, so e = (pi^t q pi^-t) pivot + pi^t r
            y = pt_inv * e
            q, r = divide_by_monic(y.g, F)
            if q:
                self._row("add", i, k, -(pt * laurent(y.a, q) * pt_inv))
            E[i][k] = pt * laurent(y.a, r)
        for j in range(k + 1, self.n):
            e = E[k][j]
            if not e:
                continue
            # pi^-t e = pi^-b h = F q + r, dividing on the right after moving pi^-b across h
            y = pt_inv * e
            q, r = right_divide_by_monic(conj_pi(y.g, -y.a), F)
            if q:
                self._col("add", j, k, -laurent(y.a, conj_pi(q, y.a)))
            E[k][j] = pt * laurent(y.a, conj_pi(r, y.a))
        self._cap()
        after = [E[i][k] for i in range(k + 1, self.n)] + [E[k][j] for j in range(k + 1, self.n)]
        return after != before

    def _residue_multipliers(self):
        """Deterministic stream of multipliers sum_{j<d} c_j X^j with Teichmuller c_j."""
        alg, M = self.alg, self.A.M
        tower = alg.tower
        size = tower.p ** tower.f_M - 1
        roots = [tower.zero()] + [tower.omega ** e for e in range(size)]
        yield from (const_entry(alg, M, alg.scalar(z)) for z in roots[1:25])
        if alg.d == 1:
            return
        rng = random.Random(_MIX_SEED)
        zero = alg.rzero
        for _ in range(_MIX_TRIES):
            coeffs = [alg.scalar(rng.choice(roots)).x for _ in range(min(alg.d, M))]
            if all(c == zero for c in coeffs):
                continue
            yield laurent(0, SkewSeries(alg, M, coeffs))

    def _improves(self, x: LaurentEntry, bound) -> bool:
        """x is a unit, or preparable of reduced order below ``bound``."""
        if not _usable(x):
            return False
        c = content(x.g)
        return reduced_order(pi_left(x.g, -c) if c else x.g) < bound

    def _mix(self, k, bound=INFINITE) -> bool:
        """One row or column step that creates a better pivot than reduced order ``bound``.

        Tries adding a multiple of one line to another, then scaling a line by a unit.
        """
        E = self.A.entries
        idx = range(k, self.n)
        pairs = [(i, j) for i in idx for j in idx if i != j]
        multipliers = list(self._residue_multipliers())
        for lam in multipliers:
            for i, j in pairs:
                if any(self._improves(E[i][c] + lam * E[j][c], bound) for c in idx if E[j][c]):
                    self._row("add", i, j, lam)
                    return True
                if any(self._improves(E[r][i] + E[r][j] * lam, bound) for r in idx if E[r][j]):
                    self._col("add", i, j, lam)
                    return True
        for lam in multipliers:
            if not is_unit(lam.g):
                continue
            inv = laurent(0, invert_unit(lam.g))
            for i in idx:
                if any(self._improves(lam * E[i][c], bound) for c in idx if E[i][c]):
                    # det(new) = lam det(old)
                    self._row("scale", i, -1, lam, inv)
                    self.units.append(inv.g)
                    return True
                if any(self._improves(E[r][i] * lam, bound) for r in idx if E[r][i]):
                    self._col("scale", i, -1, lam, inv)
                    self.units.append(inv.g)
                    return True
        return False

    def run(self) -> Reduction:
        steps = 0
        diag_parts = []
        for k in range(self.n):
            while True:
                steps += 1
                if steps > self.max_steps:
                    raise ReductionStalled("diagonal reduction exceeded its step cap")
                if k == self.n - 1 or (self._cross_clear(k) and self.A.entries[k][k]):
                    break
                pos = self._find_unit(k)
                if pos is not None:
                    self._swap_to(k, *pos)
                    self._eliminate_unit(k)
                    break
                if self._minor_is_zero(k):
                    raise SingularAtPrecision("remaining minor vanishes at the working precision")
                progress, bound = None, INFINITE
                for order, _, i, j in self._candidates(k):
                    self._swap_to(k, i, j)
                    progress = self._eliminate_weierstrass(k)
                    if progress is not None:
                        bound = order
                        break
                if self._cross_clear(k):
                    break
                if not progress and not self._mix(k, bound):
                    raise ReductionStalled("no pivot makes progress and mixing found none")
        E = self.A.entries
        for k in range(self.n):
            e = E[k][k]
            c = content(e.g)
            if c == INFINITE:
                raise SingularAtPrecision("zero on the diagonal")
            g = pi_left(e.g, -c) if c else e.g
            diag_parts.append((c - e.a, g))
        self._cap()
        return Reduction(self.ops_left, self.A, self.ops_right, self.loss, self.sign, self.pi_exp,
                         self.units, diag_parts, self.err)


def diagonal_reduce(A: SkewMatrix, max_steps: int | None = None):
    """Returns (ops_left, B, ops_right); see :func:`reduce_full` for bookkeeping."""
    red = reduce_full(A, max_steps)
    return red.ops_left, red.B, red.ops_right


def reduce_full(A: SkewMatrix, max_steps: int | None = None) -> Reduction:
    return _Reducer(A, max_steps).run()


# --- determinants -------------------------------------------------------------------


def _commutative_algebra(alg: AlgebraDescriptor, N: int) -> AlgebraDescriptor:
    """O_M[[T]] as a d = s = 1 algebra sharing the basis of O_M."""
    key = ("commutative", N)
    out = alg._cache.get(key)
    if out is None:
        from .tower import TowerDescriptor
        t = alg.tower
        tower = TowerDescriptor(t.p, t.f_M, 1, 1, N, t.def_poly)
        out = AlgebraDescriptor(tower, 1)
        alg._cache[key] = out
    return out




def center_prepare(alg: AlgebraDescriptor, num: Sequence[tuple], N: int):
    """Commutative Weierstrass preparation of a T-series over O_M at p-precision N.

    Returns (unit, distinguished) coefficient tuples, both of length len(num).
    """
    calg = _commutative_algebra(alg, N)
    mod = calg.tower.mod
    m = len(num)
    ser = SkewSeries(calg, m, [(tuple(v % mod for v in x),) for x in num])
    try:
        u, P = weierstrass_prepare(ser)
    except InfiniteReducedOrder:
        raise PrecisionExhausted("reduced norm vanishes modulo (p, T^m); raise the X-precision") from None
    zero = (0,) * alg.tower.f_M
    u_c = tuple(x[0] for x in u.c)
    P_c = tuple(x[0] for x in P.coeffs) + (zero,) * (m - len(P.coeffs))
    return u_c, P_c


@dataclass(frozen=True)
class DetNormalForm:
    """Dieudonne determinant data: det = pi_D^w * eps * F modulo commutators.

    ``v`` is v_p(nr(det)) and nr(det) = p^v * u_nr * nr_F, with ``u_nr`` a unit
    and ``nr_F`` distinguished T-series over O_M.  For d = 1, v = w and u_nr,
    nr_F are nr(eps), nr(F).  For d > 1 the pi_D-exponent w of a representative
    is not an invariant (content-free series can have norms divisible by p), so
    the comparison key is (v, nr_F, u_nr) and w is reported only.  ``eps`` and
    ``F`` are None when some factor admits no Weierstrass preparation.  When
    p^-v nr(det) vanishes modulo (p, T^m) the split is not determined at this
    precision: ``nr_F`` is None, ``u_nr`` holds the whole of p^-v nr(det) and
    comparisons fall back to the product.  ``prec`` is the guaranteed p-adic
    precision of u_nr and nr_F.
    """

    w: int
    F: DistinguishedPoly | None
    eps: SkewSeries | None
    u_nr: tuple
    nr_F: tuple | None
    prec: int
    v: int
    p: int = field(default=0, compare=False, repr=False)
    ds: int = field(default=1, compare=False, repr=False)
    tower: object = field(default=None, compare=False, repr=False)

    def key(self):
        return (self.v, self.nr_F, self.u_nr)

    def agrees(self, other: "DetNormalForm", prec: int | None = None) -> bool:
        P = min(self.prec, other.prec) if prec is None else prec
        if self.v != other.v:
            return False
        if self.nr_F is None or other.nr_F is None:
            return _trunc(self.norm_body(), self.p, P) == _trunc(other.norm_body(), self.p, P)
        return _trunc(self.nr_F, self.p, P) == _trunc(other.nr_F, self.p, P) and \
            _trunc(self.u_nr, self.p, P) == _trunc(other.u_nr, self.p, P)

    def norm_body(self) -> tuple:
        """u_nr * nr_F as one T-series."""
        if self.nr_F is None:
            return self.u_nr
        return RRing(self.tower, len(self.u_nr)).mul(self.u_nr, self.nr_F)

    def times_sign(self, sign: int) -> "DetNormalForm":
        """Normal form of sign * det."""
        if sign > 0:
            return self
        eps = None if self.eps is None else -self.eps
        u = self.u_nr
        if self.ds % 2:
            mod = self.p ** self.prec
            u = tuple(tuple((-v) % mod for v in x) for x in u)
        return DetNormalForm(self.w, self.F, eps, u, self.nr_F, self.prec, self.v, self.p, self.ds, self.tower)

    def value(self) -> LaurentEntry | None:
        """The representative pi_D^w eps F as one entry, when available."""
        if self.eps is None:
            return None
        M = self.eps.M
        body = self.eps if self.F is None else skew_mul(self.eps, self.F.as_series(M))
        return laurent(-self.w, body)

    def nr_degree(self) -> int:
        """T-degree of nr(F), or None when the split is undetermined."""
        if self.nr_F is None:
            return None
        for j in range(len(self.nr_F) - 1, -1, -1):
            if any(self.nr_F[j]):
                return j
        return -1

    def to_json(self) -> dict:
        return {"w": self.w, "v_nr": self.v, "F": None if self.F is None else self.F.to_json(),
                "eps": None if self.eps is None else self.eps.to_json(),
                "u_nr": [list(x) for x in self.u_nr],
                "nr_F": None if self.nr_F is None else [list(x) for x in self.nr_F],
                "precision": {"p": self.prec, "t": len(self.u_nr)}}


def det_normal_form_from_json(alg: AlgebraDescriptor, data: dict) -> DetNormalForm:
    F = None if data["F"] is None else distinguished_from_json(alg, data["F"])
    eps = None if data["eps"] is None else series_from_json(alg, data["eps"])
    u_nr = tuple(tuple(x) for x in data["u_nr"])
    nr_F = None if data["nr_F"] is None else tuple(tuple(x) for x in data["nr_F"])
    return DetNormalForm(data["w"], F, eps, u_nr, nr_F, data["precision"]["p"], data["v_nr"], alg.tower.p,
                         alg.d * alg.s, alg.tower)


def _trunc(t, p, P):
    mod = p ** P
    return tuple(tuple(v % mod for v in x) for x in t)


def normal_form_from_parts(alg: AlgebraDescriptor, M: int, w: int, factors: Sequence[SkewSeries],
                           sign: int, prec: int) -> DetNormalForm:
    """Normal form of sign * pi_D^w * prod(factors), each factor of content zero."""
    if prec < 1:
        raise PrecisionExhausted("no p-adic precision left for the determinant")
    m = context(alg, M).m
    R = RRing(alg.tower, m)
    nr = R.from_int(sign ** (alg.d * alg.s))
    for g in factors:
        nr = R.mul(nr, series_norm(g))
    # for d > 1 a content-free factor can have a norm divisible by p
    extra = R.val_p(nr) if any(any(x) for x in nr) else 0
    prec -= extra
    if prec < 1:
        raise PrecisionExhausted("no p-adic precision left for the determinant norm")
    nr = R.div_p(nr, extra)
    try:
        u_c, P_c = center_prepare(alg, nr, prec)
    except PrecisionExhausted:
        mod = alg.tower.p ** prec
        u_c, P_c = tuple(tuple(v % mod for v in x) for x in nr), None
    if (alg.s - 1) * alg.d * w % 2:
        mod = alg.tower.p ** prec
        u_c = tuple(tuple((-v) % mod for v in x) for x in u_c)
    eps, F = _split_factors(alg, M, factors, sign)
    return DetNormalForm(w, F, eps, u_c, P_c, prec, alg.d * w + extra, alg.tower.p, alg.d * alg.s, alg.tower)


def _split_factors(alg, M, factors, sign):
    """Product of the unit parts and of the distinguished parts, or (None, None)."""
    eps = SkewSeries.one(alg, M)
    Fs = []
    for g in factors:
        if is_unit(g):
            eps = skew_mul(eps, g)
            continue
        try:
            u, F = weierstrass_prepare(g)
        except NotUnit:
            return None, None
        eps = skew_mul(eps, u)
        Fs.append(F)
    if sign < 0:
        eps = -eps
    if sum(f.degree for f in Fs) >= M:
        return eps, None
    prod = SkewSeries.one(alg, M)
    for f in Fs:
        prod = skew_mul(prod, f.as_series(M))
    e = sum(f.degree for f in Fs)
    return eps, DistinguishedPoly(alg, prod.c[: e + 1])


def det_from_reduction(red: Reduction) -> DetNormalForm:
    alg, M = red.B.alg, red.B.M
    w = red.pi_exp + sum(part[0] for part in red.diag_parts)
    factors = list(red.units) + [part[1] for part in red.diag_parts]
    return normal_form_from_parts(alg, M, w, factors, red.sign, red.prec_out)


def dieudonne_det(A: SkewMatrix) -> DetNormalForm:
    return det_from_reduction(reduce_full(A))


def entry_normal_form(x: LaurentEntry, prec: int | None = None) -> DetNormalForm:
    """Normal form of a single element (the determinant of a 1x1 matrix)."""
    alg = x.alg
    c = content(x.g)
    if c == INFINITE:
        raise SingularAtPrecision("zero element")
    g = pi_left(x.g, -c) if c else x.g
    if prec is None:
        prec = alg.tower.N - (-(-(x.a + max(c - x.a, 0)) // alg.s))
    return normal_form_from_parts(alg, x.M, c - x.a, [g], 1, prec)
