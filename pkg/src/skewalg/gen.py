"""Seeded generators for random elements, series and matrices.

All randomness in tests, the self-test and fixture generation goes through
:class:`Generator`, so a seed pins every produced object.
"""

from __future__ import annotations

import random

from .cyclic import AlgebraDescriptor
from .linalg import SkewMatrix, laurent
from .series import DistinguishedPoly, SkewSeries, is_unit, pi_left, skew_mul


class Generator:
    def __init__(self, seed: int):
        self.seed = seed
        self.rng = random.Random(seed)

    def vec(self, alg: AlgebraDescriptor) -> tuple:
        t = alg.tower
        return tuple(self.rng.randrange(t.mod) for _ in range(t.f_M))

    def raw(self, alg: AlgebraDescriptor) -> tuple:
        """Random integral element of O_D in raw form."""
        return tuple(self.vec(alg) for _ in range(alg.s))

    def raw_radical(self, alg: AlgebraDescriptor) -> tuple:
        return alg.rmul_pi_left(self.raw(alg), 1)

    def series(self, alg: AlgebraDescriptor, M: int, length: int | None = None) -> SkewSeries:
        n = M if length is None else min(length, M)
        return SkewSeries(alg, M, [self.raw(alg) for _ in range(n)])

    def radical_series(self, alg: AlgebraDescriptor, M: int) -> SkewSeries:
        """Series in the ideal generated by pi_D and X."""
        g = self.series(alg, M)
        if self.rng.random() < 0.5:
            return pi_left(g, 1)
        return skew_mul(SkewSeries.x(alg, M), g)

    def unit(self, alg: AlgebraDescriptor, M: int, length: int | None = None, tries: int = 200) -> SkewSeries:
        """Random unit; ``length`` bounds the number of X-coefficients."""
        for _ in range(tries):
            g = self.series(alg, M, length)
            if is_unit(g):
                return g
        raise RuntimeError("no unit found; the residue ring should make this impossible")

    def distinguished(self, alg: AlgebraDescriptor, e: int) -> DistinguishedPoly:
        return DistinguishedPoly(alg, tuple(self.raw_radical(alg) for _ in range(e)) + (alg.rone,))

    def monic(self, alg: AlgebraDescriptor, M: int, e: int) -> SkewSeries:
        """Monic integral polynomial of degree e (coefficients unrestricted)."""
        return SkewSeries(alg, M, [self.raw(alg) for _ in range(e)] + [alg.rone])

    def entry(self, alg: AlgebraDescriptor, M: int, radical_rate: float = 0.0):
        if self.rng.random() < radical_rate:
            return laurent(0, self.radical_series(alg, M))
        return laurent(0, self.series(alg, M))

    def matrix(self, alg: AlgebraDescriptor, M: int, n: int, radical_rate: float = 0.0) -> SkewMatrix:
        return SkewMatrix(alg, M, [[self.entry(alg, M, radical_rate) for _ in range(n)] for _ in range(n)])

    def unit_entry_matrix(self, alg: AlgebraDescriptor, M: int, n: int, radical_rate: float = 0.0) -> SkewMatrix:
        """Random matrix whose top-left entry is a unit."""
        A = self.matrix(alg, M, n, radical_rate)
        A.entries[0][0] = laurent(0, self.unit(alg, M))
        return A

    def choice(self, seq):
        return self.rng.choice(seq)

    def randrange(self, *args):
        return self.rng.randrange(*args)
