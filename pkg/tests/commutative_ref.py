"""Independent reference over Z_p[[X]] / (p^N, X^M) using plain integer lists.

Nothing here imports the package: power series are lists of ints, preparation
is Hensel lifting of the factorisation f = X^e * v mod p, determinants are
Leibniz sums.
"""

from itertools import permutations


class Ref:
    def __init__(self, p, N, M):
        self.p, self.N, self.M = p, N, M
        self.mod = p ** N

    def norm(self, f):
        f = [c % self.mod for c in f[: self.M]]
        return f + [0] * (self.M - len(f))

    def add(self, f, g):
        return self.norm([a + b for a, b in zip(self.norm(f), self.norm(g))])

    def sub(self, f, g):
        return self.norm([a - b for a, b in zip(self.norm(f), self.norm(g))])

    def mul(self, f, g):
        out = [0] * self.M
        for i, a in enumerate(f[: self.M]):
            if a:
                for j, b in enumerate(g[: self.M - i]):
                    out[i + j] += a * b
        return self.norm(out)

    def inv(self, f):
        """Power series inverse of a unit by solving term by term."""
        a0inv = pow(f[0], -1, self.mod)
        out = [0] * self.M
        for k in range(self.M):
            acc = (1 if k == 0 else 0) - sum(f[i] * out[k - i] for i in range(1, k + 1) if i < len(f))
            out[k] = acc * a0inv % self.mod
        return out

    def order(self, f):
        for i, c in enumerate(f):
            if c % self.p:
                return i
        return None

    def content(self, f):
        v = None
        for c in f:
            if c % self.mod:
                k, c = 0, c % self.mod
                while c % self.p == 0:
                    c //= self.p
                    k += 1
                v = k if v is None else min(v, k)
        return v

    # polynomial helpers (exact over Z / p^N, lists low to high)
    def _trim(self, a):
        a = [c % self.mod for c in a]
        while a and a[-1] == 0:
            a.pop()
        return a

    def pmul(self, a, b, mod):
        out = [0] * (len(a) + len(b) - 1) if a and b else []
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % mod
        return out

    def pdivmod(self, a, b, mod):
        """Division by a polynomial with unit leading coefficient."""
        a = [c % mod for c in a]
        lc_inv = pow(b[-1], -1, mod)
        q = [0] * max(len(a) - len(b) + 1, 1)
        for k in range(len(a) - len(b), -1, -1):
            c = a[k + len(b) - 1] * lc_inv % mod
            q[k] = c
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - c * y) % mod
        return q, a[: len(b) - 1]

    def _egcd_mod_p(self, a, b):
        """s, t with s a + t b = 1 over F_p (a, b coprime)."""
        p = self.p

        def trim(x):
            x = [c % p for c in x]
            while x and x[-1] == 0:
                x.pop()
            return x

        def sub(x, y):
            n = max(len(x), len(y))
            return trim([(x[i] if i < len(x) else 0) - (y[i] if i < len(y) else 0) for i in range(n)])

        r0, r1 = trim(a), trim(b)
        s0, s1, t0, t1 = [1], [], [], [1]
        while r1:
            q, r = self.pdivmod(r0, r1, p)
            q, r = trim(q), trim(r)
            r0, r1 = r1, r
            s0, s1 = s1, sub(s0, self.pmul(q, s1, p))
            t0, t1 = t1, sub(t0, self.pmul(q, t1, p))
        c = pow(r0[0], -1, p)
        return [x * c % p for x in s0], [x * c % p for x in t0]

    def prepare(self, f):
        """f = u * P with P distinguished; Hensel lift of X^e * v (mod p) as polynomials."""
        f = self._trim(self.norm(f))
        e = self.order(f)
        if e is None:
            raise ValueError("no unit coefficient")
        mod = self.mod
        P = [0] * e + [1]
        v = [c % self.p for c in f[e:]]
        if e == 0:
            return self.norm(f), [1]
        s, t = self._egcd_mod_p(P, v)  # s P + t v = 1 mod p
        # linear Hensel: keep P monic of degree e and lift one p-adic digit per round
        for k in range(1, self.N):
            pk = self.p ** k
            err = [(x - y) % mod for x, y in zip(f + [0] * len(f), self.pmul(P, v, mod) + [0] * len(f))]
            err = self._trim(err)
            err = [c // pk % self.p for c in err]
            # solve dP * v + P * dv = err mod p with deg dP < e
            tmp = self.pmul(t, err, self.p)
            _, dP = self.pdivmod(tmp, [c % self.p for c in P], self.p)
            rest = [(a - b) % self.p for a, b in
                    zip(err + [0] * (len(P) + len(v)), self.pmul(dP, v, self.p) + [0] * (len(P) + len(v)))]
            dv, rem = self.pdivmod(self._trim_p(rest), [c % self.p for c in P], self.p)
            assert not any(rem)
            P = [(a + pk * b) % mod for a, b in zip(P, dP + [0] * (len(P) - len(dP)))]
            v = [(a + pk * (dv[i] if i < len(dv) else 0)) % mod for i, a in
                 enumerate(v + [0] * max(0, len(dv) - len(v)))]
        return self.norm(v), P

    def _trim_p(self, a):
        a = [c % self.p for c in a]
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        return a or [0]

    def divide(self, g, f):
        """g = q f + r with deg r < ord(f)."""
        u, P = self.prepare(f)
        e = len(P) - 1
        q1, r = self.pdivmod(self.norm(g), P, self.mod) if e else (self.norm(g), [])
        q = self.mul(self.norm(q1), self.inv(u))
        return q, self.norm(r)

    def det(self, A):
        n = len(A)
        total = [0] * self.M
        for perm in permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = [1] + [0] * (self.M - 1)
            for i in range(n):
                term = self.mul(term, A[i][perm[i]])
            total = self.add(total, term) if sign > 0 else self.sub(total, term)
        return total
