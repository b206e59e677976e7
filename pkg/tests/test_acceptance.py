"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every case that raises a library error counts as a failure; nothing is skipped.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

from commutative_ref import Ref
from conftest import algebra
from skewalg.cli import instance_to_json, load_instance
from skewalg.cyclic import (
    _validate_tau,
    algebra_from_json,
    d_element_from_json,
    delta_nilpotency_witness,
    extend_tau,
    make_algebra,
    DElement,
)
from skewalg.errors import SkewAlgError
from skewalg.gen import Generator
from skewalg.linalg import (
    SkewMatrix,
    col_op,
    det_normal_form_from_json,
    dieudonne_det,
    entry_normal_form,
    laurent,
    matrix_from_json,
    op_from_json,
    reduce_full,
    row_op,
)
from skewalg.norms import center_fraction_from_json
from skewalg.reduction import dimension_reduce, monic_norm_check, nr_det_compat, reduced_norm_center
from skewalg.series import (
    CenterSeries,
    DistinguishedPoly,
    SkewSeries,
    center_from_json,
    distinguished_from_json,
    pi_left,
    series_from_json,
    skew_mul,
    weierstrass_divide,
    weierstrass_prepare,
)
from skewalg.tower import element_from_json, make_tower, tower_from_json

FIXTURES = Path(__file__).parent / "fixtures"
# (p, f_k, d, s, N, M) per instance class
CLASSES = {
    "comm": (5, 1, 1, 1, 8, 8),
    "split_s2": (5, 1, 1, 2, 8, 8),
    "d3": (3, 1, 3, 1, 8, 18),
    "d3_s2": (3, 1, 3, 2, 6, 18),
}


class Tally:
    def __init__(self):
        self.total = 0
        self.passed = 0
        self.errors = {}

    def run(self, fn, *args):
        self.total += 1
        try:
            ok = fn(*args)
        except SkewAlgError as exc:
            ok = False
            name = type(exc).__name__
            self.errors[name] = self.errors.get(name, 0) + 1
        self.passed += bool(ok)
        return ok

    def __str__(self):
        extra = "".join(f" {k}x{v}" for k, v in sorted(self.errors.items()))
        return f"{self.passed}/{self.total}{extra}"

    @property
    def ok(self):
        return self.total > 0 and self.passed == self.total


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\nacceptance {number} ({title}): {'PASS' if ok else 'FAIL'} {detail}")


def ints(g):
    return [x[0][0] for x in g.c]


def series_of(alg, M, values):
    return SkewSeries(alg, M, [((v,),) for v in values])


# --- 1 ---------------------------------------------------------------------------


def test_criterion_1_commutative_oracle(capsys):
    p, N, M = 5, 16, 16
    alg = algebra(p, 1, 1, 1, N)
    ref = Ref(p, N, M)
    gen = Generator(101)
    cases = 500
    tallies = {k: Tally() for k in ["skew_mul", "weierstrass_divide", "weierstrass_prepare",
                                     "dieudonne_det", "reduced_norm_center"]}
    start = time.time()

    def rand_f():
        # random reduced order in 0..3
        f = ints(gen.series(alg, M))
        for i in range(gen.randrange(4)):
            f[i] = f[i] * p % ref.mod
        return f

    def mul_case():
        f, g = ints(gen.series(alg, M)), ints(gen.series(alg, M))
        return ints(skew_mul(series_of(alg, M, f), series_of(alg, M, g))) == ref.mul(f, g)

    def prepare_case():
        f = rand_f()
        u, F = weierstrass_prepare(series_of(alg, M, f))
        u_ref, P_ref = ref.prepare(f)
        return ints(u) == u_ref and [x[0][0] for x in F.coeffs] == P_ref

    def divide_case():
        f, g = rand_f(), ints(gen.series(alg, M))
        q, r = weierstrass_divide(series_of(alg, M, g), series_of(alg, M, f))
        q_ref, r_ref = ref.divide(g, f)
        return ints(q) == q_ref and ints(r) == r_ref

    def rand_matrix(n):
        return [[rand_f() for _ in range(n)] for _ in range(n)]

    def to_matrix(A):
        return SkewMatrix.from_series([[series_of(alg, M, x) for x in row] for row in A])

    def det_case():
        A = rand_matrix(2 + gen.randrange(2))
        D = dieudonne_det(to_matrix(A))
        det = ref.det(A)
        c = ref.content(det)
        u_ref, P_ref = ref.prepare([x // p ** c for x in det])
        prec = min(D.prec, N - c)
        mod = p ** prec
        nr_F = [x[0] % mod for x in D.nr_F]
        u_nr = [x[0] % mod for x in D.u_nr]
        return D.w == c and nr_F == [x % mod for x in P_ref + [0] * (M - len(P_ref))] and \
            u_nr == [x % mod for x in u_ref]

    def norm_case():
        A = rand_matrix(1 + gen.randrange(3))
        nr = reduced_norm_center(to_matrix(A))
        mod = p ** nr.prec_p
        return nr.is_integral() and [x[0] % mod for x in nr.numerator] == [x % mod for x in ref.det(A)]

    fns = dict(zip(tallies, [mul_case, divide_case, prepare_case, det_case, norm_case]))
    for _ in range(cases):
        for name, fn in fns.items():
            tallies[name].run(fn)
    elapsed = time.time() - start
    ok = all(t.ok for t in tallies.values()) and elapsed < 60
    detail = ", ".join(f"{k} {v}" for k, v in tallies.items()) + f" in {elapsed:.1f}s"
    report(capsys, 1, "commutative oracle", ok, detail)
    assert ok


# --- 2 ---------------------------------------------------------------------------


@pytest.mark.parametrize("params", [(3, 1, 3, 1), (5, 1, 1, 2)], ids=["d3", "split_s2"])
def test_criterion_2_weierstrass_round_trips(params, capsys):
    N = M = 12
    alg = algebra(*params, N)
    gen = Generator(202)
    cases = 200
    recover, divide, prepare = Tally(), Tally(), Tally()
    start = time.time()

    def recover_case():
        # uniqueness: (u, F) is recovered from u F when deg u < M - e
        e = 1 + gen.randrange(4)
        F = gen.distinguished(alg, e)
        u = gen.unit(alg, M, M - e)
        u2, F2 = weierstrass_prepare(skew_mul(u, F.as_series(M)))
        return F2 == F and u2 == u

    def constructed_f():
        e = gen.randrange(5)
        return skew_mul(gen.unit(alg, M), gen.distinguished(alg, e).as_series(M)), e

    def prepare_case():
        f, e = constructed_f()
        u, F = weierstrass_prepare(f)
        return F.degree == e and skew_mul(u, F.as_series(M)) == f

    def divide_case():
        f, e = constructed_f()
        g = gen.series(alg, M)
        q, r = weierstrass_divide(g, f)
        return skew_mul(q, f) + r == g and r.degree() < e

    for _ in range(cases):
        recover.run(recover_case)
        prepare.run(prepare_case)
        divide.run(divide_case)
    elapsed = time.time() - start
    ok = recover.ok and prepare.ok and divide.ok and elapsed < 300
    report(capsys, 2, f"Weierstrass round trips at {params}", ok,
           f"recovery {recover}, prepare {prepare}, divide {divide} in {elapsed:.1f}s")
    assert ok


# --- 3 ---------------------------------------------------------------------------


def class_alg(name):
    p, f_k, d, s, N, M = CLASSES[name]
    return algebra(p, f_k, d, s, N), M


def permutation_matrix(alg, M, perm):
    zero, one = SkewSeries.zero(alg, M), SkewSeries.one(alg, M)
    return SkewMatrix.from_series([[one if perm[i] == j else zero for j in range(len(perm))]
                                   for i in range(len(perm))])


def test_criterion_3_dieudonne_axioms(capsys):
    cases = 200
    elementary, swap, perms, diag, schur = Tally(), Tally(), Tally(), Tally(), Tally()
    start = time.time()
    names = list(CLASSES)
    gen = Generator(303)

    def elementary_case(alg, M):
        A = gen.matrix(alg, M, 2, 0.3)
        lam = laurent(0, gen.series(alg, M))
        i, j = gen.choice([(0, 1), (1, 0)])
        B, _ = (row_op if gen.randrange(2) else col_op)(A, "add", i, j, lam)
        return dieudonne_det(A).agrees(dieudonne_det(B))

    def swap_case(alg, M):
        A = gen.matrix(alg, M, 2, 0.3)
        B, _ = row_op(A, "swap", 0, 1)
        return dieudonne_det(B).agrees(dieudonne_det(A).times_sign(-1))

    def perm_case(alg, M):
        one = laurent(0, SkewSeries.one(alg, M))
        odd = [(1, 0), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
        even = [(1, 2, 0), (2, 0, 1)]
        minus = entry_normal_form(-one)
        plus = entry_normal_form(one)
        return all(dieudonne_det(permutation_matrix(alg, M, q)).agrees(minus) for q in odd) and \
            all(dieudonne_det(permutation_matrix(alg, M, q)).agrees(plus) for q in even)

    def diag_case(alg, M):
        xs = [laurent(gen.randrange(3) - 1, gen.series(alg, M)) for _ in range(2)]
        prod = xs[0] * xs[1]
        return dieudonne_det(SkewMatrix.diagonal(xs)).agrees(entry_normal_form(prod))

    def schur_case(alg, M):
        A = gen.unit_entry_matrix(alg, M, 2, 0.4)
        a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
        return dieudonne_det(A).agrees(entry_normal_form(a * (d - c * a.inverse() * b)))

    for name in names:
        perms.run(perm_case, *class_alg(name))
    for k in range(cases):
        alg, M = class_alg(names[k % len(names)])
        elementary.run(elementary_case, alg, M)
        schur.run(schur_case, alg, M)
        if k % 4 == 0:
            swap.run(swap_case, alg, M)
            diag.run(diag_case, alg, M)
    elapsed = time.time() - start
    ok = all(t.ok for t in (elementary, swap, perms, diag, schur))
    report(capsys, 3, "Dieudonne determinant axioms", ok,
           f"elementary {elementary}, swap {swap}, permutation {perms}, diagonal {diag}, "
           f"Schur {schur} in {elapsed:.1f}s")
    assert ok


# --- 4 ---------------------------------------------------------------------------


def test_criterion_4_norm_integrality(capsys):
    gen = Generator(404)
    tally = Tally()
    names = list(CLASSES)

    def case(alg, M):
        A = gen.matrix(alg, M, 1 + gen.randrange(2), gen.choice([0.0, 0.5, 1.0]))
        nr = reduced_norm_center(A)
        return nr.p_denom <= 0 and nr.t_denom <= 0

    start = time.time()
    for k in range(100):
        tally.run(case, *class_alg(names[k % len(names)]))
    report(capsys, 4, "reduced norm integrality", tally.ok, f"{tally} in {time.time() - start:.1f}s")
    assert tally.ok


# --- 5 ---------------------------------------------------------------------------


def test_criterion_5_monic_norm(capsys):
    # s = 2 classes at T-precision 8
    setups = [(algebra(5, 1, 1, 2, 8), 8), (algebra(3, 1, 3, 2, 6), 24)]
    gen = Generator(505)
    tally = Tally()

    def case(alg, M):
        e = 1 + gen.randrange(3)
        rep = monic_norm_check(gen.monic(alg, M, e))
        return rep.monic and rep.degree == 2 * e

    start = time.time()
    for alg, M in setups:
        for _ in range(50):
            tally.run(case, alg, M)
    report(capsys, 5, "monic norm at s=2", tally.ok, f"{tally} in {time.time() - start:.1f}s")
    assert tally.ok


# --- 6 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(CLASSES))
def test_criterion_6_norm_det_compatibility(name, capsys):
    alg, M = class_alg(name)
    gen = Generator(606)
    tally = Tally()

    def case():
        A = gen.matrix(alg, M, 1 + gen.randrange(3), gen.choice([0.0, 0.3, 0.6]))
        nr_det_compat(A)
        return True

    start = time.time()
    for _ in range(100):
        tally.run(case)
    report(capsys, 6, f"nr/det compatibility, class {name}", tally.ok,
           f"{tally} in {time.time() - start:.1f}s")
    assert tally.ok


# --- 7 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(CLASSES))
def test_criterion_7_dimension_reduction(name, capsys):
    alg, M = class_alg(name)
    gen = Generator(707)
    small, large = Tally(), Tally()
    exponents = []

    def case(size, block):
        A = gen.matrix(alg, M, size, gen.choice([0.0, 0.4, 0.8]))
        red = dimension_reduce(A, block)
        exponents.append(red.exponent)
        return red.C.is_integral() and red.w <= 0 and red.det_A.agrees(dieudonne_det(red.C)) and \
            red.nr_A.same_value(reduced_norm_center(red.C), red.det_A.prec)

    start = time.time()
    for _ in range(50):
        small.run(case, 2, 1)
    for _ in range(20):
        large.run(case, 4, 2)
    elapsed = time.time() - start
    ok = small.ok and large.ok and elapsed < 600
    report(capsys, 7, f"dimension reduction, class {name}", ok,
           f"M_2(M_1) {small}, M_2(M_2) {large}, max exponent {max(exponents, default=0)} in {elapsed:.1f}s")
    assert ok


# --- 8 ---------------------------------------------------------------------------


def test_criterion_8_tau_extension(capsys):
    tower = make_tower(3, 1, 3, 2, 6)
    rep = extend_tau(tower, 1)
    alg = make_algebra(tower)
    w, pi = alg.omega(), alg.pi()
    checks = {
        "axioms": _validate_tau(alg),
        "tau^d=id": w.tau(alg.d) == w and pi.tau(alg.d) == pi,
        "delta^d in p O_D": delta_nilpotency_witness(alg),
        "one class": rep.classes == 1,
        "chosen pair": (alg.tau_a, alg.tau_c) == (rep.tau_a, rep.tau_c),
    }
    ok = all(checks.values())
    detail = ", ".join(f"{k} {v}" for k, v in checks.items())
    report(capsys, 8, "tau extension at (3,1,3,2)", ok,
           f"{detail}; {len(rep.valid_pairs)} raw pairs in {rep.classes} class")
    assert ok


# --- 9 ---------------------------------------------------------------------------


def round_trips(alg, M, gen):
    tower = alg.tower
    out = {}
    out["tower"] = tower_from_json(tower.to_json()).to_json() == tower.to_json()
    again = algebra_from_json(alg.to_json())
    out["algebra"] = (again.tau_a, again.tau_c, again.r) == (alg.tau_a, alg.tau_c, alg.r)
    z = tower.element(gen.vec(alg), 1)
    out["tower element"] = element_from_json(tower, z.to_json()) == z
    x = DElement(alg, gen.raw(alg), 1)
    out["D element"] = d_element_from_json(alg, x.to_json()) == x
    f = gen.series(alg, M)
    out["series"] = series_from_json(alg, f.to_json()) == f
    F = gen.distinguished(alg, 2)
    out["distinguished"] = distinguished_from_json(alg, F.to_json()) == F
    h = CenterSeries(tower, 3, [tower.one(), tower.zero(), tower.one() + tower.one()])
    out["center series"] = center_from_json(tower, h.to_json()) == h
    A = gen.matrix(alg, M, 2, 0.5)
    A.entries[1][0] = laurent(2, A.entries[1][0].g)
    out["matrix"] = matrix_from_json(alg, A.to_json()) == A
    red = reduce_full(A)
    out["ops"] = all(op_from_json(alg, o.to_json()) == o for o in red.ops_left + red.ops_right)
    D = dieudonne_det(A)
    out["det normal form"] = det_normal_form_from_json(alg, D.to_json()) == D
    nr = reduced_norm_center(A)
    out["center fraction"] = center_fraction_from_json(tower, nr.to_json()).same_value(nr)
    return out


def test_criterion_9_serialization_and_cli(capsys, tmp_path):
    gen = Generator(909)
    failures = []
    for name in CLASSES:
        for kind, good in round_trips(*class_alg(name), gen).items():
            if not good:
                failures.append(f"{name}:{kind}")
    runs = 0
    for name in CLASSES:
        fixture = FIXTURES / f"{name}.json"
        inst = load_instance(str(fixture))
        data = instance_to_json(inst.alg, inst.M, inst.matrices, inst.series)
        if data != json.loads(fixture.read_text(encoding="utf-8")):
            failures.append(f"{name}:instance")
        p, f_k, d, s, N, M = CLASSES[name]
        regen = subprocess.run([sys.executable, "-m", "skewalg", "make-instance", "--params", f"{p},{f_k},{d},{s}",
                                "--prec-p", str(N), "--prec-x", str(M), "--seed", "7", "--sizes", "2"],
                               capture_output=True, text=True)
        runs += 1
        if regen.stdout != fixture.read_text(encoding="utf-8"):
            failures.append(f"{name}:make-instance")
        for matrix in inst.matrices:
            for kind in ("det", "norm", "reduce"):
                args = [kind, "--instance", str(fixture), "--matrix", matrix]
                if kind == "reduce":
                    args += ["--block-size", "1"]
                res = subprocess.run([sys.executable, "-m", "skewalg", *args], capture_output=True, text=True)
                runs += 1
                pinned = (FIXTURES / f"{name}.{matrix}.{kind}.out").read_text(encoding="utf-8")
                if res.returncode != 0 or res.stdout != pinned:
                    failures.append(f"{name}:{matrix}:{kind}")
    first = subprocess.run([sys.executable, "-m", "skewalg", "selftest", "--seed", "3"], capture_output=True, text=True)
    second = subprocess.run([sys.executable, "-m", "skewalg", "selftest", "--seed", "3"], capture_output=True, text=True)
    runs += 2
    if first.stdout != second.stdout or first.returncode != 0:
        failures.append("selftest")
    ok = not failures
    report(capsys, 9, "serialization and CLI determinism", ok,
           f"{runs} CLI runs; failures: {', '.join(failures) or 'none'}")
    assert ok
