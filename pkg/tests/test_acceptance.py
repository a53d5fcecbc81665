"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Each check runs inside a timer. The verdict line is printed even when the
check fails, and the runtime limit is asserted on top of correctness.
"""

import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from kronfib import bundles as bd
from kronfib import harness
from kronfib import kronrep as kr
from kronfib.bundles import Verdict
from kronfib.cli import main as cli_main
from kronfib.harness import ExperimentReport
from kronfib.linalg import FieldSpec
from kronfib.sequence import fib_table, fib_value, pell_solutions, tits_form


@contextmanager
def criterion(capsys, number, title, limit):
    started = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - started
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {title}: {'PASS' if ok else 'FAIL'} "
                  f"({elapsed:.2f} s, limit {limit:g} s)")
    assert elapsed < limit, f"criterion {number} took {elapsed:.1f} s (limit {limit} s)"


def _plain_sequence(w, K):
    a = [0, 1]
    while len(a) <= K + 2:
        a.append(w * a[-1] - a[-2])
    return a


# 1 ---------------------------------------------------------------------------

def test_identity_suite(capsys):
    with criterion(capsys, 1, "sequence identities", 1.0):
        for w in range(3, 11):
            table = fib_table(w, 32).values
            assert list(table) == _plain_sequence(w, 32)[:33]
            a = list(table)
            for k in range(1, 31):
                assert a[k - 1] ** 2 + a[k] ** 2 - w * a[k - 1] * a[k] == 1
                assert a[k] ** 2 - a[k + 1] * a[k - 1] == 1
                assert a[k + 1] * a[k] - a[k - 1] * a[k + 2] == w


# 2 ---------------------------------------------------------------------------

BOUND = 10**5


def _unit_form_solutions(w, bound):
    """Every (s, t) with 0 <= s <= t <= bound and q = 1.

    For fixed s the form is a convex quadratic in t, so q = 1 can only hold at
    its two real roots.  Float roots locate the candidates, each checked in
    exact int64 arithmetic together with its neighbours.
    """
    s = np.arange(bound + 1, dtype=np.int64)
    disc = np.sqrt((w * w - 4) * s.astype(np.float64) ** 2 + 4.0)
    found = set()
    for sign in (-1.0, 1.0):
        centre = np.rint((w * s + sign * disc) / 2.0).astype(np.int64)
        for off in (-1, 0, 1):
            t = centre + off
            keep = (t >= s) & (t <= bound)
            ss, tt = s[keep], t[keep]
            q = ss * ss + tt * tt - w * ss * tt
            hit = q == 1
            found.update(zip(ss[hit].tolist(), tt[hit].tolist()))
    return found


def _full_grid(w, bound):
    """Literal scan of every pair in the box, one row of t per s."""
    found = set()
    t = np.arange(bound + 1, dtype=np.int64)
    for s in range(bound + 1):
        tt = t[s:]
        q = s * s + tt * tt - w * s * tt
        found.update((s, int(x)) for x in tt[q == 1])
    return found


def test_pell_characterization(capsys):
    with criterion(capsys, 2, "q = 1 exactly at consecutive pairs", 30.0):
        for w in (3, 4, 5):
            consecutive = set()
            a = [0, 1]
            while a[-1] <= BOUND:
                if a[-2] <= BOUND:
                    consecutive.add((a[-2], a[-1]))
                a.append(w * a[-1] - a[-2])
            consecutive = {(s, t) for s, t in consecutive if t <= BOUND}
            scanned = _unit_form_solutions(w, BOUND)
            assert scanned == consecutive
            lib = {(sh.s, sh.t) for sh in pell_solutions(w, BOUND).solutions}
            assert lib == consecutive
            small = 3 * 10**4
            assert _full_grid(w, small) == {(s, t) for s, t in consecutive if t <= small}


# 3 ---------------------------------------------------------------------------

def test_kac_dichotomy(capsys):
    with criterion(capsys, 3, "Kac dichotomy over F_32003", 120.0):
        rep = harness.kac_experiment(3, 6, 14, 20, FieldSpec.fp(32003), seed=2024)
        assert all(c.threshold == 19 for c in rep.cells)
        shapes = {tuple(c.shape) for c in rep.cells}
        assert shapes == {(s, t) for s in range(7) for t in range(s + 1, 15)}
        a = _plain_sequence(3, 12)
        for c in rep.cells:
            s, t = c.shape
            assert c.q == s * s + t * t - 3 * s * t
            if c.check != "end_dim":
                continue
            if c.q <= 1:
                assert c.predicted == 1
            else:
                # brute-force the block multiplicities n B_k + m B_{k+1}
                (n, m), = {(n, m) for k in range(1, 10) for n in range(1, 15) for m in range(15)
                           if (n * a[k - 1] + m * a[k], n * a[k] + m * a[k + 1]) == (s, t)}
                assert c.predicted == n * n + m * m + 3 * n * m
        assert rep.passed, [(c.label, c.check, c.passes) for c in rep.failures()]


# 4 ---------------------------------------------------------------------------

def test_euler_equality(capsys):
    with criterion(capsys, 4, "hom - ext = Euler form, both fields", 60.0):
        for field in (FieldSpec.fp(32003), FieldSpec.rationals()):
            rep = harness.euler_experiment((3, 4, 5), 8, 200, field, seed=7)
            assert len(rep.cells) == 200
            for c in rep.cells:
                assert c.passes == 1
            assert rep.passed


# 5 ---------------------------------------------------------------------------

def test_fibonacci_block_table(capsys):
    with criterion(capsys, 5, "Fibonacci block hom/ext table", 60.0):
        for w in (3, 4, 6):
            rep = harness.hom_table_experiment(w, 5, 10, FieldSpec.fp(32003), seed=w)
            assert all(c.threshold == 9 for c in rep.cells)
            assert {c.label for c in rep.cells} == {f"k={k}" for k in range(1, 6)}
            assert rep.passed, [(c.label, c.check, c.observed) for c in rep.failures()]


# 6 ---------------------------------------------------------------------------

def _window_hits(N, n, cap):
    w = N + 1
    a = [fib_value(w, k) for k in range(n + 2)]
    lo = Fraction(a[n], a[n] - a[n - 1])
    hi = Fraction(a[n + 1], a[n + 1] - a[n])
    hits = []
    for r in range(1, a[n + 1] - a[n]):
        c = math.ceil(lo * r)
        while Fraction(c, r) <= hi and c <= cap:
            if c >= -cap:
                hits.append((c, r))
            c += 1
    return lo, hits


def test_stability_arithmetic(capsys):
    with criterion(capsys, 6, "destabilizer search and gap identity", 10.0):
        for w in range(3, 6):
            N = w - 1
            for n in range(1, 7):
                step = bd.verify_stability_step(N, n, 10**4)
                lo, hits = _window_hits(N, n, 10**4)
                assert list(step.hits) == hits
                assert all(Fraction(c, r) == lo for c, r in hits)
                assert not step.violations and step.slope == lo
                a = lambda k: fib_value(w, k)
                r = lambda k: a(k) - a(k - 1)
                assert a(n + 1) * r(n) - a(n) * r(n + 1) == 1
                assert step.gap_ok


# 7 ---------------------------------------------------------------------------

def test_p2_classifier_table(capsys):
    with criterion(capsys, 7, "P^2 classifier table", 1.0):
        for d in (1, 2):
            pr = bd.make_preset("steiner", N=2, d=d)
            for t in range(1, 41):
                stable = bd.classify(pr, (1, t)).verdict is Verdict.STABLE
                assert stable == (t <= 3 * d) == bd.syzygy_stable(d, t)
        pr = bd.make_preset("steiner", N=2, d=1)
        semistable_shapes = set()
        for k in range(1, 10):
            base = (fib_value(3, k - 1), fib_value(3, k))
            for n in range(2, 41):
                semistable_shapes.add((n * base[0], n * base[1]))
        for s in range(0, 11):
            for t in range(0, 41):
                if not (s or t):
                    continue
                c = bd.classify(pr, (s, t))
                q = s * s + t * t - 3 * s * t
                assert (c.verdict is Verdict.STABLE) == (q <= 1)
                assert (c.verdict is Verdict.STRICTLY_SEMISTABLE) == ((s, t) in semistable_shapes)


# 8 ---------------------------------------------------------------------------

def test_p1_splitting(capsys):
    with criterion(capsys, 8, "P^1 splitting types", 1.0):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            d = int(rng.integers(1, 6))
            t = int(rng.integers(1, 61))
            s = int(rng.integers(0, t))
            sp = bd.splitting_type_p1(d, (s, t))
            assert sp.n + sp.m == t - s
            assert sp.n * sp.a + sp.m * (sp.a + 1) == d * t
            assert sp.n >= 1 and sp.m >= 0  # degrees a and a + 1 only


# 9 ---------------------------------------------------------------------------

def _symq_sections(m, e):
    # symmetric power of 0 -> O(-1) -> V (x) O -> Q -> 0, twisted by e >= 0
    if e < 0:
        return 0
    return math.comb(m + 2, 2) * math.comb(e + 2, 2) - math.comb(m + 1, 2) * math.comb(e + 1, 2)


def test_symq_w_oracle(capsys):
    with criterion(capsys, 9, "S^pQ -> S^rQ(d) hom dimension", 1.0):
        assert bd.p2_symq_w(1, 1, 3) == 37
        checked = 0
        for p in range(1, 4):
            for r in range(1, 4):
                for d in range(p + 2, 9):
                    oracle = sum(_symq_sections(p + r - 2 * i, d - p + i)
                                 for i in range(min(p, r) + 1))
                    assert bd.p2_symq_w(p, r, d) == oracle
                    assert bd.make_preset("p2_symq", p=p, r=r, d=d).w == oracle
                    checked += 1
        assert checked == 45


# 10 --------------------------------------------------------------------------

def test_resolution_consistency(capsys):
    with criterion(capsys, 10, "rank and c1 of both resolutions", 1.0):
        for N in range(2, 7):
            a = _plain_sequence(N + 1, 12)
            for k in range(1, 11):
                b = bd.beilinson_consistency(N, k)
                assert b.ok
                assert b.rank_lhs == a[k + 1] - a[k] == N * a[k] - a[k - 1]
                assert b.c1_lhs == 2 * a[k] - a[k + 1] == (1 - N) * a[k] + a[k - 1]


# 11 --------------------------------------------------------------------------

def test_round_trip_and_exit_codes(capsys, tmp_path, monkeypatch):
    with criterion(capsys, 11, "serialization round-trip and exit codes", 10.0):
        rng = np.random.default_rng(11)
        for i in range(100):
            w = int(rng.integers(3, 7))
            s, t = (int(x) for x in rng.integers(0, 7, size=2))
            if not (s or t):
                t = 1
            field = FieldSpec.rationals() if i % 4 == 0 else FieldSpec.fp(int(rng.choice([2, 3, 101, 32003])))
            X = kr.random_rep(w, (s, t), field, int(rng.integers(2**63)))
            path = tmp_path / f"rep{i}.json"
            path.write_text(kr.rep_to_json(X))
            back = kr.rep_from_json(path.read_text())
            assert kr.rep_to_json(back) == path.read_text()
            assert back.w == X.w and back.field == X.field and back.shape == X.shape
            for A, B in zip(X.slices, back.slices):
                assert np.array_equal(np.asarray(A, dtype=object), np.asarray(B, dtype=object))

        reports = [harness.kac_experiment(3, 1, 3, 2, seed=i) for i in range(4)]
        reports += [harness.hom_table_experiment(3, 2, 2, seed=i) for i in range(3)]
        reports += [harness.euler_experiment((3, 4), 4, 5, seed=2**63 + i) for i in range(3)]
        for rep in reports:
            text = rep.to_json()
            back = ExperimentReport.from_json(text)
            assert back == rep and back.to_json() == text
            assert json.loads(text)["seed"] == str(rep.seed)

        good = tmp_path / "good.json"
        bad = tmp_path / "bad.json"
        codes = {}
        codes["ok"] = cli_main(["gen", "--w", "3", "--s", "1", "--t", "3", "-o", str(good)])
        doc = json.loads(good.read_text())
        bad.write_text(json.dumps({**doc, "slices": doc["slices"][:1]}))
        codes["pass"] = cli_main(["experiment", "euler", "--pairs", "3"])
        codes["usage"] = cli_main(["seq", "--w", "2", "--k", "3"])
        codes["bad_flag"] = cli_main(["seq", "--bogus"])
        codes["malformed"] = cli_main(["hom", str(bad), str(good)])
        codes["missing"] = cli_main(["hom", str(tmp_path / "nope.json"), str(good)])
        real = kr.end_dim
        monkeypatch.setattr(kr, "end_dim", lambda X: real(X) + 1)
        codes["fail"] = cli_main(["experiment", "kac", "--s-max", "0", "--t-max", "2",
                                  "--trials", "2"])
        capsys.readouterr()
        assert codes == {"ok": 0, "pass": 0, "usage": 2, "bad_flag": 2,
                         "malformed": 3, "missing": 3, "fail": 1}
