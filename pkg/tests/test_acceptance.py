"""Acceptance criteria, one test per criterion.

Each test enforces its stated tolerance and runtime budget and prints one
pass/fail line (run with ``pytest -s`` to see them as they complete).
"""

import math
import random
import time
from fractions import Fraction

import gmpy2
import pytest

from zetastar.balls import Enclosure, zeta_ball
from zetastar.decompose import (
    decompose_difference,
    decompose_product,
    decompose_quotient,
    decompose_sum,
    revalidate,
)
from zetastar.errors import BelowRange
from zetastar.evaluate import (
    eval_finite,
    eval_with_const_tail,
    ones_tail_value,
    tail_factor,
    tail_factor_limit,
)
from zetastar.expansion import STATUS_AMBIGUOUS, expand
from zetastar.explorer import alpha_root, box_count, dimension_formula
from zetastar.indices import Composition, ConstTail, TailedIndex, index_compare
from zetastar.subdivision import (
    ETA_DQ,
    ETA_TP_CLOSURE,
    Family,
    TAU_BK,
    TAU_LP_CLOSURE,
    check_hall_condition,
    thickness,
    thickness_exact,
)
from zetastar.tau import DigitSeq, Periodic, digitseq_compare, tau_decompose_sum, tau_node_lengths, tau_value
from zetastar.theorems import theorem12_gaps, verify_inequalities


def _report(n, budget, elapsed, detail=""):
    line = f"ACCEPTANCE {n:2d}: PASS  ({elapsed:.2f}s of {budget}s budget)  {detail}"
    print(line, flush=True)


def _mid_err(value: Enclosure, target: Enclosure) -> float:
    ctx = gmpy2.context(precision=320, round=gmpy2.RoundUp)
    return float(ctx.maxnum(ctx.sub(value.mid, target.mid), ctx.sub(target.mid, value.mid)))


def test_acceptance_01_closed_form_evaluation():
    start = time.perf_counter()
    for r in range(0, 7):
        v = eval_finite(Composition((2,) + (1,) * r), truncation=10**6, precision=128)
        target = zeta_ball(r + 2, 192) * (r + 1)
        assert _mid_err(v, target) < 5e-10, r
        assert not v.separated_from(target)
    elapsed = time.perf_counter() - start
    assert elapsed < 10
    _report(1, 10, elapsed, "eval (2,{1}^r) vs (r+1) zeta(r+2), r=0..6, 5e-10")


def test_acceptance_02_tail_closed_forms():
    start = time.perf_counter()
    v = eval_with_const_tail(TailedIndex(Composition((3,)), ConstTail(2)), precision=128)
    target = zeta_ball(2, 192) * 2 - 2
    assert _mid_err(v, target) < 1e-10
    lim = tail_factor_limit(2, 128)
    assert _mid_err(lim, Enclosure.exact_int(2, 192)) < 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 5
    _report(2, 5, elapsed, "(3,{2}^inf) = 2 zeta(2) - 2; limit factor(2) = 2")


def test_acceptance_03_tiling_identity():
    start = time.perf_counter()
    rng = random.Random(2024)
    checked = 0
    for _ in range(50):
        depth = rng.randint(1, 6)
        parts = tuple([rng.randint(2, 3)] + [rng.randint(1, 3) for _ in range(depth - 1)])
        p = Composition(parts)
        for k in range(1, 5):
            high = ones_tail_value(Composition(parts + (k + 1,)), precision=128)
            low = eval_finite(Composition(parts + (k,)), precision=128)
            assert float(high.rad) <= 1e-8 and float(low.rad) <= 1e-8
            assert _mid_err(high, low) <= float(high.rad) + float(low.rad), (parts, k)
            checked += 1
        # independent convergence evidence: a long ones block approaches
        # the tiling endpoint from below at geometric speed
        k = rng.randint(1, 4)
        deep = eval_finite(Composition(parts + (k + 1,) + (1,) * 34), precision=128)
        endpoint = eval_finite(Composition(parts + (k,)), precision=128)
        assert deep.certainly_lt(endpoint)
        assert float(endpoint.mid - deep.mid) < 1e-8, parts
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    _report(3, 60, elapsed, f"{checked} tiling pairs + 50 deep-ones convergence checks")


def test_acceptance_04_expansion_round_trip():
    start = time.perf_counter()
    rng = random.Random(777)
    ambiguous = 0
    for _ in range(100):
        parts = tuple([rng.randint(2, 3)] + [rng.randint(1, 3) for _ in range(9)])
        t = TailedIndex(Composition(parts), ConstTail(3))
        x = eval_with_const_tail(t, precision=128)
        res = expand(x, 10, precision=128)
        if res.status == STATUS_AMBIGUOUS:
            ambiguous += 1
            continue
        assert res.digits == parts, (parts, res.digits)
    assert ambiguous == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    _report(4, 300, elapsed, "100 depth-10 round trips, zero ambiguous")


def test_acceptance_05_hall_sweeps():
    start = time.perf_counter()
    for q in (2, 3, 4, 5):
        report = check_hall_condition(Family(ETA_DQ, q), 5, 128)
        assert not report.violations, q
    for k in (2, 3, 4, 5, 6):
        report = check_hall_condition(Family(TAU_BK, k), 8, 64)
        assert report.exact and not report.violations, k
        if k == 2:
            assert report.worst_margin == 0
    # at k=2 the gap equals the lower retained bridge exactly: ratio 1
    for prefix in ((), (1,), (2, 1), (1, 2, 2)):
        _parent, _fixed, rest, gap = tau_node_lengths(prefix, 1, 2)
        assert gap / rest == 1
    elapsed = time.perf_counter() - start
    assert elapsed < 600
    _report(5, 600, elapsed, "eta digit<=q depth 5 (q=2..5); exact tau depth 8 (k=2..6)")


def test_acceptance_06_sum_theorem():
    start = time.perf_counter()
    cert = decompose_sum(4, 2, precision=128)
    assert cert.left.prefix.parts == (2,) and cert.left.tail.q == 2
    assert cert.right.prefix.parts == (2,) and float(cert.residual_bound) < 1e-30
    with pytest.raises(BelowRange):
        decompose_sum(Fraction(399, 100), 2)
    rng = random.Random(606)
    for _ in range(50):
        x = Fraction(rng.randint(4_000_000, 100_000_000), 10**6)
        c = decompose_sum(x, 2, Fraction(1, 10**8), 128)
        assert float(c.residual_bound) + float(c.combined.rad) <= 1e-8
    elapsed = time.perf_counter() - start
    assert elapsed < 600
    _report(6, 600, elapsed, "endpoint exact; 50 interior targets in [4,100]; 3.99 below range")


def test_acceptance_07_product_difference_quotient():
    start = time.perf_counter()
    rng = random.Random(707)
    certs = []
    for _ in range(20):
        x = Fraction(rng.randint(4_000_000, 50_000_000), 10**6)
        certs.append(decompose_product(x, 2, Fraction(1, 10**8), 128))
    for x in (Fraction(-5), Fraction(0), Fraction(21, 2)):
        certs.append(decompose_difference(x, 2, Fraction(1, 10**8), 128))
    for x in (Fraction(4, 100), Fraction(1), Fraction(73, 10)):
        certs.append(decompose_quotient(x, 2, Fraction(1, 10**8), 128))
    for c in certs:
        assert revalidate(c, 256), (c.op, c.target_text)
    elapsed = time.perf_counter() - start
    assert elapsed < 900
    _report(7, 900, elapsed, f"{len(certs)} certificates revalidated at doubled precision")


def test_acceptance_08_exact_tau_sums():
    start = time.perf_counter()
    rng = random.Random(808)
    bound = Fraction(1, 2**38)
    for i in range(100):
        k = (2, 3, 4)[i % 3]
        lo = Fraction(2, 2**k - 1)
        x = lo + Fraction(rng.randint(0, 10**9), 10**9) * (2 - lo)
        left, right, residual = tau_decompose_sum(x, k, 40)
        assert abs(residual) <= bound
        assert tau_value(left) + tau_value(right) + residual == x
    elapsed = time.perf_counter() - start
    assert elapsed < 120
    _report(8, 120, elapsed, "100 exact sum decompositions, residual <= 2^-38")


def test_acceptance_09_gap_certificates():
    start = time.perf_counter()
    rep = theorem12_gaps(2, 128, "sum")
    assert len(rep.gaps) == 1
    lo, hi = rep.gaps[0]
    assert abs(float(lo.mid) - 2.5797362674) < 1e-10
    assert abs(float(hi.mid) - 2.6449340668) < 1e-10
    rep = theorem12_gaps(2, 128, "product")
    assert len(rep.gaps) == 1
    plo, phi = rep.gaps[0]
    z2 = zeta_ball(2, 192)
    assert not plo.separated_from((z2 - 1) * 4)
    assert not phi.separated_from(z2 * z2)
    assert plo.certainly_lt(phi)
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    _report(9, 60, elapsed, "sum gap (2.5797, 2.6449); product gap 4(z2-1) < z2^2")


def test_acceptance_10_inequality_sweep():
    start = time.perf_counter()
    for q in (2, 3, 4, 5, 6):
        rep = verify_inequalities(q, 10**4, [], 128)
        assert rep.euler_bound_holds, q
        # m=1 is an equality for every q (empty product); no other m ties
        assert rep.euler_equalities == [1], q
    assert 2 * tail_factor(1, 2) == 2
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    _report(10, 60, elapsed, "2 F_m(q) <= m+1 exactly, q=2..6, m<=10^4")


def test_acceptance_11_dimension():
    start = time.perf_counter()
    a2 = alpha_root(2, 128)
    golden = (1 + gmpy2.context(precision=192).sqrt(gmpy2.mpfr(5, 192))) / 2
    assert abs(float(a2.mid - golden)) < 1e-12
    _c, ratio2 = box_count(2, 40)
    assert abs(ratio2 - math.log2((1 + 5**0.5) / 2)) < 1e-3
    _c, ratio3 = box_count(3, 60)
    assert abs(ratio3 - float(dimension_formula(3, 128).mid)) < 5e-3
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    _report(11, 60, elapsed, "alpha_2 = golden ratio; box growth matches the formula")


def test_acceptance_12_order_structure():
    start = time.perf_counter()
    rng = random.Random(1212)
    disagreements = 0
    for _ in range(200):
        a = tuple([rng.randint(2, 4)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 4))])
        b = tuple([rng.randint(2, 4)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 4))])
        ca, cb = Composition(a), Composition(b)
        cmp = index_compare(ca, cb)
        va, vb = eval_finite(ca, precision=128), eval_finite(cb, precision=128)
        if cmp != 0 and va.separated_from(vb):
            if (cmp > 0) != va.certainly_gt(vb):
                disagreements += 1
    assert disagreements == 0
    for _ in range(500):
        a = DigitSeq(
            tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 4))),
            Periodic(tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 2)))),
        )
        b = DigitSeq(
            tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 4))),
            Periodic(tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 2)))),
        )
        va, vb = tau_value(a), tau_value(b)
        assert digitseq_compare(a, b) == (va > vb) - (va < vb)
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    _report(12, 300, elapsed, "200 value-order pairs; 500 exact mirror pairs")


def test_acceptance_13_thickness():
    start = time.perf_counter()
    t_l2 = thickness_exact(Family(TAU_LP_CLOSURE, 2), 10)
    assert t_l2 >= 1
    t_tp = thickness(Family(ETA_TP_CLOSURE, 2), 4, 128)
    assert t_tp.certainly_lt(Enclosure.exact_int(1, 128))
    elapsed = time.perf_counter() - start
    assert elapsed < 120
    _report(13, 120, elapsed, f"exact tau closure t = {t_l2} >= 1; value-closure t < 1")
