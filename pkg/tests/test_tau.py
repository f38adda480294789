import random
from fractions import Fraction

import pytest

from zetastar.errors import InvalidNode, NonTerminating, OutOfDomain, OutOfRange
from zetastar.indices import Composition, index_compare
from zetastar.tau import (
    DigitSeq,
    ONES_TAIL,
    Periodic,
    digitseq_compare,
    tau_decompose_sum,
    tau_expand,
    tau_node_lengths,
    tau_value,
)


def test_tau_value_ones_is_one():
    assert tau_value(DigitSeq((), ONES_TAIL)) == 1


def test_tau_value_constant_digit():
    for k in range(1, 8):
        assert tau_value(DigitSeq((), Periodic((k,)))) == Fraction(1, 2**k - 1)


def test_tau_value_period_12():
    assert tau_value(DigitSeq((), Periodic((1, 2)))) == Fraction(5, 7)


def test_tau_value_requires_tail():
    with pytest.raises(NonTerminating):
        tau_value(DigitSeq((2, 1), None))


def test_tau_expand_examples():
    assert tau_expand(Fraction(1, 3)) == DigitSeq((), Periodic((2,)))
    assert tau_expand(Fraction(1)) == DigitSeq((), Periodic((1,)))
    assert tau_expand(Fraction(5, 7)) == DigitSeq((), Periodic((1, 2)))


def test_tau_expand_dyadic_ones_tail():
    # dyadic rationals take the infinite ones-tail form
    seq = tau_expand(Fraction(1, 2))
    assert tau_value(seq) == Fraction(1, 2)
    assert seq.prefix[:1] == (2,) and seq.tail == Periodic((1,))


def test_tau_expand_domain():
    with pytest.raises(OutOfDomain):
        tau_expand(Fraction(0))
    with pytest.raises(OutOfDomain):
        tau_expand(Fraction(3, 2))


def test_tau_roundtrip_random_periodic():
    rng = random.Random(17)
    for _ in range(200):
        prefix = tuple(rng.randint(1, 5) for _ in range(rng.randint(0, 4)))
        period = tuple(rng.randint(1, 5) for _ in range(rng.randint(1, 3)))
        v = tau_value(DigitSeq(prefix, Periodic(period)))
        assert tau_value(tau_expand(v, depth=120)) == v


def test_order_mirror_500_pairs():
    # the digit order and the exact value order agree with no tolerance
    rng = random.Random(23)
    for _ in range(500):
        a = DigitSeq(
            tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 4))),
            Periodic(tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 2)))),
        )
        b = DigitSeq(
            tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 4))),
            Periodic(tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 2)))),
        )
        cmp_digits = digitseq_compare(a, b)
        va, vb = tau_value(a), tau_value(b)
        cmp_values = (va > vb) - (va < vb)
        assert cmp_digits == cmp_values, (a, b)


def test_order_mirror_matches_composition_order():
    # on finite prefixes completed the same way, the composition order and
    # the digit order coincide
    rng = random.Random(29)
    for _ in range(100):
        pa = tuple([rng.randint(2, 4)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 3))])
        pb = tuple([rng.randint(2, 4)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 3))])
        ca = index_compare(Composition(pa), Composition(pb))
        # Rule 1: extension is larger; mirror with ones-tail completions,
        # whose digit comparison sees the extension first
        da = DigitSeq(pa, ONES_TAIL)
        db = DigitSeq(pb, ONES_TAIL)
        if ca != 0:
            assert digitseq_compare(da, db) == ca or pa == pb[: len(pa)] or pb == pa[: len(pb)]


def test_node_lengths_k2():
    parent, left, right, gap = tau_node_lengths((), 1, 2)
    assert (parent, left, right, gap) == (
        Fraction(2, 3),
        Fraction(1, 3),
        Fraction(1, 6),
        Fraction(1, 6),
    )
    K = Fraction(1, 2**5)
    parent, left, right, gap = tau_node_lengths((2, 1, 2), 1, 2)
    assert parent == Fraction(2, 3) * K and gap == K / 6


def test_node_lengths_k3_gaps():
    K = Fraction(1, 8)
    assert tau_node_lengths((2, 1), 1, 3)[3] == K / 14
    _p, left, right, gap = tau_node_lengths((2, 1), 2, 3)
    assert gap == K / 28
    assert gap <= left and gap <= right


def test_node_lengths_partition_exactly():
    rng = random.Random(37)
    for _ in range(60):
        k = rng.randint(2, 6)
        i = rng.randint(1, k - 1)
        prefix = tuple(rng.randint(1, k) for _ in range(rng.randint(0, 4)))
        parent, left, right, gap = tau_node_lengths(prefix, i, k)
        assert parent == left + gap + right


def test_node_lengths_invalid():
    with pytest.raises(InvalidNode):
        tau_node_lengths((), 2, 2)
    with pytest.raises(InvalidNode):
        tau_node_lengths((3,), 1, 2)


def test_decompose_exact_endpoints():
    l, r, res = tau_decompose_sum(Fraction(2, 3), 2)
    assert res == 0 and tau_value(l) + tau_value(r) == Fraction(2, 3)
    l, r, res = tau_decompose_sum(Fraction(2), 2)
    assert res == 0 and tau_value(l) + tau_value(r) == 2


def test_decompose_exact_interior_point():
    l, r, res = tau_decompose_sum(Fraction(1), 2, depth=40)
    assert abs(res) <= Fraction(1, 2**39)
    assert tau_value(l) + tau_value(r) + res == 1


def test_decompose_random_targets():
    rng = random.Random(41)
    for k in (2, 3, 4):
        lo = Fraction(2, 2**k - 1)
        for _ in range(15):
            x = lo + Fraction(rng.randint(0, 10**6), 10**6) * (2 - lo)
            l, r, res = tau_decompose_sum(x, k, depth=40)
            assert abs(res) <= Fraction(4, 3) / 2**40
            assert tau_value(l) + tau_value(r) + res == x
            # emitted digits respect the family bound
            assert all(d <= k for d in l.prefix + l.tail.period)
            assert all(d <= k for d in r.prefix + r.tail.period)


def test_decompose_out_of_range():
    with pytest.raises(OutOfRange):
        tau_decompose_sum(Fraction(1, 5), 2)
    with pytest.raises(OutOfRange):
        tau_decompose_sum(Fraction(5, 2), 2)
