import random
from fractions import Fraction

import pytest

from zetastar.balls import Enclosure, pi_ball, zeta_ball
from zetastar.errors import InvalidIndex, OutOfDomain
from zetastar.evaluate import eval_finite, eval_with_const_tail
from zetastar.expansion import STATUS_AMBIGUOUS, STATUS_EXACT, expand, subtree_bounds
from zetastar.indices import Composition, ConstTail, TailedIndex


def test_subtree_bounds_root_three():
    low, high = subtree_bounds(None, 3)
    assert not low.separated_from(zeta_ball(3, 128))
    assert not high.separated_from(zeta_ball(2, 128))


def test_subtree_bounds_root_two_infinite_top():
    low, high = subtree_bounds(None, 2)
    assert not low.separated_from(zeta_ball(2, 128))
    assert high.upper_infinite


def test_subtree_bounds_after_three():
    # the (3,1) subtree tops out at the parent's ones-tail value
    low, high = subtree_bounds(Composition((3,)), 1)
    # low is pi^4/72, verified by an independent identity
    pi = pi_ball(192)
    target = pi.pow_int(4) / Enclosure.exact_int(72, 192)
    assert not low.separated_from(target)
    assert not high.separated_from(zeta_ball(2, 128))


def test_subtree_bounds_rejects_bad_digits():
    with pytest.raises(InvalidIndex):
        subtree_bounds(None, 1)
    with pytest.raises(InvalidIndex):
        subtree_bounds(Composition((3,)), 0)


def test_tiling_identity():
    # the high end of the (p, k+1) subtree is the low end of the (p, k) subtree
    rng = random.Random(13)
    for _ in range(12):
        parts = tuple(
            [rng.randint(2, 3)] + [rng.randint(1, 3) for _ in range(rng.randint(0, 4))]
        )
        p = Composition(parts)
        for k in range(1, 7):
            _lo_next, hi_next = subtree_bounds(p, k + 1)
            lo_k, _hi_k = subtree_bounds(p, k)
            assert not hi_next.separated_from(lo_k), (parts, k)


def test_expand_two_constant():
    res = expand(2, 5)
    assert res.digits == (2, 2, 2, 2, 2)
    assert res.status == STATUS_EXACT and res.tail_digit == 2


def test_expand_first_digit_three():
    res = expand(Fraction(3, 2), 1)
    assert res.digits == (3,)


def test_expand_value_just_below_zeta2():
    # a rational hair below pi^2/6 sits at the closed top of the (3,1,1,...)
    # chain, so every digit after the leading 3 is a 1
    z2 = zeta_ball(2, 256)
    x = z2.to_fraction_mid() - Fraction(1, 2**200)
    res = expand(x, 4)
    assert res.digits == (3, 1, 1, 1)


def test_expand_rejects_small_x():
    with pytest.raises(OutOfDomain):
        expand(1, 3)
    with pytest.raises(OutOfDomain):
        expand(Fraction(1, 2), 3)


def test_expand_boundary_ambiguous_on_straddling_ball():
    # a ball containing zeta(2) straddles the first-digit boundary
    z2 = zeta_ball(2, 64)
    fat = z2.widen(1e-6)
    res = expand(fat, 3, escalation_limit=1)
    assert res.status == STATUS_AMBIGUOUS
    assert res.ambiguous_position == 0


def test_roundtrip_const_tails():
    rng = random.Random(101)
    failures = 0
    for _ in range(25):
        depth = rng.randint(3, 10)
        parts = tuple(
            [rng.randint(2, 3)] + [rng.randint(1, 3) for _ in range(depth - 1)]
        )
        q = rng.choice((2, 3))
        t = TailedIndex(Composition(parts), ConstTail(q))
        x = eval_with_const_tail(t)
        res = expand(x, depth)
        if res.status == STATUS_AMBIGUOUS:
            failures += 1
            continue
        assert res.digits == parts, (parts, q, res)
    assert failures == 0


def test_digit_monotone_in_value():
    # larger values never get a larger first digit
    rng = random.Random(3)
    xs = sorted(
        Fraction(rng.randint(11, 400), 10) / 10 + 1 for _ in range(30)
    )
    digits = [expand(x, 1).digits[0] for x in xs]
    for a, b in zip(digits, digits[1:]):
        assert b <= a


def test_residual_inside_subtree():
    x = Fraction(7, 3)
    res = expand(x, 6)
    low = eval_finite(Composition(res.digits))
    # the residual is x minus the emitted prefix's finite value, positive
    assert res.residual.certainly_gt(Enclosure.exact_int(0, 128))
    assert not (res.residual + low).separated_from(
        Enclosure.from_rational(x, 128)
    )


def test_subtree_high_infinite_along_divergent_chain():
    # the all-but-ones boundary diverges, so every (2,{1}^j) prefix with a
    # further 1 has an unbounded subtree; everything else is finite
    _lo, hi = subtree_bounds(Composition((2,)), 1)
    assert hi.upper_infinite
    _lo, hi = subtree_bounds(Composition((2, 1, 1)), 1)
    assert hi.upper_infinite
    for prefix, k in [(None, 3), (Composition((2,)), 2), (Composition((3,)), 1), (Composition((2, 1)), 2)]:
        _lo, hi = subtree_bounds(prefix, k)
        assert not hi.upper_infinite, (prefix, k)
