import random
from fractions import Fraction

import gmpy2
import pytest

from zetastar.decompose import (
    decompose_difference,
    decompose_product,
    decompose_quotient,
    decompose_sum,
    revalidate,
)
from zetastar.errors import BelowRange, OutOfDomain
from zetastar.evaluate import eval_with_const_tail, tail_factor_limit

TOL = Fraction(1, 10**8)


def _check(cert, combine):
    v1 = eval_with_const_tail(cert.left, precision=256)
    v2 = eval_with_const_tail(cert.right, precision=256)
    combined = combine(v1, v2)
    hp = gmpy2.context(precision=320, round=gmpy2.RoundUp)
    err = hp.abs(hp.sub(combined.mid, cert.target.mid))
    bound = hp.add(hp.add(cert.residual_bound, combined.rad), cert.target.rad)
    assert err <= bound
    assert float(cert.residual_bound) <= float(TOL)


def test_sum_left_endpoint_exact():
    cert = decompose_sum(4, 2)
    assert cert.left.prefix.parts == (2,) and cert.left.tail.q == 2
    assert cert.right.prefix.parts == (2,)
    assert float(cert.residual_bound) < 1e-30


def test_sum_below_range():
    with pytest.raises(BelowRange):
        decompose_sum(Fraction(399, 100), 2)


def test_sum_endpoint_general_q():
    for q in (3, 4):
        cert = decompose_sum(tail_factor_limit(q) * 2, q)
        assert set(cert.left.prefix.parts) == {q}
        assert float(cert.residual_bound) < 1e-30


def test_sum_interior_targets():
    rng = random.Random(55)
    for _ in range(5):
        x = Fraction(rng.randint(4 * 10**6, 10**8), 10**6)
        cert = decompose_sum(x, 2, TOL)
        _check(cert, lambda a, b: a + b)
        assert all(d <= 2 for d in cert.left.prefix.parts)
        assert all(d <= 2 for d in cert.right.prefix.parts)


def test_sum_q3_digits_bounded():
    cert = decompose_sum(Fraction(7), 3, TOL)
    assert all(d <= 3 for d in cert.left.prefix.parts + cert.right.prefix.parts)
    _check(cert, lambda a, b: a + b)


def test_product_left_endpoint():
    cert = decompose_product(4, 2)
    assert cert.left.prefix.parts == (2,) and cert.right.prefix.parts == (2,)
    assert float(cert.residual_bound) < 1e-30


def test_product_interior():
    cert = decompose_product(Fraction(625, 100), 2, TOL)
    _check(cert, lambda a, b: a * b)
    assert revalidate(cert)


def test_product_endpoint_q3():
    d3 = tail_factor_limit(3)
    cert = decompose_product(d3 * d3, 3)
    assert set(cert.left.prefix.parts) == {3} and set(cert.right.prefix.parts) == {3}


def test_product_below_range():
    with pytest.raises(BelowRange):
        decompose_product(Fraction(39, 10), 2)


def test_difference_targets():
    for x in (0, Fraction(21, 2), Fraction(-32, 10)):
        cert = decompose_difference(x, 2, TOL)
        _check(cert, lambda a, b: a - b)
        assert revalidate(cert)


def test_difference_zero_trivial():
    cert = decompose_difference(0, 2)
    assert cert.left == cert.right
    assert float(cert.residual_bound) < 1e-30


def test_quotient_targets():
    for x in (Fraction(1), Fraction(73, 10), Fraction(4, 100)):
        cert = decompose_quotient(x, 2, TOL)
        _check(cert, lambda a, b: a / b)
        assert revalidate(cert)


def test_quotient_domain():
    with pytest.raises(OutOfDomain):
        decompose_quotient(0, 2)
    with pytest.raises(OutOfDomain):
        decompose_quotient(Fraction(-1, 2), 2)


def test_certificate_invariant_fields():
    cert = decompose_sum(Fraction(9, 2), 2, TOL)
    # |combined.mid - target| <= combined.rad + residual_bound <= tolerance
    hp = gmpy2.context(precision=320, round=gmpy2.RoundUp)
    diff = hp.abs(hp.sub(cert.combined.mid, cert.target.mid))
    assert diff <= hp.add(cert.combined.rad, cert.residual_bound)
    assert float(cert.residual_bound) + float(cert.combined.rad) <= float(TOL)
    assert cert.op == "sum" and cert.q == 2


def test_revalidation_at_doubled_precision():
    rng = random.Random(77)
    for op, fn in (
        ("sum", decompose_sum),
        ("product", decompose_product),
    ):
        x = Fraction(rng.randint(5 * 10**6, 3 * 10**7), 10**6)
        cert = fn(x, 2, TOL)
        assert revalidate(cert), op
        assert revalidate(cert, 4 * cert.precision), op


def test_log_linear_coherence():
    # a product certificate mapped through log satisfies the additive claim
    cert = decompose_product(Fraction(625, 100), 2, TOL)
    v1 = eval_with_const_tail(cert.left, precision=256)
    v2 = eval_with_const_tail(cert.right, precision=256)
    log_sum = v1.log() + v2.log()
    log_target = cert.target.log()
    # |log(v1 v2) - log x| <= residual / (x - residual)
    hp = gmpy2.context(precision=320, round=gmpy2.RoundUp)
    diff = hp.maxnum(
        hp.sub(log_sum.mid, log_target.mid), hp.sub(log_target.mid, log_sum.mid)
    )
    denom = gmpy2.context(precision=320, round=gmpy2.RoundDown).sub(
        cert.target.mid, cert.residual_bound
    )
    bound = hp.add(hp.div(cert.residual_bound, denom), hp.add(log_sum.rad, log_target.rad))
    assert diff <= bound


def test_engines_at_higher_digit_bounds():
    # exercises the wrapping subdivision (two fixed-digit children) that
    # only appears for q >= 3
    cert = decompose_sum(Fraction(11, 2), 4, TOL)
    assert all(d <= 4 for d in cert.left.prefix.parts + cert.right.prefix.parts)
    _check(cert, lambda a, b: a + b)
    cert = decompose_difference(Fraction(3, 4), 3, TOL)
    assert all(d <= 3 for d in cert.left.prefix.parts + cert.right.prefix.parts)
    _check(cert, lambda a, b: a - b)
    cert = decompose_quotient(Fraction(2), 3, TOL)
    _check(cert, lambda a, b: a / b)
    assert revalidate(cert)


def test_tight_tolerance_raises_working_precision():
    # a tolerance below the default radii transparently bumps precision
    cert = decompose_sum(Fraction(9, 2), 2, Fraction(1, 10**45))
    assert cert.precision > 128
    assert float(cert.residual_bound) <= 1e-45
    assert revalidate(cert)
