"""Constructive sum/product/difference/quotient decompositions.

Given a target x, the engine maintains a pair of subdivision nodes whose
combined interval contains x, repeatedly splits the longer node (longer in
log scale for the multiplicative operations), and descends into a child
pair that still contains x, preferring the one with the largest margin.
Dead ends backtrack: the search is depth-first over the pair tree, so a
locally bad split (possible when the two widths drift far apart) never
strands the run.  Half-infinite nodes sort as the longest, which makes the
engine walk down the unbounded digit chain until the pair brackets x with
finite intervals.

Rigor lives only at the end: the emitted components are the all-q
completions of the two prefixes, re-evaluated as balls, and the
certificate states a residual bound that the caller can re-check at any
higher precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .balls import Enclosure
from .errors import BelowRange, OutOfDomain, PrecisionInsufficient
from .evaluate import (
    DEFAULT_PRECISION,
    eval_with_const_tail,
    product_endpoint,
    sum_endpoint,
)
from .indices import Composition, ConstTail, TailedIndex
from .subdivision import ETA_DQ, Family, SubdivisionNode, root_node, subdivide

__all__ = [
    "DecompositionCertificate",
    "decompose_difference",
    "decompose_product",
    "decompose_quotient",
    "decompose_sum",
    "revalidate",
]

_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=64, round=gmpy2.RoundDown)
_INF = gmpy2.mpfr("inf")


def _abs_diff_up(a, b):
    """Upper bound of |a - b|; up-rounding one direction is not enough
    because a negative difference rounds toward zero."""
    return _RUP.maxnum(_RUP.sub(a, b), _RUP.sub(b, a))


OPS = ("sum", "product", "difference", "quotient")


@dataclass(frozen=True)
class DecompositionCertificate:
    """Machine-checkable witness that two tail-completed prefixes combine to x."""

    op: str
    left: TailedIndex
    right: TailedIndex
    combined: Enclosure
    target: Enclosure
    target_text: str
    residual_bound: object
    tolerance: Fraction
    q: int
    precision: int

    def components(self) -> tuple[TailedIndex, TailedIndex]:
        return self.left, self.right


def _as_target(x, precision: int) -> tuple[Enclosure, str]:
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return Enclosure.from_rational(x, precision), f"{x.numerator}/{x.denominator}"
    if isinstance(x, Enclosure):
        return x, format(x.mid, ".24g")
    raise TypeError(f"unsupported target type {type(x)!r}")


def _node_lo(node: SubdivisionNode):
    return node.low.lo()


def _node_hi(node: SubdivisionNode):
    return node.high.hi() if node.finite else _INF


class _PairArithmetic:
    """Directed interval arithmetic on node pairs at the engine precision.

    The endpoint combinations must run at full working precision: rounding
    them to a short context turns the combined bounds into noise once the
    pair width drops below one ulp of the target's magnitude, and the
    search then wanders.
    """

    def __init__(self, op: str, precision: int):
        self.op = op
        self.dn = gmpy2.context(precision=precision + 16, round=gmpy2.RoundDown)
        self.up = gmpy2.context(precision=precision + 16, round=gmpy2.RoundUp)

    def combine(self, c: SubdivisionNode, d: SubdivisionNode):
        clo, chi = _node_lo(c), _node_hi(c)
        dlo, dhi = _node_lo(d), _node_hi(d)
        if self.op == "sum":
            return self.dn.add(clo, dlo), self.up.add(chi, dhi)
        if self.op == "product":
            return self.dn.mul(clo, dlo), self.up.mul(chi, dhi)
        if self.op == "difference":
            return self.dn.sub(clo, dhi), self.up.sub(chi, dlo)
        # quotient; all node values exceed 1 so signs are fixed
        lo = self.dn.div(clo, dhi) if gmpy2.is_finite(dhi) else gmpy2.mpfr(0)
        return lo, self.up.div(chi, dlo)

    def margin(self, c: SubdivisionNode, d: SubdivisionNode, x):
        """min distance from x to the finite combined bounds; None if outside."""
        lo, hi = self.combine(c, d)
        if x < lo or x > hi:
            return None
        dist = _INF
        if gmpy2.is_finite(lo):
            dist = min(dist, self.dn.sub(x, lo))
        if gmpy2.is_finite(hi):
            dist = min(dist, self.dn.sub(hi, x))
        if not gmpy2.is_finite(dist):
            dist = gmpy2.mpfr(0)
        return dist

    def size_key(self, node: SubdivisionNode):
        if not node.finite:
            return _INF
        if self.op in ("sum", "difference"):
            return self.up.sub(_node_hi(node), _node_lo(node))
        return self.up.div(_node_hi(node), _node_lo(node))


def _rep_index(node: SubdivisionNode, q: int) -> TailedIndex:
    prefix = node.prefix if node.prefix else (q,)
    return TailedIndex(Composition(prefix), ConstTail(q))


def _apply(op: str, a: Enclosure, b: Enclosure) -> Enclosure:
    if op == "sum":
        return a + b
    if op == "product":
        return a * b
    if op == "difference":
        return a - b
    return a / b


def _try_emit(
    op: str,
    c: SubdivisionNode,
    d: SubdivisionNode,
    q: int,
    target: Enclosure,
    target_text: str,
    tol: Fraction,
    precision: int,
) -> DecompositionCertificate | None:
    left = _rep_index(c, q)
    right = _rep_index(d, q)
    v1 = eval_with_const_tail(left, precision=precision)
    v2 = eval_with_const_tail(right, precision=precision)
    combined = _apply(op, v1, v2)
    residual = _RUP.add(_abs_diff_up(combined.mid, target.mid), target.rad)
    total = _RUP.add(residual, combined.rad)
    tol_lo = _RDN.div(gmpy2.mpz(tol.numerator), gmpy2.mpz(tol.denominator))
    if total <= tol_lo:
        return DecompositionCertificate(
            op, left, right, combined, target, target_text, residual, tol, q, precision
        )
    return None


def _run_engine(
    op: str,
    x_target: Enclosure,
    target_text: str,
    q: int,
    tol: Fraction,
    precision: int,
) -> DecompositionCertificate:
    family = Family(ETA_DQ, q)
    root = root_node(family, precision)
    x_mid = x_target.mid
    tol_half = _RDN.div(_RDN.div(gmpy2.mpz(tol.numerator), gmpy2.mpz(tol.denominator)), 2)
    arith = _PairArithmetic(op, precision)

    first = _try_emit(op, root, root, q, x_target, target_text, tol, precision)
    if first is not None:
        return first

    stack: list[tuple[SubdivisionNode, SubdivisionNode]] = [(root, root)]
    visits = 0
    while stack:
        c, d = stack.pop()
        visits += 1
        if visits > 60_000:
            raise PrecisionInsufficient("decomposition search exceeded its step budget")
        lo, hi = arith.combine(c, d)
        if gmpy2.is_finite(lo) and gmpy2.is_finite(hi):
            if _RUP.sub(hi, lo) <= tol_half:
                cert = _try_emit(op, c, d, q, x_target, target_text, tol, precision)
                if cert is not None:
                    return cert
                continue
        split_c = arith.size_key(c) >= arith.size_key(d)
        node, other = (c, d) if split_c else (d, c)
        lower, _gap, upper = subdivide(node, precision)
        candidates = []
        for child in (lower, upper):
            pair = (child, other) if split_c else (other, child)
            m = arith.margin(pair[0], pair[1], x_mid)
            if m is not None:
                inf_sides = (not pair[0].finite) + (not pair[1].finite)
                candidates.append((inf_sides, m, pair))
        # pop order: fewest unbounded sides first, then largest margin;
        # otherwise a quotient against an unbounded denominator keeps a
        # constant margin and the walk would ascend forever
        candidates.sort(key=lambda t: (-t[0], t[1]))
        stack.extend(pair for _i, _m, pair in candidates)
    raise PrecisionInsufficient("decomposition search exhausted without a certificate")


def _to_fraction_tol(tolerance) -> Fraction:
    if isinstance(tolerance, Fraction):
        return tolerance
    return Fraction(str(tolerance)) if isinstance(tolerance, str) else Fraction(tolerance)


def _working_precision(tol: Fraction, precision: int) -> int:
    """Raise the working precision when the tolerance demands it.

    Emission needs evaluation radii well below the tolerance; radii sit
    around 2^-(prec-30), so very tight tolerances bump the precision.
    """
    if tol <= 0:
        raise OutOfDomain("tolerance must be positive")
    needed = (tol.denominator.bit_length() - tol.numerator.bit_length()) + 64
    return max(precision, needed)


def _check_range(x: Enclosure, endpoint: Enclosure, what: str) -> None:
    if x.certainly_lt(endpoint):
        raise BelowRange(f"target below the {what} left endpoint")


def decompose_sum(
    x, q: int, tolerance=Fraction(1, 10**8), precision: int = DEFAULT_PRECISION
) -> DecompositionCertificate:
    """Write x as a sum of two digit-bounded tail values within tolerance."""
    tol = _to_fraction_tol(tolerance)
    precision = _working_precision(tol, precision)
    target, text = _as_target(x, precision)
    _check_range(target, sum_endpoint(q, precision), "sumset")
    return _run_engine("sum", target, text, q, tol, precision)


def decompose_product(
    x, q: int, tolerance=Fraction(1, 10**8), precision: int = DEFAULT_PRECISION
) -> DecompositionCertificate:
    """Write x as a product of two digit-bounded tail values within tolerance."""
    tol = _to_fraction_tol(tolerance)
    precision = _working_precision(tol, precision)
    target, text = _as_target(x, precision)
    _check_range(target, product_endpoint(q, precision), "product set")
    return _run_engine("product", target, text, q, tol, precision)


def decompose_difference(
    x, q: int, tolerance=Fraction(1, 10**8), precision: int = DEFAULT_PRECISION
) -> DecompositionCertificate:
    """Write any real x as a difference of two digit-bounded tail values."""
    tol = _to_fraction_tol(tolerance)
    precision = _working_precision(tol, precision)
    target, text = _as_target(x, precision)
    return _run_engine("difference", target, text, q, tol, precision)


def decompose_quotient(
    x, q: int, tolerance=Fraction(1, 10**8), precision: int = DEFAULT_PRECISION
) -> DecompositionCertificate:
    """Write x > 0 as a quotient of two digit-bounded tail values."""
    tol = _to_fraction_tol(tolerance)
    precision = _working_precision(tol, precision)
    target, text = _as_target(x, precision)
    if not target.certainly_gt(Enclosure.exact_int(0, precision)):
        raise OutOfDomain("quotient targets must be certifiably positive")
    return _run_engine("quotient", target, text, q, tol, precision)


def revalidate(cert: DecompositionCertificate, precision: int | None = None) -> bool:
    """Re-evaluate a certificate at higher precision and re-check its claim.

    The stated residual must still absorb the distance to the target, up
    to the two evaluations' certified radii (the midpoint may move that
    far without contradicting the original claim).
    """
    prec = precision if precision is not None else 2 * cert.precision
    v1 = eval_with_const_tail(cert.left, precision=prec)
    v2 = eval_with_const_tail(cert.right, precision=prec)
    combined = _apply(cert.op, v1, v2)
    diff = _RUP.add(_abs_diff_up(combined.mid, cert.target.mid), cert.target.rad)
    slack = _RUP.add(cert.combined.rad, combined.rad)
    tol_lo = _RDN.div(gmpy2.mpz(cert.tolerance.numerator), gmpy2.mpz(cert.tolerance.denominator))
    consistent = diff <= _RUP.add(cert.residual_bound, slack)
    within_tolerance = diff <= _RUP.add(tol_lo, slack)
    return consistent and within_tolerance
