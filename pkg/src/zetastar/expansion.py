"""Greedy digit extraction: inverting the value map on (1, +inf).

Every real x > 1 sits in a unique nested chain of subtree value
intervals.  The subtree of sequences starting (p, k) spans the half-open
interval (low, high] with low the finite value of (p, k) and high the
ones-tail completion; raising k by one slides the interval down so that
adjacent subtrees tile the parent exactly.  The expansion therefore finds,
at each position, the smallest next digit whose finite value drops
certifiably below x.

Comparisons are certified ball comparisons.  When x cannot be separated
from a subtree boundary the working precision is doubled up to
``escalation_limit`` times; if that still does not decide, the expansion
stops with a boundary-ambiguous status instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .balls import Enclosure
from .errors import InvalidIndex, OutOfDomain
from .evaluate import DEFAULT_PRECISION, DEFAULT_TRUNCATION, eval_finite, eval_with_const_tail, ones_tail_value
from .indices import Composition, ConstTail, TailedIndex

__all__ = ["ExpansionResult", "expand", "subtree_bounds"]

STATUS_EXACT = "exact"
STATUS_TRUNCATED = "truncated"
STATUS_AMBIGUOUS = "boundary-ambiguous"


@dataclass(frozen=True)
class ExpansionResult:
    digits: tuple[int, ...]
    status: str
    residual: Enclosure | None
    tail_digit: int | None = None
    ambiguous_position: int | None = None

    def __str__(self) -> str:
        body = ",".join(str(d) for d in self.digits)
        if self.status == STATUS_EXACT:
            return f"({body},{{{self.tail_digit}}}^inf)"
        if self.status == STATUS_AMBIGUOUS:
            return f"({body},?@{self.ambiguous_position})"
        return f"({body},...)"


def subtree_bounds(
    prefix: Composition | None,
    k: int,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
) -> tuple[Enclosure, Enclosure]:
    """Value interval (low, high] of all admissible sequences starting (prefix, k).

    low is the finite value of the extended index and is not attained;
    high is its ones-tail completion and is attained exactly by the
    all-ones continuation.  high is infinite only for the bare (2).
    """
    if prefix is None or (isinstance(prefix, tuple) and not prefix):
        prefix_parts: tuple[int, ...] = ()
    elif isinstance(prefix, Composition):
        prefix_parts = prefix.parts
    else:
        prefix_parts = tuple(prefix)
    if not prefix_parts and k < 2:
        raise InvalidIndex("first digit must be >= 2")
    if k < 1:
        raise InvalidIndex("digits must be >= 1")
    extended = Composition(prefix_parts + (k,))
    low = eval_finite(extended, truncation, precision)
    high = ones_tail_value(extended, truncation, precision)
    return low, high


class _Comparator:
    """Certified three-way comparisons of subtree values against x."""

    def __init__(self, x, base_precision: int, escalation_limit: int, truncation: int):
        self.base_precision = base_precision
        self.escalation_limit = escalation_limit
        self.truncation = truncation
        self.precision = base_precision
        if isinstance(x, int):
            x = Fraction(x)
        self.x = x
        self.exact = isinstance(x, Fraction)

    def x_enclosure(self, prec: int) -> Enclosure:
        if self.exact:
            return Enclosure.from_rational(self.x, prec)
        return self.x

    def _decide(self, parts: tuple[int, ...], prec: int) -> str | None:
        v = eval_finite(Composition(parts), self.truncation, prec)
        if self.exact:
            import gmpy2

            xq = gmpy2.mpq(self.x.numerator, self.x.denominator)
            if gmpy2.mpq(v.hi()) < xq:
                return "lt"
            if gmpy2.mpq(v.lo()) >= xq:
                return "ge"
            return None
        if v.hi() < self.x.lo():
            return "lt"
        if v.lo() >= self.x.hi():
            return "ge"
        return None

    def value_below_x(self, parts: tuple[int, ...]) -> bool | None:
        """True if value(parts) < x certified, False if >= x, None if stuck."""
        verdict = self._decide(parts, self.precision)
        if verdict is not None:
            return verdict == "lt"
        prec = self.precision
        for _ in range(self.escalation_limit):
            prec *= 2
            verdict = self._decide(parts, prec)
            if verdict is not None:
                # keep the escalated precision: nearby digits need it too
                self.precision = prec
                return verdict == "lt"
        return None


def expand(
    x,
    depth: int,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
    escalation_limit: int = 3,
) -> ExpansionResult:
    """Expand x > 1 into the first ``depth`` digits of its index sequence.

    Accepts an exact rational (int, Fraction) or an Enclosure; for an
    enclosure the digits returned are certified to be shared by every
    point of the ball, which is what a round trip through an evaluated
    ball needs.
    """
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        if x <= 1:
            raise OutOfDomain("expansion is defined for x > 1 only")
    elif isinstance(x, Enclosure):
        if x.upper_infinite or not x.certainly_gt(Enclosure.exact_int(1, x.prec)):
            raise OutOfDomain("expansion needs a ball certifiably above 1")
    else:
        raise TypeError(f"unsupported argument type {type(x)!r}")

    cmp = _Comparator(x, precision, escalation_limit, truncation)
    digits: list[int] = []

    for position in range(depth):
        kmin = 2 if not digits else 1
        prefix = tuple(digits)

        below = cmp.value_below_x(prefix + (kmin,))
        if below is None:
            return _ambiguous(cmp, digits, position)
        if below:
            digits.append(kmin)
            continue
        # double k until the value drops below x, then bisect the edge
        k_lo = kmin  # certified >= x
        step = 1
        while True:
            k_hi = k_lo + step
            below = cmp.value_below_x(prefix + (k_hi,))
            if below is None:
                return _ambiguous(cmp, digits, position)
            if below:
                break
            k_lo = k_hi
            step *= 2
        while k_hi - k_lo > 1:
            k_mid = (k_lo + k_hi) // 2
            below = cmp.value_below_x(prefix + (k_mid,))
            if below is None:
                return _ambiguous(cmp, digits, position)
            if below:
                k_hi = k_mid
            else:
                k_lo = k_mid
        digits.append(k_hi)

    residual = _residual(cmp, digits)
    tail = _detect_constant_tail(cmp, digits)
    if tail is not None:
        return ExpansionResult(tuple(digits), STATUS_EXACT, residual, tail_digit=tail)
    return ExpansionResult(tuple(digits), STATUS_TRUNCATED, residual)


def _residual(cmp: _Comparator, digits: list[int]) -> Enclosure | None:
    if not digits:
        return None
    low = eval_finite(Composition(tuple(digits)), cmp.truncation, cmp.precision)
    return cmp.x_enclosure(cmp.precision) - low


def _ambiguous(cmp: _Comparator, digits: list[int], position: int) -> ExpansionResult:
    return ExpansionResult(
        tuple(digits),
        STATUS_AMBIGUOUS,
        _residual(cmp, digits),
        ambiguous_position=position,
    )


def _detect_constant_tail(cmp: _Comparator, digits: list[int]) -> int | None:
    """Report q when the expansion visibly settled on a constant tail.

    Purely diagnostic: the flag means the constant-q completion of the
    emitted prefix is numerically indistinguishable from x, never that
    equality was proved.
    """
    if len(digits) < 4:
        return None
    q = digits[-1]
    if q < 2 or any(d != q for d in digits[-4:]):
        return None
    candidate = eval_with_const_tail(
        TailedIndex(Composition(tuple(digits)), ConstTail(q)),
        cmp.truncation,
        cmp.precision,
    )
    xe = cmp.x_enclosure(cmp.precision)
    if not candidate.separated_from(xe):
        return q
    return None
