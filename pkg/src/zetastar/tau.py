"""Exact-rational mirror of the machinery under the binary digit map.

The map sends a digit sequence (k1,k2,...) to sum_j 2^-(k1+...+kj).  It
shares the order structure of the zeta-star correspondence but all its
values are rationals, so subdivision identities, Hall margins and sumset
decompositions can be checked with no tolerance at all.  Any structural
hypothesis about the ball-arithmetic families is reproduced here first.

Dyadic boundary convention: finite binary expansions are represented by
their infinite ones-tail form (1/2 is (2,1,1,...)), which keeps the map a
bijection from infinite sequences onto (0,1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidNode, NonTerminating, OutOfDomain, OutOfRange

__all__ = [
    "DigitSeq",
    "ONES_TAIL",
    "Periodic",
    "digitseq_compare",
    "tau_decompose_sum",
    "tau_expand",
    "tau_node_lengths",
    "tau_value",
]


@dataclass(frozen=True)
class Periodic:
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period or any(d < 1 for d in self.period):
            raise OutOfDomain("period must be a nonempty tuple of digits >= 1")

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.period)) + ")^inf"


ONES_TAIL = Periodic((1,))


@dataclass(frozen=True)
class DigitSeq:
    """Digit prefix plus an optional periodic tail (None = truncated)."""

    prefix: tuple[int, ...]
    tail: Periodic | None = None

    def __post_init__(self):
        if any(d < 1 for d in self.prefix):
            raise OutOfDomain("digits must be >= 1")

    def digit_at(self, i: int) -> int | None:
        """Digit at position i (0-based), unrolling the tail; None past a cut."""
        if i < len(self.prefix):
            return self.prefix[i]
        if self.tail is None:
            return None
        return self.tail.period[(i - len(self.prefix)) % len(self.tail.period)]

    def __str__(self) -> str:
        body = ",".join(map(str, self.prefix))
        if self.tail is None:
            return f"({body},...)"
        return f"({body},{self.tail})" if body else f"({self.tail})"


def tau_value(s: DigitSeq) -> Fraction:
    """Exact value of an eventually periodic digit sequence."""
    if s.tail is None:
        raise NonTerminating("sequence has no periodic tail")
    acc = Fraction(0)
    shift = 0
    for d in s.prefix:
        shift += d
        acc += Fraction(1, 2**shift)
    period_sum = Fraction(0)
    pshift = 0
    for d in s.tail.period:
        pshift += d
        period_sum += Fraction(1, 2**pshift)
    tail_val = period_sum / (1 - Fraction(1, 2**pshift))
    return acc + Fraction(1, 2**shift) * tail_val


def _first_digit(x: Fraction) -> int:
    """The unique k >= 1 with 2^-k < x <= 2^-(k-1)."""
    a, b = x.numerator, x.denominator
    k = max(1, b.bit_length() - a.bit_length())
    while Fraction(1, 2**k) >= x:
        k += 1
    while k > 1 and Fraction(1, 2 ** (k - 1)) < x:
        k -= 1
    return k


def tau_expand(x: Fraction, depth: int = 64) -> DigitSeq:
    """Digit gaps of the binary expansion of x in (0,1], with period detection.

    Dyadic inputs come out in the ones-tail form automatically: the state
    map y -> 2^k y - 1 keeps the state strictly positive.
    """
    x = Fraction(x)
    if not 0 < x <= 1:
        raise OutOfDomain("binary digit map is defined on (0,1]")
    digits: list[int] = []
    seen: dict[Fraction, int] = {}
    state = x
    while len(digits) < depth:
        if state in seen:
            start = seen[state]
            return DigitSeq(tuple(digits[:start]), Periodic(tuple(digits[start:])))
        seen[state] = len(digits)
        k = _first_digit(state)
        digits.append(k)
        state = state * 2**k - 1
    return DigitSeq(tuple(digits), None)


def digitseq_compare(a: DigitSeq, b: DigitSeq) -> int:
    """Order of two digit sequences: +1 if a is larger, -1, or 0 if equal.

    At the first differing position the smaller digit belongs to the
    larger sequence; an infinite extension of a finite truncation counts
    as larger.  Eventually periodic sequences agree forever iff they
    agree through one common period beyond both prefixes.
    """
    la = len(a.prefix) + (len(a.tail.period) if a.tail else 0)
    lb = len(b.prefix) + (len(b.tail.period) if b.tail else 0)
    if a.tail and b.tail:
        horizon = max(len(a.prefix), len(b.prefix)) + math.lcm(len(a.tail.period), len(b.tail.period)) + 1
    else:
        horizon = max(la, lb) + 1
    for i in range(horizon):
        da, db = a.digit_at(i), b.digit_at(i)
        if da is None and db is None:
            return 0
        if da is None:
            return -1
        if db is None:
            return 1
        if da != db:
            return 1 if da < db else -1
    return 0


def tau_node_lengths(
    prefix: tuple[int, ...], type_i: int, k: int
) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Exact lengths (parent, fixed-digit child, constraint child, gap).

    The node is the interval of sequences extending ``prefix`` with next
    digit in [type_i, k]; splitting off the fixed digit type_i removes a
    gap of exactly K / (2^type_i (2^k - 1)) with K = 2^-sum(prefix).
    """
    if not 1 <= type_i <= k - 1:
        raise InvalidNode(f"type must be in [1, {k - 1}]")
    if any(d < 1 or d > k for d in prefix):
        raise InvalidNode("prefix digits must lie in [1, k]")
    K = Fraction(1, 2 ** sum(prefix))
    i = type_i
    denom = 2**k - 1
    parent = K * (Fraction(1, 2 ** (i - 1)) - Fraction(1, denom))
    child_fixed = K * (Fraction(1, 2 ** (i - 1)) - Fraction(2 ** (k - i), denom))
    child_rest = K * (Fraction(1, 2**i) - Fraction(1, denom))
    gap = K / (2**i * denom)
    return parent, child_fixed, child_rest, gap


# -- exact nested-interval sum decomposition ---------------------------------


@dataclass(frozen=True)
class _Node:
    """Interval of bounded-digit sequences: prefix fixed, next digit >= i."""

    prefix: tuple[int, ...]
    i: int
    k: int

    def lo(self) -> Fraction:
        # all-k continuation
        K = Fraction(1, 2 ** sum(self.prefix))
        return _tau_prefix_value(self.prefix) + K / (2**self.k - 1)

    def hi(self) -> Fraction:
        # digit i then all ones
        K = Fraction(1, 2 ** sum(self.prefix))
        return _tau_prefix_value(self.prefix) + K * Fraction(1, 2 ** (self.i - 1))

    def width(self) -> Fraction:
        return self.hi() - self.lo()

    def lo_rep(self) -> DigitSeq:
        return DigitSeq(self.prefix, Periodic((self.k,)))

    def hi_rep(self) -> DigitSeq:
        return DigitSeq(self.prefix + (self.i,), ONES_TAIL)

    def children(self) -> tuple["_Node", "_Node"]:
        """(lower child, upper child) by value order."""
        upper = _Node(self.prefix + (self.i,), 1, self.k)
        if self.i + 1 <= self.k - 1:
            lower = _Node(self.prefix, self.i + 1, self.k)
        else:
            lower = _Node(self.prefix + (self.k,), 1, self.k)
        return lower, upper


def _tau_prefix_value(prefix: tuple[int, ...]) -> Fraction:
    acc = Fraction(0)
    shift = 0
    for d in prefix:
        shift += d
        acc += Fraction(1, 2**shift)
    return acc


def tau_decompose_sum(
    x: Fraction, k: int, depth: int = 40
) -> tuple[DigitSeq, DigitSeq, Fraction]:
    """Exact pair of bounded-digit sequences whose values sum close to x.

    Returns (left, right, residual) with |residual| = |v_l + v_r - x|
    bounded by the combined node widths, at most (4/3) * 2^-depth.  Exact
    boundary hits are returned with residual exactly 0.
    """
    x = Fraction(x)
    if k < 2:
        raise InvalidNode("digit bound k must be >= 2")
    lo_end = Fraction(2, 2**k - 1)
    if not lo_end <= x <= 2:
        raise OutOfRange(f"target outside [{lo_end}, 2]")
    target = Fraction(4, 3) / 2**depth
    c = d = _Node((), 1, k)
    for _ in range(64 * (depth + 4)):
        # exact corner hits give zero-residual certificates
        for rc, vc in ((c.lo_rep(), c.lo()), (c.hi_rep(), c.hi())):
            for rd, vd in ((d.lo_rep(), d.lo()), (d.hi_rep(), d.hi())):
                if vc + vd == x:
                    return rc, rd, Fraction(0)
        if c.width() + d.width() <= target:
            break
        split_c = c.width() >= d.width()
        node = c if split_c else d
        other = d if split_c else c
        best = None
        best_margin = None
        for child in node.children():
            lo = child.lo() + other.lo()
            hi = child.hi() + other.hi()
            if lo <= x <= hi:
                margin = min(x - lo, hi - x)
                if best_margin is None or margin > best_margin:
                    best, best_margin = child, margin
        if best is None:
            raise OutOfRange("target escaped the sum intervals")
        if split_c:
            c = best
        else:
            d = best
    v = c.lo() + d.lo()
    return c.lo_rep(), d.lo_rep(), x - v
