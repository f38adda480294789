"""Dimension diagnostics and empirical searches.

Everything here reports; nothing asserts.  The dimension of the
digits-bounded-below sets is checked on the binary-map analogue, whose
level-n dyadic interval counts obey an exact integer recurrence with the
same characteristic equation as the dimension formula, so the growth rate
of the counts is the testable surrogate for the Hausdorff dimension.

The algebraic survivor search expands candidate algebraic numbers and
classifies them by their digit prefixes; its output schema deliberately
has no "member" state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .balls import Enclosure
from .errors import InvalidIndex
from .evaluate import DEFAULT_PRECISION, eval_finite
from .expansion import STATUS_AMBIGUOUS, expand
from .indices import Composition
from .subdivision import ETA_DQ, Family, root_node, subdivide

__all__ = [
    "DimensionRecord",
    "SurvivorEntry",
    "alpha_root",
    "box_count",
    "box_count_sequence",
    "covering_length",
    "dimension_formula",
    "dimension_record",
    "search_algebraic",
]

_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)


@dataclass(frozen=True)
class DimensionRecord:
    p: int
    alpha: Enclosure
    dim: Enclosure
    empirical_dim: float | None = None
    depth: int | None = None


def alpha_root(p: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Certified root of x^(p-1) (x-1) = 1 in (1,2), by exact bisection.

    The polynomial is evaluated in exact rational arithmetic at dyadic
    points, so the bracket is rigorous; the enclosure is tightened until
    the defining-equation residual sits below 2^-(precision-4).
    """
    if p < 2:
        raise InvalidIndex("the dimension root needs p >= 2")

    def f(x: Fraction) -> Fraction:
        return x ** (p - 1) * (x - 1) - 1

    lo, hi = Fraction(1), Fraction(2)
    # depth covers the Lipschitz factor p 2^(p-1) on [1,2]
    for _ in range(precision + p + 8):
        mid = (lo + hi) / 2
        v = f(mid)
        if v == 0:
            return Enclosure.from_rational(mid, precision)
        if v < 0:
            lo = mid
        else:
            hi = mid
    enc_lo = Enclosure.from_rational(lo, precision)
    enc_hi = Enclosure.from_rational(hi, precision)
    return Enclosure.from_endpoints(enc_lo.lo(), enc_hi.hi(), precision)


def dimension_formula(p: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """log(alpha_p) / log(2) with outward rounding."""
    alpha = alpha_root(p, precision)
    log2 = Enclosure.exact_int(2, precision).log()
    return alpha.log() / log2


def dimension_record(
    p: int, precision: int = DEFAULT_PRECISION, box_depth: int | None = 60
) -> DimensionRecord:
    alpha = alpha_root(p, precision)
    dim = dimension_formula(p, precision)
    empirical = None
    if box_depth:
        _count, ratio = box_count(p, box_depth)
        empirical = ratio
    return DimensionRecord(p, alpha, dim, empirical, box_depth)


def box_count_sequence(p: int, n: int) -> list[int]:
    """Counts of level-j dyadic intervals meeting the binary-map set, j = 0..n.

    A level-j interval survives iff its bit prefix has all 1-bits at
    mutual gaps >= p and the first 1-bit at position >= p, giving
    a_j = a_{j-1} + a_{j-p}.
    """
    if p < 2 or n < 1:
        raise InvalidIndex("box counting needs p >= 2, n >= 1")
    a = [1] * min(p, n + 1)
    while len(a) <= n:
        a.append(a[-1] + a[len(a) - p])
    return a


def box_count(p: int, n: int) -> tuple[int, float]:
    """(a_n, log2(a_n / a_{n-1})): the count and its growth-rate estimate."""
    a = box_count_sequence(p, n)
    import math

    return a[n], math.log2(a[n] / a[n - 1])


def covering_length(
    q: int, depth: int, precision: int = DEFAULT_PRECISION, window_depth: int = 8
) -> Enclosure:
    """Total length of the depth-``depth`` subdivision intervals in a window.

    The family is half-infinite, so lengths are clipped to the window from
    the minimal value up to the all-ones finite value of ``window_depth``
    digits.  The window stays fixed while the subdivision deepens, so each
    round removes gaps and the total strictly decreases.
    """
    family = Family(ETA_DQ, q)
    window_hi = eval_finite(Composition((2,) + (1,) * window_depth), precision=precision)
    frontier = [root_node(family, precision)]
    for _ in range(depth):
        nxt = []
        for node in frontier:
            lower, _gap, upper = subdivide(node, precision)
            nxt.extend((lower, upper))
        frontier = nxt
    total = Enclosure.exact_int(0, precision)
    for node in frontier:
        hi = window_hi if (not node.finite or node.high.mid > window_hi.mid) else node.high
        if hi.mid <= node.low.mid:
            continue
        total = total + (hi - node.low)
    return total


# -- algebraic survivor search -------------------------------------------------


@dataclass(frozen=True)
class SurvivorEntry:
    polynomial: tuple[int, ...]  # coefficients, constant term first
    root: Enclosure
    classification: str  # "survivor" | "eliminated" | "boundary-ambiguous"
    eliminated_at: int | None
    digits: tuple[int, ...]


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs):
    return tuple(i * c for i, c in enumerate(coeffs) if i > 0)


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        factor = Fraction(a[-1]) / b[-1]
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return tuple(q), tuple(a)


def _sturm_chain(coeffs):
    chain = [tuple(Fraction(c) for c in coeffs)]
    deriv = tuple(Fraction(c) for c in _poly_deriv(coeffs))
    if deriv:
        chain.append(deriv)
    while len(chain[-1]) > 1:
        _q, r = _poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-c for c in r))
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for poly in chain:
        v = _poly_eval(poly, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _roots_in_interval(coeffs, lo: Fraction, hi: Fraction, width: Fraction):
    """Disjoint rational brackets (a, b] around each real root in (lo, hi]."""
    chain = _sturm_chain(coeffs)

    def count(a: Fraction, b: Fraction) -> int:
        return _sign_variations(chain, a) - _sign_variations(chain, b)

    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1 and b - a <= width:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        if _poly_eval(chain[0], mid) == 0:
            out.append((mid, mid))
            eps = min(width, (b - a)) / 4
            stack.append((a, mid - eps))
            stack.append((mid + eps, b))
            continue
        stack.append((a, mid))
        stack.append((mid, b))
    return sorted(out)


def search_algebraic(
    q: int = 2,
    max_degree: int = 2,
    max_height: int = 4,
    expand_depth: int = 12,
    precision: int = DEFAULT_PRECISION,
) -> list[SurvivorEntry]:
    """Expand algebraic candidates and classify their digit prefixes.

    Candidates are the real roots, inside the reachable value window, of
    integer polynomials with bounded degree and coefficient height.  Each
    is expanded to ``expand_depth`` digits: a digit above q eliminates it,
    an undecidable boundary is flagged, anything else merely survived to
    that depth.  No outcome asserts membership.
    """
    if max_degree < 1 or max_height < 1 or expand_depth < 1:
        raise InvalidIndex("search parameters must be positive")
    window_hi_enc = eval_finite(Composition((2,) + (1,) * expand_depth), precision=precision)
    window_hi = window_hi_enc.to_fraction_mid()
    width = Fraction(1, 2 ** (precision // 2))
    seen_polys = set()
    brackets: list[tuple[Fraction, Fraction, tuple[int, ...]]] = []
    for degree in range(1, max_degree + 1):
        for coeffs in _integer_polys(degree, max_height):
            if coeffs in seen_polys:
                continue
            seen_polys.add(coeffs)
            for a, b in _roots_in_interval(coeffs, Fraction(1), window_hi, width):
                brackets.append((a, b, coeffs))
    brackets.sort()
    entries: list[SurvivorEntry] = []
    last_hi: Fraction | None = None
    for a, b, coeffs in brackets:
        if last_hi is not None and a <= last_hi:
            continue  # same algebraic number reached through another polynomial
        last_hi = b
        if a == b:
            x = a
            root_enc = Enclosure.from_rational(a, precision)
        else:
            root_enc = Enclosure.from_endpoints(
                Enclosure.from_rational(a, precision).lo(),
                Enclosure.from_rational(b, precision).hi(),
                precision,
            )
            x = root_enc
        result = expand(x, expand_depth, precision=precision)
        if result.status == STATUS_AMBIGUOUS:
            entries.append(
                SurvivorEntry(coeffs, root_enc, "boundary-ambiguous", None, result.digits)
            )
            continue
        bad = next((j for j, d in enumerate(result.digits) if d > q), None)
        if bad is not None:
            entries.append(SurvivorEntry(coeffs, root_enc, "eliminated", bad, result.digits))
        else:
            entries.append(SurvivorEntry(coeffs, root_enc, "survivor", None, result.digits))
    return entries


def _integer_polys(degree: int, height: int):
    """Primitive integer polynomials of exact ``degree`` with positive lead."""
    import math
    from itertools import product

    for coeffs in product(range(-height, height + 1), repeat=degree):
        for lead in range(1, height + 1):
            poly = coeffs + (lead,)
            if math.gcd(*[abs(c) for c in poly]) != 1:
                continue
            yield poly
