"""Cantor subdivision families: nodes, Hall margins, thickness.

Four interval families share one node shape (a digit prefix plus the
minimum allowed next digit):

* ``eta-dq``: value intervals of sequences with digits bounded above by q
  (half-infinite at the top, since the all-but-ones boundary diverges);
* ``tau-bk``: the exact-rational binary mirror of ``eta-dq``;
* ``eta-tp-closure``: closures of value sets with digits bounded below by
  p, whose nodes bottom out at attained finite truncation values;
* ``tau-lp-closure``: the exact-rational mirror of the closure family.

Splitting a node fixes the smallest allowed digit (the upper child, since
smaller digits mean larger values) against the rest (the lower child) and
removes one open gap in between.  The Hall sweep certifies that no gap
exceeds either retained side; the exact families are checked with
rational arithmetic and zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .balls import Enclosure
from .errors import InvalidNode, PrecisionInsufficient, UnboundedFamily
from .evaluate import (
    DEFAULT_PRECISION,
    eval_finite,
    eval_with_const_tail,
    ones_tail_value,
    tail_factor_limit,
)
from .indices import Composition, ConstTail, TailedIndex

__all__ = [
    "ETA_DQ",
    "ETA_TP_CLOSURE",
    "Family",
    "HallReport",
    "SubdivisionNode",
    "TAU_BK",
    "TAU_LP_CLOSURE",
    "check_hall_condition",
    "node_endpoints",
    "root_node",
    "subdivide",
    "thickness",
    "thickness_exact",
]

ETA_DQ = "eta-dq"
TAU_BK = "tau-bk"
ETA_TP_CLOSURE = "eta-tp-closure"
TAU_LP_CLOSURE = "tau-lp-closure"

_KINDS = (ETA_DQ, TAU_BK, ETA_TP_CLOSURE, TAU_LP_CLOSURE)


@dataclass(frozen=True)
class Family:
    """A subdivision family tag: which construction, and its digit bound."""

    kind: str
    bound: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidNode(f"unknown family kind {self.kind!r}")
        if self.bound < 2:
            raise InvalidNode("family digit bound must be >= 2")

    @property
    def exact(self) -> bool:
        return self.kind in (TAU_BK, TAU_LP_CLOSURE)

    @property
    def bounded_above(self) -> bool:
        return self.kind in (ETA_DQ, TAU_BK)

    def __str__(self) -> str:
        return f"{self.kind}({self.bound})"


@dataclass(frozen=True)
class SubdivisionNode:
    """One interval of a Cantor construction: prefix + next-digit floor."""

    family: Family
    prefix: tuple[int, ...]
    type_i: int
    low: Enclosure
    high: Enclosure
    exact_low: Fraction | None = None
    exact_high: Fraction | None = None

    @property
    def finite(self) -> bool:
        return not self.high.upper_infinite

    def length(self) -> Enclosure:
        if not self.finite:
            return Enclosure.infinite(self.low.prec)
        return self.high - self.low

    def exact_length(self) -> Fraction:
        return self.exact_high - self.exact_low

    def __str__(self) -> str:
        body = ",".join(map(str, self.prefix))
        return f"{self.family}[({body});{self.type_i}]"


def _tau_prefix_value(prefix: tuple[int, ...]) -> Fraction:
    acc = Fraction(0)
    shift = 0
    for d in prefix:
        shift += d
        acc += Fraction(1, 2**shift)
    return acc


def _validate(family: Family, prefix: tuple[int, ...], type_i: int) -> None:
    b = family.bound
    if family.kind == ETA_DQ:
        # endpoint formulas are well-defined for any admissible prefix,
        # so only index admissibility is enforced, not family membership
        if prefix and prefix[0] < 2:
            raise InvalidNode("first digit must be >= 2")
        if any(d < 1 for d in prefix[1:]):
            raise InvalidNode("digits must be >= 1")
        lo_i = 2 if not prefix else 1
        if not lo_i <= type_i <= b - 1:
            raise InvalidNode(f"type must be in [{lo_i}, {b - 1}]")
    elif family.kind == TAU_BK:
        if any(d < 1 for d in prefix):
            raise InvalidNode("digits must be >= 1")
        if not 1 <= type_i <= b - 1:
            raise InvalidNode(f"type must be in [1, {b - 1}]")
    else:
        if any(d < b for d in prefix):
            raise InvalidNode("digits must be >= the family bound")
        if type_i < b:
            raise InvalidNode("type must be >= the family bound")


def node_endpoints(
    family: Family,
    prefix: tuple[int, ...],
    type_i: int,
    precision: int = DEFAULT_PRECISION,
) -> tuple[Enclosure, Enclosure]:
    """Certified endpoints of the node's value interval."""
    node = make_node(family, prefix, type_i, precision)
    return node.low, node.high


def make_node(
    family: Family,
    prefix: tuple[int, ...],
    type_i: int,
    precision: int = DEFAULT_PRECISION,
) -> SubdivisionNode:
    _validate(family, prefix, type_i)
    b = family.bound
    if family.kind == ETA_DQ:
        if prefix:
            low = eval_with_const_tail(
                TailedIndex(Composition(prefix), ConstTail(b)), precision=precision
            )
        else:
            low = tail_factor_limit(b, precision)
        high = ones_tail_value(Composition(prefix + (type_i,)), precision=precision)
        return SubdivisionNode(family, prefix, type_i, low, high)
    if family.kind == TAU_BK:
        K = Fraction(1, 2 ** sum(prefix))
        base = _tau_prefix_value(prefix)
        elo = base + K / (2**b - 1)
        ehi = base + K * Fraction(1, 2 ** (type_i - 1))
        return SubdivisionNode(
            family,
            prefix,
            type_i,
            Enclosure.from_rational(elo, precision),
            Enclosure.from_rational(ehi, precision),
            exact_low=elo,
            exact_high=ehi,
        )
    if family.kind == ETA_TP_CLOSURE:
        if prefix:
            low = eval_finite(Composition(prefix), precision=precision)
        else:
            low = Enclosure.exact_int(1, precision)
        high = eval_with_const_tail(
            TailedIndex(Composition(prefix + (type_i,)), ConstTail(b)), precision=precision
        )
        return SubdivisionNode(family, prefix, type_i, low, high)
    # TAU_LP_CLOSURE
    base = _tau_prefix_value(prefix)
    shift = sum(prefix) + type_i
    elo = base
    ehi = base + Fraction(2**b, 2**shift * (2**b - 1))
    return SubdivisionNode(
        family,
        prefix,
        type_i,
        Enclosure.from_rational(elo, precision),
        Enclosure.from_rational(ehi, precision),
        exact_low=elo,
        exact_high=ehi,
    )


def root_node(family: Family, precision: int = DEFAULT_PRECISION) -> SubdivisionNode:
    if family.kind == ETA_DQ:
        if family.bound == 2:
            return make_node(family, (2,), 1, precision)
        return make_node(family, (), 2, precision)
    if family.kind == TAU_BK:
        return make_node(family, (), 1, precision)
    return make_node(family, (), family.bound, precision)


def subdivide(
    node: SubdivisionNode, precision: int | None = None
) -> tuple[SubdivisionNode, tuple[Enclosure, Enclosure], SubdivisionNode]:
    """Split a node into (lower child, gap endpoints, upper child).

    The upper child fixes the smallest allowed digit; the lower child
    raises the digit floor (wrapping to a fixed top digit for the bounded
    families).  The open gap runs from the lower child's high endpoint to
    the upper child's low endpoint.
    """
    prec = precision if precision is not None else node.low.prec
    family = node.family
    b = family.bound
    upper = make_node(family, node.prefix + (node.type_i,), 1 if family.bounded_above else b, prec)
    if family.bounded_above:
        if node.type_i + 1 <= b - 1:
            lower = make_node(family, node.prefix, node.type_i + 1, prec)
        else:
            lower = make_node(family, node.prefix + (b,), 1, prec)
    else:
        lower = make_node(family, node.prefix, node.type_i + 1, prec)
    return lower, (lower.high, upper.low), upper


@dataclass
class HallReport:
    family: Family
    max_depth: int
    nodes_checked: int
    worst_margin: Enclosure | Fraction | None
    violations: list
    exact: bool

    @property
    def passed(self) -> bool:
        return not self.violations


def check_hall_condition(
    family: Family,
    max_depth: int,
    precision: int = DEFAULT_PRECISION,
) -> HallReport:
    """Sweep the subdivision tree and certify gap <= min(left, right).

    Exact families are compared in rational arithmetic (margins exact,
    equality allowed); ball families raise PrecisionInsufficient when a
    comparison cannot be certified either way.  Nodes of infinite length
    are skipped (the condition is vacuous there) but their children are
    still visited.
    """
    if max_depth < 1:
        raise InvalidNode("max_depth must be >= 1")
    root = root_node(family, precision)
    frontier = [root]
    nodes_checked = 0
    worst: Enclosure | Fraction | None = None
    violations = []
    for _ in range(max_depth):
        next_frontier = []
        for node in frontier:
            lower, _gap, upper = subdivide(node)
            next_frontier.extend((lower, upper))
            if not node.finite:
                continue
            nodes_checked += 1
            if family.exact:
                gap_len = upper.exact_low - lower.exact_high
                margin = min(lower.exact_length(), upper.exact_length()) - gap_len
                if margin < 0:
                    violations.append((node, margin))
                if worst is None or margin < worst:
                    worst = margin
            else:
                gap_len = upper.low - lower.high
                margins = []
                # (1 + 1/m) F_m(2) = 2 makes one margin vanish identically
                # in the bound-2 families; ball arithmetic cannot certify
                # an equality, so those are recorded as exact zeros
                if family.kind == ETA_DQ and family.bound == 2:
                    margins.append(Enclosure.exact_int(0, precision))
                else:
                    margins.append(lower.length() - gap_len)
                if family.kind == ETA_TP_CLOSURE and family.bound == 2:
                    margins.append(Enclosure.exact_int(0, precision))
                elif upper.finite:
                    margins.append(upper.length() - gap_len)
                for margin in margins:
                    if margin.lo() >= 0:
                        pass
                    elif margin.hi() < 0:
                        violations.append((node, margin))
                    else:
                        raise PrecisionInsufficient(
                            f"hall margin at {node} straddles zero at {precision} bits"
                        )
                    if worst is None or margin.lo() < worst.lo():
                        worst = margin
        frontier = next_frontier
    return HallReport(family, max_depth, nodes_checked, worst, violations, family.exact)


def _collect_gaps(family: Family, depth: int, precision: int):
    """All (gap_lo, gap_hi) pairs created through ``depth`` subdivision rounds."""
    root = root_node(family, precision)
    frontier = [root]
    gaps = []
    for _ in range(depth):
        next_frontier = []
        for node in frontier:
            lower, (g_lo, g_hi), upper = subdivide(node)
            next_frontier.extend((lower, upper))
            if family.exact:
                gaps.append((lower.exact_high, upper.exact_low))
            else:
                gaps.append((g_lo, g_hi))
        frontier = next_frontier
    return root, gaps


def thickness_exact(family: Family, depth: int) -> Fraction:
    """Ordered-gap thickness of the depth-``depth`` truncation, exactly.

    Gaps are inserted largest first; each insertion splits a surviving
    interval into two bridges and contributes min(bridge)/gap; the
    thickness is the minimum contribution.  Only the exact rational
    families support this entry point.
    """
    if not family.exact:
        raise InvalidNode("thickness_exact needs an exact rational family")
    root, gaps = _collect_gaps(family, depth, 64)
    hull = (root.exact_low, root.exact_high)
    gaps = sorted(gaps, key=lambda g: g[1] - g[0], reverse=True)
    intervals = [hull]
    best: Fraction | None = None
    for g_lo, g_hi in gaps:
        for idx, (lo, hi) in enumerate(intervals):
            if lo <= g_lo and g_hi <= hi:
                break
        else:
            raise InvalidNode("gap not inside a surviving interval")
        left = (lo, g_lo)
        right = (g_hi, hi)
        ratio = min(g_lo - lo, hi - g_hi) / (g_hi - g_lo)
        if best is None or ratio < best:
            best = ratio
        intervals[idx : idx + 1] = [left, right]
    if best is None:
        raise InvalidNode("no gaps at this depth")
    return best


def thickness(
    family: Family, depth: int, precision: int = DEFAULT_PRECISION
) -> Enclosure:
    """Newhouse thickness of the depth-``depth`` truncation as an enclosure.

    Exact families go through the rational computation; ball families
    order gaps by midpoint length (escalate precision if two gap lengths
    cannot be separated and the answer matters) and return the interval
    hull of the candidate minimum ratios.
    """
    if family.kind == ETA_DQ:
        raise UnboundedFamily("the digit-bounded value family is half-infinite")
    if family.exact:
        return Enclosure.from_rational(thickness_exact(family, depth), precision)
    root, gaps = _collect_gaps(family, depth, precision)
    items = []
    for g_lo, g_hi in gaps:
        length = g_hi - g_lo
        items.append((g_lo, g_hi, length))
    items.sort(key=lambda t: t[2].mid, reverse=True)
    intervals = [(root.low, root.high)]
    ratios = []
    for g_lo, g_hi, length in items:
        placed = None
        for idx, (lo, hi) in enumerate(intervals):
            if lo.mid <= g_lo.mid and g_hi.mid <= hi.mid:
                placed = idx
                break
        if placed is None:
            raise PrecisionInsufficient("cannot place a gap inside the surviving intervals")
        lo, hi = intervals[placed]
        bridge_l = g_lo - lo
        bridge_r = hi - g_hi
        m = bridge_l if bridge_l.mid <= bridge_r.mid else bridge_r
        ratios.append(m / length)
        intervals[placed : placed + 1] = [(lo, g_lo), (g_hi, hi)]
    lo = min(r.lo() for r in ratios)
    hi = min(r.hi() for r in ratios)
    return Enclosure.from_endpoints(lo, hi, precision)
