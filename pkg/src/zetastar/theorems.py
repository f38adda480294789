"""Certified gap reports and inequality sweeps.

The closure of the digits-bounded-below value set retains two first-stage
intervals; combining them under an arithmetic operation covers the whole
combined set, so any certified gap between the combined intervals is a
certified gap of the combined set itself.  That is the whole content of
the non-interval theorems at stage one, and it is what the gap report
certifies numerically.

The inequality sweep checks the displayed bounds behind the Hall-margin
computations: the exact rational bound 2 F_m(q) <= m+1, and the two
Cauchy-Schwarz style comparisons between weighted chain sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2

from .balls import Enclosure
from .errors import InvalidNode
from .evaluate import DEFAULT_PRECISION, weighted_chain_sum
from .indices import Composition
from .subdivision import ETA_TP_CLOSURE, Family, root_node, subdivide

__all__ = [
    "GapReport",
    "InequalityReport",
    "theorem12_gaps",
    "verify_inequalities",
]

_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=64, round=gmpy2.RoundDown)

GAP_OPS = ("sum", "product", "difference", "quotient")


@dataclass
class GapReport:
    p: int
    op: str
    stage_intervals: list  # [(label, lo Enclosure, hi Enclosure)]
    combined_intervals: list  # [(label, lo, hi)] sorted by position
    gaps: list  # [(gap_lo Enclosure, gap_hi Enclosure)]
    note: str = ""

    @property
    def has_gap(self) -> bool:
        return bool(self.gaps)


def _combine_pair(op: str, a, b):
    """Endpoints of the op-image of two intervals given as (lo, hi) balls."""
    alo, ahi = a
    blo, bhi = b
    if op == "sum":
        return alo + blo, ahi + bhi
    if op == "product":
        return alo * blo, ahi * bhi
    if op == "difference":
        return alo - bhi, ahi - blo
    if op == "quotient":
        return alo / bhi, ahi / blo
    raise InvalidNode(f"unknown operation {op!r}")


def _certified_gap(cur_hi: Enclosure, nxt_lo: Enclosure) -> bool:
    # demand separation of at least twice the combined radii; the
    # separation is rounded down so a certified gap is never optimistic
    sep = _RDN.sub(nxt_lo.mid, cur_hi.mid)
    need = _RUP.mul(_RUP.add(nxt_lo.rad, cur_hi.rad), 2)
    return sep > need


def theorem12_gaps(p: int, precision: int = DEFAULT_PRECISION, op: str = "sum") -> GapReport:
    """First-stage gap certificate for the closure combined with itself.

    Builds the two retained first-stage intervals, forms their pairwise
    op-images, and reports every certified gap in the union.  A nonempty
    gap list shows the combined set misses an open interval inside its
    hull, hence is not a closed interval.
    """
    if p < 2:
        raise InvalidNode("the closure family needs p >= 2")
    if op not in GAP_OPS:
        raise InvalidNode(f"operation must be one of {GAP_OPS}")
    family = Family(ETA_TP_CLOSURE, p)
    root = root_node(family, precision)
    u1, _gap, u2 = subdivide(root, precision)
    stages = [
        ("U1", u1.low, u1.high),
        ("U2", u2.low, u2.high),
    ]
    pieces = [("U1", (u1.low, u1.high)), ("U2", (u2.low, u2.high))]
    if op in ("sum", "product"):
        pairs = [("U1*U1", 0, 0), ("U1*U2", 0, 1), ("U2*U2", 1, 1)]
    else:
        pairs = [("U1*U1", 0, 0), ("U1*U2", 0, 1), ("U2*U1", 1, 0), ("U2*U2", 1, 1)]
    combined = []
    for label, i, j in pairs:
        lo, hi = _combine_pair(op, pieces[i][1], pieces[j][1])
        combined.append((label.replace("*", {"sum": "+", "product": "*", "difference": "-", "quotient": "/"}[op]), lo, hi))
    combined.sort(key=lambda t: t[1].mid)
    gaps = []
    cur_hi = combined[0][2]
    for label, lo, hi in combined[1:]:
        if _certified_gap(cur_hi, lo):
            gaps.append((cur_hi, lo))
        if hi.mid > cur_hi.mid:
            cur_hi = hi
    note = f"closure(p={p}) is contained in closure(p=2); a stage-one gap there bounds every p"
    return GapReport(p, op, stages, combined, gaps, note)


@dataclass
class InequalityReport:
    q: int
    m_max: int
    euler_bound_holds: bool
    euler_equalities: list  # m values where 2F_m(q) = m+1 exactly
    chain_checks: list = field(default_factory=list)
    # entries: (prefix, i, which, lhs Enclosure, rhs Enclosure, status)

    @property
    def all_hold(self) -> bool:
        return self.euler_bound_holds and all(
            status == "holds" for *_rest, status in self.chain_checks
        )


def verify_inequalities(
    q: int,
    m_max: int = 10**4,
    sample_prefixes: list[Composition] | None = None,
    precision: int = DEFAULT_PRECISION,
) -> InequalityReport:
    """Check 2 F_m(q) <= m+1 exactly, and the two weighted chain bounds.

    The exact part compares integers: 2 prod n^q <= (m+1) prod (n^q - 1),
    maintained incrementally without normalization.  The chain bounds are
    certified ball comparisons on sampled prefixes for every admissible
    next-digit floor i.
    """
    if q < 2:
        raise InvalidNode("inequality sweep needs q >= 2")
    num = 2  # 2 * prod n^q
    den = 1  # prod (n^q - 1)
    holds = True
    equalities = []
    for m in range(1, m_max + 1):
        if m > 1:
            nq = m**q
            num *= nq
            den *= nq - 1
        rhs = (m + 1) * den
        if num > rhs:
            holds = False
        elif num == rhs:
            equalities.append(m)
    report = InequalityReport(q, m_max, holds, equalities)

    if sample_prefixes is None:
        sample_prefixes = [Composition((3, 2))] if q >= 3 else [Composition((2, 2))]
    for prefix in sample_prefixes:
        for i in range(1, q):
            s_i_w = weighted_chain_sum(prefix, i, "f2", precision)
            s_im1 = weighted_chain_sum(prefix, i - 1, "one", precision)
            s_i = weighted_chain_sum(prefix, i, "one", precision)
            s_q_w = weighted_chain_sum(prefix, q, "f2", precision)
            lhs_c = s_i_w * s_i_w
            rhs_c = s_im1 * s_i
            report.chain_checks.append(
                (prefix.parts, i, "C", lhs_c, rhs_c, _status(lhs_c, rhs_c))
            )
            lhs_d = s_i_w * s_q_w
            rhs_d = s_i * s_i
            report.chain_checks.append(
                (prefix.parts, i, "D", lhs_d, rhs_d, _status(lhs_d, rhs_d))
            )
    return report


def _status(lhs: Enclosure, rhs: Enclosure) -> str:
    if lhs.hi() <= rhs.lo():
        return "holds"
    if lhs.lo() > rhs.hi():
        return "violated"
    return "undecided"
