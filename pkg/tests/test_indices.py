import pytest

from zetastar.errors import InvalidIndex, NotInDomain
from zetastar.indices import (
    Composition,
    ConstTail,
    NO_TAIL,
    TailedIndex,
    canonical_form,
    index_compare,
    make_composition,
)


def test_make_composition_valid():
    assert make_composition([2]).parts == (2,)
    assert make_composition([3, 1, 2]).parts == (3, 1, 2)


def test_make_composition_rejects_bad_head():
    with pytest.raises(InvalidIndex):
        make_composition([1, 2])


def test_make_composition_rejects_empty_and_nonpositive():
    with pytest.raises(InvalidIndex):
        make_composition([])
    with pytest.raises(InvalidIndex):
        make_composition([2, 0])


def test_order_rule_extension():
    assert index_compare(make_composition([2, 1]), make_composition([2])) == 1
    assert index_compare(make_composition([2]), make_composition([2, 1])) == -1


def test_order_rule_first_difference():
    # the smaller entry at the first difference wins
    assert index_compare(make_composition([2, 1]), make_composition([3])) == 1
    assert index_compare(make_composition([2, 1, 5]), make_composition([2, 2])) == 1
    assert index_compare(make_composition([2, 2]), make_composition([2, 1, 5])) == -1


def test_order_equal():
    assert index_compare(make_composition([4, 1, 3]), make_composition([4, 1, 3])) == 0


def test_order_is_total_and_antisymmetric():
    import itertools
    import random

    rng = random.Random(5)
    pool = [
        make_composition([rng.randint(2, 4)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 3))])
        for _ in range(25)
    ]
    for a, b in itertools.combinations(pool, 2):
        assert index_compare(a, b) == -index_compare(b, a)
    for a, b, c in itertools.combinations(pool, 3):
        if index_compare(a, b) > 0 and index_compare(b, c) > 0:
            assert index_compare(a, c) > 0


def test_canonical_form_absorbs_trailing_ones():
    t = TailedIndex(make_composition([3, 1]), ConstTail(1))
    out = canonical_form(t)
    assert out.prefix.parts == (3,)
    assert out.tail == ConstTail(1)


def test_canonical_form_already_canonical():
    t = TailedIndex(make_composition([3]), ConstTail(1))
    assert canonical_form(t) == t


def test_canonical_form_rejects_divergent_pattern():
    with pytest.raises(NotInDomain):
        canonical_form(TailedIndex(make_composition([2]), ConstTail(1)))
    with pytest.raises(NotInDomain):
        canonical_form(TailedIndex(make_composition([2, 1, 1]), ConstTail(1)))


def test_canonical_form_leaves_other_tails_alone():
    t = TailedIndex(make_composition([2, 1]), ConstTail(2))
    assert canonical_form(t) == t
    t2 = TailedIndex(make_composition([2, 1]), NO_TAIL)
    assert canonical_form(t2) == t2


def test_tailed_index_str():
    assert str(TailedIndex(make_composition([3]), ConstTail(2))) == "(3,{2}^inf)"
