from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elemtype import bounds as B
from elemtype import construction as C
from elemtype import fpgroup as F

INF = B.INF


def test_standard_tables():
    t = B.standard_table(3)
    assert [t[m] for m in range(0, 5)] == [0, 1, 1, 0, 0]
    s = B.standard_table(2, include_sign_block=True)
    assert [s[m] for m in range(1, 6)] == [1, 1, 1, 1, 1]
    with pytest.raises(B.BoundsError):
        B.standard_table(3, include_sign_block=True)


def test_m1_is_clamped():
    reg = C.standard_registry(3)
    t = B.class_table([reg["T"]])
    assert t[1] == 1 and t.clamped
    assert not B.class_table([reg["A"]]).clamped
    assert B.make_table([0, 2])[1] == 1


def test_f_examples():
    t = B.standard_table(3)
    assert B.f(3, 2, t) == 4
    assert B.f(0, 2, t) == 1
    for e in range(6):
        assert B.f(e, 1, t) == 1
        assert B.f(e, 0, t) == 0
        assert B.f(e, 2, t) == 1 + e
    with pytest.raises(B.BoundsError):
        B.f(-1, 2, t)


def test_infinity_absorbs():
    t = B.make_table([1, INF])
    assert B.f(2, 2, t) == INF
    assert B.f(2, 1, t) == 1
    assert B.f_closed(2, 3, t) == INF


tables = st.lists(st.integers(0, 20), min_size=1, max_size=6).map(B.make_table)


@given(tables, st.integers(0, 12), st.integers(0, 12))
def test_recursion_matches_closed_form(t, e, m):
    assert B.f(e, m, t) == B.f_closed(e, m, t)


@given(tables, st.integers(0, 10), st.integers(0, 10))
def test_f_monotone_in_e(t, e, m):
    assert B.f(e, m, t) <= B.f(e + 1, m, t)


def test_free_product_takes_max_rank():
    reg = C.standard_registry(3)
    a = C.parse("<<A>>", reg)
    b = C.parse("<D2>", reg)
    prod = C.parse("(<<A>> * <D2>)", reg)
    t = B.standard_table(3)
    for m in range(1, 5):
        assert B.construction_bound(prod, m, t) == max(
            B.construction_bound(a, m, t), B.construction_bound(b, m, t))


def test_uniform_bound_examples():
    t = B.standard_table(3)
    assert B.uniform_bound(F.cyclic(3, 1), 2, t) == 2
    assert B.uniform_bound(F.unitriangular(2, 3), 2, t) == 3
    custom = C.BlockSpec("X", C.CUSTOM, 3, (1,), ("x",), (), bounds=(1,))
    with pytest.raises(B.HypothesisViolation):
        B.uniform_bound(F.cyclic(3, 1), 2, B.class_table([custom]))
    with pytest.raises(B.BoundsError):
        B.uniform_bound(F.cyclic(3, 1), 1, t)


def test_massey_values():
    assert [B.massey_symbol_bound(m, 2) for m in range(2, 9)] == [3, 5, 8, 11, 15, 19, 24]
    assert B.massey_symbol_bound(2, 2, "exact_l") == 3
    assert B.massey_symbol_bound(3, 2, "exact_l") == 5
    with pytest.raises(B.BoundsError):
        B.massey_symbol_bound(1, 2)
    with pytest.raises(B.BoundsError):
        B.massey_symbol_bound(3, 2, "other")


def test_lemma_bound_is_f_of_ubar_bound():
    t = B.standard_table(2)
    for m in range(2, 9):
        assert B.f(F.lemma_bound_ubar(m), 2, t) == B.lemma_massey_bound(m)
        assert B.lemma_massey_bound(m) == math.floor(m * m / 4) + m


def test_table_json():
    assert B.make_table([0, INF]).to_json() == {"values": [1, "inf"], "tail": 0, "clamped": True}
