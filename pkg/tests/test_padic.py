from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elemtype.padic import (
    AAutMatrix,
    PadicError,
    PrincipalUnit,
    TruncatedPadic,
    compose,
    invert,
    is_aaut_entries,
    principal_unit,
    project_bar,
    restrict_tail,
    top_right,
)


def test_truncated_arithmetic():
    a = TruncatedPadic(7, 2, 3)
    b = TruncatedPadic(5, 2, 3)
    assert (a + b).residue == 3
    assert (a * b).residue == 35 % 9
    assert (-a).residue == 2
    assert (a * a.inverse()).residue == 1
    assert a.reduce(1).residue == 1


def test_non_unit_has_no_inverse():
    with pytest.raises(PadicError):
        TruncatedPadic(6, 2, 3).inverse()


def test_principal_unit_checks_residue():
    assert principal_unit(4, 3, 2).residue == 4
    with pytest.raises(PadicError):
        PrincipalUnit(2, 2, 3)


def test_aaut_rejects_upper_entries_and_nonunit_diagonal():
    with pytest.raises(PadicError):
        AAutMatrix(((1, 1), (0, 1)), 3, 1)
    with pytest.raises(PadicError):
        AAutMatrix(((3, 0), (0, 1)), 3, 1)
    assert not is_aaut_entries(((1, 1), (0, 1)), 3, 1)
    assert is_aaut_entries(((1, 0), (2, 1)), 3, 1)


def test_column_convention():
    # alpha(u_1) = u_1 u_2^2, alpha(u_2) = u_2
    m = AAutMatrix.from_columns([[1, 2], [0, 1]], 3, 1)
    assert m.entries == ((1, 0), (2, 1))
    assert m.column(0) == (1, 2)


def _aaut(draw, r, p, n):
    mod = p**n
    rows = []
    for j in range(r):
        row = []
        for i in range(r):
            if i > j:
                row.append(0)
            elif i == j:
                row.append(draw(st.integers(0, mod - 1).filter(lambda x: x % p)))
            else:
                row.append(draw(st.integers(0, mod - 1)))
        rows.append(tuple(row))
    return AAutMatrix(tuple(rows), p, n)


@st.composite
def aaut_pairs(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    n = draw(st.integers(1, 3))
    r = draw(st.integers(1, 4))
    return _aaut(draw, r, p, n), _aaut(draw, r, p, n), _aaut(draw, r, p, n)


@settings(max_examples=200, deadline=None)
@given(aaut_pairs())
def test_group_laws(triple):
    a, b, c = triple
    ident = AAutMatrix.identity(a.rank, a.prime, a.precision)
    assert compose(a, invert(a)) == ident
    assert compose(invert(a), a) == ident
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert invert(compose(a, b)) == compose(invert(b), invert(a))


@settings(max_examples=200, deadline=None)
@given(aaut_pairs())
def test_block_projections(triple):
    a, b, _ = triple
    r = a.rank
    for k in range(1, r + 1):
        # projection to A / V^k is a homomorphism
        assert project_bar(compose(a, b), k) == compose(project_bar(a, k), project_bar(b, k))
        # preserving the tail filtration means no component above the diagonal block
        assert all(x == 0 for row in top_right(a.entries, k) for x in row)
    for k in range(0, r + 1):
        assert restrict_tail(compose(a, b), k) == compose(restrict_tail(a, k), restrict_tail(b, k))


def test_projection_ranges():
    m = AAutMatrix.identity(2, 3, 1)
    with pytest.raises(PadicError):
        project_bar(m, 0)
    with pytest.raises(PadicError):
        restrict_tail(m, 3)
    assert restrict_tail(m, 2).rank == 0
