from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elemtype import construction as C
from elemtype import words as W
from elemtype.generate import random_construction

REG3 = C.standard_registry(3)
REG2 = C.standard_registry(2)


def parse(text, reg=REG3):
    return C.parse(text, reg)


def constructions(reg=REG3, blocks=("T", "A", "B", "D2"), max_rank=3):
    return st.integers(0, 10**9).map(
        lambda seed: random_construction(random.Random(seed), reg, list(blocks), max_rank)
    )


def test_parse_and_print():
    c = parse("< ( <A>*<B> ) >")
    assert c.to_text() == "<(<A> * <B>)>"
    assert isinstance(c, C.Extension)
    assert parse(c.to_text()) == c


@settings(max_examples=150, deadline=None)
@given(constructions())
def test_print_parse_roundtrip(c):
    assert parse(c.to_text()) == c


@pytest.mark.parametrize(
    "text,pos",
    [("", 0), ("(A * B", 6), ("<A", 2), ("(A B)", 3), ("A >", 2), ("(A * )", 5)],
)
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(C.ConstructionSyntaxError) as exc:
        parse(text)
    assert exc.value.position == pos


def test_unknown_block_and_trivial_operand():
    with pytest.raises(C.UnknownBlockError):
        parse("(A * Q)")
    with pytest.raises(C.TrivialOperandError):
        parse("(A * T)")
    # the trivial block is fine under an extension
    assert C.extension_rank(parse("<T>")) == 1


def test_generators_and_relations():
    c = parse("<(A * D2)>")
    ids = c.generator_ids()
    assert ids == ["A.x@EL", "D2.x1@ER", "D2.x2@ER", "z@"]
    rels = c.relations()
    # one Demushkin relation plus one action relation per base generator
    assert len(rels) == 1 + 3
    thetas = c.thetas()
    assert thetas["z@"] == 1 and thetas["D2.x2@ER"] == 1 - 3


def test_sign_block_needs_p2():
    with pytest.raises(C.ConstructionError):
        C.BlockSpec("S", C.SIGN, 3, (-1,), ("e",))
    assert parse("<E>", REG2).generators()[0].theta == -1


def test_example_two_tuples():
    # <<B1> * <B2>> has the tuples (Z_1, Z) and (Z_2, Z)
    c = parse("<(<A> * <B>)>")
    ts = C.principal_tuples(c)
    assert [t.z_generators() for t in ts] == [["z@EL", "z@"], ["z@ER", "z@"]]
    assert [c.node(t.root).block.id for t in ts] == ["A", "B"]
    assert C.extension_rank(c) == 2


def test_leaf_has_trivial_tuple():
    ts = C.principal_tuples(parse("D2"))
    assert len(ts) == 1 and ts[0].rank == 0
    assert C.extension_rank(parse("D2")) == 0


@settings(max_examples=150, deadline=None)
@given(constructions())
def test_tuples_and_rank_agree_with_rules(c):
    assert C.principal_tuples(c) == C.principal_tuples_by_rules(c)
    assert C.extension_rank(c) == C.extension_rank_by_rules(c)


def _sub_texts(c) -> set:
    """Subconstructions by the inductive rules, as printed forms."""
    if isinstance(c, C.Leaf):
        return {c.to_text()}
    if isinstance(c, C.FreeProduct):
        s1, s2 = _sub_texts(c.left), _sub_texts(c.right)
        trivial = {b.id for b in c.blocks() if b.is_trivial}
        both = {f"({a} * {b})" for a in s1 for b in s2 if a not in trivial and b not in trivial}
        return s1 | s2 | both
    inner = _sub_texts(c.base)
    return inner | {f"<{x}>" for x in inner}


@settings(max_examples=100, deadline=None)
@given(constructions(max_rank=3))
def test_subconstructions_match_rules(c):
    ws = list(C.subconstructions(c))
    assert {w.sub.to_text() for w in ws} == _sub_texts(c)
    # derivations are distinct and exactly one is the full one
    assert len({w.tree for w in ws}) == len(ws)
    assert sum(w.is_full() for w in ws) == 1


@settings(max_examples=80, deadline=None)
@given(constructions(max_rank=2))
def test_pi_after_iota_is_identity(c):
    for w in C.subconstructions(c):
        i, p = C.iota(w), C.pi(w)
        for g, word in i.table.items():
            assert p.apply(word) == W.letter(g)
        assert i.theta_compatible(3**6)
        assert i.is_injective_on_generators()


def test_two_witnesses_same_print_differ():
    c = parse("<<A>>")
    ws = [w for w in C.subconstructions(c) if w.sub.to_text() == "<A>"]
    assert len(ws) == 2
    assert C.iota(ws[0]).table != C.iota(ws[1]).table


@settings(max_examples=80, deadline=None)
@given(constructions(max_rank=3))
def test_compatibility_and_restriction(c):
    for t in C.principal_tuples(c):
        for w in C.subconstructions(c):
            ok = C.compatible(t, w)
            assert ok == C.compatible_by_rules(t, w)
            if ok:
                rt = C.restrict_tuple(t, w)
                assert rt in C.principal_tuples(w.sub)
                assert rt.rank == len(C.kept_indices(t, w))


def test_restricted_tuple_example():
    c = parse("<(<A> * <B>)>")
    t1 = C.principal_tuples(c)[0]
    w = next(w for w in C.subconstructions(c) if w.tree == C.WExt(False, C.WLeft(C.WExt(True, C.WKeep()))))
    assert w.sub.to_text() == "<A>"
    assert C.compatible(t1, w)
    assert C.restrict_tuple(t1, w).z_generators() == ["z@"]
    assert C.kept_indices(t1, w) == [1]
    t2 = C.principal_tuples(c)[1]
    assert not C.compatible(t2, w)


def test_compose_witness():
    c = parse("<(<A> * <B>)>")
    outer = next(w for w in C.subconstructions(c) if w.sub.to_text() == "(<A> * <B>)")
    inner = next(w for w in C.subconstructions(outer.sub) if w.sub.to_text() == "<B>")
    both = C.compose_witness(outer, inner)
    assert both.sub.to_text() == "<B>"
    assert C.iota(both).table == {g: C.iota(outer).apply(wd) for g, wd in C.iota(inner).table.items()}


def test_witness_json_roundtrip():
    c = parse("<(<A> * <B>)>")
    for w in C.subconstructions(c):
        assert C.witness_from_json(c, w.to_json()).tree == w.tree


def test_registry_json_roundtrip():
    reg = C.load_registry(C.registry_to_json(REG3))
    assert reg == REG3
