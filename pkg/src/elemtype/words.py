"""Words in generator ids and generator -> word tables.

A word is a tuple of ``(generator_id, exponent)`` letters; the empty tuple is the
identity.  Words are never compared inside the pro-p group itself: identities
are checked after evaluation in a finite target or after abelianizing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

Word = tuple  # tuple[tuple[str, int], ...]

EMPTY: Word = ()

_LETTER = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_.@:]*)\s*(?:\^\s*(-?\d+))?\s*")


def letter(gen: str, exp: int = 1) -> Word:
    return ((gen, exp),) if exp else EMPTY


def normalize(word: Iterable) -> Word:
    """Merge adjacent equal letters and drop zero exponents (free reduction)."""
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
        if e:
            out.append((g, e))
    return tuple(out)


def reduce_exponents(word: Word, modulus: int) -> Word:
    return normalize((g, e % modulus) for g, e in word)


def inverse(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def concat(*words: Word) -> Word:
    return normalize(x for w in words for x in w)


def power(word: Word, n: int) -> Word:
    if n < 0:
        return concat(*([inverse(word)] * -n))
    return concat(*([word] * n))


def conjugate(g: Word, z: Word) -> Word:
    """``g z g^-1``"""
    return concat(g, z, inverse(g))


def letters(word: Word) -> set:
    return {g for g, _ in word}


def parse_word(text: str) -> Word:
    """Parse ``"a^2 b a^-1"``; ``"1"`` or blank is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return EMPTY
    out = []
    pos = 0
    while pos < len(text):
        m = _LETTER.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad word syntax at position {pos}: {text!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) else 1))
        pos = m.end()
    return tuple(out)


def format_word(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in word)


def word_from_json(obj) -> Word:
    if isinstance(obj, str):
        return parse_word(obj)
    return tuple((str(g), int(e)) for g, e in obj)


def word_to_json(word: Word) -> list:
    return [[g, e] for g, e in word]


def abelianize(word: Word, basis: list, modulus: int) -> tuple:
    """Exponent vector of ``word`` over ``basis``; every letter must be in the basis."""
    pos = {g: i for i, g in enumerate(basis)}
    vec = [0] * len(basis)
    for g, e in word:
        if g not in pos:
            raise KeyError(f"letter {g!r} outside the abelian basis")
        vec[pos[g]] += e
    return tuple(v % modulus for v in vec)


def theta_of_word(word: Word, thetas: Mapping[str, int], modulus: int) -> int:
    out = 1
    for g, e in word:
        out = out * pow(thetas[g] % modulus, e, modulus) % modulus
    return out


@dataclass
class GenWordMap:
    """Endomap data ``generator of domain -> word in codomain generators``.

    ``domain`` and ``codomain`` are constructions; only their generator lists
    are consulted here.
    """

    domain: Any
    codomain: Any
    table: dict = field(default_factory=dict)

    def __call__(self, gen: str) -> Word:
        return self.table[gen]

    def apply(self, word: Word) -> Word:
        return concat(*(power(self.table[g], e) for g, e in word))

    def theta_compatible(self, modulus: int) -> bool:
        src = {g.id: g.theta for g in self.domain.generators()}
        dst = {g.id: g.theta for g in self.codomain.generators()}
        return all(
            theta_of_word(w, dst, modulus) == src[g] % modulus for g, w in self.table.items()
        )

    def is_injective_on_generators(self) -> bool:
        images = [w for w in self.table.values()]
        return all(images) and len(set(images)) == len(images)

    def to_json(self) -> dict:
        return {g: format_word(w) for g, w in sorted(self.table.items())}


def compose_maps(outer: GenWordMap, inner: GenWordMap) -> GenWordMap:
    """``outer o inner``."""
    return GenWordMap(
        inner.domain, outer.codomain, {g: outer.apply(w) for g, w in inner.table.items()}
    )


def identity_map(construction) -> GenWordMap:
    return GenWordMap(
        construction, construction, {g.id: letter(g.id) for g in construction.generators()}
    )
