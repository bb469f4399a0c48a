"""Symbol-length bound calculus: block tables ``M_m`` and the recursion ``f(e, m)``.

``f(0, m) = M_m``, ``f(e, 0) = 0`` and ``f(e, m) = f(e-1, m) + f(e-1, m-1)``;
equivalently ``f(e, m) = sum_k C(e, k) M_{m-k}`` with ``M_0 = 0``.  Infinity
is ``math.inf`` and absorbs sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import construction as C

INF = math.inf


class BoundsError(ValueError):
    pass


class HypothesisViolation(BoundsError):
    """A table entry needed by the uniform bound is infinite."""


def _as_value(v):
    if v is None or v == "inf" or v == INF:
        return INF
    v = int(v)
    if v < 0:
        raise BoundsError("bound table entries must be nonnegative")
    return v


@dataclass(frozen=True)
class BoundTable:
    """``M_1, M_2, ...``: ``values[m-1]`` for listed degrees, ``tail`` beyond."""

    values: tuple
    tail: object = 0
    clamped: bool = False
    blocks: frozenset = frozenset()  # block ids the table was built for; empty = any

    def __getitem__(self, m: int):
        if m <= 0:
            return 0
        if m <= len(self.values):
            return self.values[m - 1]
        return self.tail

    def normalized(self) -> "BoundTable":
        """Apply ``M_1 = max(M_1, 1)``."""
        vals = list(self.values) or [self.tail]
        if vals[0] >= 1:
            return self
        vals[0] = 1
        return BoundTable(tuple(vals), self.tail, True, self.blocks)

    def to_json(self) -> dict:
        enc = lambda v: "inf" if v == INF else v  # noqa: E731
        return {
            "values": [enc(v) for v in self.values],
            "tail": enc(self.tail),
            "clamped": self.clamped,
        }


def make_table(values, tail=0, blocks=()) -> BoundTable:
    return BoundTable(tuple(_as_value(v) for v in values), _as_value(tail), False,
                      frozenset(blocks)).normalized()


def block_bounds(b: C.BlockSpec) -> BoundTable:
    """Unnormalized ``M_m(B)`` for one block."""
    if b.kind == C.TRIVIAL:
        return BoundTable((0,), 0)
    if b.kind == C.FREE_PROCYCLIC:
        return BoundTable((1,), 0)
    if b.kind == C.DEMUSHKIN:
        return BoundTable((1, 1), 0)
    if b.kind == C.SIGN:
        return BoundTable((1,), 1)
    if b.bounds is None:
        raise BoundsError(f"custom block {b.id} declares no bounds")
    return BoundTable(tuple(_as_value(v) for v in b.bounds), INF)


def class_table(blocks) -> BoundTable:
    """Pointwise supremum over the blocks, then ``M_1`` clamped to at least 1."""
    blocks = list(blocks)
    if not blocks:
        raise BoundsError("empty block class")
    tables = [block_bounds(b) for b in blocks]
    n = max(len(t.values) for t in tables)
    vals = tuple(max(t[m] for t in tables) for m in range(1, n + 1))
    tail = max(t.tail for t in tables)
    return BoundTable(vals, tail, False, frozenset(b.id for b in blocks)).normalized()


def standard_table(p: int, include_sign_block: bool = False) -> BoundTable:
    """Trivial, free procyclic and Demushkin blocks, optionally the sign block."""
    if include_sign_block and p != 2:
        raise BoundsError("the sign block exists only for p = 2")
    reg = C.standard_registry(p)
    blocks = [reg["T"], reg["A"], reg["D2"]]
    if include_sign_block:
        blocks.append(reg["E"])
    t = class_table(blocks)
    return BoundTable(t.values, t.tail, t.clamped)


def _add(a, b):
    return INF if INF in (a, b) else a + b


def f(e: int, m: int, table: BoundTable):
    """The recursion; memoized per call."""
    if e < 0 or m < 0:
        raise BoundsError("e and m must be nonnegative")

    @lru_cache(maxsize=None)
    def go(e, m):
        if m == 0:
            return 0
        if e == 0:
            return table[m]
        return _add(go(e - 1, m), go(e - 1, m - 1))

    return go(e, m)


def f_closed(e: int, m: int, table: BoundTable):
    """``sum_{k=0}^{min(e,m)} C(e,k) M_{m-k}`` with ``M_0 = 0``."""
    total = 0
    for k in range(min(e, m) + 1):
        v = table[m - k]
        if v == INF:
            return INF
        total += math.comb(e, k) * v
    return total


def construction_bound(c, m: int, table: BoundTable | None = None):
    """``f(e(c), m)`` for the blocks of ``c``."""
    if table is None:
        table = class_table(c.blocks())
    elif table.blocks and not {b.id for b in c.blocks()} <= table.blocks:
        raise BoundsError("bound table does not cover the blocks of the construction")
    return f(C.extension_rank(c), m, table)


def uniform_bound(G, n: int, table: BoundTable, l_override: int | None = None,
                  cap: int | None = None, threads: int = 1):
    """``f(l(G), n)``: bounds symbol length of every pullback to an elementary-type group."""
    if n < 2:
        raise BoundsError("n must be >= 2")
    bad = [m for m in range(2, n + 1) if table[m] == INF]
    if bad:
        raise HypothesisViolation(f"table entries M_{bad} are infinite")
    if l_override is None:
        from .fpgroup import l_value

        l_override = l_value(G, threads=threads, **({"cap": cap} if cap else {}))
    return f(l_override, n, table)


def lemma_massey_bound(m: int) -> int:
    """``floor(m^2/4) + m``."""
    return m * m // 4 + m


def massey_symbol_bound(m: int, p: int, mode: str = "lemma_bound", cap: int | None = None,
                        threads: int = 1) -> int:
    """Bound on the symbol length of pulled-back Massey classes in degree 2."""
    if m < 2:
        raise BoundsError("m must be >= 2")
    if mode == "lemma_bound":
        return lemma_massey_bound(m)
    if mode == "exact_l":
        from .fpgroup import bar_unitriangular, l_value

        kw = {"cap": cap} if cap else {}
        G = bar_unitriangular(m, p, **kw)
        return f(l_value(G, threads=threads, **kw), 2, standard_table(p))
    raise BoundsError(f"unknown mode {mode!r}")

