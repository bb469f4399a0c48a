"""Finite p-groups: unitriangular matrix groups over F_p and abelian-subgroup search.

Elements are stored once, in breadth-first order from the generators, and
addressed by index; index 0 is the identity.  Matrix-backed groups keep
``(m+1) x (m+1)`` integer matrices as tuples of tuples.  The quotient
``Ubar_m`` of ``U_m`` by its center is represented by the zero-fill section:
matrices whose ``(1, m+1)`` entry is 0, multiplied then re-zeroed there.
"""

from __future__ import annotations

import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_CAP = 2**16
_TABLE_LIMIT = 1024


class GroupError(ValueError):
    pass


class GroupTooLarge(GroupError):
    pass


class NonCommutingGenerators(GroupError):
    pass


def _matmul(a, b, p: int):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(n)) for i in range(n)
    )


def _zero_corner(a):
    if a[0][-1] == 0:
        return a
    rows = [list(r) for r in a]
    rows[0][-1] = 0
    return tuple(map(tuple, rows))


def identity_matrix(n: int):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def elementary(n: int, i: int, j: int, a: int = 1):
    """``I + a E_{ij}`` (0-based indices)."""
    rows = [list(r) for r in identity_matrix(n)]
    rows[i][j] = a
    return tuple(map(tuple, rows))


def is_unitriangular(a, p: int) -> bool:
    n = len(a)
    return all(
        a[i][j] % p == (1 if i == j else 0) for i in range(n) for j in range(i + 1)
    )


class FiniteGroup:
    """A finite p-group with deterministic element enumeration.

    ``kind`` is one of ``"matrix"`` (generator matrices over F_p, optionally
    with the ``bar`` corner mask) or ``"table"`` (Cayley table on 0..n-1).
    """

    def __init__(self, p: int, generators: Sequence, *, bar: bool = False,
                 table=None, cap: int = DEFAULT_CAP, name: str = "", spec=None):
        self.p = p
        self.bar = bar
        self.name = name
        self.spec = spec
        self._table = None
        if table is not None:
            self.kind = "table"
            self._cayley = [list(r) for r in table]
            n = len(table)
            self.elements = list(range(n))
            self.index = {i: i for i in range(n)}
            ident = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
            if ident != 0:
                raise GroupError("table-backed groups must list the identity first")
            self.generators = list(generators) if generators else list(range(1, n))
            self._table = np.array(table, dtype=np.int64)
        else:
            self.kind = "matrix"
            gens = [tuple(tuple(int(x) % p for x in row) for row in g) for g in generators]
            if bar:
                gens = [_zero_corner(g) for g in gens]
            self.size = len(gens[0]) if gens else 1
            self.generators = gens
            self.elements = []
            self.index = {}
            self._enumerate(cap)
        n = len(self.elements)
        if n > 1 and n != p ** round(math.log(n, p)):
            raise GroupError(f"group order {n} is not a power of {p}")
        if self._table is None and n <= _TABLE_LIMIT and self.kind == "matrix":
            self._table = self._build_table()
        self._mul_cache = {}
        self._orders = {}
        self._commute = None

    # -- construction -----------------------------------------------------

    def _product(self, a, b):
        if self.kind == "table":
            return self._cayley[a][b]
        c = _matmul(a, b, self.p)
        return _zero_corner(c) if self.bar else c

    def _enumerate(self, cap: int):
        ident = identity_matrix(self.size)
        self.elements = [ident]
        self.index = {ident: 0}
        head = 0
        while head < len(self.elements):
            x = self.elements[head]
            head += 1
            for g in self.generators:
                y = self._product(x, g)
                if y not in self.index:
                    if len(self.elements) >= cap:
                        raise GroupTooLarge(f"group exceeds the cap of {cap} elements")
                    self.index[y] = len(self.elements)
                    self.elements.append(y)

    def _build_table(self):
        n, p = len(self.elements), self.p
        E = np.array(self.elements, dtype=np.int64)
        weights = np.array([p**k for k in range(self.size * self.size)], dtype=object)
        if p ** (self.size * self.size) < 2**62:
            weights = weights.astype(np.int64)
        flat = E.reshape(n, -1)
        codes = flat @ weights
        order = np.argsort(codes)
        sorted_codes = codes[order]
        table = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            prod = np.matmul(E[i][None, :, :], E) % p
            if self.bar:
                prod[:, 0, -1] = 0
            c = prod.reshape(n, -1) @ weights
            table[i] = order[np.searchsorted(sorted_codes, c)]
        return table

    # -- arithmetic on indices ---------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table[i, j])
        key = (i, j)
        r = self._mul_cache.get(key)
        if r is None:
            prod = self._product(self.elements[i], self.elements[j])
            r = self.index.get(prod)
            if r is None:
                raise GroupError("product left the enumerated group")
            self._mul_cache[key] = r
        return r

    def element_order(self, i: int) -> int:
        o = self._orders.get(i)
        if o is None:
            o, x = 1, i
            while x != 0:
                x = self.mul(x, i)
                o += 1
            self._orders[i] = o
        return o

    def pow(self, i: int, n: int) -> int:
        n %= self.element_order(i)
        out, base = 0, i
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def inv(self, i: int) -> int:
        return self.pow(i, -1)

    def commutes(self, i: int, j: int) -> bool:
        return self.mul(i, j) == self.mul(j, i)

    @property
    def exponent(self) -> int:
        return max(self.element_order(i) for i in range(self.order))

    @property
    def p_exponent(self) -> int:
        """Smallest N >= 1 with exponent | p^N."""
        return max(1, round(math.log(self.exponent, self.p)))

    def is_abelian(self) -> bool:
        gens = [self.index[g] for g in self.generators] if self.kind == "matrix" else self.generators
        return all(self.commutes(a, b) for a in gens for b in gens)

    def index_of(self, element) -> int:
        if self.kind == "matrix":
            element = tuple(tuple(int(x) % self.p for x in row) for row in element)
        try:
            return self.index[element]
        except (KeyError, TypeError):
            raise GroupError(f"{element!r} is not an element of {self.name or 'the group'}") from None

    def element_to_json(self, i: int):
        e = self.elements[i]
        return [list(r) for r in e] if self.kind == "matrix" else e

    def commute_masks(self) -> list:
        """Bitmask per element of the elements it commutes with."""
        if self._commute is None:
            n = self.order
            if self._table is not None:
                eq = self._table == self._table.T
                self._commute = [
                    int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
                    for row in eq
                ]
            else:
                masks = []
                for i in range(n):
                    m = 0
                    for j in range(n):
                        if self.commutes(i, j):
                            m |= 1 << j
                    masks.append(m)
                self._commute = masks
        return self._commute

    def center(self) -> "Subgroup":
        full = (1 << self.order) - 1
        masks = self.commute_masks()
        elems = [i for i in range(self.order) if masks[i] == full]
        return _subgroup_from_elements(self, elems)

    def spec_json(self):
        return self.spec


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: tuple  # indices, BFS order
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, i) -> bool:
        return i in self._set

    @property
    def _set(self):
        return frozenset(self.elements)

    def is_abelian(self) -> bool:
        G = self.parent
        return all(G.commutes(a, b) for a in self.generators for b in self.generators)

    def same_elements(self, other: "Subgroup") -> bool:
        return set(self.elements) == set(other.elements)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "generators": [self.parent.element_to_json(g) for g in self.generators],
        }


def subgroup_closure(G: FiniteGroup, gens: Sequence[int]) -> Subgroup:
    gens = tuple(dict.fromkeys(int(g) for g in gens))
    elems = [0]
    seen = {0}
    head = 0
    while head < len(elems):
        x = elems[head]
        head += 1
        for g in gens:
            y = G.mul(x, g)
            if y not in seen:
                seen.add(y)
                elems.append(y)
    return Subgroup(G, tuple(elems), gens)


def _subgroup_from_elements(G: FiniteGroup, elems) -> Subgroup:
    """Subgroup with a greedy generating set taken in index order."""
    gens = []
    cur = {0}
    for x in sorted(elems):
        if x not in cur:
            gens.append(x)
            cur = set(subgroup_closure(G, gens).elements)
    return subgroup_closure(G, gens)


# ---------------------------------------------------------------------------
# named groups


def _check_cap(order: int, cap: int):
    if order > cap:
        raise GroupTooLarge(f"group of order {order} exceeds the cap of {cap}")


def unitriangular(m: int, p: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """``U_m(F_p)``: unipotent upper-triangular ``(m+1) x (m+1)`` matrices."""
    if m < 1:
        raise GroupError("m must be >= 1")
    _check_cap(p ** (m * (m + 1) // 2), cap)
    gens = [elementary(m + 1, i, i + 1) for i in range(m)]
    return FiniteGroup(p, gens, cap=cap, name=f"U_{m}(F_{p})", spec={"kind": "um", "m": m, "p": p})


def bar_unitriangular(m: int, p: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """``Ubar_m(F_p) = U_m(F_p) / <I + a E_{1,m+1}>`` via the zero-fill section."""
    if m < 2:
        raise GroupError("m must be >= 2")
    _check_cap(p ** (m * (m + 1) // 2 - 1), cap)
    gens = [elementary(m + 1, i, i + 1) for i in range(m)]
    return FiniteGroup(p, gens, bar=True, cap=cap, name=f"Ubar_{m}(F_{p})",
                       spec={"kind": "ubar", "m": m, "p": p})


def cyclic(p: int, k: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """``Z/p^k`` generated by a unipotent Jordan block of size ``p^(k-1) + 1``."""
    if k < 1:
        raise GroupError("k must be >= 1")
    _check_cap(p**k, cap)
    n = p ** (k - 1) + 1
    J = tuple(tuple(int(j == i or j == i + 1) for j in range(n)) for i in range(n))
    return FiniteGroup(p, [J], cap=cap, name=f"Z/{p}^{k}", spec={"kind": "cyclic", "k": k, "p": p})


def elementary_abelian(p: int, rank: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """``(Z/p)^rank`` as ``I + a_1 E_{1,2} + ... + a_r E_{1,r+1}``."""
    _check_cap(p**rank, cap)
    gens = [elementary(rank + 1, 0, j) for j in range(1, rank + 1)]
    return FiniteGroup(p, gens, cap=cap, name=f"(Z/{p})^{rank}",
                       spec={"kind": "elementary", "rank": rank, "p": p})


def custom_group(p: int, generators, cap: int = DEFAULT_CAP) -> FiniteGroup:
    gens = [tuple(tuple(int(x) for x in row) for row in g) for g in generators]
    if not gens:
        raise GroupError("custom group needs at least one generator")
    return FiniteGroup(p, gens, cap=cap, name="custom",
                       spec={"kind": "custom", "p": p, "generators": [[list(r) for r in g] for g in gens]})


def table_group(table, p: int, generators=None) -> FiniteGroup:
    return FiniteGroup(p, generators or [], table=table, name="table")


def group_from_spec(spec, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Build a group from a JSON object or a short string like ``"um:3,2"``."""
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            spec = json.loads(s)
        elif ":" in s:
            kind, args = s.split(":", 1)
            a, b = (int(x) for x in args.split(","))
            key = {"um": "m", "ubar": "m", "cyclic": "k", "elementary": "rank", "elem": "rank"}
            if kind not in key:
                raise GroupError(f"unknown group kind {kind!r}")
            spec = {"kind": "elementary" if kind == "elem" else kind, key[kind]: a, "p": b}
        else:
            with open(s, encoding="utf-8") as fh:
                spec = json.load(fh)
    kind = spec.get("kind")
    p = int(spec["p"])
    if kind == "um":
        return unitriangular(int(spec["m"]), p, cap)
    if kind == "ubar":
        return bar_unitriangular(int(spec["m"]), p, cap)
    if kind == "cyclic":
        return cyclic(p, int(spec["k"]), cap)
    if kind == "elementary":
        return elementary_abelian(p, int(spec["rank"]), cap)
    if kind == "custom":
        return custom_group(p, spec["generators"], cap)
    raise GroupError(f"unknown group kind {kind!r}")


# ---------------------------------------------------------------------------
# discrete logarithm in an abelian subgroup


def abelian_dlog(G: FiniteGroup, target: int, gens: Sequence[int]):
    """Lexicographically smallest ``(a_1..a_s)`` with ``prod g_i^{a_i} = target``.

    Each ``a_i`` lies in ``[0, order(g_i))``.  Returns ``None`` when the target
    is outside ``<gens>``.
    """
    gens = [int(g) for g in gens]
    for a in gens:
        for b in gens:
            if not G.commutes(a, b):
                raise NonCommutingGenerators("dlog generators must commute pairwise")
    s = len(gens)
    suffix = [set(subgroup_closure(G, gens[i:]).elements) for i in range(s)] + [{0}]
    if target not in suffix[0]:
        return None
    out = []
    t = target
    for i, g in enumerate(gens):
        ginv = G.inv(g)
        step = t
        for a in range(G.element_order(g)):
            if step in suffix[i + 1]:
                out.append(a)
                t = step
                break
            step = G.mul(step, ginv)
        else:  # pragma: no cover - membership in suffix[i] guarantees a hit
            return None
    return tuple(out)


# ---------------------------------------------------------------------------
# maximal abelian subgroups


def _largest_power_multiple(base: int, limit: int, p: int) -> int:
    out = base
    while out * p <= limit:
        out *= p
    return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Search:
    def __init__(self, G: FiniteGroup):
        self.G = G
        self.p = G.p
        self.masks = G.commute_masks()
        self.global_best = 0
        self.lock = threading.Lock()

    def extend(self, elems: list, x: int) -> list:
        """Elements of ``<A, x>`` for abelian ``A`` centralized by ``x``."""
        G = self.G
        seen = set(elems)
        out = list(elems)
        layer = list(elems)
        while True:
            layer = [G.mul(a, x) for a in layer]
            if layer[0] in seen:
                return out
            seen.update(layer)
            out.extend(layer)

    def run_branch(self, base, base_mask, cent, x, after):
        """Best abelian subgroup whose canonical chain starts ``base, x``."""
        best = [0, None]
        elems = self.extend(base, x)
        mask = 0
        for e in elems:
            mask |= 1 << e
        self.dfs(elems, mask, cent & self.masks[x], x, [x], best)
        return best

    def dfs(self, elems, mask, cent, last, chosen, best):
        size = len(elems)
        if size > best[0]:
            best[0], best[1] = size, (tuple(elems), tuple(chosen))
            with self.lock:
                self.global_best = max(self.global_best, size)
        cand = cent & ~mask & ~((1 << (last + 1)) - 1)
        remaining = bin(cand).count("1")
        for y in _bits(cand):
            bound = _largest_power_multiple(size, size + remaining, self.p)
            if bound <= best[0] or bound < self.global_best:
                return
            remaining -= 1
            if (mask >> y) & 1:
                continue
            new = self.extend(elems, y)
            nmask = mask
            for e in new[size:]:
                nmask |= 1 << e
            chosen.append(y)
            self.dfs(new, nmask, cent & self.masks[y], y, chosen, best)
            chosen.pop()


def max_abelian_order(G: FiniteGroup, cap: int = DEFAULT_CAP, threads: int = 1):
    """Exhaustive branch-and-bound for the largest abelian subgroup.

    The search starts from the center and extends by centralizing elements in
    increasing index order, so every abelian subgroup containing the center is
    reached along its canonical chain.  Top-level branches are independent;
    the reduction (largest order, then earliest branch) does not depend on
    ``threads``.
    """
    if G.order > cap:
        raise GroupTooLarge(f"group of order {G.order} exceeds the search cap {cap}")
    Z = G.center()
    base = sorted(Z.elements)
    base_mask = 0
    for e in base:
        base_mask |= 1 << e
    search = _Search(G)
    cent = (1 << G.order) - 1
    search.global_best = len(base)
    cands = [x for x in range(G.order) if not (base_mask >> x) & 1]
    # upper bounds per branch, to skip hopeless branches up front
    results = [None] * len(cands)

    def task(k):
        x = cands[k]
        remaining = len(cands) - k
        if _largest_power_multiple(len(base), len(base) + remaining, G.p) < search.global_best:
            return
        results[k] = search.run_branch(base, base_mask, cent, x, k)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(task, range(len(cands))))
    else:
        for k in range(len(cands)):
            task(k)

    best_size, best_gens = len(base), ()
    for res in results:
        if res is not None and res[0] > best_size:
            best_size, best_gens = res[0], res[1][1]
    witness = subgroup_closure(G, tuple(Z.generators) + tuple(best_gens))
    return best_size, witness


def l_value(G: FiniteGroup, cap: int = DEFAULT_CAP, threads: int = 1) -> int:
    order, _ = max_abelian_order(G, cap, threads)
    return round(math.log(order, G.p)) if order > 1 else 0


def abelian_tower(E: Subgroup) -> list:
    """A proper chain ``E = E_0 > E_1 > ... > E_l = 1`` of subgroups of ``E``."""
    G = E.parent
    chain = [subgroup_closure(G, [])]
    members = sorted(E.elements)
    while chain[-1].order < E.order:
        cur = set(chain[-1].elements)
        x = next(y for y in members if y not in cur and G.pow(y, G.p) in cur)
        chain.append(subgroup_closure(G, chain[-1].generators + (x,)))
    return chain[::-1]


def goozeff_barry_exponent(m: int) -> int:
    return (m + 1) ** 2 // 4


def lemma_bound_ubar(m: int) -> int:
    """Analytic bound ``floor(m^2/4) + m - 1`` on ``l(Ubar_m(F_p))``."""
    return m * m // 4 + m - 1


def goozeff_witness(m: int, p: int, G: FiniteGroup | None = None) -> Subgroup:
    """The block subgroup ``[[I_r, M], [0, I_{m+1-r}]]`` with ``r = floor((m+1)/2)``."""
    if G is None:
        G = unitriangular(m, p)
    n = m + 1
    r = n // 2
    gens = [G.index_of(elementary(n, i, j)) for i in range(r) for j in range(r, n)]
    return subgroup_closure(G, gens)


# ---------------------------------------------------------------------------
# the Massey extension class


def massey_cocycle(m: int, p: int) -> Callable:
    """Cocycle of ``1 -> F_p -> U_m -> Ubar_m -> 1`` for the zero-fill section.

    ``c(x, y) = sum_{j=2}^{m} x[1, j] * y[j, m+1]`` (1-based), so that
    ``s(x) s(y) = (I + c(x, y) E_{1,m+1}) s(xy)``.
    """
    n = m + 1

    def check(x):
        if len(x) != n or not is_unitriangular(x, p) or x[0][n - 1] % p != 0:
            raise GroupError("element is not in Ubar_m(F_p)")

    def c(x, y) -> int:
        check(x)
        check(y)
        return sum(x[0][j] * y[j][n - 1] for j in range(1, n - 1)) % p

    return c


def section_defect(x, y, p: int) -> int:
    """Corner entry of ``s(x) s(y) s(xy)^-1`` computed in ``U_m``."""
    prod = _matmul(x, y, p)
    sxy = _zero_corner(prod)
    n = len(x)
    # s(xy)^-1 by solving the unitriangular system
    inv = [list(r) for r in identity_matrix(n)]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            inv[i][j] = -sum(sxy[i][k] * inv[k][j] for k in range(i + 1, j + 1)) % p
    d = _matmul(prod, tuple(map(tuple, inv)), p)
    if any(d[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n) if (i, j) != (0, n - 1)):
        raise GroupError("section defect is not central")
    return d[0][n - 1]
