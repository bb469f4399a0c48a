"""Degree <= 2 mod-p cohomology of elementary-type groups (p odd) and exact symbol length.

A ring is stored as ``(d1, d2, cup)`` with ``cup[i, j]`` the vector in
``F_p^{d2}`` of the cup product of the i-th and j-th basis classes of
``H^1``.  Free products take direct sums with zero cross products.  An
extension adds one class ``beta`` to ``H^1`` and the classes
``beta u chi_i`` to ``H^2``; the inflated ``H^2`` keeps the first ``d2``
coordinates, so restriction to the base is a projection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import construction as C

STATE_CAP = 3**10
SYMBOL_CAP = 3**12


class OracleError(ValueError):
    pass


class OracleCapExceeded(OracleError):
    pass


@dataclass(eq=False)
class CohRing12:
    p: int
    d1: int
    d2: int
    cup: np.ndarray  # shape (d1, d1, d2), entries mod p
    h1_labels: tuple = ()
    h2_labels: tuple = ()
    base_d2: int | None = None  # inflated coordinates, set for extension rings
    base: "CohRing12 | None" = None
    _dist: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.p % 2 == 0:
            raise OracleError("the cohomology oracle supports odd p only")
        self.cup = np.asarray(self.cup, dtype=np.int64).reshape(self.d1, self.d1, self.d2) % self.p
        if not self.h1_labels:
            self.h1_labels = tuple(f"h1_{i}" for i in range(self.d1))
        if not self.h2_labels:
            self.h2_labels = tuple(f"h2_{i}" for i in range(self.d2))
        if not self.is_alternating():
            raise OracleError("cup product table is not alternating")

    def is_alternating(self) -> bool:
        c = self.cup
        diag = all(not c[i, i].any() for i in range(self.d1))
        return diag and bool(((c + c.transpose(1, 0, 2)) % self.p == 0).all())

    def cup_product(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("i,j,ijk->k", a, b, self.cup) % self.p

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "d1": self.d1,
            "d2": self.d2,
            "cup": self.cup.tolist(),
            "h1_labels": list(self.h1_labels),
            "h2_labels": list(self.h2_labels),
        }


def ring_from_data(p: int, d1: int, d2: int, cup) -> CohRing12:
    return CohRing12(p, d1, d2, np.array(cup, dtype=np.int64).reshape(d1, d1, d2))


def symplectic_ring(p: int, d: int, labels=()) -> CohRing12:
    if d % 2:
        raise OracleError("a Demushkin pairing needs an even number of generators")
    cup = np.zeros((d, d, 1), dtype=np.int64)
    for i in range(0, d, 2):
        cup[i, i + 1, 0] = 1
        cup[i + 1, i, 0] = p - 1
    return CohRing12(p, d, 1 if d else 0, cup if d else np.zeros((0, 0, 0)), tuple(labels))


def block_ring(b: C.BlockSpec, path=()) -> CohRing12:
    if b.p % 2 == 0:
        raise OracleError(f"block {b.id}: p = 2 is not supported by the oracle")
    labels = tuple(C.block_gen_id(b, x, path) for x in b.generators)
    if b.ring is not None:
        d1, d2, cup = b.ring
        r = ring_from_data(b.p, d1, d2, cup)
        r.h1_labels = labels if len(labels) == d1 else r.h1_labels
        return r
    if b.kind == C.TRIVIAL:
        return CohRing12(b.p, 0, 0, np.zeros((0, 0, 0)))
    if b.kind == C.FREE_PROCYCLIC:
        return CohRing12(b.p, 1, 0, np.zeros((1, 1, 0)), labels)
    if b.kind == C.DEMUSHKIN:
        r = symplectic_ring(b.p, len(b.generators), labels)
        r.h2_labels = (f"H2({b.id}@{C.path_str(path)})",)
        return r
    raise OracleError(f"block {b.id}: no cohomology data for kind {b.kind!r}")


def free_product_ring(r1: CohRing12, r2: CohRing12) -> CohRing12:
    if r1.p != r2.p:
        raise OracleError("prime mismatch")
    d1, d2 = r1.d1 + r2.d1, r1.d2 + r2.d2
    cup = np.zeros((d1, d1, d2), dtype=np.int64)
    cup[: r1.d1, : r1.d1, : r1.d2] = r1.cup
    cup[r1.d1 :, r1.d1 :, r1.d2 :] = r2.cup
    return CohRing12(r1.p, d1, d2, cup, r1.h1_labels + r2.h1_labels, r1.h2_labels + r2.h2_labels)


def extension_ring(r: CohRing12, beta_label: str = "beta") -> CohRing12:
    d1, d2 = r.d1 + 1, r.d2 + r.d1
    cup = np.zeros((d1, d1, d2), dtype=np.int64)
    cup[: r.d1, : r.d1, : r.d2] = r.cup
    b = r.d1
    for i in range(r.d1):
        cup[b, i, r.d2 + i] = 1
        cup[i, b, r.d2 + i] = r.p - 1
    h2 = r.h2_labels + tuple(f"{beta_label} u {x}" for x in r.h1_labels)
    return CohRing12(r.p, d1, d2, cup, r.h1_labels + (beta_label,), h2, r.d2, r)


def ring_of(c, path=()) -> CohRing12:
    if isinstance(c, C.Leaf):
        return block_ring(c.block, path)
    if isinstance(c, C.FreeProduct):
        return free_product_ring(ring_of(c.left, path + ("L",)), ring_of(c.right, path + ("R",)))
    return extension_ring(ring_of(c.base, path + ("E",)), f"beta@{C.path_str(path)}")


def restriction_to_base(ring: CohRing12, omega) -> np.ndarray:
    if ring.base_d2 is None:
        raise OracleError("restriction to the base needs an extension ring")
    return np.asarray(omega, dtype=np.int64)[: ring.base_d2] % ring.p


def inflate(ring: CohRing12, omega) -> np.ndarray:
    """Inflation of a base class into the extension ring."""
    if ring.base_d2 is None:
        raise OracleError("inflation needs an extension ring")
    out = np.zeros(ring.d2, dtype=np.int64)
    out[: ring.base_d2] = omega
    return out % ring.p


def change_h1_basis(ring: CohRing12, M) -> CohRing12:
    """Same ring with new ``H^1`` basis ``e'_i = sum_j M[i][j] e_j`` (``M`` invertible mod p)."""
    M = np.asarray(M, dtype=np.int64) % ring.p
    cup = np.einsum("ia,jb,abk->ijk", M, M, ring.cup) % ring.p
    return CohRing12(ring.p, ring.d1, ring.d2, cup)


# ---------------------------------------------------------------------------
# symbol length


def _encode(vecs: np.ndarray, p: int) -> np.ndarray:
    d = vecs.shape[-1]
    w = p ** np.arange(d, dtype=np.int64)
    return vecs @ w


def _decode(codes: np.ndarray, p: int, d: int) -> np.ndarray:
    return (codes[:, None] // (p ** np.arange(d, dtype=np.int64))) % p


def all_vectors(p: int, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return _decode(np.arange(p**d, dtype=np.int64), p, d)


def symbols(ring: CohRing12, symbol_cap: int = SYMBOL_CAP) -> np.ndarray:
    """Codes of the distinct symbols ``a u b``."""
    p = ring.p
    if p ** (2 * ring.d1) > symbol_cap:
        raise OracleCapExceeded(f"{p}^{2 * ring.d1} symbol pairs exceed the cap {symbol_cap}")
    V = all_vectors(p, ring.d1)
    out = set()
    for a in V:
        left = np.einsum("i,ijk->jk", a, ring.cup) % p  # (d1, d2)
        prods = (V @ left) % p
        out.update(_encode(prods, p).tolist())
    return np.array(sorted(out), dtype=np.int64)


def syml_table(ring: CohRing12, state_cap: int = STATE_CAP, symbol_cap: int = SYMBOL_CAP):
    """Symbol length of every class, indexed by code (``math.inf`` if unreachable).

    Breadth-first sumset closure: layer ``k`` is layer ``k-1`` plus a symbol.
    """
    if ring._dist is not None:
        return ring._dist
    p, d2 = ring.p, ring.d2
    if d2 == 0:
        ring._dist = np.zeros(1)
        return ring._dist
    n = p**d2
    if n > state_cap:
        raise OracleCapExceeded(f"{p}^{d2} classes exceed the state cap {state_cap}")
    S = _decode(symbols(ring, symbol_cap), p, d2)
    dist = np.full(n, np.inf)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    k = 0
    while frontier.size:
        k += 1
        F = _decode(frontier, p, d2)
        nxt = set()
        for start in range(0, len(F), 256):
            block = (F[start : start + 256, None, :] + S[None, :, :]) % p
            nxt.update(_encode(block.reshape(-1, d2), p).tolist())
        cand = np.array(sorted(nxt), dtype=np.int64)
        new = cand[np.isinf(dist[cand])]
        dist[new] = k
        frontier = new
    ring._dist = dist
    return dist


def syml_exact(ring: CohRing12, omega, **caps):
    omega = np.asarray(omega, dtype=np.int64) % ring.p
    d = syml_table(ring, **caps)[int(_encode(omega, ring.p))] if ring.d2 else 0
    return int(d) if d != math.inf else math.inf


def max_syml(ring: CohRing12, **caps):
    if ring.d2 == 0:
        return 0
    d = syml_table(ring, **caps).max()
    return int(d) if d != math.inf else math.inf


def syml_bruteforce(ring: CohRing12, omega, kmax: int = 2):
    """Smallest ``k <= kmax`` found by enumerating k-tuples of symbol pairs, else ``None``."""
    p = ring.p
    omega = tuple(int(x) % p for x in omega)
    if not any(omega):
        return 0
    V = all_vectors(p, ring.d1)
    prods = [tuple(ring.cup_product(a, b)) for a in V for b in V]
    for k in range(1, kmax + 1):
        for combo in itertools.product(prods, repeat=k):
            s = tuple(sum(col) % p for col in zip(*combo))
            if s == omega:
                return k
    return None


# ---------------------------------------------------------------------------
# law checks


def free_product_law_failures(r1: CohRing12, r2: CohRing12) -> list:
    """Classes where ``syml`` on the sum differs from the max over the factors."""
    R = free_product_ring(r1, r2)
    out = []
    t, t1, t2 = syml_table(R), syml_table(r1), syml_table(r2)
    for code in range(R.p**R.d2):
        w = _decode(np.array([code]), R.p, R.d2)[0]
        c1 = int(_encode(w[: r1.d2], R.p)) if r1.d2 else 0
        c2 = int(_encode(w[r1.d2 :], R.p)) if r2.d2 else 0
        if t[code] != max(t1[c1], t2[c2]):
            out.append(w.tolist())
    return out


def degree_one_bound(ring: CohRing12) -> int:
    """``M_1`` of the base: 1 when ``H^1 != 0``, else 0."""
    return 1 if ring.d1 >= 1 else 0


def extension_inequality_failures(ext: CohRing12) -> list:
    """Classes with ``syml(w) > syml(Res w) + M_1(base)``."""
    base = ext.base
    if base is None:
        raise OracleError("not an extension ring")
    t, tb = syml_table(ext), syml_table(base)
    m1 = degree_one_bound(base)
    out = []
    for code in range(ext.p**ext.d2):
        w = _decode(np.array([code]), ext.p, ext.d2)[0]
        cb = int(_encode(w[: ext.base_d2], ext.p)) if base.d2 else 0
        if t[code] > tb[cb] + m1:
            out.append(w.tolist())
    return out
