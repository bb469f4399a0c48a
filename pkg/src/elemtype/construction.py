"""Elementary-type constructions: building blocks, AST, DSL, and subconstructions.

Grammar (whitespace-insensitive)::

    c := ID | "(" c "*" c ")" | "<" c ">"

``(c1 * c2)`` is the free product and ``<c>`` the extension ``Z_p x| G(c)``.
Every AST node is addressed by an occurrence path over ``{L, R, E}`` (left and
right operand of a free product, base of an extension); the root is the empty
path.  Generator ids embed the path, so equal blocks at different locations
stay distinct.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from . import words as W
from .words import GenWordMap, Word

TRIVIAL = "trivial"
FREE_PROCYCLIC = "free_procyclic"
DEMUSHKIN = "demushkin"
SIGN = "sign"
CUSTOM = "custom"
KINDS = (TRIVIAL, FREE_PROCYCLIC, DEMUSHKIN, SIGN, CUSTOM)

_THETA_CHECK_PRECISION = 24


class ConstructionError(ValueError):
    pass


class ConstructionSyntaxError(ConstructionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownBlockError(ConstructionError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown block id {name!r} at position {position}")
        self.name = name
        self.position = position


class TrivialOperandError(ConstructionError):
    pass


# ---------------------------------------------------------------------------
# building blocks


@dataclass(frozen=True)
class BlockSpec:
    """An atomic pro-p pair with a finite presentation.

    ``generators`` are local names, ``relations`` words over those names and
    ``theta`` the integer representatives of the character on each generator.
    ``bounds`` holds declared symbol-length suprema ``(M_1, M_2, ...)`` for
    custom blocks, ``ring`` optional degree <= 2 cohomology data.
    """

    id: str
    kind: str
    p: int
    theta: tuple = ()
    generators: tuple = ()
    relations: tuple = ()
    bounds: tuple | None = None
    ring: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConstructionError(f"block {self.id}: unknown kind {self.kind!r}")
        if len(self.theta) != len(self.generators):
            raise ConstructionError(f"block {self.id}: need one theta value per generator")
        if self.kind == SIGN:
            if self.p != 2:
                raise ConstructionError(f"block {self.id}: sign block requires p = 2")
            if self.theta != (-1,):
                raise ConstructionError(f"block {self.id}: sign block needs theta(e) = -1")
        else:
            for t in self.theta:
                if t % self.p != 1 % self.p:
                    raise ConstructionError(
                        f"block {self.id}: theta value {t} is not a principal unit"
                    )
        mod = self.p**_THETA_CHECK_PRECISION
        thetas = dict(zip(self.generators, self.theta))
        for rel in self.relations:
            if not W.letters(rel) <= set(self.generators):
                raise ConstructionError(f"block {self.id}: relation uses unknown generator")
            if W.theta_of_word(rel, thetas, mod) != 1:
                raise ConstructionError(f"block {self.id}: theta is not trivial on a relation")

    @property
    def is_trivial(self) -> bool:
        return self.kind == TRIVIAL

    def to_json(self) -> dict:
        out = {"id": self.id, "kind": self.kind, "p": self.p, "theta": list(self.theta)}
        if self.kind in (DEMUSHKIN, CUSTOM):
            out["presentation"] = {
                "generators": list(self.generators),
                "relations": [W.format_word(r) for r in self.relations],
            }
        if self.bounds is not None:
            out["bounds"] = [None if b is None else b for b in self.bounds]
        if self.ring is not None:
            d1, d2, cup = self.ring
            out["ring"] = {"d1": d1, "d2": d2, "cup": [[list(v) for v in row] for row in cup]}
        return out


def trivial_block(id: str, p: int) -> BlockSpec:
    return BlockSpec(id, TRIVIAL, p)


def free_procyclic(id: str, p: int, theta: int = 1) -> BlockSpec:
    return BlockSpec(id, FREE_PROCYCLIC, p, (theta,), ("x",))


def sign_block(id: str) -> BlockSpec:
    return BlockSpec(id, SIGN, 2, (-1,), ("e",), (W.letter("e", 2),))


def demushkin(id: str, p: int, generators, relation: Word, theta) -> BlockSpec:
    return BlockSpec(id, DEMUSHKIN, p, tuple(theta), tuple(generators), (relation,))


def demushkin_two(id: str, p: int, q: int | None = None) -> BlockSpec:
    """Two-generator Demushkin block ``<x1, x2 | x1^q [x1, x2]>``.

    With ``[a, b] = a^-1 b^-1 a b`` the relation forces theta(x1) = 1; we take
    theta(x2) = 1 - q, a principal unit.
    """
    q = p if q is None else q
    rel = W.concat(W.letter("x1", q), W.parse_word("x1^-1 x2^-1 x1 x2"))
    return demushkin(id, p, ("x1", "x2"), rel, (1, 1 - q))


def block_from_json(obj: dict) -> BlockSpec:
    kind = obj["kind"]
    p = int(obj["p"])
    theta = tuple(int(t) for t in obj.get("theta", []))
    bounds = obj.get("bounds")
    bounds = tuple(None if b is None else b for b in bounds) if bounds is not None else None
    ring = obj.get("ring")
    if ring is not None:
        ring = (
            int(ring["d1"]),
            int(ring["d2"]),
            tuple(tuple(tuple(int(x) for x in v) for v in row) for row in ring["cup"]),
        )
    if kind == TRIVIAL:
        gens, rels = (), ()
    elif kind == FREE_PROCYCLIC:
        gens, rels = ("x",), ()
    elif kind == SIGN:
        gens, rels = ("e",), (W.letter("e", 2),)
    else:
        pres = obj.get("presentation")
        if pres is None:
            raise ConstructionError(f"block {obj['id']}: {kind} block needs a presentation")
        gens = tuple(pres["generators"])
        rels = tuple(W.word_from_json(r) for r in pres.get("relations", []))
    return BlockSpec(obj["id"], kind, p, theta, gens, rels, bounds, ring)


def load_registry(data) -> dict:
    """Block registry from parsed JSON (a list of block objects) or a path."""
    if isinstance(data, str):
        with open(data, encoding="utf-8") as fh:
            data = json.load(fh)
    reg = {}
    for obj in data:
        b = block_from_json(obj)
        if b.id in reg:
            raise ConstructionError(f"duplicate block id {b.id!r}")
        reg[b.id] = b
    return reg


def registry_to_json(registry: dict) -> list:
    return [registry[k].to_json() for k in sorted(registry)]


def standard_registry(p: int) -> dict:
    """``T`` trivial, ``A``/``B``/``C`` free procyclic, ``D`` and ``D2`` Demushkin, ``E`` sign (p = 2)."""
    reg = {
        "T": trivial_block("T", p),
        "A": free_procyclic("A", p, 1),
        "B": free_procyclic("B", p, 1 + p),
        "C": free_procyclic("C", p, 1 + 2 * p),
        "D": demushkin_two("D", p),
        "D2": demushkin_two("D2", p),
    }
    if p == 2:
        reg["E"] = sign_block("E")
    return reg


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Generator:
    id: str
    origin: str  # "block" or "extension"
    path: tuple
    index: int  # position among the block's generators; -1 for extension generators
    theta: int
    block_id: str = ""
    local: str = ""


@dataclass(frozen=True)
class RelationCheck:
    label: str
    lhs: Word
    rhs: Word


def path_str(path) -> str:
    return "".join(path)


def block_gen_id(block: BlockSpec, local: str, path) -> str:
    return f"{block.id}.{local}@{path_str(path)}"


def ext_gen_id(path) -> str:
    return f"z@{path_str(path)}"


class _Node:
    @property
    def prime(self) -> int:
        return next(iter(self.leaves().values())).block.p

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_text()

    @cached_property
    def _nodes(self) -> dict:
        out = {}
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            out[path] = node
            for tag, child in reversed(node.children()):
                stack.append((path + (tag,), child))
        return out

    def nodes(self) -> dict:
        """``path -> node`` in pre-order (left before right)."""
        return self._nodes

    def node(self, path) -> "Construction":
        try:
            return self._nodes[tuple(path)]
        except KeyError:
            raise ConstructionError(f"path {path_str(path)!r} does not address a node") from None

    def leaves(self) -> dict:
        return {p: n for p, n in self._nodes.items() if isinstance(n, Leaf)}

    def extension_paths(self) -> list:
        return [p for p, n in self._nodes.items() if isinstance(n, Extension)]

    @cached_property
    def _generators(self) -> tuple:
        out = []
        self._collect_generators((), out)
        return tuple(out)

    def generators(self) -> tuple:
        return self._generators

    def generator_ids(self) -> list:
        return [g.id for g in self._generators]

    def thetas(self) -> dict:
        return {g.id: g.theta for g in self._generators}

    def blocks(self) -> list:
        seen = {}
        for leaf in self.leaves().values():
            seen.setdefault(leaf.block.id, leaf.block)
        return list(seen.values())

    @cached_property
    def _relations(self) -> tuple:
        out = []
        for path, node in self._nodes.items():
            if isinstance(node, Leaf):
                b = node.block
                ren = {x: block_gen_id(b, x, path) for x in b.generators}
                for i, rel in enumerate(b.relations):
                    out.append(
                        RelationCheck(
                            f"{b.id}@{path_str(path)} relation {i}",
                            tuple((ren[g], e) for g, e in rel),
                            W.EMPTY,
                        )
                    )
            elif isinstance(node, Extension):
                z = ext_gen_id(path)
                for g in node.base.generators():
                    gid = _shift_id(g, path + ("E",))
                    out.append(
                        RelationCheck(
                            f"{gid} acts on {z}",
                            W.conjugate(W.letter(gid), W.letter(z)),
                            W.letter(z, g.theta),
                        )
                    )
        return tuple(out)

    def relations(self) -> tuple:
        return self._relations


def _shift_id(g: Generator, prefix) -> str:
    """Id of generator ``g`` of a subtree once that subtree sits at ``prefix``."""
    return _relocated(g, tuple(prefix) + g.path)


def _relocated(g: Generator, path) -> str:
    if g.origin == "extension":
        return ext_gen_id(path)
    return f"{g.block_id}.{g.local}@{path_str(path)}"


@dataclass(frozen=True, eq=True)
class Leaf(_Node):
    block: BlockSpec

    def children(self):
        return ()

    def to_text(self) -> str:
        return self.block.id

    def _collect_generators(self, path, out):
        for i, (x, t) in enumerate(zip(self.block.generators, self.block.theta)):
            out.append(
                Generator(block_gen_id(self.block, x, path), "block", path, i, t, self.block.id, x)
            )


@dataclass(frozen=True, eq=True)
class FreeProduct(_Node):
    left: "Construction"
    right: "Construction"

    def __post_init__(self):
        for side in (self.left, self.right):
            if isinstance(side, Leaf) and side.block.is_trivial:
                raise TrivialOperandError("free product operand must not be the trivial block")
        if self.left.prime != self.right.prime:
            raise ConstructionError("all blocks must share the same prime")

    def children(self):
        return (("L", self.left), ("R", self.right))

    def to_text(self) -> str:
        return f"({self.left.to_text()} * {self.right.to_text()})"

    def _collect_generators(self, path, out):
        self.left._collect_generators(path + ("L",), out)
        self.right._collect_generators(path + ("R",), out)


@dataclass(frozen=True, eq=True)
class Extension(_Node):
    base: "Construction"

    def children(self):
        return (("E", self.base),)

    def to_text(self) -> str:
        return f"<{self.base.to_text()}>"

    def _collect_generators(self, path, out):
        self.base._collect_generators(path + ("E",), out)
        out.append(Generator(ext_gen_id(path), "extension", path, -1, 1))


Construction = Union[Leaf, FreeProduct, Extension]


def is_trivial_leaf(c) -> bool:
    return isinstance(c, Leaf) and c.block.is_trivial


def free_product(*parts) -> Construction:
    """Left-associated n-ary free product."""
    out = parts[0]
    for nxt in parts[1:]:
        out = FreeProduct(out, nxt)
    return out


# ---------------------------------------------------------------------------
# DSL


class _Parser:
    def __init__(self, text: str, registry: dict):
        self.text = text
        self.pos = 0
        self.registry = registry

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = repr(self.peek()) if self.peek() else "end of input"
            raise ConstructionSyntaxError(f"expected {ch!r}, got {got}", self.pos)
        self.pos += 1

    def parse(self) -> Construction:
        c = self.expr()
        if self.peek():
            raise ConstructionSyntaxError(f"unexpected {self.peek()!r}", self.pos)
        return c

    def expr(self) -> Construction:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            left = self.expr()
            self.expect("*")
            right = self.expr()
            self.expect(")")
            try:
                return FreeProduct(left, right)
            except TrivialOperandError as exc:
                raise TrivialOperandError(f"{exc} (product at position {start})") from None
        if ch == "<":
            self.pos += 1
            base = self.expr()
            self.expect(">")
            return Extension(base)
        if ch.isalpha() or ch == "_":
            end = self.pos
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                end += 1
            name = self.text[self.pos:end]
            if name not in self.registry:
                raise UnknownBlockError(name, self.pos)
            self.pos = end
            return Leaf(self.registry[name])
        got = repr(ch) if ch else "end of input"
        raise ConstructionSyntaxError(f"expected block id, '(' or '<', got {got}", self.pos)


def parse(text: str, registry: dict) -> Construction:
    c = _Parser(text, registry).parse()
    primes = {b.p for b in c.blocks()}
    if len(primes) > 1:
        raise ConstructionError(f"blocks mix primes {sorted(primes)}")
    return c


# ---------------------------------------------------------------------------
# subconstructions


@dataclass(frozen=True)
class WKeep:
    """Leaf kept as is."""


@dataclass(frozen=True)
class WBoth:
    left: object
    right: object


@dataclass(frozen=True)
class WLeft:
    inner: object


@dataclass(frozen=True)
class WRight:
    inner: object


@dataclass(frozen=True)
class WExt:
    keep: bool
    inner: object


def _project(c: Construction, tree, cpath: tuple):
    """Return the projected construction and its ``d_path -> c_path`` map."""
    if isinstance(c, Leaf):
        if not isinstance(tree, WKeep):
            raise ConstructionError(f"witness shape mismatch at {path_str(cpath)!r}")
        return c, {(): cpath}
    if isinstance(c, FreeProduct):
        if isinstance(tree, WLeft):
            return _project(c.left, tree.inner, cpath + ("L",))
        if isinstance(tree, WRight):
            return _project(c.right, tree.inner, cpath + ("R",))
        if isinstance(tree, WBoth):
            d1, m1 = _project(c.left, tree.left, cpath + ("L",))
            d2, m2 = _project(c.right, tree.right, cpath + ("R",))
            if is_trivial_leaf(d1) or is_trivial_leaf(d2):
                raise ConstructionError("witness keeps a trivial free-product operand")
            m = {(): cpath}
            m.update({("L",) + k: v for k, v in m1.items()})
            m.update({("R",) + k: v for k, v in m2.items()})
            return FreeProduct(d1, d2), m
        raise ConstructionError(f"witness shape mismatch at {path_str(cpath)!r}")
    if isinstance(tree, WExt):
        d, m = _project(c.base, tree.inner, cpath + ("E",))
        if not tree.keep:
            return d, m
        out = {(): cpath}
        out.update({("E",) + k: v for k, v in m.items()})
        return Extension(d), out
    raise ConstructionError(f"witness shape mismatch at {path_str(cpath)!r}")


@dataclass(frozen=True)
class SubconstructionWitness:
    """A derivation of ``d <= c``; identity is by derivation, not by printed form."""

    construction: Construction
    tree: object

    @cached_property
    def _projection(self):
        return _project(self.construction, self.tree, ())

    @property
    def sub(self) -> Construction:
        return self._projection[0]

    @property
    def node_map(self) -> dict:
        """``d path -> c path`` for every node of the subconstruction."""
        return self._projection[1]

    @cached_property
    def inverse_map(self) -> dict:
        return {v: k for k, v in self.node_map.items()}

    def is_full(self) -> bool:
        return self.tree == full_tree(self.construction)

    def to_json(self):
        return tree_to_json(self.tree)


def full_tree(c: Construction):
    if isinstance(c, Leaf):
        return WKeep()
    if isinstance(c, FreeProduct):
        return WBoth(full_tree(c.left), full_tree(c.right))
    return WExt(True, full_tree(c.base))


def full_witness(c: Construction) -> SubconstructionWitness:
    return SubconstructionWitness(c, full_tree(c))


def _trees(c: Construction) -> Iterator:
    if isinstance(c, Leaf):
        yield WKeep(), c
        return
    if isinstance(c, FreeProduct):
        left = list(_trees(c.left))
        right = list(_trees(c.right))
        for t, d in left:
            yield WLeft(t), d
        for t, d in right:
            yield WRight(t), d
        for t1, d1 in left:
            if is_trivial_leaf(d1):
                continue
            for t2, d2 in right:
                if not is_trivial_leaf(d2):
                    yield WBoth(t1, t2), FreeProduct(d1, d2)
        return
    for t, d in _trees(c.base):
        yield WExt(False, t), d
        yield WExt(True, t), Extension(d)


def subconstructions(c: Construction) -> Iterator[SubconstructionWitness]:
    """Every derivation ``d <= c`` exactly once (the full one included)."""
    for tree, _ in _trees(c):
        yield SubconstructionWitness(c, tree)


def compose_witness(outer: SubconstructionWitness, inner: SubconstructionWitness):
    """From ``d <= c`` (outer) and ``d' <= d`` (inner) build ``d' <= c``."""
    if inner.construction != outer.sub:
        raise ConstructionError("inner witness is not over the outer subconstruction")

    def go(c, t_out, t_in):
        if isinstance(c, Leaf):
            return WKeep()
        if isinstance(c, FreeProduct):
            if isinstance(t_out, WLeft):
                return WLeft(go(c.left, t_out.inner, t_in))
            if isinstance(t_out, WRight):
                return WRight(go(c.right, t_out.inner, t_in))
            if isinstance(t_in, WLeft):
                return WLeft(go(c.left, t_out.left, t_in.inner))
            if isinstance(t_in, WRight):
                return WRight(go(c.right, t_out.right, t_in.inner))
            return WBoth(go(c.left, t_out.left, t_in.left), go(c.right, t_out.right, t_in.right))
        if not t_out.keep:
            return WExt(False, go(c.base, t_out.inner, t_in))
        return WExt(t_in.keep, go(c.base, t_out.inner, t_in.inner))

    return SubconstructionWitness(outer.construction, go(outer.construction, outer.tree, inner.tree))


def tree_to_json(tree):
    if isinstance(tree, WKeep):
        return "keep"
    if isinstance(tree, WBoth):
        return {"both": [tree_to_json(tree.left), tree_to_json(tree.right)]}
    if isinstance(tree, WLeft):
        return {"left": tree_to_json(tree.inner)}
    if isinstance(tree, WRight):
        return {"right": tree_to_json(tree.inner)}
    return {"keep_ext" if tree.keep else "drop_ext": tree_to_json(tree.inner)}


def tree_from_json(obj):
    if obj == "keep":
        return WKeep()
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ConstructionError(f"bad witness encoding: {obj!r}")
    (key, val), = obj.items()
    if key == "both":
        if not isinstance(val, list) or len(val) != 2:
            raise ConstructionError("bad 'both' witness node")
        return WBoth(tree_from_json(val[0]), tree_from_json(val[1]))
    if key == "left":
        return WLeft(tree_from_json(val))
    if key == "right":
        return WRight(tree_from_json(val))
    if key in ("keep_ext", "drop_ext"):
        return WExt(key == "keep_ext", tree_from_json(val))
    raise ConstructionError(f"bad witness encoding: {obj!r}")


def witness_from_json(c: Construction, obj) -> SubconstructionWitness:
    w = SubconstructionWitness(c, tree_from_json(obj))
    w.sub  # validates the shape
    return w


def iota(w: SubconstructionWitness) -> GenWordMap:
    """Embedding ``G(d) -> G(c)`` on generators."""
    d, c = w.sub, w.construction
    table = {}
    for g in d.generators():
        table[g.id] = W.letter(_relocated(g, w.node_map[g.path]))
    return GenWordMap(d, c, table)


def pi(w: SubconstructionWitness) -> GenWordMap:
    """Projection ``G(c) -> G(d)`` on generators (dropped generators go to 1)."""
    d, c = w.sub, w.construction
    inv = w.inverse_map
    table = {}
    for g in c.generators():
        if g.path in inv:
            table[g.id] = W.letter(_relocated(g, inv[g.path]))
        else:
            table[g.id] = W.EMPTY
    return GenWordMap(c, d, table)


# ---------------------------------------------------------------------------
# principal tuples and extension rank


@dataclass(frozen=True)
class PrincipalTuple:
    root: tuple
    z_nodes: tuple  # extension-node paths, innermost first

    @property
    def rank(self) -> int:
        return len(self.z_nodes)

    def z_generators(self) -> list:
        """Generator ids ``u_1, ..., u_r``."""
        return [ext_gen_id(z) for z in self.z_nodes]

    def to_json(self) -> dict:
        return {"root": path_str(self.root), "z_nodes": [path_str(z) for z in self.z_nodes]}


def tuple_from_json(obj) -> PrincipalTuple:
    return PrincipalTuple(tuple(obj["root"]), tuple(tuple(z) for z in obj["z_nodes"]))


def _ancestor_extensions(path) -> tuple:
    return tuple(path[:i] for i in range(len(path) - 1, -1, -1) if path[i] == "E")


def principal_tuples(c: Construction) -> list:
    """One tuple per leaf occurrence, in left-to-right leaf order."""
    return [PrincipalTuple(p, _ancestor_extensions(p)) for p in c.leaves()]


def principal_tuples_by_rules(c: Construction) -> list:
    """Same set built with the inductive leaf / free-product / extension rules."""
    if isinstance(c, Leaf):
        return [PrincipalTuple((), ())]
    if isinstance(c, FreeProduct):
        out = []
        for tag, sub in c.children():
            for t in principal_tuples_by_rules(sub):
                out.append(PrincipalTuple((tag,) + t.root, tuple((tag,) + z for z in t.z_nodes)))
        return out
    return [
        PrincipalTuple(("E",) + t.root, tuple(("E",) + z for z in t.z_nodes) + ((),))
        for t in principal_tuples_by_rules(c.base)
    ]


def extension_rank(c: Construction) -> int:
    return max(p.count("E") for p in c.leaves())


def extension_rank_by_rules(c: Construction) -> int:
    if isinstance(c, Leaf):
        return 0
    if isinstance(c, FreeProduct):
        return max(extension_rank_by_rules(c.left), extension_rank_by_rules(c.right))
    return extension_rank_by_rules(c.base) + 1


def compatible(t: PrincipalTuple, w: SubconstructionWitness) -> bool:
    return t.root in w.inverse_map


def compatible_by_rules(t: PrincipalTuple, w: SubconstructionWitness) -> bool:
    """Compatibility by induction on the subconstruction ``d``."""

    def go(d, dpath):
        cpath = w.node_map[dpath]
        if isinstance(d, Leaf):
            return cpath == t.root
        if isinstance(d, FreeProduct):
            return go(d.left, dpath + ("L",)) or go(d.right, dpath + ("R",))
        return go(d.base, dpath + ("E",))

    return go(w.sub, ())


def restrict_tuple(t: PrincipalTuple, w: SubconstructionWitness) -> PrincipalTuple:
    if not compatible(t, w):
        raise ConstructionError("principal tuple is not compatible with the subconstruction")
    inv = w.inverse_map
    return PrincipalTuple(inv[t.root], tuple(inv[z] for z in t.z_nodes if z in inv))


def kept_indices(t: PrincipalTuple, w: SubconstructionWitness) -> list:
    """1-based positions ``i_1 < ... < i_k`` of the tuple kept by ``w``."""
    inv = w.inverse_map
    return [i + 1 for i, z in enumerate(t.z_nodes) if z in inv]


def canonical_max_tuple(c: Construction) -> PrincipalTuple:
    """First principal tuple of maximal rank in left-to-right leaf order."""
    tuples = principal_tuples(c)
    r = max(t.rank for t in tuples)
    return next(t for t in tuples if t.rank == r)
