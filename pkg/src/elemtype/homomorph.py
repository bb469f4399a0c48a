"""Homomorphisms ``G(c) -> Gbar`` into finite p-groups and the factoring pipeline.

A :class:`Hom` assigns a target element (by index) to every generator of a
construction.  Words of ``G(c)`` are never compared directly; every identity
below is checked after evaluating in the finite target, or on exponent
vectors inside the abelian subgroup ``A = Z_1 x ... x Z_r`` of a principal
tuple.

Index conventions: ``u_1, ..., u_r`` are the extension generators of a
principal tuple, innermost first (1-based, as in ``Z_1``).  The image chain is
indexed 0-based by ``j`` with ``chain[j] = rho(V^j)``, ``V^j = <u_{j+1}..u_r>``;
a collapse at chain index ``k`` is removed by killing ``u_{k+1}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import construction as C
from . import words as W
from .fpgroup import FiniteGroup, Subgroup, abelian_dlog, group_from_spec, l_value, subgroup_closure
from .padic import AAutMatrix, compose, invert, project_bar

CERT_FORMAT = "elemtype-certificate/1"


class HomError(ValueError):
    pass


class InvalidHom(HomError):
    def __init__(self, violations):
        super().__init__("homomorphism violates relations: " + "; ".join(violations))
        self.violations = violations


class PipelineError(HomError):
    pass


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Hom:
    domain: object  # Construction
    target: FiniteGroup
    images: dict  # generator id -> element index

    def __post_init__(self):
        ids = set(self.domain.generator_ids())
        if set(self.images) != ids:
            missing = sorted(ids - set(self.images))
            extra = sorted(set(self.images) - ids)
            raise HomError(f"image table mismatch: missing {missing}, unexpected {extra}")

    def image(self, gen: str) -> int:
        return self.images[gen]

    def to_json(self) -> dict:
        return {g: self.target.element_to_json(i) for g, i in sorted(self.images.items())}


def _evaluate(G: FiniteGroup, images: dict, word) -> int:
    out = 0
    for g, e in word:
        if g not in images:
            raise HomError(f"unknown generator {g!r}")
        out = G.mul(out, G.pow(images[g], e))
    return out


def evaluate(rho: Hom, word) -> int:
    return _evaluate(rho.target, rho.images, word)


def violations(rho: Hom) -> list:
    return [
        rel.label
        for rel in rho.domain.relations()
        if evaluate(rho, rel.lhs) != evaluate(rho, rel.rhs)
    ]


def validate(rho: Hom):
    """``True`` when every relation holds, else the list of violated labels."""
    bad = violations(rho)
    return True if not bad else bad


def make_hom(domain, target: FiniteGroup, images: dict, check: bool = True) -> Hom:
    rho = Hom(domain, target, dict(images))
    if check:
        bad = violations(rho)
        if bad:
            raise InvalidHom(bad)
    return rho


def pullback(rho: Hom, gamma: W.GenWordMap) -> Hom:
    """``rho o gamma`` for a generator map into ``rho.domain``."""
    return Hom(gamma.domain, rho.target, {g: evaluate(rho, w) for g, w in gamma.table.items()})


def hom_from_json(obj: dict, registry: dict | None = None, cap: int | None = None) -> Hom:
    """``{construction, target, images, [blocks]}`` -> validated :class:`Hom`."""
    target = group_from_spec(obj["target"], **({"cap": cap} if cap else {}))
    if registry is None:
        if "blocks" in obj:
            registry = C.load_registry(obj["blocks"])
        else:
            registry = C.standard_registry(target.p)
    c = C.parse(obj["construction"], registry)
    images = {g: target.index_of(m) for g, m in obj["images"].items()}
    return make_hom(c, target, images)


def hom_to_json(rho: Hom) -> dict:
    """Inverse of :func:`hom_from_json`; carries its own block registry."""
    c = rho.domain
    return {
        "blocks": C.registry_to_json({b.id: b for b in c.blocks()}),
        "construction": c.to_text(),
        "target": rho.target.spec,
        "images": rho.to_json(),
    }


def random_hom(c, G: FiniteGroup, rng, trivial_bias: float = 0.3, max_steps: int = 20000) -> Hom:
    """A relation-respecting assignment found by randomized backtracking.

    Generators are assigned in construction order; a relation is checked as
    soon as all its letters are assigned.  The all-trivial assignment always
    works, so the search cannot fail, only fall back toward it.
    """
    gens = c.generator_ids()
    pos = {g: i for i, g in enumerate(gens)}
    due = [[] for _ in gens]
    for rel in c.relations():
        last = max(pos[g] for g in W.letters(rel.lhs) | W.letters(rel.rhs))
        due[last].append(rel)
    images: dict = {}
    steps = [0]

    def ok(i):
        return all(_evaluate(G, images, r.lhs) == _evaluate(G, images, r.rhs) for r in due[i])

    def candidates():
        order = list(range(1, G.order))
        rng.shuffle(order)
        if rng.random() < trivial_bias:
            return [0] + order
        return order + [0]

    def go(i):
        if i == len(gens):
            return True
        for x in candidates():
            steps[0] += 1
            if steps[0] > max_steps:
                x = 0
            images[gens[i]] = x
            if ok(i) and go(i + 1):
                return True
            if steps[0] > max_steps:
                break
        del images[gens[i]]
        return False

    if not go(0):
        images = {g: 0 for g in gens}
    return make_hom(c, G, images)


# ---------------------------------------------------------------------------
# the image chain of a principal tuple


def _tuple_images(rho: Hom, t: C.PrincipalTuple) -> list:
    return [rho.images[u] for u in t.z_generators()]


def image_chain(rho: Hom, t: C.PrincipalTuple) -> list:
    """``[rho(V^0), rho(V^1), ..., rho(V^r) = 1]``."""
    imgs = _tuple_images(rho, t)
    return [subgroup_closure(rho.target, imgs[j:]) for j in range(t.rank + 1)]


def find_collapse(rho: Hom, t: C.PrincipalTuple):
    """Smallest chain index ``k`` with ``rho(V^k) = rho(V^{k+1})``, else ``None``."""
    chain = image_chain(rho, t)
    for k in range(t.rank):
        if chain[k].order == chain[k + 1].order:
            return k
    return None


def column_word(t: C.PrincipalTuple, column) -> tuple:
    """The word ``prod_i u_i^{column_i}`` in the tuple's generators."""
    return W.normalize((u, e) for u, e in zip(t.z_generators(), column) if e)


def normalize_alpha(rho: Hom, t: C.PrincipalTuple, k: int) -> AAutMatrix:
    """A-automorphism with ``rho(alpha(u_k)) = 1`` (``k`` is the 1-based Z index).

    Requires ``rho(V^{k-1}) = rho(V^k)``.  The tail part comes from the
    lexicographically smallest discrete log of ``rho(u_k)`` over
    ``rho(u_{k+1}), ..., rho(u_r)``.
    """
    r = t.rank
    if not 1 <= k <= r:
        raise PipelineError(f"Z index {k} outside 1..{r}")
    G = rho.target
    N = G.p_exponent
    mod = G.p**N
    imgs = _tuple_images(rho, t)
    a = abelian_dlog(G, imgs[k - 1], imgs[k:])
    if a is None:
        raise PipelineError(f"rho(u_{k}) is not in rho(V^{k}); no collapse at this index")
    cols = [[int(i == j) for i in range(r)] for j in range(r)]
    for i, ai in enumerate(a):
        cols[k - 1][k + i] = -ai % mod
    alpha = AAutMatrix.from_columns(cols, G.p, N)
    if evaluate(rho, column_word(t, alpha.column(k - 1))) != 0:
        raise PipelineError("normalization failed to kill the chosen coordinate")
    return alpha


# ---------------------------------------------------------------------------
# morphisms between constructions, generator level


def _sub_tuple(t: C.PrincipalTuple, path) -> list:
    """The tuple's extension nodes inside the subtree at ``path`` (innermost first)."""
    n = len(path)
    return [z for z in t.z_nodes if z[:n] == tuple(path)]


def _identity_table(c, path) -> dict:
    node = c.node(path)
    return {C._relocated(g, tuple(path) + g.path): W.letter(C._relocated(g, tuple(path) + g.path))
            for g in node.generators()}


def extend_over_extension(eta_bar: W.GenWordMap, z_id: str, psi, *, thetas=None,
                          modulus: int | None = None, pi_map: W.GenWordMap | None = None,
                          phi: W.GenWordMap | None = None) -> W.GenWordMap:
    """Extend ``eta_bar`` to ``Z' x| G'`` by sending the new generator ``z_id`` to ``psi``.

    Optional checks: ``psi`` lies in the kernel of the codomain character, and
    ``pi_map o eta_bar = phi`` on generators (compared as reduced words).
    """
    if thetas is not None and modulus is not None:
        if W.theta_of_word(psi, thetas, modulus) != 1 % modulus:
            raise PipelineError(f"image of {z_id} is not in the kernel of the character")
    if pi_map is not None and phi is not None:
        for g, w in eta_bar.table.items():
            if pi_map.apply(w) != phi.table[g]:
                raise PipelineError(f"pi o eta_bar differs from phi on {g}")
    table = dict(eta_bar.table)
    table[z_id] = W.normalize(psi)
    return W.GenWordMap(eta_bar.domain, eta_bar.codomain, table)


def _column_of(t: C.PrincipalTuple, beta: AAutMatrix, znode) -> tuple:
    return column_word(t, beta.column(t.z_nodes.index(znode)))


def _check_beta(beta: AAutMatrix, r: int):
    mod = beta.modulus
    for j in range(r):
        col = beta.column(j)
        for i in range(r - 1):
            if col[i] % mod != int(i == j):
                raise PipelineError("beta must be the identity modulo the outermost Z")
    if beta.column(r - 1)[r - 1] % mod != 1:
        raise PipelineError("beta must fix the outermost Z")


def eta_morphism(w_dbar: C.SubconstructionWitness, c, t: C.PrincipalTuple, beta: AAutMatrix,
                 path: tuple = ()) -> W.GenWordMap:
    """The twisted embedding ``G(dbar) -> G(c)`` for ``dbar <= cbar`` and ``c = <cbar>``.

    ``c`` is the subtree of the construction at ``path`` (``w_dbar`` is over
    ``c.base``); ``t`` is a principal tuple of the whole construction whose
    rank inside ``c`` equals ``beta.rank``.  Images are words in the whole
    construction's generator ids.  It agrees with ``iota`` except on the
    kept tuple generators, which go to ``beta``'s columns.
    """
    node = c.node(path) if path else c
    if not isinstance(node, C.Extension):
        raise PipelineError("eta_morphism needs an extension construction")
    sub_t = C.PrincipalTuple(t.root, tuple(_sub_tuple(t, path)))
    r = sub_t.rank
    if beta.rank != r:
        raise PipelineError("beta rank does not match the tuple")
    _check_beta(beta, r)
    base_path = tuple(path) + ("E",)
    local_root = t.root[len(base_path):]
    if local_root not in w_dbar.inverse_map:
        raise PipelineError("tuple is not compatible with the subconstruction")
    dbar = w_dbar.sub
    nmap = w_dbar.node_map

    def cpath(dpath):
        return base_path + nmap[dpath]

    def iota_sub(dpath) -> dict:
        out = {}
        for g in dbar.node(dpath).generators():
            src = C._relocated(g, dpath + g.path)
            out[src] = W.letter(C._relocated(g, cpath(dpath + g.path)))
        return out

    def go(dpath) -> dict:
        d = dbar.node(dpath)
        if isinstance(d, C.Leaf):
            return iota_sub(dpath)
        if isinstance(d, C.FreeProduct):
            out = {}
            for tag, _ in d.children():
                sub = dpath + (tag,)
                if cpath(sub) == t.root[: len(cpath(sub))]:
                    out.update(go(sub))
                else:
                    out.update(iota_sub(sub))
            return out
        # d = <d'>: recurse, then send Z' to beta(Z'), a word in Z' and the outer Z
        inner = go(dpath + ("E",))
        zc = cpath(dpath)
        psi = column_word(sub_t, beta.column(sub_t.z_nodes.index(zc)))
        eta_bar = W.GenWordMap(None, None, inner)
        return extend_over_extension(eta_bar, C.ext_gen_id(dpath), psi).table

    table = go(())
    return W.GenWordMap(dbar, c, table)


def lift_automorphism(c, t: C.PrincipalTuple, alpha: AAutMatrix, path: tuple = ()) -> W.GenWordMap:
    """An automorphism ``gamma`` of ``G(c)`` extending the A-automorphism ``alpha``.

    ``gamma(u_j)`` is a word in ``u_1..u_r`` whose exponent vector is column
    ``j`` of ``alpha``.  Works on the subtree at ``path`` with ids of the whole
    construction.
    """
    node = c.node(path) if path else c
    zs = _sub_tuple(t, path)
    if alpha.rank != len(zs):
        raise PipelineError(f"alpha has rank {alpha.rank}, tuple has rank {len(zs)}")
    if isinstance(node, C.Leaf):
        table = _identity_table(c, path)
    elif isinstance(node, C.FreeProduct):
        table = {}
        for tag, _ in node.children():
            sub = tuple(path) + (tag,)
            if t.root[: len(sub)] == sub:
                table.update(lift_automorphism(c, t, alpha, sub).table)
            else:
                table.update(_identity_table(c, sub))
    else:
        r = alpha.rank
        z = C.ext_gen_id(path)
        base_path = tuple(path) + ("E",)
        if r > 1:
            abar = project_bar(alpha, r - 1)
        else:
            abar = None
        if abar is None:
            gbar = _identity_table(c, base_path)
            a_prime = AAutMatrix(((alpha.entries[0][0],),), alpha.prime, alpha.precision)
        else:
            gbar = lift_automorphism(c, t, abar, base_path).table
            ent = [list(row) + [0] for row in abar.entries]
            ent.append([0] * (r - 1) + [alpha.entries[r - 1][r - 1]])
            a_prime = AAutMatrix(tuple(map(tuple, ent)), alpha.prime, alpha.precision)
        gamma_prime = dict(gbar)
        gamma_prime[z] = W.letter(z, alpha.entries[r - 1][r - 1])
        beta = compose(invert(a_prime), alpha)
        cbar = node.base
        w_full = C.full_witness(cbar)
        eta_bar = eta_morphism(w_full, c, t, beta, tuple(path))
        # rename eta_bar's domain (ids local to cbar) to ids in the whole construction
        eta = {}
        for g in cbar.generators():
            eta[C._relocated(g, base_path + g.path)] = eta_bar.table[C._relocated(g, g.path)]
        eta[z] = W.letter(z)
        gp = W.GenWordMap(None, None, gamma_prime)
        table = {g: gp.apply(w) for g, w in eta.items()}
    if not path:
        table = {g: W.reduce_exponents(w, alpha.modulus) for g, w in table.items()}
    return W.GenWordMap(node, node, table)


def abelianized_columns(gamma: W.GenWordMap, t: C.PrincipalTuple, modulus: int) -> list:
    basis = t.z_generators()
    return [W.abelianize(gamma.table[u], basis, modulus) for u in basis]


# ---------------------------------------------------------------------------
# factoring


def quotient_factor(rho: Hom, t: C.PrincipalTuple, l: int):
    """Factor ``rho`` through a subconstruction dropping ``Z_l`` when ``rho(Z_l) = 1``.

    Returns ``(witness, rho_prime)`` with ``rho_prime o pi = rho`` on every
    generator; the witness is proper iff ``rho(u_l) = 1``.
    """
    c = rho.domain
    if not 1 <= l <= t.rank:
        raise PipelineError(f"Z index {l} outside 1..{t.rank}")
    zl = t.z_nodes[l - 1]
    if rho.images[C.ext_gen_id(zl)] != 0:
        w = C.full_witness(c)
        return w, rho

    def go(path):
        node = c.node(path)
        if isinstance(node, C.Leaf):
            return C.WKeep()
        if isinstance(node, C.FreeProduct):
            on_left = t.root[: len(path) + 1] == tuple(path) + ("L",)
            side, other = ("L", "R") if on_left else ("R", "L")
            inner = go(tuple(path) + (side,))
            sub = C.SubconstructionWitness(c.node(tuple(path) + (side,)), inner).sub
            other_tree = C.full_tree(c.node(tuple(path) + (other,)))
            if C.is_trivial_leaf(sub):
                return C.WRight(other_tree) if on_left else C.WLeft(other_tree)
            return C.WBoth(inner, other_tree) if on_left else C.WBoth(other_tree, inner)
        if tuple(path) == zl:
            return C.WExt(False, C.full_tree(node.base))
        return C.WExt(True, go(tuple(path) + ("E",)))

    w = C.SubconstructionWitness(c, go(()))
    iota = C.iota(w)
    rho_prime = Hom(w.sub, rho.target, {g: evaluate(rho, wd) for g, wd in iota.table.items()})
    bad = violations(rho_prime)
    if bad:
        raise PipelineError("factored homomorphism is not well defined: " + "; ".join(bad))
    proj = C.pi(w)
    for g in c.generator_ids():
        if evaluate(rho_prime, proj.table[g]) != rho.images[g]:
            raise PipelineError(f"rho' o pi differs from rho on {g}")
    return w, rho_prime


@dataclass
class FactorStage:
    construction: object
    tuple: C.PrincipalTuple
    k: int  # 0-based chain index; Z_{k+1} is killed
    alpha: AAutMatrix
    gamma: W.GenWordMap
    witness: C.SubconstructionWitness
    rho: Hom  # the input homomorphism of this stage
    rho_next: Hom

    def identity_failures(self) -> list:
        """Generators ``g`` with ``rho(gamma(g)) != rho''(pi(g))``."""
        proj = C.pi(self.witness)
        return [
            g
            for g in self.construction.generator_ids()
            if evaluate(self.rho, self.gamma.table[g]) != evaluate(self.rho_next, proj.table[g])
        ]

    def to_json(self) -> dict:
        return {
            "construction": self.construction.to_text(),
            "tuple": self.tuple.to_json(),
            "k": self.k,
            "alpha": self.alpha.to_json(),
            "precision": self.alpha.precision,
            "gamma": self.gamma.to_json(),
            "witness": self.witness.to_json(),
            "sub": self.witness.sub.to_text(),
            "images": self.rho_next.to_json(),
        }


@dataclass
class FactorizationCertificate:
    rho: Hom
    l: int
    stages: list = field(default_factory=list)
    witness: C.SubconstructionWitness | None = None
    final: Hom | None = None

    def to_json(self) -> dict:
        c = self.rho.domain
        return {
            "format": CERT_FORMAT,
            "p": self.rho.target.p,
            "blocks": C.registry_to_json({b.id: b for b in c.blocks()}),
            "construction": c.to_text(),
            "target": self.rho.target.spec,
            "images": self.rho.to_json(),
            "l": self.l,
            "stages": [s.to_json() for s in self.stages],
            "final": {
                "construction": self.final.domain.to_text(),
                "witness": self.witness.to_json(),
                "extension_rank": C.extension_rank(self.final.domain),
                "images": self.final.to_json(),
            },
        }


def factor_once(rho: Hom, t: C.PrincipalTuple, k: int) -> FactorStage:
    c = rho.domain
    alpha = normalize_alpha(rho, t, k + 1)
    gamma = lift_automorphism(c, t, alpha)
    rho2 = pullback(rho, gamma)
    bad = violations(rho2)
    if bad:
        raise PipelineError("rho o gamma violates relations: " + "; ".join(bad))
    w, rho_next = quotient_factor(rho2, t, k + 1)
    if w.is_full():
        raise PipelineError("collapse did not produce a proper subconstruction")
    stage = FactorStage(c, t, k, alpha, gamma, w, rho, rho_next)
    bad = stage.identity_failures()
    if bad:
        raise PipelineError(f"stagewise identity fails on {bad}")
    return stage


def factor_full(rho: Hom, l: int | None = None, cap: int | None = None,
                threads: int = 1) -> FactorizationCertificate:
    """Factor ``rho`` through a subconstruction of extension rank at most ``l(Gbar)``."""
    if l is None:
        kw = {"cap": cap} if cap else {}
        l = l_value(rho.target, threads=threads, **kw)
    cert = FactorizationCertificate(rho, l)
    cur = rho
    total = C.full_witness(rho.domain)
    budget = len(rho.domain.extension_paths())
    while C.extension_rank(cur.domain) > l:
        t = C.canonical_max_tuple(cur.domain)
        k = find_collapse(cur, t)
        if k is None:
            raise PipelineError("no collapse although the rank exceeds l")
        stage = factor_once(cur, t, k)
        cert.stages.append(stage)
        total = C.compose_witness(total, stage.witness)
        cur = stage.rho_next
        if len(cert.stages) > budget:
            raise PipelineError("factoring did not terminate within the extension-node budget")
    cert.witness = total
    cert.final = cur
    return cert


# ---------------------------------------------------------------------------
# independent re-verification of a serialized certificate


def verify_certificate(obj: dict, cap: int | None = None) -> list:
    """Re-check a certificate from its JSON alone; returns a list of problems."""
    problems = []
    try:
        if obj.get("format") != CERT_FORMAT:
            return [f"unknown certificate format {obj.get('format')!r}"]
        registry = C.load_registry(obj["blocks"])
        kw = {"cap": cap} if cap else {}
        G = group_from_spec(obj["target"], **kw)
        c = C.parse(obj["construction"], registry)
        rho = Hom(c, G, {g: G.index_of(m) for g, m in obj["images"].items()})
        bad = violations(rho)
        if bad:
            return [f"input homomorphism violates {b}" for b in bad]
        l = int(obj["l"])
        cur = rho
        total = C.full_witness(c)
        for n, st in enumerate(obj["stages"]):
            tag = f"stage {n}"
            if st["construction"] != cur.domain.to_text():
                problems.append(f"{tag}: construction text does not match the previous stage")
                return problems
            t = C.tuple_from_json(st["tuple"])
            if t not in C.principal_tuples(cur.domain):
                problems.append(f"{tag}: tuple is not principal")
                return problems
            alpha = AAutMatrix(tuple(map(tuple, st["alpha"])), G.p, int(st["precision"]))
            if alpha.rank != t.rank:
                problems.append(f"{tag}: alpha rank mismatch")
                return problems
            gamma = W.GenWordMap(cur.domain, cur.domain,
                                 {g: W.parse_word(s) for g, s in st["gamma"].items()})
            if set(gamma.table) != set(cur.domain.generator_ids()):
                problems.append(f"{tag}: gamma table does not cover the generators")
                return problems
            cols = abelianized_columns(gamma, t, alpha.modulus)
            if cols != alpha.columns():
                problems.append(f"{tag}: gamma does not restrict to alpha on the tuple")
            if not gamma.theta_compatible(alpha.modulus):
                problems.append(f"{tag}: gamma is not compatible with the character")
            k = int(st["k"])
            if evaluate(cur, column_word(t, alpha.column(k))) != 0:
                problems.append(f"{tag}: rho(alpha(u_{k + 1})) is not trivial")
            w = C.witness_from_json(cur.domain, st["witness"])
            if w.sub.to_text() != st["sub"] or w.is_full():
                problems.append(f"{tag}: witness does not give the stated proper subconstruction")
                return problems
            nxt = Hom(w.sub, G, {g: G.index_of(m) for g, m in st["images"].items()})
            bad = violations(nxt)
            if bad:
                problems.append(f"{tag}: factored homomorphism violates {bad[0]}")
            proj = C.pi(w)
            for g in cur.domain.generator_ids():
                if evaluate(cur, gamma.table[g]) != evaluate(nxt, proj.table[g]):
                    problems.append(f"{tag}: identity rho(gamma(g)) = rho''(pi(g)) fails at {g}")
            total = C.compose_witness(total, w)
            cur = nxt
        fin = obj["final"]
        if fin["construction"] != cur.domain.to_text():
            problems.append("final construction does not match the last stage")
        fw = C.witness_from_json(c, fin["witness"])
        if fw.sub.to_text() != fin["construction"] or fw.tree != total.tree:
            problems.append("final witness does not compose the stage witnesses")
        if C.extension_rank(cur.domain) != fin["extension_rank"] or fin["extension_rank"] > l:
            problems.append("final extension rank exceeds l or is misreported")
        if fin["images"] != cur.to_json():
            problems.append("final images differ from the last stage")
        if l_value(G, **kw) != l:
            problems.append("recorded l differs from the recomputed l(G)")
        if not problems:
            redo = factor_full(rho, l).to_json()
            if json.dumps(redo, sort_keys=True) != json.dumps(obj, sort_keys=True):
                problems.append("certificate differs from the deterministic recomputation")
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        problems.append(f"malformed certificate: {exc}")
    return problems
