"""Random constructions for test corpora."""

from __future__ import annotations

from . import construction as C


def random_construction(rng, registry: dict, block_ids, max_rank: int = 4, max_leaves: int = 3):
    """A random construction with extension rank at most ``max_rank``.

    Trivial blocks only appear at the top or directly under an extension,
    since they may not be free-product operands.
    """
    trivial = [b for b in block_ids if registry[b].is_trivial]
    nontrivial = [b for b in block_ids if not registry[b].is_trivial]

    def go(rank: int, leaves: int, in_product: bool):
        roll = rng.random()
        if leaves >= 2 and roll < 0.3:
            split = rng.randint(1, leaves - 1)
            return C.FreeProduct(go(rank, split, True), go(rank, leaves - split, True))
        if rank > 0 and roll < 0.75:
            return C.Extension(go(rank - 1, leaves, False))
        pool = nontrivial if in_product or not trivial else block_ids
        return C.Leaf(registry[rng.choice(list(pool))])

    return go(max_rank, rng.randint(1, max_leaves), False)
