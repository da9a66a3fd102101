"""
Realization search, refinements, and identity enumeration.

``f`` realizes ``g`` when an injection ``k`` sends pairs that share a class in
``g`` to pairs that share a color in ``f``. Pairs in singleton classes of
``g`` impose nothing, which is why every coloring realizes every rainbow
pattern that fits.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Optional

from .canon import canonicalize_code, identity_of
from .core import (
    Coloring,
    Embedding,
    Identity,
    PatternLike,
    ResourceLimit,
    VIdentity,
    class_sizes,
    first_appearance,
    pairs_of,
    pattern_matrix,
)

ENUMERATION_BOUND = 6


def _embeddings(f: PatternLike, g: PatternLike, order_preserving: bool) -> Iterator[Embedding]:
    f_labels, fmat = pattern_matrix(f)
    g_labels, gmat = pattern_matrix(g)
    nf, ng = len(f_labels), len(g_labels)
    if ng > nf:
        return
    sizes = class_sizes(gmat)
    shared = [[sizes.get(gmat[i][j], 0) > 1 if i != j else False for j in range(ng)] for i in range(ng)]

    if order_preserving:
        order = list(range(ng))
    else:
        # Most constrained vertices first; any order is correct.
        degree = [sum(shared[i]) for i in range(ng)]
        order = sorted(range(ng), key=lambda i: (-degree[i], i))

    img = [-1] * ng
    used = [False] * nf
    fixed: dict[int, int] = {}

    def rec(t: int) -> Iterator[dict[int, int]]:
        if t == ng:
            yield {g_labels[i]: f_labels[img[i]] for i in range(ng)}
            return
        gv = order[t]
        if order_preserving:
            lo = img[order[t - 1]] + 1 if t else 0
            hi = nf - (ng - t)
            candidates = range(lo, hi + 1)
        else:
            candidates = range(nf)
        placed = order[:t]
        for x in candidates:
            if used[x]:
                continue
            fx = fmat[x]
            newly: list[int] = []
            ok = True
            for u in placed:
                if not shared[gv][u]:
                    continue
                cl = gmat[gv][u]
                col = fx[img[u]]
                have = fixed.get(cl)
                if have is None:
                    fixed[cl] = col
                    newly.append(cl)
                elif have != col:
                    ok = False
                    break
            if ok:
                img[gv] = x
                used[x] = True
                yield from rec(t + 1)
                used[x] = False
                img[gv] = -1
            for cl in newly:
                del fixed[cl]

    for m in rec(0):
        yield Embedding(m, order_preserving)


def realizes(f: PatternLike, g: PatternLike) -> Optional[Embedding]:
    """An embedding of ``g`` into ``f``, or ``None`` when ``f`` does not realize ``g``."""
    return next(_embeddings(f, g, False), None)


def v_realizes(f: PatternLike, g: PatternLike) -> Optional[Embedding]:
    """Like ``realizes`` but the embedding must be strictly increasing."""
    return next(_embeddings(f, g, True), None)


def all_embeddings(f: PatternLike, g: PatternLike, order_preserving: bool = False) -> Iterator[Embedding]:
    return _embeddings(f, g, order_preserving)


def is_embedding(f: PatternLike, g: PatternLike, emb: Embedding) -> bool:
    """Check the realization condition for an explicit vertex map."""
    f_labels, fmat = pattern_matrix(f)
    g_labels, gmat = pattern_matrix(g)
    fi = {v: i for i, v in enumerate(f_labels)}
    gi = {v: i for i, v in enumerate(g_labels)}
    if set(emb.map) != set(g_labels) or not set(emb.map.values()) <= set(f_labels):
        return False
    if len(set(emb.map.values())) != len(emb.map):
        return False
    seen: dict[int, int] = {}
    for a, b in combinations(g_labels, 2):
        cl = gmat[gi[a]][gi[b]]
        col = fmat[fi[emb.map[a]]][fi[emb.map[b]]]
        if seen.setdefault(cl, col) != col:
            return False
    return True


def set_partitions(items: list) -> Iterator[list[list]]:
    """All set partitions of ``items`` (restricted growth order)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def refinement_codes(size: int, code: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Every partition of the pairs that refines the one given by ``code``."""
    blocks: dict[int, list[int]] = {}
    for k, b in enumerate(code):
        blocks.setdefault(b, []).append(k)
    block_list = [blocks[b] for b in sorted(blocks)]
    choices = [list(set_partitions(blk)) for blk in block_list]
    m = len(code)
    for combo in product(*choices):
        out = [0] * m
        label = 0
        for parts in combo:
            for part in parts:
                for k in part:
                    out[k] = label
                label += 1
        yield first_appearance(out)


@lru_cache(maxsize=None)
def refinements(ident: Identity) -> frozenset[Identity]:
    """Canonical identities on the same vertices that ``ident`` realizes."""
    return frozenset(canonicalize_code(ident.size, c) for c in refinement_codes(ident.size, ident.code))


@lru_cache(maxsize=None)
def v_refinements(v: VIdentity) -> frozenset[VIdentity]:
    return frozenset(VIdentity(v.size, c) for c in refinement_codes(v.size, v.code))


def _induced_code(mat: list[list[int]], sub: tuple[int, ...]) -> tuple[int, ...]:
    return first_appearance(mat[sub[i]][sub[j]] for i in range(len(sub)) for j in range(i + 1, len(sub)))


def realized_identities(f: PatternLike, max_size: int) -> set[Identity]:
    """All identities of size ``1..max_size`` realized by ``f``."""
    _, mat = pattern_matrix(f)
    n = len(mat)
    top = min(max_size, n)
    induced: set[Identity] = set()
    for k in range(1, top + 1):
        for sub in combinations(range(n), k):
            induced.add(canonicalize_code(k, _induced_code(mat, sub)))
    out: set[Identity] = set()
    for ident in induced:
        out |= refinements(ident)
    return out


def realized_v_identities(f: PatternLike, max_size: int) -> set[VIdentity]:
    """All V-identities of size ``1..max_size`` that ``f`` V-realizes."""
    _, mat = pattern_matrix(f)
    n = len(mat)
    top = min(max_size, n)
    induced: set[VIdentity] = set()
    for k in range(1, top + 1):
        for sub in combinations(range(n), k):
            induced.add(VIdentity(k, _induced_code(mat, sub)))
    out: set[VIdentity] = set()
    for v in induced:
        out |= v_refinements(v)
    return out


def _rgs(length: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of the given length."""
    if length == 0:
        yield ()
        return
    seq = [0] * length

    def rec(i: int, top: int) -> Iterator[tuple[int, ...]]:
        if i == length:
            yield tuple(seq)
            return
        for v in range(top + 2):
            seq[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def _extend(parent: Identity) -> Iterator[tuple[int, ...]]:
    """Codes on ``size+1`` vertices whose first ``size`` vertices induce ``parent``."""
    n = parent.size
    k = parent.num_classes
    new_pairs = pairs_of(n + 1)
    old_mat = parent.matrix

    def rows(i: int, nxt: int, acc: list[int]) -> Iterator[list[int]]:
        if i == n:
            yield acc
            return
        for c in range(nxt + 1):
            acc.append(c)
            yield from rows(i + 1, nxt + 1 if c == nxt else nxt, acc)
            acc.pop()

    for row in rows(0, k, []):
        vals = []
        for a, b in new_pairs:
            vals.append(row[a] if b == n else old_mat[a][b])
        yield first_appearance(vals)


@lru_cache(maxsize=None)
def _enumerate(size: int) -> tuple[Identity, ...]:
    if size <= 4:
        found = {canonicalize_code(size, code) for code in _rgs(size * (size - 1) // 2)}
    else:
        found = set()
        for parent in _enumerate(size - 1):
            for code in _extend(parent):
                found.add(canonicalize_code(size, code))
    return tuple(sorted(found, key=lambda x: x.code))


def enumerate_identities(size: int, bound: int = ENUMERATION_BOUND) -> list[Identity]:
    """All identities of exactly ``size`` vertices, sorted by canonical code.

    Sizes up to 4 are produced by canonicalizing every pair partition; larger
    sizes extend each identity one size down by a new vertex, since deleting
    any vertex of an identity leaves an identity.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    if size > bound:
        raise ResourceLimit(f"size {size} exceeds the enumeration bound {bound}")
    return list(_enumerate(size))


def identities_up_to(size: int, bound: int = ENUMERATION_BOUND) -> list[Identity]:
    out: list[Identity] = []
    for k in range(1, size + 1):
        out.extend(enumerate_identities(k, bound))
    return out


__all__ = [
    "all_embeddings",
    "enumerate_identities",
    "identities_up_to",
    "identity_of",
    "is_embedding",
    "realized_identities",
    "realized_v_identities",
    "realizes",
    "refinement_codes",
    "refinements",
    "set_partitions",
    "v_realizes",
    "v_refinements",
]
