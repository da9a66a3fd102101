"""
Canonical labeling of pair partitions.

The canonical form of a partition of the pairs of ``{0..n-1}`` is the
lexicographically least color sequence, over all vertex permutations, where
a sequence lists the colors of pairs in lexicographic pair order relabeled by
first appearance.

The search places vertices at positions 0, 1, 2, ... . Once position ``r``
is fixed, row ``r`` of the sequence (the pairs ``(r, r+1..n-1)``) is
minimized greedily inside an ordered partition of the unplaced vertices into
cells; every cell member shares its color to every placed vertex, so earlier
rows never change. Ties the greedy rule cannot settle are branched.

Branching is cut by vertex pairs whose transposition is an automorphism of
the partition (twins are the common case): such vertices are interchangeable
whenever both are still unplaced in one cell, so only one of them is tried at
a position, and tied single-vertex groups are ordered up to swapping them.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence

from .core import (
    Coloring,
    Identity,
    MalformedPartition,
    PatternLike,
    VIdentity,
    class_sizes,
    pattern_matrix,
    raw_code,
)


def _swap_classes(mat: list[list[int]]) -> list[int]:
    """Classes of vertices whose transposition is an automorphism of the partition.

    Swapping two such vertices maps the search state to itself whenever both
    are unplaced and in the same cell, so one representative suffices.
    """
    n = len(mat)
    cls = list(range(n))
    for x in range(n):
        if cls[x] != x:
            continue
        for y in range(x + 1, n):
            if cls[y] == y and _swap_preserves(mat, x, y):
                cls[y] = x
    return cls


def _swap_preserves(mat: list[list[int]], x: int, y: int) -> bool:
    n = len(mat)
    rx, ry = mat[x], mat[y]
    if all(rx[z] == ry[z] for z in range(n) if z != x and z != y):
        return True
    phi: dict[int, int] = {}
    for z in range(n):
        if z == x or z == y:
            continue
        for c, d in ((rx[z], ry[z]), (ry[z], rx[z])):
            if phi.setdefault(c, d) != d:
                return False
    # Colors on pairs avoiding x and y (and on {x, y} itself) must stay put.
    if phi.get(rx[y], rx[y]) != rx[y]:
        return False
    for a in range(n):
        if a == x or a == y:
            continue
        ra = mat[a]
        for b in range(a + 1, n):
            if b != x and b != y and phi.get(ra[b], ra[b]) != ra[b]:
                return False
    return len(set(phi.values())) == len(phi)


def _multiset_orders(items: list, key: list) -> list[tuple]:
    """Orderings of ``items`` that differ in their sequence of keys."""
    out: list[tuple] = []
    pools: dict = {}
    for it, k in zip(items, key):
        pools.setdefault(k, []).append(it)
    keys = sorted(pools)
    need = {k: 0 for k in keys}

    def rec(acc):
        if len(acc) == len(items):
            out.append(tuple(acc))
            return
        for k in keys:
            if need[k] < len(pools[k]):
                acc.append(pools[k][need[k]])
                need[k] += 1
                rec(acc)
                need[k] -= 1
                acc.pop()

    rec([])
    return out


def canonical_code(mat: list[list[int]], cells: list[list[int]] | None = None
                   ) -> tuple[tuple[int, ...], list[int]]:
    """Least color sequence of a symmetric class matrix and one labeling achieving it.

    Returns ``(code, order)`` where ``order[k]`` is the original vertex placed
    at position ``k``. With ``cells`` (an ordered partition of the vertices)
    the minimum is taken over labelings that keep the cells in that order.
    """
    n = len(mat)
    if n <= 1:
        return (), list(range(n))
    counts = class_sizes(mat)
    swaps = _swap_classes(mat)

    def rows(r, v, cells, labels, nxt):
        # Yield (cells', labels', nxt', row) for every tie-resolution of row r.
        out_cells: list[list[int]] = []
        row: list[int] = []

        def walk(ci, labels, nxt):
            if ci == len(cells):
                yield list(out_cells), labels, nxt, list(row)
                return
            groups: dict[int, list[int]] = {}
            for w in cells[ci]:
                groups.setdefault(mat[v][w], []).append(w)
            old = sorted((labels[c], c) for c in groups if c in labels)
            fresh = [c for c in groups if c not in labels]
            # Larger fresh groups first; equal sizes are branched, except that
            # single vertices related by an automorphism are interchangeable.
            by_size: dict[int, list[int]] = {}
            for c in fresh:
                by_size.setdefault(len(groups[c]), []).append(c)
            tie_blocks = []
            for size in sorted(by_size, reverse=True):
                cs = by_size[size]
                if len(cs) == 1:
                    tie_blocks.append([tuple(cs)])
                elif size == 1:
                    tie_blocks.append(_multiset_orders(cs, [swaps[groups[c][0]] for c in cs]))
                else:
                    tie_blocks.append(list(permutations(cs)))

            base_len = len(out_cells)
            base_row = len(row)
            for _, c in old:
                out_cells.append(groups[c])
                row.extend([labels[c]] * len(groups[c]))
            yield from order_fresh(ci, tie_blocks, 0, labels, nxt, groups)
            del out_cells[base_len:]
            del row[base_row:]

        def order_fresh(ci, tie_blocks, ti, labels, nxt, groups):
            if ti == len(tie_blocks):
                yield from walk(ci + 1, labels, nxt)
                return
            for perm in tie_blocks[ti]:
                lab = dict(labels)
                k = nxt
                base_len = len(out_cells)
                base_row = len(row)
                for c in perm:
                    lab[c] = k
                    out_cells.append(groups[c])
                    row.extend([k] * len(groups[c]))
                    k += 1
                yield from order_fresh(ci, tie_blocks, ti + 1, lab, k, groups)
                del out_cells[base_len:]
                del row[base_row:]

        yield from walk(0, labels, nxt)

    # Level-synchronous search: after row r only states whose sequence so far
    # equals the least prefix can still reach the minimum.
    frontier = [([], cells if cells is not None else [list(range(n))], {}, 0)]
    seq: list[int] = []
    for r in range(n):
        best_row = None
        nxt_frontier = []
        for order, cells, labels, nxt in frontier:
            head = cells[0]
            tried = set()
            for v in head:
                if swaps[v] in tried:
                    continue
                tried.add(swaps[v])
                rest = [w for w in head if w != v]
                remaining = ([rest] if rest else []) + cells[1:]
                for new_cells, lab, k, row in rows(r, v, remaining, labels, nxt):
                    if best_row is not None and row > best_row:
                        continue
                    if best_row is None or row < best_row:
                        best_row = row
                        nxt_frontier = []
                    nxt_frontier.append((order + [v], new_cells, lab, k))
        seq.extend(best_row)
        frontier = nxt_frontier
    return tuple(seq), frontier[0][0]


def invariant_cells(mat: list[list[int]]) -> list[list[int]]:
    """Ordered vertex partition from iterated refinement by incident class sizes."""
    n = len(mat)
    counts = class_sizes(mat)
    cell = [0] * n
    ncells = 1
    while True:
        sigs = [
            (cell[v], tuple(sorted((counts[mat[v][w]], cell[w]) for w in range(n) if w != v)))
            for v in range(n)
        ]
        order = sorted(set(sigs))
        rank = {sg: i for i, sg in enumerate(order)}
        cell = [rank[sg] for sg in sigs]
        if len(order) == ncells:
            break
        ncells = len(order)
    out: list[list[int]] = [[] for _ in range(ncells)]
    for v in range(n):
        out[cell[v]].append(v)
    return out


def certificate(g: PatternLike) -> tuple[int, tuple[int, ...]]:
    """A complete isomorphism invariant that is cheaper than the canonical form.

    Equal certificates mean isomorphic colorings, but the code is the least
    sequence only among labelings compatible with ``invariant_cells``, so it
    need not equal the canonical identity code.
    """
    _, mat = pattern_matrix(g)
    if len(mat) <= 1:
        return (len(mat), ())
    return (len(mat), canonical_code(mat, invariant_cells(mat))[0])


def canonicalize(size: int, classes: Sequence[Iterable[Sequence[int]]]) -> Identity:
    """Canonical identity of a raw partition given as blocks of pairs."""
    return canonicalize_code(size, raw_code(size, classes))


@lru_cache(maxsize=1 << 18)
def canonicalize_code(size: int, code: tuple[int, ...]) -> Identity:
    if len(code) != size * (size - 1) // 2:
        raise MalformedPartition("code length does not match size")
    mat = [[-1] * size for _ in range(size)]
    k = 0
    for i in range(size):
        for j in range(i + 1, size):
            mat[i][j] = mat[j][i] = code[k]
            k += 1
    return Identity(size, canonical_code(mat)[0])


def canonical_labeling(g: PatternLike) -> list[int]:
    """Positions of ``g``'s vertices (by index) in the canonical form."""
    _, mat = pattern_matrix(g)
    return canonical_code(mat)[1]


def identity_of(g: PatternLike) -> Identity:
    """Canonical identity of a coloring (or of an identity/V-identity)."""
    if isinstance(g, Identity):
        return g
    _, mat = pattern_matrix(g)
    return Identity(len(mat), canonical_code(mat)[0])


def equivalent(a: PatternLike, b: PatternLike) -> bool:
    return identity_of(a) == identity_of(b)


def forget_order(v: VIdentity) -> Identity:
    return Identity(v.size, canonical_code(v.matrix)[0])


def is_canonical(x: Identity) -> bool:
    return canonicalize_code(x.size, x.code) == x


def restrict(g: Identity | VIdentity | Coloring, subset: Iterable[int]):
    """Restriction to a vertex subset.

    Identities come back canonical, V-identities keep the inherited order,
    and colorings keep their labels.
    """
    if isinstance(g, Coloring):
        return g.restrict(subset)
    sub = sorted(set(subset))
    if any(not 0 <= x < g.size for x in sub):
        raise ValueError("subset is not inside the vertex set")
    mat = g.matrix
    vals = [mat[sub[i]][sub[j]] for i in range(len(sub)) for j in range(i + 1, len(sub))]
    if isinstance(g, VIdentity):
        from .core import first_appearance

        return VIdentity(len(sub), first_appearance(vals))
    return canonicalize_code(len(sub), tuple(vals))
