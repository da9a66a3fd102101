"""
Value types for edge colorings of finite complete graphs.

A ``Coloring`` is a concrete coloring on an ordered field of naturals.
An ``Identity`` is the canonical representative of a coloring up to vertex
permutation and color renaming; a ``VIdentity`` keeps the vertex order and
quotients by color renaming only.

Both identity types store their partition as a restricted growth string
(``code``) over the pairs of ``{0..n-1}`` in lexicographic order: the k-th
entry is the block index of the k-th pair, and blocks are numbered by first
appearance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union


class MalformedPartition(ValueError):
    """Raised when a raw partition does not cover the pairs exactly once."""


class ResourceLimit(RuntimeError):
    """Raised when a request exceeds a configured size bound."""


Pair = tuple[int, int]


@lru_cache(maxsize=None)
def pairs_of(n: int) -> tuple[Pair, ...]:
    """Pairs of ``{0..n-1}`` in lexicographic order."""
    return tuple(combinations(range(n), 2))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[Pair, int]:
    return {p: k for k, p in enumerate(pairs_of(n))}


def norm_pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


def first_appearance(values: Iterable) -> tuple[int, ...]:
    """Relabel a sequence so labels are 0, 1, 2, ... by first appearance."""
    seen: dict = {}
    out = []
    for v in values:
        if v not in seen:
            seen[v] = len(seen)
        out.append(seen[v])
    return tuple(out)


@dataclass(frozen=True)
class Coloring:
    """A coloring of the pairs of a finite ordered field.

    ``edges`` holds ``(a, b, color)`` triples with ``a < b``, sorted.
    """

    field: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        fld = tuple(self.field)
        object.__setattr__(self, "field", fld)
        if any(x < 0 for x in fld):
            raise ValueError("vertex labels must be naturals")
        if any(fld[i] >= fld[i + 1] for i in range(len(fld) - 1)):
            raise ValueError("field must be strictly increasing")
        edges = tuple(sorted((min(a, b), max(a, b), c) for a, b, c in self.edges))
        object.__setattr__(self, "edges", edges)
        members = set(fld)
        keys = {(a, b) for a, b, _ in edges}
        if len(keys) != len(edges):
            raise ValueError("pair colored twice")
        if any(a not in members or b not in members or a == b for a, b in keys):
            raise ValueError("edge outside field")
        n = len(fld)
        if len(keys) != n * (n - 1) // 2:
            raise ValueError("coloring is not total on pairs of the field")
        if any(c < 0 for _, _, c in edges):
            raise ValueError("colors must be naturals")

    @classmethod
    def from_map(cls, field: Iterable[int], colors: Mapping[Pair, int]) -> "Coloring":
        return cls(tuple(sorted(field)), tuple((a, b, c) for (a, b), c in colors.items()))

    @classmethod
    def from_function(cls, field: Iterable[int], fn) -> "Coloring":
        fld = tuple(sorted(field))
        return cls(fld, tuple((a, b, fn(a, b)) for a, b in combinations(fld, 2)))

    @cached_property
    def _lookup(self) -> dict[Pair, int]:
        return {(a, b): c for a, b, c in self.edges}

    def color(self, a: int, b: int) -> int:
        return self._lookup[norm_pair(a, b)]

    def __len__(self) -> int:
        return len(self.field)

    @property
    def palette(self) -> set[int]:
        return {c for _, _, c in self.edges}

    def max_color(self) -> int:
        return max((c for _, _, c in self.edges), default=-1)

    def restrict(self, subset: Iterable[int]) -> "Coloring":
        sub = sorted(set(subset))
        return Coloring.from_function(sub, self.color)

    def relabel(self, mapping: Mapping[int, int]) -> "Coloring":
        """Rename vertices; ``mapping`` must be injective on the field."""
        return Coloring(
            tuple(sorted(mapping[x] for x in self.field)),
            tuple((mapping[a], mapping[b], c) for a, b, c in self.edges),
        )

    def recolor(self, mapping: Mapping[int, int]) -> "Coloring":
        return Coloring(self.field, tuple((a, b, mapping[c]) for a, b, c in self.edges))

    def normalized(self) -> "Coloring":
        """Rename colors by first appearance along lexicographic pair order."""
        seen: dict[int, int] = {}
        out = []
        for a, b, c in self.edges:
            out.append((a, b, seen.setdefault(c, len(seen))))
        return Coloring(self.field, tuple(out))

    def pattern(self) -> tuple[int, ...]:
        """Color sequence along pairs in order, relabeled by first appearance."""
        return first_appearance(c for _, _, c in self.edges)

    def to_json(self) -> dict:
        return {"field": list(self.field), "colors": [[a, b, c] for a, b, c in self.edges]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Coloring":
        return cls(tuple(data["field"]), tuple(tuple(e) for e in data["colors"]))


@dataclass(frozen=True)
class _PartitionForm:
    size: int
    code: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "code", tuple(self.code))
        if len(self.code) != self.size * (self.size - 1) // 2:
            raise MalformedPartition("code length does not match size")

    @cached_property
    def classes(self) -> tuple[tuple[Pair, ...], ...]:
        blocks: dict[int, list[Pair]] = {}
        for p, b in zip(pairs_of(self.size), self.code):
            blocks.setdefault(b, []).append(p)
        return tuple(tuple(blocks[b]) for b in sorted(blocks))

    @cached_property
    def matrix(self) -> list[list[int]]:
        n = self.size
        mat = [[-1] * n for _ in range(n)]
        for (i, j), b in zip(pairs_of(n), self.code):
            mat[i][j] = mat[j][i] = b
        return mat

    @property
    def num_classes(self) -> int:
        return len(set(self.code))

    def block_of(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    def to_coloring(self) -> Coloring:
        """The coloring on ``{0..n-1}`` that uses block indices as colors."""
        return Coloring(tuple(range(self.size)),
                        tuple((i, j, b) for (i, j), b in zip(pairs_of(self.size), self.code)))

    def to_json(self) -> dict:
        return {"size": self.size, "classes": [[list(p) for p in blk] for blk in self.classes]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


class Identity(_PartitionForm):
    """Canonical form of a coloring up to vertex permutation and color renaming.

    Build these through ``canonicalize`` or ``identity_of``; the constructor
    trusts that ``code`` is already minimal.
    """

    def __repr__(self):
        return f"Identity(size={self.size}, code={self.code})"

    @classmethod
    def from_json(cls, data: Mapping) -> "Identity":
        from .canon import canonicalize

        return canonicalize(data["size"], data["classes"])


class VIdentity(_PartitionForm):
    """A partition of pairs with the vertex order kept (color renaming only)."""

    def __repr__(self):
        return f"VIdentity(size={self.size}, code={self.code})"

    @classmethod
    def from_json(cls, data: Mapping) -> "VIdentity":
        return v_identity_from_classes(data["size"], data["classes"])


@dataclass(frozen=True)
class Embedding:
    """An injective vertex map witnessing a realization."""

    map: Mapping[int, int]
    order_preserving: bool = False

    def __post_init__(self):
        object.__setattr__(self, "map", dict(sorted(self.map.items())))
        if len(set(self.map.values())) != len(self.map):
            raise ValueError("embedding is not injective")
        if self.order_preserving:
            img = list(self.map.values())
            if any(img[i] >= img[i + 1] for i in range(len(img) - 1)):
                raise ValueError("embedding is not increasing")

    def __hash__(self):
        return hash((tuple(self.map.items()), self.order_preserving))

    def image(self) -> set[int]:
        return set(self.map.values())

    def to_json(self) -> dict:
        return {"map": [[k, v] for k, v in self.map.items()], "order_preserving": self.order_preserving}


PatternLike = Union[Identity, VIdentity, Coloring]


def _check_blocks(size: int, blocks: Sequence[Iterable[Sequence[int]]]) -> dict[Pair, int]:
    owner: dict[Pair, int] = {}
    for k, blk in enumerate(blocks):
        blk = list(blk)
        if not blk:
            raise MalformedPartition("empty block")
        for p in blk:
            a, b = p
            if not (0 <= a < size and 0 <= b < size) or a == b:
                raise MalformedPartition(f"pair {tuple(p)} is not a pair of {{0..{size - 1}}}")
            q = norm_pair(a, b)
            if q in owner:
                raise MalformedPartition(f"pair {q} occurs in two blocks")
            owner[q] = k
    if len(owner) != size * (size - 1) // 2:
        raise MalformedPartition("blocks do not cover every pair")
    return owner


def v_identity_from_classes(size: int, blocks: Sequence[Iterable[Sequence[int]]]) -> VIdentity:
    owner = _check_blocks(size, blocks)
    return VIdentity(size, first_appearance(owner[p] for p in pairs_of(size)))


def v_identity_of(c: Coloring) -> VIdentity:
    """The V-identity of a coloring: order-isomorphic relabeling onto ``{0..n-1}``."""
    return VIdentity(len(c.field), c.pattern())


def raw_code(size: int, blocks: Sequence[Iterable[Sequence[int]]]) -> tuple[int, ...]:
    owner = _check_blocks(size, blocks)
    return tuple(owner[p] for p in pairs_of(size))


def pattern_matrix(g: PatternLike) -> tuple[tuple[int, ...], list[list[int]]]:
    """Vertex labels of ``g`` and a class matrix indexed by vertex position."""
    if isinstance(g, Coloring):
        n = len(g.field)
        mat = [[-1] * n for _ in range(n)]
        idx = {v: i for i, v in enumerate(g.field)}
        for a, b, c in g.edges:
            mat[idx[a]][idx[b]] = mat[idx[b]][idx[a]] = c
        return g.field, mat
    return tuple(range(g.size)), g.matrix


def class_sizes(mat: list[list[int]]) -> dict[int, int]:
    counts: dict[int, int] = {}
    n = len(mat)
    for i in range(n):
        for j in range(i + 1, n):
            counts[mat[i][j]] = counts.get(mat[i][j], 0) + 1
    return counts
