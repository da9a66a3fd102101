"""
Meet colorings of binary-tree branches, the identities I_m, and special sequences.

Two branches of equal length get the color of their longest common prefix.
I_m is the identity of that coloring on all ``2^(m+1)`` branches of length
``m+1``. A special sequence ``eta_0..eta_{m+1}`` has consecutive meets of
length ``0, 1, ..., m``; on such a sequence the meet of ``eta_i`` and
``eta_j`` (``i < j``) is always ``eta_i``'s prefix of length ``i``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence, Union

from .canon import identity_of
from .closure import eh_amalgam
from .core import Coloring, Identity, PatternLike, ResourceLimit, class_sizes, pattern_matrix

IM_BOUND = 3
TREE_BOUND = 6


@dataclass(frozen=True, order=True)
class Branch:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("branch bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, s: Union[str, "Branch", Sequence[int]]) -> "Branch":
        if isinstance(s, Branch):
            return s
        if isinstance(s, str):
            if s and set(s) - {"0", "1"}:
                raise ValueError(f"not a bit string: {s!r}")
            return cls(tuple(int(ch) for ch in s))
        return cls(tuple(s))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def meet(self, other: "Branch") -> tuple[int, ...]:
        k = 0
        for a, b in zip(self.bits, other.bits):
            if a != b:
                break
            k += 1
        return self.bits[:k]


def all_branches(length: int) -> list[Branch]:
    return [Branch(bits) for bits in product((0, 1), repeat=length)]


def _as_branches(S: Iterable) -> list[Branch]:
    out = sorted({Branch.parse(s) for s in S})
    if not out:
        raise ValueError("need at least one branch")
    if len({len(b) for b in out}) != 1:
        raise ValueError("branches have mixed lengths")
    return out


def meet_coloring(S: Iterable) -> Coloring:
    """Coloring on positions ``0..|S|-1`` (lexicographic order of ``S``) by meet.

    Meet nodes are numbered by first appearance along the pairs.
    """
    bs = _as_branches(S)
    node: dict[tuple[int, ...], int] = {}
    edges = []
    for i, j in combinations(range(len(bs)), 2):
        m = bs[i].meet(bs[j])
        edges.append((i, j, node.setdefault(m, len(node))))
    return Coloring(tuple(range(len(bs))), tuple(edges))


def build_Im(m: int, bound: int = IM_BOUND) -> Identity:
    """The identity I_m on all branches of length ``m+1``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > bound:
        raise ResourceLimit(f"I_{m} has {2 ** (m + 1)} vertices; bound is m <= {bound}")
    return identity_of(meet_coloring(all_branches(m + 1)))


@dataclass(frozen=True)
class SpecialSequence:
    entries: tuple[Branch, ...]

    def __post_init__(self):
        entries = tuple(Branch.parse(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 3:
            raise ValueError("a special sequence has m+2 >= 3 entries")
        m = len(entries) - 2
        if any(len(e) != m + 1 for e in entries):
            raise ValueError(f"entries must have length {m + 1}")
        for i in range(m + 1):
            if len(entries[i].meet(entries[i + 1])) != i:
                raise ValueError(f"meet of entries {i} and {i + 1} has length != {i}")

    @property
    def m(self) -> int:
        return len(self.entries) - 2

    def coloring(self) -> Coloring:
        """Meet coloring on positions ``0..m+1`` in sequence order (not lexicographic)."""
        node: dict[tuple[int, ...], int] = {}
        edges = []
        for i, j in combinations(range(len(self.entries)), 2):
            mt = self.entries[i].meet(self.entries[j])
            edges.append((i, j, node.setdefault(mt, len(node))))
        return Coloring(tuple(range(len(self.entries))), tuple(edges))

    def to_json(self) -> list[str]:
        return [str(e) for e in self.entries]


def special_sequences(m: int) -> list[SpecialSequence]:
    """All special sequences for ``m``, in lexicographic order of their entries."""
    if m < 1:
        raise ValueError("m must be at least 1")
    L = m + 1
    out: list[SpecialSequence] = []

    def rec(seq: list[tuple[int, ...]]):
        i = len(seq) - 1
        if i == m + 1:
            out.append(SpecialSequence(tuple(Branch(s) for s in seq)))
            return
        prev = seq[-1]
        # Next entry agrees with prev on the first i bits and differs at bit i.
        head = prev[:i] + (1 - prev[i],)
        for tail in product((0, 1), repeat=L - i - 1):
            seq.append(head + tail)
            rec(seq)
            seq.pop()

    for first in product((0, 1), repeat=L):
        rec([first])
    return out


def special_restriction(m: int) -> Identity:
    """The identity of I_m restricted to any special sequence (color of {i, j} is min(i, j))."""
    return identity_of(Coloring.from_function(range(m + 2), lambda i, j: min(i, j)))


def singleton_classes(g: PatternLike) -> list[tuple[int, int]]:
    """Pairs (by vertex label) that form a color class on their own."""
    labels, mat = pattern_matrix(g)
    sizes = class_sizes(mat)
    return [
        (labels[i], labels[j])
        for i, j in combinations(range(len(labels)), 2)
        if sizes[mat[i][j]] == 1
    ]


def _profile(c: Coloring) -> list[list[list[int]]]:
    blocks: dict[int, list[list[int]]] = {}
    for a, b, col in c.edges:
        blocks.setdefault(col, []).append([a, b])
    return [blocks[k] for k in sorted(blocks, key=lambda k: blocks[k][0])]


def verify_t2_pair_claim(m: int, profiles: bool = True) -> dict:
    """Check that ``{eta_m, eta_{m+1}}`` is the only singleton class on every special sequence."""
    if not 1 <= m <= 4:
        raise ResourceLimit("t2 pair claim is checked for 1 <= m <= 4")
    seqs = special_sequences(m)
    failures = []
    shapes: Counter = Counter()
    rows = []
    for s in seqs:
        c = s.coloring()
        single = singleton_classes(c)
        prof = _profile(c)
        shapes[tuple(len(b) for b in prof)] += 1
        if single != [(m, m + 1)]:
            failures.append({"sequence": s.to_json(), "singletons": [list(p) for p in single]})
        if profiles:
            rows.append({"sequence": s.to_json(), "classes": prof})
    report = {
        "check": "t2-pairs",
        "m": m,
        "sequences": len(seqs),
        "passed": len(seqs) - len(failures),
        "failures": failures,
        "class_size_profiles": {",".join(map(str, k)): v for k, v in sorted(shapes.items())},
        "ok": not failures,
    }
    if profiles:
        report["profiles"] = rows
    return report


# -- tree oracle ------------------------------------------------------------------------

Tree = Union[int, tuple]


def leaf_labeled_trees(n: int) -> Iterator[Tree]:
    """Every full rooted binary tree with leaves ``0..n-1`` (``(2n-3)!!`` of them)."""
    if n < 1:
        return
    if n == 1:
        yield 0
        return

    def insert(t: Tree, leaf: int) -> Iterator[Tree]:
        yield (t, leaf)
        if isinstance(t, tuple):
            left, right = t
            for sub in insert(left, leaf):
                yield (sub, right)
            for sub in insert(right, leaf):
                yield (left, sub)

    def build(k: int) -> Iterator[Tree]:
        if k == 2:
            yield (0, 1)
            return
        for t in build(k - 1):
            yield from insert(t, k - 1)

    yield from build(n)


def tree_meets(t: Tree, n: int) -> list[list[int]]:
    """Matrix of internal-node ids at which leaf pairs meet."""
    mat = [[-1] * n for _ in range(n)]
    counter = [0]

    def walk(node: Tree) -> list[int]:
        if isinstance(node, int):
            return [node]
        left = walk(node[0])
        right = walk(node[1])
        nid = counter[0]
        counter[0] += 1
        for a in left:
            for b in right:
                mat[a][b] = mat[b][a] = nid
        return left + right

    walk(t)
    return mat


def tree_witness(g: PatternLike, bound: int = TREE_BOUND) -> Optional[Tree]:
    """A leaf-labeled tree whose meet coloring realizes ``g`` on the identity map."""
    _, gmat = pattern_matrix(g)
    n = len(gmat)
    if n > bound:
        raise ResourceLimit(f"tree search is limited to size <= {bound}")
    if n <= 2:
        return 0 if n == 1 else ((0, 1) if n == 2 else None)
    # Only pairs in shared classes constrain; group them by class.
    classes: dict[int, list[tuple[int, int]]] = {}
    for i, j in combinations(range(n), 2):
        classes.setdefault(gmat[i][j], []).append((i, j))
    groups = [ps for ps in classes.values() if len(ps) > 1]
    for t in leaf_labeled_trees(n):
        mt = tree_meets(t, n)
        if all(len({mt[i][j] for i, j in ps}) == 1 for ps in groups):
            return t
    return None


def tree_realizes(g: PatternLike, bound: int = TREE_BOUND) -> bool:
    """Whether some binary meet topology realizes ``g``.

    Leaf labels range over all labelings, so the identity map suffices.
    """
    return tree_witness(g, bound) is not None


def verify_s2_step(k: int) -> dict:
    """Amalgamate two copies of I_k (or of the two-point identity for k=0) and compare with I_{k+1}."""
    if not 0 <= k <= 2:
        raise ResourceLimit("the amalgam step is checked for 0 <= k <= 2")
    part = identity_of(Coloring((0, 1), ((0, 1, 0),))) if k == 0 else build_Im(k)
    amalgam = eh_amalgam([part, part])
    got = identity_of(amalgam)
    want = build_Im(k + 1)
    sizes = sorted(class_sizes(got.matrix).values(), reverse=True)
    return {
        "check": "s2",
        "k": k,
        "input_size": part.size,
        "result_size": got.size,
        "result_classes": got.num_classes,
        "class_sizes": sizes,
        "expected": f"I_{k + 1}",
        "ok": got == want,
    }


__all__ = [
    "Branch",
    "SpecialSequence",
    "all_branches",
    "build_Im",
    "leaf_labeled_trees",
    "meet_coloring",
    "singleton_classes",
    "special_restriction",
    "special_sequences",
    "tree_meets",
    "tree_realizes",
    "tree_witness",
    "verify_s2_step",
    "verify_t2_pair_claim",
]
