"""
Closure operators on colorings and bounded generation of IDM, IDE_V and IDE.

Duplication uses twin semantics: the copy ``b_i`` of ``a_i`` keeps every
color ``a_i`` has towards the untouched vertices, the copies keep the colors
among the originals, and every original/copy pair ``{a_i, b_j}`` gets its own
fresh color.

Catalogs are generated breadth-first from the one-point coloring. Every entry
carries a trace (the list of duplication steps) that rebuilds its witness
coloring exactly, so membership answers can be replayed and audited.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

from .canon import certificate, forget_order, identity_of
from .core import Coloring, Embedding, Identity, VIdentity, v_identity_of
from .realize import realized_identities, realized_v_identities, realizes

BASE = Coloring((0,), ())
CACHE_ENV = "OMEGAID_CACHE_DIR"


def duplicate(f: Coloring, tup: Sequence[int]) -> Coloring:
    """Add a twin ``b_i`` for each ``a_i`` in ``tup``, labeled above the field in tuple order."""
    tup = tuple(tup)
    if not tup:
        raise ValueError("duplication needs a nonempty tuple")
    if len(set(tup)) != len(tup):
        raise ValueError("tuple entries must be distinct")
    members = set(f.field)
    if not members.issuperset(tup):
        raise ValueError("tuple leaves the field")
    top = f.field[-1]
    twins = [top + 1 + i for i in range(len(tup))]
    fresh = f.max_color() + 1
    colors = dict(f._lookup)
    rest = [x for x in f.field if x not in set(tup)]
    for a, b in zip(tup, twins):
        for x in rest:
            colors[(x, b)] = f.color(a, x)
    for (i, a), (j, a2) in combinations(enumerate(tup), 2):
        colors[(twins[i], twins[j])] = f.color(a, a2)
    for i, a in enumerate(tup):
        for j, b in enumerate(twins):
            colors[(min(a, b), max(a, b))] = fresh
            fresh += 1
    return Coloring.from_map(list(f.field) + twins, colors)


def end_duplicate(f: Coloring, seg_len: int) -> Coloring:
    """Duplicate the final ``seg_len`` vertices; the copies form the new final segment."""
    if not 1 <= seg_len <= len(f.field):
        raise ValueError(f"segment length {seg_len} out of range 1..{len(f.field)}")
    return duplicate(f, f.field[-seg_len:])


def eh_amalgam(seq: Sequence[Union[Coloring, Identity, VIdentity]]) -> Coloring:
    """End-homogeneous amalgam on consecutive blocks ``G_1 < G_2 < ...``.

    Inputs get disjoint vertex blocks and disjoint palettes; a pair across
    blocks is colored by the least block index it touches.
    """
    if not seq:
        raise ValueError("amalgam of an empty sequence")
    parts = [x if isinstance(x, Coloring) else x.to_coloring() for x in seq]
    colors: dict[tuple[int, int], int] = {}
    block_of: dict[int, int] = {}
    offset = 0
    palette = 0
    for idx, c in enumerate(parts):
        relabel = {v: offset + k for k, v in enumerate(c.field)}
        rename: dict[int, int] = {}
        for a, b, col in c.edges:
            if col not in rename:
                rename[col] = palette + len(rename)
            colors[(relabel[a], relabel[b])] = rename[col]
        palette += len(rename)
        for v in relabel.values():
            block_of[v] = idx
        offset += len(c.field)
    verts = list(range(offset))
    for a, b in combinations(verts, 2):
        if block_of[a] != block_of[b]:
            colors[(a, b)] = palette + min(block_of[a], block_of[b])
    return Coloring.from_map(verts, colors)


def cl_step(catalog: Iterable[Identity], max_seq_len: int, max_size: int) -> set[Identity]:
    """Identities of size <= ``max_size`` that are end-homogeneous amalgams of catalog members."""
    members = sorted(set(catalog), key=lambda x: (x.size, x.code))
    out: set[Identity] = set()
    for length in range(1, max_seq_len + 1):
        for seq in product(members, repeat=length):
            if sum(m.size for m in seq) > max_size:
                continue
            out.add(identity_of(eh_amalgam(seq)))
    return out


# -- breadth-first witness closure ---------------------------------------------------

Step = tuple  # duplication tuple, or (segment length,) for end-duplication


@dataclass(frozen=True)
class Witness:
    coloring: Coloring
    trace: tuple[Step, ...]
    ordered: bool = False

    def replay(self) -> Coloring:
        return replay_trace(self.trace, self.ordered)

    def trace_json(self) -> list[dict]:
        return trace_to_json(self.trace, self.ordered)


def replay_trace(trace: Sequence[Step], ordered: bool = False) -> Coloring:
    c = BASE
    for step in trace:
        c = end_duplicate(c, step[0]) if ordered else duplicate(c, step)
    return c


def trace_to_json(trace: Sequence[Step], ordered: bool) -> list[dict]:
    if ordered:
        return [{"op": "end_duplicate", "segment": s[0]} for s in trace]
    return [{"op": "duplicate", "tuple": list(s)} for s in trace]


def trace_from_json(steps: Sequence[dict]) -> tuple[tuple[Step, ...], bool]:
    ordered = any(s["op"] == "end_duplicate" for s in steps)
    out = []
    for s in steps:
        if s["op"] == "end_duplicate":
            out.append((int(s["segment"]),))
        elif s["op"] == "duplicate":
            if ordered:
                raise ValueError("trace mixes duplication kinds")
            out.append(tuple(s["tuple"]))
        else:
            raise ValueError(f"unknown trace op {s['op']!r}")
    return tuple(out), ordered


def _moves(c: Coloring, ordered: bool, witness_bound: int, one_point_only: bool) -> Iterator[Step]:
    room = witness_bound - len(c.field)
    if ordered:
        for k in range(1, min(room, len(c.field)) + 1):
            yield (k,)
        return
    top = min(1, room) if one_point_only else room
    for k in range(1, min(top, len(c.field)) + 1):
        yield from combinations(c.field, k)


@dataclass
class ClosureRun:
    """The witnesses reached by a bounded breadth-first closure."""

    witnesses: list[Witness]
    truncated: bool
    depth_reached: int


def closure_witnesses(ordered: bool, witness_bound: int, depth_budget: Optional[int] = None,
                      one_point_only: bool = False, max_witnesses: int = 200_000,
                      stop=None) -> ClosureRun:
    """Breadth-first closure of the one-point coloring under (end-)duplication.

    Witnesses are deduplicated up to isomorphism (ordered: up to color
    renaming). ``stop(w)`` may end the search early once it returns true.
    """
    key = v_identity_of if ordered else certificate
    root = Witness(BASE, (), ordered)
    seen = {key(BASE)}
    out = [root]
    if stop is not None and stop(root):
        return ClosureRun(out, False, 0)
    frontier = deque([root])
    depth = 0
    truncated = False
    while frontier:
        if depth_budget is not None and depth >= depth_budget:
            # Unexplored moves remain only if some frontier witness has room to grow.
            truncated = any(len(w.coloring.field) < witness_bound for w in frontier)
            break
        nxt: deque[Witness] = deque()
        for w in frontier:
            for step in _moves(w.coloring, ordered, witness_bound, one_point_only):
                c = end_duplicate(w.coloring, step[0]) if ordered else duplicate(w.coloring, step)
                k = key(c)
                if k in seen:
                    continue
                seen.add(k)
                child = Witness(c, w.trace + (step,), ordered)
                out.append(child)
                nxt.append(child)
                if stop is not None and stop(child):
                    return ClosureRun(out, False, depth + 1)
                if len(out) >= max_witnesses:
                    return ClosureRun(out, True, depth + 1)
        frontier = nxt
        depth += 1
    return ClosureRun(out, truncated, depth)


@dataclass
class CatalogEntry:
    identity: Union[Identity, VIdentity]
    tags: set[str]
    witness: Witness


@dataclass
class ClassCatalog:
    """Identities per class tag and size, each with a witness and trace."""

    params: dict
    by_class: dict[str, dict[int, set]] = field(default_factory=dict)
    entries: dict[Union[Identity, VIdentity], CatalogEntry] = field(default_factory=dict)
    complete: bool = True

    def add(self, tag: str, ident, witness: Witness) -> None:
        self.by_class.setdefault(tag, {}).setdefault(ident.size, set()).add(ident)
        entry = self.entries.get(ident)
        if entry is None:
            self.entries[ident] = CatalogEntry(ident, {tag}, witness)
        else:
            entry.tags.add(tag)

    def members(self, tag: str, size: Optional[int] = None) -> set:
        sizes = self.by_class.get(tag, {})
        if size is not None:
            return set(sizes.get(size, set()))
        return set().union(*sizes.values()) if sizes else set()

    def __contains__(self, ident) -> bool:
        return ident in self.entries

    def verify_traces(self) -> list:
        """Entries whose trace does not rebuild a witness realizing them."""
        bad = []
        for ident, entry in self.entries.items():
            rebuilt = entry.witness.replay()
            if rebuilt != entry.witness.coloring or realizes(rebuilt, ident) is None:
                bad.append(ident)
        return bad

    # persistence --------------------------------------------------------------------

    def records(self) -> Iterator[dict]:
        def sort_key(item):
            ident = item[0]
            return (isinstance(ident, VIdentity), ident.size, ident.code)

        for ident, entry in sorted(self.entries.items(), key=sort_key):
            kind = "v_identity" if isinstance(ident, VIdentity) else "identity"
            yield {
                "kind": kind,
                "identity": ident.to_json(),
                "tags": sorted(entry.tags),
                "witness": entry.witness.coloring.to_json(),
                "trace": entry.witness.trace_json(),
            }

    def dump(self, path: Union[str, Path]) -> None:
        """Write JSON lines atomically: a header line, then one record per identity."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(json.dumps({"params": self.params, "complete": self.complete}, sort_keys=True) + "\n")
                for rec in self.records():
                    fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ClassCatalog":
        with open(path) as fh:
            header = json.loads(fh.readline())
            cat = cls(params=header["params"], complete=header["complete"])
            for line in fh:
                rec = json.loads(line)
                if rec["kind"] == "v_identity":
                    ident = VIdentity.from_json(rec["identity"])
                else:
                    ident = Identity.from_json(rec["identity"])
                trace, ordered = trace_from_json(rec["trace"])
                w = Witness(Coloring.from_json(rec["witness"]), trace, ordered)
                for tag in rec["tags"]:
                    cat.add(tag, ident, w)
        return cat


def cache_dir(override: Optional[Union[str, Path]] = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "omegaid"


def cache_path(cls_tag: str, max_size: int, witness_bound: int, depth_budget: Optional[int],
               directory: Optional[Union[str, Path]] = None, **extra) -> Path:
    params = {"class": cls_tag, "max_size": max_size, "witness_bound": witness_bound,
              "depth_budget": depth_budget, **extra}
    digest = hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:12]
    name = f"{cls_tag}-s{max_size}-w{witness_bound}-d{depth_budget}-{digest}.jsonl"
    return cache_dir(directory) / name


def generate_idm(max_size: int, witness_bound: int, depth_budget: Optional[int] = None,
                 one_point_only: bool = False, max_witnesses: int = 200_000) -> ClassCatalog:
    """Bounded IDM: subidentities (size <= ``max_size``) of duplication witnesses."""
    if witness_bound < max_size:
        raise ValueError("witness bound must be at least the size bound")
    run = closure_witnesses(False, witness_bound, depth_budget, one_point_only, max_witnesses)
    cat = ClassCatalog(params={"class": "IDM", "max_size": max_size, "witness_bound": witness_bound,
                               "depth_budget": depth_budget, "one_point_only": one_point_only},
                       complete=not run.truncated)
    for w in run.witnesses:
        for ident in realized_identities(w.coloring, max_size):
            if ident not in cat.entries:
                cat.add("IDM", ident, w)
    return cat


def generate_ide(max_size: int, witness_bound: int, depth_budget: Optional[int] = None,
                 max_witnesses: int = 200_000) -> ClassCatalog:
    """Bounded IDE_V (sub-V-identities of end-duplication witnesses) and its reduct IDE."""
    if witness_bound < max_size:
        raise ValueError("witness bound must be at least the size bound")
    run = closure_witnesses(True, witness_bound, depth_budget, False, max_witnesses)
    cat = ClassCatalog(params={"class": "IDE", "max_size": max_size, "witness_bound": witness_bound,
                               "depth_budget": depth_budget},
                       complete=not run.truncated)
    for w in run.witnesses:
        for v in realized_v_identities(w.coloring, max_size):
            if v not in cat.entries:
                cat.add("IDE_V", v, w)
                ident = forget_order(v)
                if ident not in cat.entries:
                    cat.add("IDE", ident, w)
    return cat


def load_or_generate(cls_tag: str, max_size: int, witness_bound: int, depth_budget: Optional[int] = None,
                     directory: Optional[Union[str, Path]] = None, use_cache: bool = True) -> ClassCatalog:
    path = cache_path(cls_tag, max_size, witness_bound, depth_budget, directory)
    if use_cache and path.exists():
        return ClassCatalog.load(path)
    if cls_tag == "IDM":
        cat = generate_idm(max_size, witness_bound, depth_budget)
    elif cls_tag == "IDE":
        cat = generate_ide(max_size, witness_bound, depth_budget)
    else:
        raise ValueError(f"unknown class {cls_tag!r}")
    if use_cache:
        cat.dump(path)
    return cat


@dataclass(frozen=True)
class Member:
    witness: Witness
    embedding: Embedding

    def to_json(self) -> dict:
        return {"status": "member", "witness": self.witness.coloring.to_json(),
                "trace": self.witness.trace_json(), "embedding": self.embedding.to_json()}


@dataclass(frozen=True)
class NotFoundWithinBounds:
    witness_bound: int
    depth_budget: Optional[int]
    witnesses_examined: int
    exhausted: bool

    def to_json(self) -> dict:
        return {"status": "not_found_within_bounds", "witness_bound": self.witness_bound,
                "depth_budget": self.depth_budget, "witnesses_examined": self.witnesses_examined,
                "exhausted": self.exhausted}


def membership(g, cls_tag: str, witness_bound: int, depth_budget: Optional[int] = None,
               max_witnesses: int = 200_000) -> Union[Member, NotFoundWithinBounds]:
    """Search the bounded closure for a witness realizing ``g``.

    Negative answers only speak for the given bounds. For IDE an unordered
    embedding suffices: pulling the witness order back along any embedding
    gives a V-embedding of some ordering of ``g``.
    """
    if cls_tag not in ("IDM", "IDE"):
        raise ValueError(f"unknown class {cls_tag!r}")
    ordered = cls_tag == "IDE"
    found: list = []

    def stop(w: Witness) -> bool:
        emb = realizes(w.coloring, g)
        if emb is not None:
            found.append(Member(w, emb))
            return True
        return False

    run = closure_witnesses(ordered, witness_bound, depth_budget, False, max_witnesses, stop=stop)
    if found:
        return found[0]
    return NotFoundWithinBounds(witness_bound, depth_budget, len(run.witnesses), not run.truncated)


def compare_duplication_modes(max_size: int, witness_bound: int) -> dict:
    """Bounded IDM from one-point duplications versus arbitrary tuples."""
    full = generate_idm(max_size, witness_bound)
    single = generate_idm(max_size, witness_bound, one_point_only=True)
    a, b = full.members("IDM"), single.members("IDM")
    return {"max_size": max_size, "witness_bound": witness_bound,
            "tuple_count": len(a), "one_point_count": len(b),
            "equal": a == b, "only_tuple": len(a - b), "only_one_point": len(b - a)}


def ide_idm_divergence(max_size: int, witness_bound: int) -> dict:
    """Per-size catalog counts for IDE and IDM and the least size where they differ."""
    idm = generate_idm(max_size, witness_bound)
    ide = generate_ide(max_size, witness_bound)
    sizes = {}
    first = None
    for n in range(1, max_size + 1):
        m, e = idm.members("IDM", n), ide.members("IDE", n)
        sizes[n] = {"IDM": len(m), "IDE": len(e), "IDE_subset_IDM": e <= m}
        if first is None and m != e:
            first = n
    return {"max_size": max_size, "witness_bound": witness_bound, "sizes": sizes, "first_divergence": first}
