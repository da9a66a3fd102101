"""
A finite model of the historical-forcing conditions over a universe ``{0..N-1}``.

A condition is a coloring ``c`` of the pairs of a finite ``u``. New conditions
come from one-point extensions (a new top point whose pairs all get fresh,
distinct colors) and from amalgams of two order-isomorphic conditions whose
diverging points escape a definability oracle.

Conditions are compared up to color renaming only; vertex labels matter.
Amalgam clause 2 asks for equal colors along the order isomorphism, which we
read modulo renaming: the right-hand colors are carried over to the left-hand
names through the matching before the amalgam is built.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence, Union

from .core import Coloring, Embedding
from .realize import all_embeddings


class IncompatibleConditions(ValueError):
    """Two conditions assign different colors to a pair they share."""


class DanglingProvenance(ValueError):
    """A provenance record does not lead back to valid parents."""


# -- definability oracles ---------------------------------------------------------------


@dataclass(frozen=True)
class DefinabilityOracle:
    """A predicate ``rel(b, abar)``: is ``b`` small-definable over the finite set ``abar``."""

    name: str
    rel: Callable[[int, frozenset], bool] = field(compare=False)
    params: tuple = ()
    reflexive: bool = True

    def __call__(self, b: int, abar: Iterable[int]) -> bool:
        return bool(self.rel(b, frozenset(abar)))

    def contract_violations(self, universe: int, max_set: int = 3) -> list[dict]:
        """Reflexivity and monotonicity failures over small subsets of the universe."""
        pts = range(universe)
        subsets = [frozenset(s) for k in range(max_set + 1) for s in combinations(pts, k)]
        bad = []
        for s in subsets:
            for b in pts:
                val = self(b, s)
                if self.reflexive and b in s and not val:
                    bad.append({"property": "reflexive", "b": b, "set": sorted(s)})
                if val:
                    for x in pts:
                        if x not in s and len(s) < max_set and not self(b, s | {x}):
                            bad.append({"property": "monotone", "b": b, "set": sorted(s), "added": x})
        return bad

    def to_json(self) -> dict:
        return {"name": self.name, "params": [list(p) if isinstance(p, tuple) else p for p in self.params]}


def membership_oracle() -> DefinabilityOracle:
    return DefinabilityOracle("membership", lambda b, s: b in s)


def interval_oracle() -> DefinabilityOracle:
    return DefinabilityOracle("interval", lambda b, s: bool(s) and b <= max(s))


def table_oracle(relation: Iterable[tuple[int, Iterable[int]]]) -> DefinabilityOracle:
    """Least reflexive, monotone relation containing the listed ``(b, abar)`` facts."""
    facts = tuple(sorted((int(b), tuple(sorted(set(s)))) for b, s in relation))
    bases: dict[int, list[frozenset]] = {}
    for b, s in facts:
        bases.setdefault(b, []).append(frozenset(s))

    def rel(b, s):
        return b in s or any(base <= s for base in bases.get(b, ()))

    return DefinabilityOracle("table", rel, facts)


def never_oracle() -> DefinabilityOracle:
    # Constant false: monotone but not reflexive, kept for the side-condition check.
    return DefinabilityOracle("never", lambda b, s: False, reflexive=False)


def always_oracle() -> DefinabilityOracle:
    return DefinabilityOracle("always", lambda b, s: True)


BUILTIN_ORACLES = {
    "membership": membership_oracle,
    "interval": interval_oracle,
    "never": never_oracle,
    "always": always_oracle,
}


def oracle_from_spec(name: str, table: Optional[Sequence] = None) -> DefinabilityOracle:
    if name == "table":
        return table_oracle(table or [])
    try:
        return BUILTIN_ORACLES[name]()
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}") from None


def builtin_family() -> list[DefinabilityOracle]:
    """Oracles used for the exhaustive kernel runs."""
    return [
        membership_oracle(),
        interval_oracle(),
        table_oracle([(2, [0]), (3, [1]), (4, [0, 1])]),
        never_oracle(),
        always_oracle(),
    ]


# -- conditions -------------------------------------------------------------------------


@dataclass(frozen=True)
class Singleton:
    point: int

    def to_json(self) -> dict:
        return {"kind": "singleton", "point": self.point}


@dataclass(frozen=True)
class Given:
    """A condition supplied from outside the hierarchy (for example a test input)."""

    def to_json(self) -> dict:
        return {"kind": "given"}


@dataclass(frozen=True)
class OnePoint:
    parent: "Condition"
    new_point: int

    def to_json(self) -> dict:
        return {"kind": "one_point", "parent": self.parent.to_json(), "new_point": self.new_point}


@dataclass(frozen=True)
class Amalgam:
    left: "Condition"
    right: "Condition"
    matching: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"kind": "amalgam", "left": self.left.to_json(), "right": self.right.to_json(),
                "matching": [list(m) for m in self.matching]}


Provenance = Union[Singleton, Given, OnePoint, Amalgam]


@dataclass(frozen=True, eq=False)
class Condition:
    u: tuple[int, ...]
    c: Coloring
    level: int
    provenance: Provenance

    @property
    def key(self) -> tuple:
        """Identity of the condition up to color renaming."""
        return (self.u, self.c.pattern())

    def __eq__(self, other):
        return isinstance(other, Condition) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Condition(u={self.u}, pattern={self.c.pattern()}, level={self.level})"

    def extends(self, other: "Condition") -> bool:
        """``self <= other``: ``u`` and ``c`` both extend, modulo renaming the colors of ``other``."""
        if not set(other.u) <= set(self.u):
            return False
        return self.c.restrict(other.u).pattern() == other.c.pattern()

    def to_json(self) -> dict:
        return {"u": list(self.u), "colors": [[a, b, c] for a, b, c in self.c.edges],
                "level": self.level, "provenance": self.provenance.to_json()}


def singleton(point: int) -> Condition:
    return Condition((point,), Coloring((point,), ()), 0, Singleton(point))


def given(c: Coloring) -> Condition:
    """Wrap a coloring as a condition at level 0 with no construction history."""
    return Condition(tuple(c.field), c, 0, Given())


def condition_from_json(data: dict) -> Condition:
    """Rebuild a condition and its provenance chain from JSON."""
    prov = data["provenance"]
    kind = prov.get("kind")
    if kind == "singleton":
        p = Singleton(int(prov["point"]))
    elif kind == "given":
        p = Given()
    elif kind == "one_point":
        p = OnePoint(condition_from_json(prov["parent"]), int(prov["new_point"]))
    elif kind == "amalgam":
        p = Amalgam(condition_from_json(prov["left"]), condition_from_json(prov["right"]),
                    tuple(tuple(m) for m in prov["matching"]))
    else:
        raise DanglingProvenance(f"unknown provenance kind {kind!r}")
    u = tuple(data["u"])
    return Condition(u, Coloring(u, tuple(tuple(e) for e in data["colors"])), int(data["level"]), p)


def one_point_extend(q: Condition, r: int) -> Condition:
    if r <= q.u[-1]:
        raise ValueError("new point must lie above the condition")
    fresh = q.c.max_color() + 1
    colors = dict(q.c._lookup)
    for k, x in enumerate(q.u):
        colors[(x, r)] = fresh + k
    u = q.u + (r,)
    return Condition(u, Coloring.from_map(u, colors), q.level + 1, OnePoint(q, r))


def one_point_extensions(q: Condition, N: int) -> list[Condition]:
    """One extension per new top point ``r`` with ``max(u) < r < N``."""
    return [one_point_extend(q, r) for r in range(q.u[-1] + 1, N)]


def _transport(p0: Condition, p1: Condition) -> Optional[dict[int, int]]:
    """Color map carrying ``c1`` onto ``c0`` along the order isomorphism, if clause 2 holds."""
    sigma: dict[int, int] = {}
    back: dict[int, int] = {}
    for (a0, b0), (a1, b1) in zip(combinations(p0.u, 2), combinations(p1.u, 2)):
        x, y = p0.c.color(a0, b0), p1.c.color(a1, b1)
        if sigma.setdefault(y, x) != x or back.setdefault(x, y) != y:
            return None
    return sigma


def _shared_conflict(p0: Condition, p1: Condition, sigma: dict[int, int]) -> Optional[tuple[int, int]]:
    shared = sorted(set(p0.u) & set(p1.u))
    for a, b in combinations(shared, 2):
        if p0.c.color(a, b) != sigma[p1.c.color(a, b)]:
            return (a, b)
    return None


def amalgamate(p0: Condition, p1: Condition, oracle: DefinabilityOracle) -> Optional[Condition]:
    """The amalgam of ``p0`` and ``p1`` or ``None`` when a clause fails.

    Raises ``IncompatibleConditions`` when the carried-over colors of ``p1``
    disagree with ``p0`` on a pair both contain.
    """
    if len(p0.u) != len(p1.u):
        raise ValueError("amalgam needs conditions of equal size")
    matching = tuple(zip(p0.u, p1.u))
    if any(i0 > i1 for i0, i1 in matching):
        return None
    u0 = frozenset(p0.u)
    if any(i0 != i1 and oracle(i1, u0) for i0, i1 in matching):
        return None
    sigma = _transport(p0, p1)
    if sigma is None:
        return None
    bad = _shared_conflict(p0, p1, sigma)
    if bad is not None:
        raise IncompatibleConditions(f"pair {bad} is colored differently by the two conditions")
    u = tuple(sorted(u0 | set(p1.u)))
    colors = dict(p0.c._lookup)
    for a, b, col in p1.c.edges:
        colors[(a, b)] = sigma[col]
    fresh = p0.c.max_color() + 1
    for a, b in combinations(u, 2):
        if (a, b) not in colors:
            colors[(a, b)] = fresh
            fresh += 1
    return Condition(u, Coloring.from_map(u, colors), max(p0.level, p1.level) + 1,
                     Amalgam(p0, p1, matching))


def _try_amalgam(p0: Condition, p1: Condition, oracle: DefinabilityOracle) -> Optional[Condition]:
    try:
        return amalgamate(p0, p1, oracle)
    except IncompatibleConditions:
        return None


def extension_order(p: Condition, q: Condition) -> bool:
    """``p <= q`` in the forcing order."""
    return p.extends(q)


# -- validation -------------------------------------------------------------------------


def _fail(clause: str, detail: str) -> dict:
    return {"ok": False, "clause": clause, "detail": detail}


def _check_one_point(p: Condition, parent: Condition, r: int) -> Optional[dict]:
    if not parent.u or r <= parent.u[-1]:
        return _fail("one-point: new point above u", f"r={r} is not above {list(parent.u)}")
    if p.u != parent.u + (r,):
        return _fail("one-point: u = u_parent + {r}", f"u={list(p.u)}")
    if any(p.c.color(a, b) != col for a, b, col in parent.c.edges):
        return _fail("one-point: c extends c_parent", "a parent pair changed color")
    old = parent.c.palette
    new = [p.c.color(x, r) for x in parent.u]
    if any(col in old for col in new):
        return _fail("one-point clause 1: new pairs avoid rng(c_parent)", f"colors {new}")
    if len(set(new)) != len(new):
        return _fail("one-point clause 2: new pairs are unique colors", f"colors {new}")
    return None


def _check_amalgam(p: Condition, p0: Condition, p1: Condition, matching, oracle) -> Optional[dict]:
    if len(p0.u) != len(p1.u) or tuple(matching) != tuple(zip(p0.u, p1.u)):
        return _fail("amalgam clause 1: increasing enumerations", f"matching {list(matching)}")
    sigma = _transport(p0, p1)
    if sigma is None:
        return _fail("amalgam clause 2: equal colors along the matching", "patterns differ")
    for i0, i1 in matching:
        if i0 > i1:
            return _fail("amalgam clause 3: left index <= right index", f"{i0} > {i1}")
    if oracle is not None:
        for i0, i1 in matching:
            if i0 != i1 and oracle(i1, p0.u):
                return _fail("amalgam clause 4: diverging right point not definable over u0",
                             f"{i1} R {list(p0.u)}")
    if set(p.u) != set(p0.u) | set(p1.u):
        return _fail("amalgam clause 5: u = u0 + u1", f"u={list(p.u)}")
    for a, b, col in p0.c.edges:
        if p.c.color(a, b) != col:
            return _fail("amalgam clause 6: c extends c0", f"pair {(a, b)}")
    for a, b, col in p1.c.edges:
        if p.c.color(a, b) != sigma[col]:
            return _fail("amalgam clause 6: c extends c1", f"pair {(a, b)}")
    s0, s1 = set(p0.u), set(p1.u)
    inner = lambda a, b: {a, b} <= s0 or {a, b} <= s1
    old = p0.c.palette | {sigma[x] for x in p1.c.palette}
    seen: dict[int, tuple[int, int]] = {}
    for a, b, col in p.c.edges:
        if inner(a, b):
            continue
        if col in old:
            return _fail("amalgam clause 7: cross pairs avoid rng(c0) + rng(c1)", f"pair {(a, b)} color {col}")
        if col in seen:
            return _fail("amalgam clause 8: cross pair colors are unique", f"pairs {seen[col]} and {(a, b)}")
        seen[col] = (a, b)
    return None


def validate_condition(p: Condition, oracle: Optional[DefinabilityOracle] = None) -> dict:
    """Replay the provenance of ``p`` and check every construction step.

    Without an oracle, amalgam clause 4 is not checked (reported as such).
    """
    checked = [0]
    given_steps = [0]
    memo: dict[int, Optional[dict]] = {}

    def walk(q: Condition) -> Optional[dict]:
        if id(q) in memo:
            return memo[id(q)]
        res = _walk(q)
        memo[id(q)] = res
        return res

    def _walk(q: Condition) -> Optional[dict]:
        checked[0] += 1
        if tuple(q.c.field) != tuple(q.u):
            return _fail("coloring field equals u", f"{list(q.c.field)} vs {list(q.u)}")
        prov = q.provenance
        if isinstance(prov, Singleton):
            if q.u != (prov.point,) or q.level != 0:
                return _fail("singleton: |u| = 1 at level 0", f"u={list(q.u)} level={q.level}")
            return None
        if isinstance(prov, Given):
            given_steps[0] += 1
            return None
        if isinstance(prov, OnePoint):
            bad = walk(prov.parent)
            if bad:
                return bad
            bad = _check_one_point(q, prov.parent, prov.new_point)
            if bad:
                return bad
            if q.level != prov.parent.level + 1:
                return _fail("level", f"level {q.level} after parent level {prov.parent.level}")
            if one_point_extend(prov.parent, prov.new_point).c != q.c:
                return _fail("replay", "one-point replay gives a different coloring")
            return None
        if isinstance(prov, Amalgam):
            for par in (prov.left, prov.right):
                bad = walk(par)
                if bad:
                    return bad
            bad = _check_amalgam(q, prov.left, prov.right, prov.matching, oracle)
            if bad:
                return bad
            if q.level != max(prov.left.level, prov.right.level) + 1:
                return _fail("level", f"level {q.level} after parents {prov.left.level}, {prov.right.level}")
            return None
        raise DanglingProvenance(f"unknown provenance {prov!r}")

    bad = walk(p)
    report = {"ok": bad is None, "level": p.level, "steps_checked": checked[0],
              "clause4_checked": oracle is not None, "given_bases": given_steps[0]}
    if bad:
        report["violation"] = {"clause": bad["clause"], "detail": bad["detail"]}
    return report


# -- generation -------------------------------------------------------------------------


@dataclass
class Generation:
    conditions: list[Condition]
    truncated: bool
    sampled: bool
    level_counts: list[int]

    def to_json(self) -> dict:
        return {"count": len(self.conditions), "truncated": self.truncated, "sampled": self.sampled,
                "level_counts": self.level_counts}


def generate_P(depth: int, N: int, oracle: DefinabilityOracle, budget: Optional[int] = None,
               sample: Optional[int] = None, seed: Optional[int] = None) -> Generation:
    """Levels 0..depth of the condition hierarchy over ``{0..N-1}``.

    Level k+1 adds the one-point extensions and amalgams of conditions found
    so far, deduplicated up to color renaming (each condition keeps the level
    at which it first appears). ``budget`` caps the number of conditions.
    With ``sample`` set, at most that many amalgam pairs are tried per level,
    drawn with ``seed``.
    """
    if sample is not None and seed is None:
        raise ValueError("sampled generation needs a seed")
    rng = random.Random(seed)
    found: dict[tuple, Condition] = {}
    order: list[Condition] = []
    level_counts = []
    truncated = False
    sampled = False

    def add(q: Condition) -> bool:
        nonlocal truncated
        if q.key in found:
            return True
        if budget is not None and len(order) >= budget:
            truncated = True
            return False
        found[q.key] = q
        order.append(q)
        return True

    for x in range(N):
        add(singleton(x))
    level_counts.append(len(order))
    newest = list(order)
    for _ in range(depth):
        if truncated:
            break
        before = len(order)
        current = list(order)
        for q in newest:
            for ext in one_point_extensions(q, N):
                if not add(ext):
                    break
        # Only pairs touching the previous level can give something new.
        fresh_ids = {id(q) for q in newest}
        by_shape: dict[tuple, list[Condition]] = {}
        for q in current:
            by_shape.setdefault((len(q.u), q.c.pattern()), []).append(q)
        tasks = [
            (p0, p1)
            for group in by_shape.values()
            for p0 in group
            for p1 in group
            if id(p0) in fresh_ids or id(p1) in fresh_ids
        ]
        if sample is not None and len(tasks) > sample:
            tasks = rng.sample(tasks, sample)
            sampled = True
        for p0, p1 in tasks:
            if truncated:
                break
            q = _try_amalgam(p0, p1, oracle)
            if q is not None:
                add(q)
        newest = order[before:]
        level_counts.append(len(newest))
        if not newest:
            break
    return Generation(order, truncated, sampled, level_counts)


# -- embeddings and the lemma kernels --------------------------------------------------


def special_pattern(m: int) -> Coloring:
    """I_m on a special sequence, with vertex ``i`` standing for ``eta_i``."""
    return Coloring.from_function(range(m + 2), lambda i, j: min(i, j))


def find_embeddings(p: Condition, I, side: Optional[tuple[DefinabilityOracle, int]] = None) -> list[Embedding]:
    """Embeddings of ``I`` into ``p``'s coloring.

    With ``side = (oracle, m)`` the pattern is the special-sequence restriction
    of I_m (``I`` is ignored) and only embeddings whose images of ``eta_m`` and
    ``eta_{m+1}`` are oracle-definable over the images of ``eta_0..eta_{m-1}``
    are kept.
    """
    if side is None:
        return list(all_embeddings(p.c, I))
    oracle, m = side
    out = []
    for emb in all_embeddings(p.c, special_pattern(m)):
        base = frozenset(emb.map[i] for i in range(m))
        if oracle(emb.map[m], base) and oracle(emb.map[m + 1], base):
            out.append(emb)
    return out


def verify_lemma_qq(m: int = 1, N: int = 5, depth: int = 2, oracle: Optional[DefinabilityOracle] = None,
                    sample: Optional[int] = None, seed: Optional[int] = None,
                    budget: Optional[int] = None) -> dict:
    """Embeddings of the special pattern into a one-point extension avoid the new point."""
    if m not in (1, 2):
        raise ValueError("the one-point check runs for m in {1, 2}")
    oracle = oracle or membership_oracle()
    gen = generate_P(depth, N, oracle, budget=budget, sample=sample, seed=seed)
    J = special_pattern(m)
    pairs = embeddings = 0
    violations = []
    for q in gen.conditions:
        for p in one_point_extensions(q, N):
            pairs += 1
            inside = set(q.u)
            for emb in all_embeddings(p.c, J):
                embeddings += 1
                if not emb.image() <= inside:
                    violations.append({"q": q.to_json(), "p": p.to_json(), "embedding": emb.to_json()})
    return {
        "check": "lemma-qq", "m": m, "N": N, "depth": depth, "oracle": oracle.name, "seed": seed,
        "generation": gen.to_json(), "conditions": len(gen.conditions), "extension_pairs": pairs,
        "embeddings_examined": embeddings, "violations": violations,
        "exhaustive": not (gen.truncated or gen.sampled), "ok": not violations,
    }


def amalgam_cross_pairs_unique(p: Condition) -> bool:
    """Pairs across ``u0 - u1`` and ``u1 - u0`` carry colors used nowhere else."""
    prov = p.provenance
    if not isinstance(prov, Amalgam):
        return True
    s0, s1 = set(prov.left.u), set(prov.right.u)
    counts: dict[int, int] = {}
    for _, _, col in p.c.edges:
        counts[col] = counts.get(col, 0) + 1
    for a, b, col in p.c.edges:
        cross = not ({a, b} <= s0 or {a, b} <= s1)
        if cross and counts[col] != 1:
            return False
    return True


def verify_t2_kernel(m: int = 1, N: int = 5, depth: int = 2,
                     oracles: Optional[Sequence[DefinabilityOracle]] = None,
                     sample: Optional[int] = None, seed: Optional[int] = None,
                     budget: Optional[int] = None) -> dict:
    """No generated condition admits an oracle-closed special-sequence embedding."""
    oracles = list(oracles) if oracles is not None else builtin_family()
    runs = []
    ok = True
    for oracle in oracles:
        gen = generate_P(depth, N, oracle, budget=budget, sample=sample, seed=seed)
        hits, invalid, cross_bad = [], [], []
        for p in gen.conditions:
            rep = validate_condition(p, oracle)
            if not rep["ok"]:
                invalid.append({"condition": p.to_json(), "report": rep})
            if not amalgam_cross_pairs_unique(p):
                cross_bad.append(p.to_json())
            for emb in find_embeddings(p, None, side=(oracle, m)):
                hits.append({"condition": p.to_json(), "embedding": emb.to_json()})
        run_ok = not (hits or invalid or cross_bad)
        ok = ok and run_ok
        runs.append({
            "oracle": oracle.to_json(), "reflexive": oracle.reflexive,
            "contract_violations": len(oracle.contract_violations(min(N, 5))),
            "generation": gen.to_json(), "hits": hits, "invalid": invalid,
            "cross_pair_failures": cross_bad, "ok": run_ok,
        })
    return {"check": "t2-kernel", "m": m, "N": N, "depth": depth, "seed": seed, "runs": runs, "ok": ok}


__all__ = [
    "Amalgam",
    "BUILTIN_ORACLES",
    "Condition",
    "DefinabilityOracle",
    "Generation",
    "Given",
    "IncompatibleConditions",
    "OnePoint",
    "Singleton",
    "always_oracle",
    "amalgam_cross_pairs_unique",
    "amalgamate",
    "builtin_family",
    "condition_from_json",
    "extension_order",
    "find_embeddings",
    "generate_P",
    "given",
    "interval_oracle",
    "membership_oracle",
    "never_oracle",
    "one_point_extend",
    "one_point_extensions",
    "oracle_from_spec",
    "singleton",
    "special_pattern",
    "table_oracle",
    "validate_condition",
    "verify_lemma_qq",
    "verify_t2_kernel",
]
