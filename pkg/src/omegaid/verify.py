"""
Desk-scale verification reports.

Each ``criterion_*`` function runs one acceptance check and returns a JSON
report with an ``ok`` flag. ``run_all`` runs them in order; the CLI's
``verify all`` and the acceptance tests both go through here.
"""

from __future__ import annotations

import random
import time
from itertools import combinations, permutations
from typing import Callable, Optional

from .canon import canonical_code, canonicalize_code, equivalent, identity_of
from .closure import generate_ide, generate_idm, membership
from .core import Coloring, Embedding, Identity, pairs_of
from .forcing import (
    amalgamate,
    builtin_family,
    given,
    membership_oracle,
    verify_lemma_qq,
    verify_t2_kernel,
)
from .realize import _rgs, enumerate_identities, identities_up_to, is_embedding, realizes
from .tree import build_Im, tree_realizes, verify_s2_step, verify_t2_pair_claim

AUDIT_SEED = 20240611
AUDIT_SAMPLE = 4000
RANDOM_SEED = 1729


def orbit_count(n: int) -> int:
    """Number of pair partitions of ``{0..n-1}`` up to vertex permutation, by explicit orbits.

    Every partition is mapped to the set of its images under all permutations;
    the count of distinct image sets is the orbit count. Shares no code with
    the canonical search.
    """
    pairs = list(combinations(range(n), 2))
    perms = list(permutations(range(n)))
    orbits = set()
    for code in _rgs(len(pairs)):
        blocks: dict[int, list] = {}
        for p, b in zip(pairs, code):
            blocks.setdefault(b, []).append(p)
        part = frozenset(frozenset(blk) for blk in blocks.values())
        images = []
        for pi in perms:
            images.append(frozenset(
                frozenset(tuple(sorted((pi[a], pi[b]))) for a, b in blk) for blk in part
            ))
        orbits.add(min(images, key=lambda s: sorted(sorted(b) for b in s)))
    return len(orbits)


def _timed(fn: Callable[[], dict]) -> dict:
    t = time.perf_counter()
    report = fn()
    report["seconds"] = round(time.perf_counter() - t, 3)
    return report


def criterion_1() -> dict:
    counts = {n: len(enumerate_identities(n)) for n in (1, 2, 3, 4)}
    oracle = orbit_count(4)
    ok = counts[1] == 1 and counts[2] == 1 and counts[3] == 3 and counts[4] == oracle
    return {"criterion": 1, "name": "identity counts", "counts": counts, "orbit_count_4": oracle, "ok": ok}


def criterion_2() -> dict:
    steps = [verify_s2_step(k) for k in (0, 1, 2)]
    return {"criterion": 2, "name": "amalgam constructions of I_1..I_3", "steps": steps,
            "ok": all(s["ok"] for s in steps)}


MONO3 = identity_of(Coloring.from_function(range(3), lambda a, b: 0))


def criterion_3() -> dict:
    i1 = build_Im(1)
    pos = membership(i1, "IDM", witness_bound=4, depth_budget=3)
    pos_ok = hasattr(pos, "witness") and len(pos.witness.coloring.field) <= 4 and len(pos.witness.trace) <= 3
    if pos_ok:
        pos_ok = pos.witness.replay() == pos.witness.coloring and \
            is_embedding(pos.witness.coloring, i1, pos.embedding)
    neg = membership(MONO3, "IDM", witness_bound=8)
    neg_ok = not hasattr(neg, "witness") and neg.exhausted
    tree_ok = not tree_realizes(MONO3)
    return {"criterion": 3, "name": "IDM membership", "I_1": pos.to_json(), "Mono3": neg.to_json(),
            "Mono3_tree_refuted": tree_ok, "ok": bool(pos_ok and neg_ok and tree_ok)}


def tree_idm_agreement(max_size: int = 4, witness_bound: int = 8) -> dict:
    cat = generate_idm(max_size, witness_bound)
    rows = {}
    mismatches = []
    for n in range(1, max_size + 1):
        ids = enumerate_identities(n)
        tree = {g for g in ids if tree_realizes(g)}
        idm = cat.members("IDM", n)
        rows[n] = {"identities": len(ids), "tree": len(tree), "idm": len(idm)}
        for g in sorted(tree ^ idm, key=lambda x: x.code):
            mismatches.append({"identity": g.to_json(), "tree": g in tree, "idm": g in idm})
    return {"check": "tree-idm", "max_size": max_size, "witness_bound": witness_bound,
            "catalog_complete": cat.complete, "sizes": rows, "mismatches": mismatches,
            "ok": cat.complete and not mismatches}


def criterion_4() -> dict:
    rep = tree_idm_agreement(4, 8)
    rep.update({"criterion": 4, "name": "tree oracle agrees with bounded IDM"})
    return rep


def criterion_5(max_size: int = 5, witness_bound: int = 8) -> dict:
    idm = generate_idm(max_size, witness_bound)
    ide = generate_ide(max_size, witness_bound)
    sizes = {}
    ok = True
    for n in range(1, max_size + 1):
        e, m = ide.members("IDE", n), idm.members("IDM", n)
        sizes[n] = {"IDE": len(e), "IDM": len(m), "subset": e <= m}
        ok = ok and e <= m
    return {"criterion": 5, "name": "IDE within IDM", "witness_bound": witness_bound, "sizes": sizes, "ok": ok}


def criterion_6() -> dict:
    counts = {}
    claims = {}
    from .tree import special_sequences

    for m in (1, 2):
        counts[m] = len(special_sequences(m))
    for m in (1, 2, 3, 4):
        r = verify_t2_pair_claim(m, profiles=False)
        claims[m] = {"sequences": r["sequences"], "passed": r["passed"]}
    ok = counts == {1: 8, 2: 64} and all(c["passed"] == c["sequences"] for c in claims.values())
    return {"criterion": 6, "name": "special sequences", "counts": counts, "pair_claim": claims, "ok": ok}


def criterion_7(seed: int = AUDIT_SEED) -> dict:
    exhaustive = verify_lemma_qq(1, 5, 2)
    audit = verify_lemma_qq(1, 8, 3, sample=AUDIT_SAMPLE, seed=seed)
    for r in (exhaustive, audit):
        r.pop("violations_detail", None)
    ok = exhaustive["ok"] and exhaustive["exhaustive"] and audit["ok"]
    return {"criterion": 7, "name": "one-point extensions avoid special embeddings",
            "exhaustive": exhaustive, "audit": audit, "ok": ok}


def criterion_8() -> dict:
    rep = verify_t2_kernel(1, 5, 2, builtin_family())
    exhaustive = all(not r["generation"]["truncated"] and not r["generation"]["sampled"] for r in rep["runs"])
    rep.update({"criterion": 8, "name": "t2 kernel", "ok": rep["ok"] and exhaustive})
    return rep


def _random_coloring(rng: random.Random, n: int, palette: int) -> Coloring:
    return Coloring.from_function(range(n), lambda a, b: rng.randrange(palette))


def _random_sub(rng: random.Random, f: Coloring) -> Coloring:
    """A coloring realized by ``f``: a shuffled subset with some classes split."""
    k = rng.randint(1, len(f.field))
    verts = rng.sample(list(f.field), k)
    split = {c: rng.random() < 0.3 for c in f.palette}
    fresh = f.max_color() + 1
    colors = {}
    for i, j in combinations(range(k), 2):
        col = f.color(verts[i], verts[j])
        if split.get(col):
            colors[(i, j)] = fresh
            fresh += 1
        else:
            colors[(i, j)] = col
    return Coloring.from_map(range(k), colors)


def criterion_9(triples: int = 1000, seed: int = RANDOM_SEED) -> dict:
    rng = random.Random(seed)
    refl_fail = trans_fail = 0
    chained = 0
    for _ in range(triples):
        f = _random_coloring(rng, rng.randint(1, 5), rng.randint(1, 3))
        if rng.random() < 0.7:
            g = _random_sub(rng, f)
            h = _random_sub(rng, g)
        else:
            g = _random_coloring(rng, rng.randint(1, 5), rng.randint(1, 3))
            h = _random_coloring(rng, rng.randint(1, 5), rng.randint(1, 3))
        for x in (f, g, h):
            e = realizes(x, x)
            if e is None or not is_embedding(x, x, e):
                refl_fail += 1
        e1, e2 = realizes(f, g), realizes(g, h)
        if e1 is not None and e2 is not None:
            chained += 1
            comp = Embedding({v: e1.map[e2.map[v]] for v in h.field})
            if not is_embedding(f, h, comp) or realizes(f, h) is None:
                trans_fail += 1
    ids = identities_up_to(4)
    equiv_fail = 0
    for a in ids:
        for b in ids:
            mutual = realizes(a, b) is not None and realizes(b, a) is not None
            if equivalent(a, b) != mutual:
                equiv_fail += 1
    idem_fail = 0
    checked = 0
    for n in range(1, 6):
        for code in _rgs(n * (n - 1) // 2):
            first = canonicalize_code(n, code)
            again = Identity(n, canonical_code(first.matrix)[0])
            checked += 1
            if again != first:
                idem_fail += 1
    ok = not (refl_fail or trans_fail or equiv_fail or idem_fail)
    return {"criterion": 9, "name": "core algebra properties", "seed": seed, "triples": triples,
            "chained_triples": chained, "reflexivity_failures": refl_fail,
            "transitivity_failures": trans_fail, "equivalence_pairs": len(ids) ** 2,
            "equivalence_failures": equiv_fail, "partitions_canonicalized": checked,
            "idempotence_failures": idem_fail, "ok": ok}


def duplication_as_amalgam(f: Coloring, tup: tuple[int, ...]) -> dict:
    """Compare ``duplicate(f, tup)`` with the amalgam of ``f`` and a shifted copy.

    Vertex ``a`` of ``f`` becomes ``2a``; the copy moves each ``a_i`` in ``tup``
    to ``2a_i + 1`` and keeps the rest, so the two conditions are
    order-isomorphic and differ exactly on the duplicated points.
    """
    from .closure import duplicate

    doubled = f.relabel({a: 2 * a for a in f.field})
    moved = {a: 2 * a + 1 if a in tup else 2 * a for a in f.field}
    copy = f.relabel(moved)
    p0, p1 = given(doubled), given(copy)
    amal = amalgamate(p0, p1, membership_oracle())
    dup = duplicate(f, tup)
    top = f.field[-1]
    rename = {a: 2 * a for a in f.field}
    for i, a in enumerate(tup):
        rename[top + 1 + i] = 2 * a + 1
    expected = dup.relabel(rename)
    same = amal is not None and amal.c.pattern() == expected.pattern() and amal.c.field == expected.field
    return {"field": list(f.field), "tuple": list(tup), "amalgam_found": amal is not None, "ok": same}


def criterion_10(cases: int = 100, seed: int = RANDOM_SEED) -> dict:
    rng = random.Random(seed)
    failures = []
    for _ in range(cases):
        n = rng.randint(1, 5)
        f = _random_coloring(rng, n, rng.randint(1, 4))
        k = rng.randint(1, n)
        tup = tuple(rng.sample(list(f.field), k))
        res = duplication_as_amalgam(f, tup)
        if not res["ok"]:
            failures.append({"coloring": f.to_json(), **res})
    return {"criterion": 10, "name": "duplication equals amalgam with a copy", "cases": cases,
            "seed": seed, "failures": failures, "ok": not failures}


CRITERIA: dict[int, Callable[[], dict]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}

TIME_LIMITS = {1: 60, 2: 300, 3: 60, 4: 600, 5: 600, 6: 60, 7: 900, 8: 900, 9: 300, 10: 120}


def run_criterion(k: int) -> dict:
    rep = _timed(CRITERIA[k])
    rep["time_limit"] = TIME_LIMITS[k]
    rep["within_time"] = rep["seconds"] < TIME_LIMITS[k]
    rep["ok"] = bool(rep["ok"] and rep["within_time"])
    return rep


def run_all(only: Optional[list[int]] = None) -> dict:
    reports = [run_criterion(k) for k in (only or sorted(CRITERIA))]
    return {"check": "all", "criteria": reports, "ok": all(r["ok"] for r in reports)}
