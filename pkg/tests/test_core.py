from __future__ import annotations

import json
import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_canonical_code, brute_realizes, burnside_orbit_count
from omegaid.canon import (
    canonical_labeling,
    canonicalize,
    canonicalize_code,
    certificate,
    equivalent,
    identity_of,
    is_canonical,
    restrict,
)
from omegaid.core import (
    Coloring,
    Embedding,
    Identity,
    MalformedPartition,
    ResourceLimit,
    VIdentity,
    v_identity_from_classes,
    v_identity_of,
)
from omegaid.realize import (
    _rgs,
    enumerate_identities,
    identities_up_to,
    is_embedding,
    realized_identities,
    realized_v_identities,
    realizes,
    v_realizes,
)
from strategies import colorings


def mono(n):
    return Coloring.from_function(range(n), lambda a, b: 0)


def rainbow(n):
    pairs = {p: k for k, p in enumerate(combinations(range(n), 2))}
    return Coloring.from_function(range(n), lambda a, b: pairs[(a, b)])


TWO_ONE3 = Coloring.from_map(range(3), {(0, 1): 5, (0, 2): 5, (1, 2): 8})
MONO3 = identity_of(mono(3))
RAINBOW3 = identity_of(rainbow(3))


# -- Coloring ---------------------------------------------------------------------------


def test_coloring_rejects_partial_maps():
    with pytest.raises(ValueError):
        Coloring.from_map([0, 1, 2], {(0, 1): 0, (0, 2): 0})


def test_coloring_rejects_unsorted_or_duplicate_field():
    with pytest.raises(ValueError):
        Coloring((1, 0), ((0, 1, 0),))
    with pytest.raises(ValueError):
        Coloring((0, 0), ())


def test_coloring_rejects_negative_colors():
    with pytest.raises(ValueError):
        Coloring((0, 1), ((0, 1, -1),))


def test_coloring_json_round_trip_is_byte_stable():
    c = Coloring.from_map([3, 7, 9], {(3, 7): 2, (3, 9): 0, (7, 9): 2})
    text = json.dumps(c.to_json(), sort_keys=True)
    assert json.dumps(Coloring.from_json(json.loads(text)).to_json(), sort_keys=True) == text


# -- identity_of and canonical forms ----------------------------------------------------


def test_identity_of_single_edge():
    ident = identity_of(Coloring.from_map([3, 7], {(3, 7): 9}))
    assert ident.size == 2 and ident.classes == (((0, 1),),)


def test_identity_of_two_one_pattern():
    ident = identity_of(TWO_ONE3)
    assert ident.to_json() == {"size": 3, "classes": [[[0, 1], [0, 2]], [[1, 2]]]}


def test_identity_of_ignores_color_names():
    renamed = TWO_ONE3.recolor({5: 100, 8: 3})
    assert identity_of(renamed) == identity_of(TWO_ONE3)


def test_canonicalize_one_vertex():
    ident = canonicalize(1, [])
    assert ident.size == 1 and ident.classes == ()


def test_mono3_is_canonical_under_relabeling():
    for pi in permutations(range(3)):
        blocks = [[(pi[a], pi[b]) for a, b in combinations(range(3), 2)]]
        assert canonicalize(3, blocks) == MONO3


def test_two_one_labelings_agree():
    shared_first = canonicalize(3, [[(0, 1), (0, 2)], [(1, 2)]])
    shared_last = canonicalize(3, [[(0, 2), (1, 2)], [(0, 1)]])
    assert shared_first == shared_last
    # oracle: minimum over the six permutations
    assert shared_first.code == brute_canonical_code(3, lambda a, b: 0 if 2 in (a, b) else 1)


def test_canonicalize_rejects_bad_partitions():
    with pytest.raises(MalformedPartition):
        canonicalize(3, [[(0, 1)], [(0, 2)]])
    with pytest.raises(MalformedPartition):
        canonicalize(3, [[(0, 1), (0, 2)], [(0, 1), (1, 2)]])
    with pytest.raises(MalformedPartition):
        canonicalize(3, [[(0, 1), (0, 2), (1, 2)], []])
    with pytest.raises(MalformedPartition):
        canonicalize(3, [[(0, 1), (0, 2), (1, 3)]])


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_canonical_code_matches_brute_force(n):
    rng = random.Random(n)
    for _ in range(150):
        k = rng.randint(1, 4)
        cols = {p: rng.randrange(k) for p in combinations(range(n), 2)}
        c = Coloring.from_map(range(n), cols)
        assert identity_of(c).code == brute_canonical_code(n, lambda a, b: cols[(min(a, b), max(a, b))])


def test_canonical_labeling_reproduces_code():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 6)
        cols = {p: rng.randrange(3) for p in combinations(range(n), 2)}
        c = Coloring.from_map(range(n), cols)
        order = canonical_labeling(c)
        seq = [c.color(order[i], order[j]) for i, j in combinations(range(n), 2)]
        from helpers import first_appearance

        assert first_appearance(seq) == identity_of(c).code


def test_canonicalize_idempotent_size_four_exhaustive():
    for n in range(1, 5):
        for code in _rgs(n * (n - 1) // 2):
            ident = canonicalize_code(n, code)
            assert is_canonical(ident)
            assert canonicalize(n, ident.classes) == ident


def test_identity_json_round_trip():
    for ident in identities_up_to(4):
        text = ident.dumps()
        assert Identity.from_json(json.loads(text)) == ident
        assert Identity.from_json(json.loads(text)).dumps() == text


def test_videntity_json_keeps_order():
    v = v_identity_from_classes(3, [[(0, 2), (1, 2)], [(0, 1)]])
    assert v.code == (0, 1, 1)
    assert VIdentity.from_json(v.to_json()) == v


@given(colorings(labels=True), st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_identity_invariant_under_renaming_and_order_isomorphism(c, rnd):
    palette = sorted(c.palette)
    targets = rnd.sample(range(100), len(palette))
    recolored = c.recolor(dict(zip(palette, targets)))
    shifted = recolored.relabel({v: 3 * v + 1 for v in c.field})
    assert identity_of(shifted) == identity_of(c)
    assert v_identity_of(shifted) == v_identity_of(c)


@given(colorings(max_size=6), st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_certificate_is_an_isomorphism_invariant(c, rnd):
    perm = list(c.field)
    rnd.shuffle(perm)
    moved = c.relabel(dict(zip(c.field, perm)))
    assert certificate(moved) == certificate(c)
    assert (certificate(moved) == certificate(rainbow(len(c.field)))) == \
        (identity_of(c) == identity_of(rainbow(len(c.field))))


def test_large_identity_canonicalizes_quickly():
    from omegaid.tree import build_Im, meet_coloring, all_branches

    c = meet_coloring(all_branches(4))
    rnd = random.Random(0)
    perm = list(c.field)
    rnd.shuffle(perm)
    assert identity_of(c.relabel(dict(zip(c.field, perm)))) == build_Im(3)


# -- realization ------------------------------------------------------------------------


def test_mono_realizes_everything_small():
    for ident in identities_up_to(3):
        emb = realizes(mono(3), ident)
        assert emb is not None and is_embedding(mono(3), ident, emb)


def test_rainbow_does_not_realize_mono3():
    assert realizes(rainbow(3), MONO3) is None
    assert brute_realizes(3, rainbow(3).color, 3, lambda a, b: 0) is None


def test_k22_witness_realizes_I1():
    x, y, z, b = 10, 11, 12, 13
    cols = {(x, z): 0, (y, z): 0, (x, b): 0, (y, b): 0, (x, y): 1, (z, b): 2}
    f = Coloring.from_map([x, y, z, b], cols)
    from omegaid.tree import build_Im, meet_coloring

    tree_coloring = meet_coloring(["00", "01", "10", "11"])
    emb = realizes(f, build_Im(1))
    assert emb is not None and is_embedding(f, build_Im(1), emb)
    named = Embedding({0: x, 1: y, 2: z, 3: b})  # 00, 01, 10, 11 in lexicographic order
    assert is_embedding(f, tree_coloring, named)


def test_realizes_reports_size_mismatch_as_none():
    assert realizes(mono(2), MONO3) is None


def test_v_realizes_single_vertex_goes_to_min():
    f = Coloring.from_map([4, 6, 9], {(4, 6): 0, (4, 9): 0, (6, 9): 1})
    emb = v_realizes(f, VIdentity(1, ()))
    assert emb.map == {0: 4}


def test_v_realizes_respects_order():
    f = Coloring.from_map([0, 1, 2], {(0, 1): 0, (0, 2): 0, (1, 2): 1})
    same = v_identity_from_classes(3, [[(0, 1), (0, 2)], [(1, 2)]])
    flipped = v_identity_from_classes(3, [[(0, 2), (1, 2)], [(0, 1)]])
    assert v_realizes(f, same).map == {0: 0, 1: 1, 2: 2}
    assert v_realizes(f, flipped) is None
    # unordered realization still finds it
    assert realizes(f, flipped) is not None


def test_embedding_validates_itself():
    with pytest.raises(ValueError):
        Embedding({0: 1, 1: 1})
    with pytest.raises(ValueError):
        Embedding({0: 2, 1: 1}, order_preserving=True)


@given(colorings(max_size=5), colorings(max_size=4))
@settings(max_examples=120, deadline=None)
def test_realizes_agrees_with_brute_force(f, g):
    got = realizes(f, g)
    want = brute_realizes(len(f.field), f.color, len(g.field), g.color)
    assert (got is None) == (want is None)
    if got is not None:
        assert is_embedding(f, g, got)


@given(colorings(max_size=5))
@settings(max_examples=60, deadline=None)
def test_realizes_is_reflexive(f):
    assert realizes(f, f) is not None
    assert v_realizes(f, v_identity_of(f)) is not None


@given(colorings(max_size=5))
@settings(max_examples=60, deadline=None)
def test_every_coloring_realizes_rainbows(f):
    for n in range(1, len(f.field) + 1):
        assert realizes(f, rainbow(n)) is not None


def test_equivalent_examples():
    assert equivalent(RAINBOW3, RAINBOW3)
    assert not equivalent(identity_of(TWO_ONE3), MONO3)


def test_equivalent_matches_mutual_realization_size_four():
    ids = identities_up_to(4)
    for a in ids:
        for b in ids:
            mutual = realizes(a, b) is not None and realizes(b, a) is not None
            assert equivalent(a, b) == mutual


# -- restriction and realized sets -------------------------------------------------------


def test_restrict_examples():
    from omegaid.tree import build_Im

    i1 = build_Im(1)
    assert restrict(RAINBOW3, [0, 2]).size == 2
    subs = {restrict(i1, s) for s in combinations(range(4), 3)}
    assert subs == {identity_of(TWO_ONE3)}
    assert restrict(i1, [0, 1]).size == 2
    assert restrict(i1, []).size == 0


def test_restrict_rejects_foreign_vertices():
    with pytest.raises(ValueError):
        restrict(RAINBOW3, [0, 5])


def test_restrict_videntity_keeps_order():
    v = v_identity_from_classes(3, [[(0, 2), (1, 2)], [(0, 1)]])
    assert restrict(v, [1, 2]).code == (0,)
    assert restrict(v, [0, 1, 2]) == v


def test_realized_identities_examples():
    assert realized_identities(rainbow(3), 3) == {identity_of(rainbow(n)) for n in (1, 2, 3)}
    assert realized_identities(mono(3), 3) == set(identities_up_to(3))
    assert realized_identities(TWO_ONE3, 1) == {identity_of(mono(1))}


@given(colorings(max_size=5))
@settings(max_examples=40, deadline=None)
def test_realized_identities_are_realized(f):
    found = realized_identities(f, len(f.field))
    for g in found:
        assert realizes(f, g) is not None
    for g in identities_up_to(min(3, len(f.field))):
        assert (g in found) == (realizes(f, g) is not None)


@given(colorings(max_size=4))
@settings(max_examples=40, deadline=None)
def test_realized_v_identities_are_v_realized(f):
    for v in realized_v_identities(f, len(f.field)):
        assert v_realizes(f, v) is not None


# -- enumeration ------------------------------------------------------------------------


def test_enumeration_counts_small():
    assert [len(enumerate_identities(n)) for n in (1, 2, 3)] == [1, 1, 3]
    assert set(enumerate_identities(3)) == {MONO3, RAINBOW3, identity_of(TWO_ONE3)}


def test_enumeration_size_four_matches_orbit_count():
    assert len(enumerate_identities(4)) == burnside_orbit_count(4)


def test_enumeration_is_sorted_and_canonical():
    ids = enumerate_identities(4)
    assert [i.code for i in ids] == sorted(i.code for i in ids)
    assert all(is_canonical(i) for i in ids)


def test_enumeration_bound():
    with pytest.raises(ResourceLimit):
        enumerate_identities(7)
    with pytest.raises(ValueError):
        enumerate_identities(0)


def test_mutual_realization_forces_equal_size():
    from omegaid.realize import identities_up_to

    idents = identities_up_to(4)
    for f in idents:
        for g in idents:
            if f.size != g.size:
                assert realizes(f, g) is None or realizes(g, f) is None
