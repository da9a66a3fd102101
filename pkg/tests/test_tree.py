from __future__ import annotations

from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omegaid.canon import identity_of
from omegaid.closure import generate_idm
from omegaid.core import Coloring, ResourceLimit
from omegaid.realize import enumerate_identities, identities_up_to
from omegaid.tree import (
    Branch,
    SpecialSequence,
    all_branches,
    build_Im,
    leaf_labeled_trees,
    meet_coloring,
    singleton_classes,
    special_restriction,
    special_sequences,
    tree_realizes,
    tree_witness,
    verify_s2_step,
    verify_t2_pair_claim,
)

MONO3 = identity_of(Coloring.from_function(range(3), lambda a, b: 0))
RAINBOW3 = identity_of(Coloring.from_function(range(3), lambda a, b: 3 * a + b))
TWO_ONE3 = identity_of(Coloring.from_map(range(3), {(0, 1): 0, (0, 2): 0, (1, 2): 1}))


def brute_special(m):
    """Every (m+2)-tuple of branches, filtered by the meet-length rule."""
    L = m + 1
    bs = ["".join(b) for b in product("01", repeat=L)]

    def meet(a, b):
        k = 0
        while k < L and a[k] == b[k]:
            k += 1
        return k

    return [s for s in product(bs, repeat=m + 2) if all(meet(s[i], s[i + 1]) == i for i in range(m + 1))]


# -- meet colorings ---------------------------------------------------------------------


def test_meet_coloring_four_leaves_is_I1():
    c = meet_coloring(["00", "01", "10", "11"])
    blocks = {}
    for a, b, col in c.edges:
        blocks.setdefault(col, []).append((a, b))
    assert sorted(blocks.values(), key=len) == [[(0, 1)], [(2, 3)], [(0, 2), (0, 3), (1, 2), (1, 3)]]
    assert identity_of(c) == build_Im(1)


def test_meet_coloring_three_branches_is_two_one():
    for S in combinations(all_branches(3), 3):
        assert identity_of(meet_coloring(S)) == TWO_ONE3


def test_meet_coloring_single_branch():
    c = meet_coloring(["0110"])
    assert c.field == (0,) and c.edges == ()


def test_meet_coloring_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        meet_coloring(["01", "011"])
    with pytest.raises(ValueError):
        meet_coloring([])
    with pytest.raises(ValueError):
        Branch.parse("012")


@given(st.integers(2, 5).flatmap(lambda L: st.sets(st.tuples(*[st.integers(0, 1)] * L), min_size=3, max_size=8)))
@settings(max_examples=60, deadline=None)
def test_meet_triangles_are_never_mono_or_rainbow(S):
    c = meet_coloring([Branch(b) for b in S])
    for a, b, d in combinations(c.field, 3):
        cols = {c.color(a, b), c.color(a, d), c.color(b, d)}
        assert len(cols) == 2


# -- I_m --------------------------------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_Im_class_count(m):
    ident = build_Im(m)
    assert ident.size == 2 ** (m + 1)
    assert ident.num_classes == 2 ** (m + 1) - 1


def test_Im_bounds():
    with pytest.raises(ValueError):
        build_Im(0)
    with pytest.raises(ResourceLimit):
        build_Im(4)


def test_Im_restricted_to_a_sibling_pair():
    from omegaid.canon import restrict

    assert restrict(build_Im(1), [0, 1]).size == 2


# -- special sequences ------------------------------------------------------------------


@pytest.mark.parametrize("m,count", [(1, 8), (2, 64)])
def test_special_sequence_counts(m, count):
    seqs = special_sequences(m)
    assert len(seqs) == count
    assert sorted(tuple(s.to_json()) for s in seqs) == sorted(brute_special(m))


def test_special_sequence_larger_counts():
    assert len(special_sequences(3)) == 1024
    assert len(brute_special(3)) == 1024


def test_special_sequences_revalidate():
    for s in special_sequences(2):
        assert SpecialSequence(tuple(s.to_json())) == s


def test_special_sequence_validator():
    with pytest.raises(ValueError):
        SpecialSequence(("00", "01", "11"))
    with pytest.raises(ValueError):
        SpecialSequence(("00", "10", "1"))


def test_special_restriction_single_singleton():
    s = special_sequences(1)[0]
    assert singleton_classes(s.coloring()) == [(1, 2)]
    assert identity_of(s.coloring()) == special_restriction(1)


def test_singleton_classes_examples():
    assert singleton_classes(MONO3) == []
    assert singleton_classes(RAINBOW3) == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_t2_pair_claim(m):
    rep = verify_t2_pair_claim(m)
    assert rep["ok"] and rep["passed"] == rep["sequences"] == len(special_sequences(m))
    assert len(rep["profiles"]) == rep["sequences"]
    assert rep["profiles"][0]["classes"][-1] == [[m, m + 1]]


def test_t2_pair_claim_bound():
    with pytest.raises(ResourceLimit):
        verify_t2_pair_claim(5)


def test_special_restriction_matches_Im():
    # the sequence coloring equals the restriction of the full meet coloring
    from omegaid.realize import realizes

    for m in (1, 2):
        im = build_Im(m)
        assert realizes(im, special_restriction(m)) is not None


# -- tree oracle ------------------------------------------------------------------------


def test_tree_counts():
    assert [len(list(leaf_labeled_trees(n))) for n in range(1, 7)] == [1, 1, 3, 15, 105, 945]


def test_tree_realizes_examples():
    assert tree_realizes(build_Im(1))
    assert not tree_realizes(MONO3)
    for n in range(1, 7):
        rainbow = Coloring.from_function(range(n), lambda a, b: 10 * a + b)
        assert tree_realizes(rainbow)
    with pytest.raises(ResourceLimit):
        tree_realizes(Coloring.from_function(range(7), lambda a, b: 0))


def test_tree_witness_is_a_realization():
    from omegaid.realize import is_embedding
    from omegaid.core import Embedding
    from omegaid.tree import tree_meets

    for g in identities_up_to(4):
        t = tree_witness(g)
        if t is None or g.size < 3:
            continue
        mt = tree_meets(t, g.size)
        c = Coloring.from_function(range(g.size), lambda a, b: mt[a][b])
        assert is_embedding(c, g, Embedding({i: i for i in range(g.size)}))


def test_tree_oracle_agrees_with_idm_up_to_four():
    cat = generate_idm(4, 8)
    for n in range(1, 5):
        tree = {g for g in enumerate_identities(n) if tree_realizes(g)}
        assert tree == cat.members("IDM", n)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_s2_steps(k):
    rep = verify_s2_step(k)
    assert rep["ok"]
    assert rep["result_size"] == 2 ** (k + 2)
    assert rep["result_classes"] == 2 ** (k + 2) - 1
