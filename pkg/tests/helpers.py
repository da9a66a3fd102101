"""Independent reference implementations used as test oracles.

Nothing here imports the search code under test; everything is brute force.
"""

from __future__ import annotations

from itertools import combinations, permutations


def first_appearance(seq):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in seq)


def brute_canonical_code(n, color):
    """Least first-appearance sequence over all vertex permutations.

    ``color(i, j)`` gives the class of pair ``{i, j}`` on ``0..n-1``.
    """
    pairs = list(combinations(range(n), 2))
    best = None
    for pi in permutations(range(n)):
        seq = first_appearance(color(pi[i], pi[j]) for i, j in pairs)
        if best is None or seq < best:
            best = seq
    return best or ()


def brute_realizes(fn, fcolor, gn, gcolor):
    """Try every injection of ``0..gn-1`` into ``0..fn-1``."""
    gpairs = list(combinations(range(gn), 2))
    for img in permutations(range(fn), gn):
        ok = True
        for (a, b), (c, d) in combinations(gpairs, 2):
            if gcolor(a, b) == gcolor(c, d) and fcolor(img[a], img[b]) != fcolor(img[c], img[d]):
                ok = False
                break
        if ok:
            return img
    return None


def burnside_orbit_count(n):
    """Pair partitions of ``{0..n-1}`` up to vertex permutation, via Burnside.

    Fixed partitions of a permutation are counted by brute force over all
    set partitions of the pairs.
    """
    pairs = list(combinations(range(n), 2))
    parts = list(_set_partitions(list(range(len(pairs)))))
    total = 0
    perms = list(permutations(range(n)))
    for pi in perms:
        img = [pairs.index(tuple(sorted((pi[a], pi[b])))) for a, b in pairs]
        for part in parts:
            blocks = {frozenset(b) for b in part}
            if {frozenset(img[x] for x in b) for b in part} == blocks:
                total += 1
    assert total % len(perms) == 0
    return total // len(perms)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
