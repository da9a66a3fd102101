"""Hypothesis strategies for colorings."""

from __future__ import annotations

from itertools import combinations

from hypothesis import strategies as st

from omegaid.core import Coloring


@st.composite
def colorings(draw, min_size=1, max_size=5, max_colors=3, labels=False):
    n = draw(st.integers(min_size, max_size))
    if labels:
        field = sorted(draw(st.sets(st.integers(0, 40), min_size=n, max_size=n)))
    else:
        field = list(range(n))
    k = draw(st.integers(1, max_colors))
    colors = {p: draw(st.integers(0, k - 1)) for p in combinations(field, 2)}
    return Coloring.from_map(field, colors)
