"""Acceptance criteria 1-10, each with its own runtime limit.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import pytest

from omegaid import verify
from conftest import ACCEPTANCE_LINES
from helpers import burnside_orbit_count


def _report(k, rep):
    status = "PASS" if rep["ok"] else "FAIL"
    ACCEPTANCE_LINES.append(
        f"criterion {k:>2}: {status} ({rep['seconds']:.2f}s of {rep['time_limit']}s) {rep.get('name', '')}")


@pytest.mark.parametrize("k", sorted(verify.CRITERIA))
def test_criterion(k):
    rep = verify.run_criterion(k)
    _report(k, rep)
    assert rep["within_time"], f"criterion {k} took {rep['seconds']:.1f}s"
    assert rep["ok"], rep


def test_criterion_1_independent_orbit_count():
    rep = verify.criterion_1()
    assert rep["counts"] == {1: 1, 2: 1, 3: 3, 4: burnside_orbit_count(4)}
    assert burnside_orbit_count(4) == 25
