"""Acceptance gate: every estimate the package exists to demonstrate.

Each criterion prints its own PASS/FAIL line (visible under pytest -v or
-s) so a run of this file doubles as the sign-off record.  The criteria
are independent; one failing leaves the others informative.
"""

import time

import pytest

from abplab.acceptance import CRITERIA, run_criterion

_NAMES = dict(CRITERIA)
_START = time.perf_counter()


@pytest.mark.parametrize("number", sorted(_NAMES),
                         ids=[f"{num:02d}-{name}" for num, name in CRITERIA])
def test_criterion(number):
    result = run_criterion(number)
    print()
    print(result.line())
    assert result.passed, result.line()


def test_whole_gate_is_desk_scale():
    """the full gate has to stay cheap enough to run before every push"""
    elapsed = time.perf_counter() - _START
    assert elapsed < 600.0, f"acceptance suite took {elapsed:.0f}s"
