"""Acceptance criteria at N = 256, L = 12; one PASS/FAIL line per criterion."""

import pytest

from dkpeig.acceptance import CRITERIA, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
