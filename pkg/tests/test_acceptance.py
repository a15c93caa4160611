"""Acceptance criteria 1-13, each at its stated exactness; prints one line per criterion."""

from __future__ import annotations

import pytest

from antiorb.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print(f"\n{result.line()}  ({result.seconds:.1f}s)")
    assert result.passed, result.details
