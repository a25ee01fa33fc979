"""Acceptance gate: every criterion at its pinned tolerance, one line per criterion."""

import pytest

from sirsfold.acceptance import run_all

CRITERIA = range(1, 11)


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_all()}


@pytest.mark.parametrize("number", CRITERIA)
def test_criterion(results, number, capsys):
    result = results[number]
    with capsys.disabled():
        print("\n" + result.line())
        for key, value in result.reported.items():
            print(f"       reported {key}: {value}")
    assert result.passed, result.line()
