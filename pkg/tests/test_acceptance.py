"""The acceptance gate: every criterion must pass at its stated tolerance.

Each test prints its pass/fail line via the shared runner, so `pytest -v`
and `arboreal acceptance` report identically.
"""

import pytest

from arboreal import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA,
                         ids=[f.__name__ for f in acceptance.CRITERIA])
def test_criterion(criterion):
    report = criterion()
    print(f"[{'PASS' if report.ok else 'FAIL'}] {report.check} ({report.seconds:.2f}s)")
    assert report.ok, report.text()
