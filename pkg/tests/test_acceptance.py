"""Every acceptance criterion at its stated tolerance, one line per check."""

import pytest

from beliefsim import repro


@pytest.fixture(scope="module")
def ctx():
    return repro.Context(seed=repro.DEFAULT_SEED)


@pytest.mark.parametrize("crit", repro.CRITERIA, ids=lambda c: f"C{c.number}")
def test_criterion(crit, ctx, capsys):
    checks, elapsed = repro.run_criterion(crit, ctx)
    with capsys.disabled():
        print()
        for check in checks:
            print(check.line())
        print(f"      C{crit.number} {crit.title}: {elapsed:.1f}s")
    assert checks
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)
