"""Acceptance gate: every criterion at its pinned tolerance.

Each suite prints one pass/fail line per check (visible with -s, or in the
failure report); the same records back the CLI ``verify`` command.  The
``expansion`` suite runs the full-resolution energy fits and takes several
minutes; everything else is fast.
"""

import pytest

from neelwalls import acceptance

FAST_SUITES = [name for name in acceptance.SUITES if name != "expansion"]


@pytest.mark.parametrize("suite", FAST_SUITES)
def test_criterion(suite):
    records = acceptance.run_suite(suite)
    for record in records:
        print(record.line())
    failed = [record.line() for record in records if not record.passed]
    assert not failed, "failed checks:\n" + "\n".join(failed)


def test_criterion_expansion():
    records = acceptance.run_suite("expansion")
    for record in records:
        print(record.line())
    failed = [record.line() for record in records if not record.passed]
    assert not failed, "failed checks:\n" + "\n".join(failed)
