"""Acceptance criteria 1-7, one pass/fail line each."""
import pytest

from rectdecomp.suites import SUITES, run_suite

LIMITS = {1: 30, 2: 60, 3: 60, 4: 30, 5: 300, 6: 300, 7: 300}


@pytest.fixture
def report_line(capsys):
    def emit(number, rep):
        status = "PASS" if rep.ok else "FAIL"
        with capsys.disabled():
            print(f"\ncriterion {number} ({SUITES[number][0]}): {status} in {rep.meta['seconds']:.1f}s")
            for label, detail in rep.failures():
                print(f"    failed: {label} {detail}")
    return emit


@pytest.mark.parametrize("number", sorted(SUITES))
def test_criterion(number, report_line):
    rep = run_suite(number, seed=0)
    report_line(number, rep)
    assert rep.ok, rep.failures()
    assert rep.meta["seconds"] < LIMITS[number]
