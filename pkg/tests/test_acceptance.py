"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criterion 10 (conjecture scan) is expected to FAIL honestly: the exact
optimizer finds a genuine counterexample to the conjectured ordering at
(m=26, n=12), where k*_C = 2 > k*_S = 1 (verified through four independent
computation routes). The criterion demands a zero-violation report, so the
test states the criterion as written and reports the counterexample.
"""

import pytest

from bloomlab import suites


def _report(criterion: int, check: suites.CheckResult) -> None:
    status = "PASS" if check.passed else "FAIL"
    print(f"ACCEPTANCE {criterion:>2}: {status}  {check.name}  [{check.detail}]")
    assert check.passed, f"criterion {criterion}: {check.name} -- {check.detail}"


@pytest.fixture(scope="module")
def paper_numbers():
    return suites.suite_paper_numbers()


def test_criterion_01_optima_m64_n4(paper_numbers):
    _report(1, paper_numbers.checks[0])


def test_criterion_02_optima_m1000_n20(paper_numbers):
    _report(2, paper_numbers.checks[1])


def test_criterion_03_misconfiguration_m1024_n5(paper_numbers):
    _report(3, paper_numbers.checks[2])


def test_criterion_04_peak_efficiency_m100(paper_numbers):
    _report(4, paper_numbers.checks[3])


def test_criterion_05_brute_force_oracle():
    result = suites.suite_oracle_small()
    _report(5, result.checks[0])


def test_criterion_06_invariant_suites():
    result = suites.suite_invariants()
    for check in result.checks:
        _report(6, check)


def test_criterion_07_monte_carlo_agreement():
    result = suites.suite_montecarlo()
    _report(7, result.checks[0])


def test_criterion_08_asymptotic_efficiencies():
    result = suites.suite_asymptotics()
    _report(8, result.checks[0])


def test_criterion_09_valley_solver():
    result = suites.suite_valley()
    _report(9, result.checks[0])


def test_criterion_10_conjecture_scan(tmp_path):
    result = suites.suite_conjectures()
    artifact = tmp_path / "conjecture_scan.csv"
    artifact.write_text(result.artifacts["conjecture_scan"])
    print(f"scan artifact: {artifact}")
    _report(10, result.checks[0])
