import json
import time

import pytest

from src.config import Config
from src.errors import ArgumentError
from src.harness import CASES, CampaignRunner, Expectation, get_case, run_manufactured, verify_identities
from src.harness.manufactured import _quadratic_constant, build_case_problem
from src.solver import solve


def test_expectation_validation():
    assert Expectation("residual", 1e-10, "trivial").oracle == ""
    assert Expectation("sup_error", 1e-6, "paper").provenance == "paper"
    with pytest.raises(ArgumentError):
        Expectation("residual", 1e-10, "guessed")
    with pytest.raises(ArgumentError):
        Expectation("sup_error", 1e-6, "derived")


def test_every_derived_case_value_names_an_oracle():
    for case in CASES.values():
        for expectation in case.expected:
            if expectation.provenance == "derived":
                assert expectation.oracle


def test_get_case():
    assert get_case("quotient-const").family.value == "hessian-quotient"
    with pytest.raises(ArgumentError, match="unknown case"):
        get_case("ma-n9")


def test_identity_suite_passes_and_is_reproducible():
    first = verify_identities(seed=11, samples=30, derivative_samples=8)
    second = verify_identities(seed=11, samples=30, derivative_samples=8)
    assert first.passed, [r.name for r in first.failures]
    assert first.to_dict() == second.to_dict()
    results = {result.name: result for result in first.results}
    assert "hodge-trace" in results and "matrix-second-derivative" in results
    assert all(result.samples == 8 for name, result in results.items() if name.startswith("matrix-"))
    assert all(any(sign in result.anchor for sign in ("=", ">", "<")) for result in first.results)


def test_second_derivative_oracle_meets_relative_bound():
    report = verify_identities(seed=1, samples=0, derivative_samples=40)
    second = next(result for result in report.results if result.name == "matrix-second-derivative")
    assert second.tolerance == 1e-5
    assert second.samples == 40
    assert second.max_error < 1e-5


def test_cone_suite_covers_every_operator():
    report = verify_identities(seed=3, samples=20, derivative_samples=0)
    results = {result.name: result for result in report.results}
    # 1 + 5 + 9 + 14 operators for n = 1..4
    for name in ("ellipticity", "concavity", "euler"):
        assert results[name].samples == 29 * 20
        assert results[name].passed
    assert results["concavity"].tolerance == 1e-12
    assert results["euler"].tolerance == 1e-12
    assert results["euler"].anchor == "sum_i f_i lambda_i >= 0"


def test_identity_suite_with_no_samples_passes_vacuously():
    seen = []
    report = verify_identities(seed=0, samples=0, derivative_samples=0, on_result=seen.append)
    assert report.passed
    assert len(seen) == len(report.results)
    assert all(result.note.startswith("0 samples (vacuous pass)") for result in report.results)


def test_quadratic_constant_uses_tail_above_roundoff():
    assert _quadratic_constant([1e-2, 1e-3, 1e-5, 1e-15]) == pytest.approx(10.0)
    assert _quadratic_constant([1e-9, 1e-14]) is None


def test_quotient_case_problem_has_constant_data():
    spec, exact = build_case_problem(get_case("quotient-const"))
    assert (spec.psi == -1.0).all()
    assert (exact == 0.0).all()


def test_quotient_case_passes():
    report = run_manufactured(get_case("quotient-const"))
    assert report.passed, [(c.quantity, c.value) for c in report.checks]
    b_check = next(check for check in report.checks if check.quantity == "b_value")
    assert b_check.provenance == "derived"
    assert report.run.b == pytest.approx(0.5, abs=1e-12)


def test_hessian_k1_matches_poisson_oracle():
    report = run_manufactured(get_case("hessian-k1"))
    assert report.passed, [(c.quantity, c.value) for c in report.checks]
    assert {check.quantity for check in report.checks} >= {"linear_oracle", "uniqueness_u", "uniqueness_b"}


@pytest.mark.slow
@pytest.mark.parametrize("name", ["ma-n2-smooth", "t-hessian", "ma-curved"])
def test_slow_manufactured_cases(name):
    report = run_manufactured(get_case(name))
    assert report.passed, [(c.quantity, c.value) for c in report.checks if not c.passed]


@pytest.mark.slow
def test_smooth_monge_ampere_solve_meets_time_budget():
    spec, exact = build_case_problem(get_case("ma-n2-smooth"))
    started = time.perf_counter()
    run = solve(spec)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    assert run.residual < 1e-10
    assert abs(run.u - (exact - exact.max())).max() < 1e-6


def test_campaign_runner_writes_records(tmp_path):
    runner = CampaignRunner(Config(jobs=2, output_dir=str(tmp_path)))
    done = []
    reports = runner.run_cases([get_case("quotient-const")], on_case_complete=lambda case, report: done.append(case.name))
    assert done == ["quotient-const"]
    assert reports[0].passed
    case_dir = tmp_path / "quotient-const"
    data = json.loads((case_dir / "case.json").read_text())
    assert data["passed"] is True
    assert (case_dir / "record.json").exists()
    assert (case_dir / "residuals.csv").exists()
    assert (case_dir / "u.bin").exists()
