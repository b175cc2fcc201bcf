import pytest

from ramsey_workbench.suite import SCOPES, Context, mutant_impl, run_suite


def test_full_battery_passes():
    results = run_suite("all")
    assert results and all(r.passed for r in results), [r.to_json() for r in results if not r.passed]
    assert {r.scope for r in results} == set(SCOPES)


def test_mutant_is_caught():
    failed = {r.name for r in run_suite("chains", Context(impl=mutant_impl())) if not r.passed}
    assert {"initial segments", "dual embedding"} <= failed


def test_results_name_their_driving_result():
    for r in run_suite("chains"):
        assert r.result and r.instances > 0


def test_unknown_scope():
    with pytest.raises(ValueError):
        run_suite("posets")
