import json

import pytest

from diffrest.algebra import check_axioms
from diffrest.fileformat import emit_algebra, load
from diffrest.fixtures import fault_fixtures
from diffrest.generators import GeneratorConfig
from diffrest.suites import EXIT_FAIL, EXIT_PASS, SUITES, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_passes_a_few_instances(name):
    report = run_suite(name, iterations=3)
    assert report.passed, report.failures
    assert report.exit_code == EXIT_PASS and report.checks > 0


def test_report_is_json_serializable():
    d = run_suite("gobject", iterations=2).to_dict()
    assert json.loads(json.dumps(d))["status"] == "pass"


def test_jobs_do_not_change_results():
    cfg = GeneratorConfig(seed=5)
    one = run_suite("adjunction", cfg, iterations=6)
    many = run_suite("adjunction", cfg, iterations=6, jobs=2)
    assert (one.checks, one.failures) == (many.checks, many.failures)


def test_corrupted_input_fails_with_reloadable_artifact(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text(emit_algebra(fault_fixtures()["AX4"]))
    report = run_suite("axioms", iterations=1, out_dir=tmp_path / "out", inputs=[str(bad)])
    assert report.exit_code == EXIT_FAIL
    assert [f.check for f in report.failures] == ["axioms:bad.txt"]
    assert "AX4" in report.failures[0].detail
    (artifact,) = report.artifacts
    rep = check_axioms(load(artifact).algebra)
    assert rep.failure == "AX4"


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
