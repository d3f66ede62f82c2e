"""One test per acceptance criterion, each printing a single PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for just the summary
lines, or through pytest where the lines appear in the live output.
"""

import pytest

from diffrest.algebra import atoms, check_axioms, is_atomic, is_compatibly_complete, is_meet_complete
from diffrest.fixtures import fault_fixtures, two_singletons
from diffrest.suites import run_suite

SUITE_RUNS = {}


def suite(name, expected_iterations):
    if name not in SUITE_RUNS:
        SUITE_RUNS[name] = run_suite(name)
    r = SUITE_RUNS[name]
    ok = r.passed and r.iterations == expected_iterations
    detail = f"{r.iterations} instances, {r.checks} checks, {len(r.failures)} failures, {r.capped} capped"
    if r.failures:
        f = r.failures[0]
        detail += f"; first: instance {f.instance} {f.check} {' '.join(f.detail.split())[:160]}"
    return ok, detail


def axiom_soundness():
    ok, detail = suite("axioms", 500)
    faults = {name: check_axioms(A) for name, A in fault_fixtures().items()}
    caught = all(rep.failure == name and rep.witness for name, rep in faults.items())
    return ok and caught and len(faults) == 5, f"{detail}; fault fixtures caught {sum(r.failure == n for n, r in faults.items())}/5"


def singleton_fixture():
    A = two_singletons().abstract
    got = (is_meet_complete(A), is_compatibly_complete(A), len(atoms(A)), is_atomic(A))
    return got == (True, False, 2, True), (
        f"meet-complete={got[0]} compatibly-complete={got[1]} atoms={got[2]} atomic={got[3]}")


CRITERIA = {
    1: ("axiom soundness and fault detection", axiom_soundness),
    2: ("two-singleton fixture", singleton_fixture),
    3: ("G-object cardinality, atoms, completeness", lambda: suite("gobject", 200)),
    4: ("adjunction, naturality, functor laws", lambda: suite("adjunction", 100)),
    5: ("compatible completion and uniqueness", lambda: suite("completion", 100)),
    6: ("distributivity in completions", lambda: suite("distributivity", 100)),
    7: ("operators, relations and extended duality", lambda: suite("operators", 50)),
    8: ("poset embedding, all 5-element cases", lambda: suite("poset", 1942)),
    9: ("oracle agreement", lambda: suite("oracle", 100)),
}


def line(n):
    title, fn = CRITERIA[n]
    ok, detail = fn()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({detail})"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, text = line(n)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    results = [line(n) for n in sorted(CRITERIA)]
    for _, text in results:
        print(text)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
