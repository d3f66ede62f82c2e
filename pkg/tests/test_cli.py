import json
import subprocess
import sys

import pytest

from diffrest.cli import main
from diffrest.fileformat import emit_algebra, emit_morphism, emit_poset, emit_quotient, load
from diffrest.fixtures import fault_fixtures
from diffrest.generators import all_compatibility_posets
from diffrest.setq import QuotientMorphism, SetQuotient

SINGLETONS = "format 1\nkind concrete\nbase 3\n[elements]\n[]\n[(1,1)]\n[(2,2)]\n"


@pytest.fixture
def files(tmp_path):
    paths = {
        "singletons": SINGLETONS,
        "ax1": emit_algebra(fault_fixtures()["AX1"]),
        "quotient": emit_quotient(SetQuotient.from_fibers([2, 1])),
        "q3": emit_morphism(QuotientMorphism(SetQuotient.from_fibers([2, 1]), SetQuotient.from_fibers([2, 1]),
                                             (0, None, None))),
        "swap": emit_morphism(QuotientMorphism(SetQuotient.from_fibers([2, 1]), SetQuotient.from_fibers([2, 1]),
                                               (1, 0, 2))),
        "poset": emit_poset(next(iter(all_compatibility_posets(2)))),
        "garbage": "format 1\nkind table\nsize 2\n[minus]\n0 x\n",
    }
    out = {}
    for name, text in paths.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_check_axioms(files, capsys):
    assert run(capsys, "check-axioms", files["singletons"])[0] == 0
    code, out, _ = run(capsys, "--format", "json", "check-axioms", files["ax1"])
    assert code == 1 and json.loads(out)["failure"] == "AX1"


def test_atoms_report(files, capsys):
    code, out, _ = run(capsys, "--format", "json", "atoms", files["singletons"])
    data = json.loads(out)
    assert code == 0
    assert len(data["atoms"]) == 2 and data["atomic"] and data["meet_complete"]
    assert not data["compatibly_complete"]


def test_atoms_needs_axioms(files, capsys):
    assert run(capsys, "atoms", files["ax1"])[0] == 2


def test_dualize_and_back(files, capsys, tmp_path):
    code, out, _ = run(capsys, "dualize", files["singletons"])
    assert code == 0 and "[projection]\n0 1" in out
    code, out, _ = run(capsys, "--format", "json", "dual-algebra", files["quotient"])
    assert code == 0 and json.loads(out)["size"] == 6


def test_check_morphism(files, capsys):
    code, out, _ = run(capsys, "--format", "json", "check-morphism", files["q3"])
    assert code == 1 and json.loads(out)["witness"] == {"x0": 0, "y0": 0, "uncovered": 1}
    code, out, _ = run(capsys, "check-morphism", "--naturality", files["swap"])
    assert code == 0 and "naturality" in out


def test_complete_writes_files(files, capsys, tmp_path):
    d = tmp_path / "done"
    code, out, _ = run(capsys, "complete", files["singletons"], "-o", str(d))
    assert code == 0
    assert load(d / "completion.txt").algebra.size == 4
    emb = load(d / "embedding.txt")
    code, out, _ = run(capsys, "check-morphism", str(d / "embedding.txt"), "--source", files["singletons"],
                       "--target", str(d / "completion.txt"), "--naturality")
    assert code == 0 and len(emb) == 3


def test_check_adjunction(files, capsys):
    assert run(capsys, "check-adjunction", files["singletons"])[0] == 0
    assert run(capsys, "check-adjunction", files["quotient"])[0] == 0


def test_represent(files, capsys, tmp_path):
    out_file = tmp_path / "rep.txt"
    code, out, _ = run(capsys, "--format", "json", "represent", files["singletons"], "-o", str(out_file))
    assert code == 0 and json.loads(out)["status"] == "found"
    assert load(out_file).algebra.size == 3
    code, out, _ = run(capsys, "represent", files["ax1"], "--max-base", "2")
    assert code == 1 and "impossible" in out
    code, _, _ = run(capsys, "represent", files["singletons"], "--max-nodes", "1", "--seed-base", "3")
    assert code == 3


def test_embed_poset(files, capsys):
    code, out, _ = run(capsys, "--format", "json", "embed-poset", files["poset"])
    assert code == 0 and len(json.loads(out)["images"]) == 2


def test_input_errors_exit_2(files, capsys, tmp_path):
    code, _, err = run(capsys, "check-axioms", files["garbage"])
    assert code == 2 and "line 5" in err
    code, _, err = run(capsys, "check-axioms", str(tmp_path / "missing.txt"))
    assert code == 2


def test_run_suite(files, capsys, tmp_path):
    code, out, _ = run(capsys, "--seed", "3", "--format", "json", "run-suite", "gobject", "--iters", "4")
    data = json.loads(out)["reports"][0]
    assert code == 0 and data["seed"] == 3 and data["iterations"] == 4
    code, out, _ = run(capsys, "run-suite", "axioms", "--iters", "1", "--input", files["ax1"],
                       "--out", str(tmp_path / "art"))
    assert code == 1 and "artifact" in out


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "diffrest", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "run-suite" in res.stdout
