"""``diffrest`` command line.

Exit status: 0 pass, 1 a checked property fails, 2 bad input, 3 a size cap
or search budget was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import (
    atoms,
    check_axioms,
    compatibly_complete_witness,
    embed_poset_with_compatibility,
    is_atomic,
    is_atomistic,
    is_meet_complete,
)
from .completion import compatible_completion
from .duality import CompleteHomomorphism, G_object, check_counit_naturality, check_unit_naturality
from .errors import CapExceededError, ClosureError, DiffRestError, ParseError, PreconditionError
from .fileformat import (
    AlgebraFile,
    QuotientFile,
    emit_algebra,
    emit_homomorphism_map,
    emit_quotient,
    load,
    parse_algebra,
    parse_poset,
    parse_quotient,
)
from .generators import GeneratorConfig
from .operators import F_prime, G_prime, check_extended_triangles
from .oracle import SearchBudget, brute_force_representation
from .pfun import ConcreteAlgebra
from .setq import validate_morphism
from .suites import EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, SUITES, run_suite


class _Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def result(self, data: dict, text: str) -> None:
        if self.fmt == "json":
            print(json.dumps(data, sort_keys=True, default=str), file=self.stream)
        else:
            print(text.rstrip("\n"), file=self.stream)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _label(obj, a: int) -> str:
    return obj.algebra.label(a)


# ---------------------------------------------------------------- verbs

def cmd_check_axioms(args, out: _Output) -> int:
    f = parse_algebra(_read(args.file))
    rep = check_axioms(f.algebra)
    out.result({"ok": rep.ok, "failure": rep.failure, "witness": rep.witness}, str(rep))
    return EXIT_PASS if rep else EXIT_FAIL


def cmd_atoms(args, out: _Output) -> int:
    f = parse_algebra(_read(args.file))
    A = f.algebra
    rep = check_axioms(A)
    if not rep:
        raise PreconditionError(f"axioms fail: {rep}")
    at = atoms(A)
    witness = compatibly_complete_witness(A)
    data = {
        "atoms": at,
        "atom_labels": [_label(f, a) for a in at],
        "atomic": is_atomic(A),
        "atomistic": is_atomistic(A),
        "meet_complete": is_meet_complete(A),
        "compatibly_complete": witness is None,
        "compatibly_complete_witness": witness,
    }
    text = "\n".join([
        f"atoms: {len(at)}",
        *(f"  {a} {_label(f, a)}" for a in at),
        f"atomic: {str(data['atomic']).lower()}",
        f"atomistic: {str(data['atomistic']).lower()}",
        f"meet-complete: {str(data['meet_complete']).lower()}",
        f"compatibly-complete: {str(data['compatibly_complete']).lower()}"
        + ("" if witness is None else f" (no join for {witness})"),
    ])
    out.result(data, text)
    return EXIT_PASS


def cmd_dualize(args, out: _Output) -> int:
    f = parse_algebra(_read(args.file))
    SQ = F_prime(f.signed)
    text = emit_quotient(SQ)
    out.result({"projection": SQ.quotient.projection, "atoms": atoms(f.algebra),
                "relations": {r.name: r.sorted_tuples() for r in SQ.relations}}, text)
    return EXIT_PASS


def cmd_dual_algebra(args, out: _Output) -> int:
    q = parse_quotient(_read(args.file))
    SA = G_prime(q.signed)
    G = G_object(q.quotient)
    text = emit_algebra(SA, concrete=G)
    out.result({"size": len(G), "elements": [str(e) for e in G.elements],
                "operators": {op.name: op.table.tolist() for op in SA.operators}}, text)
    return EXIT_PASS


def cmd_check_morphism(args, out: _Output) -> int:
    obj = load(args.file)
    if isinstance(obj, tuple):
        if not (args.source and args.target):
            raise PreconditionError("homomorphism files need --source and --target algebras")
        A, B = parse_algebra(_read(args.source)), parse_algebra(_read(args.target))
        h = CompleteHomomorphism(A.algebra, B.algebra, obj)
        rep = h.check()
        data = {"ok": rep.ok, "failure": rep.failure, "witness": rep.witness}
        text = f"complete homomorphism: {rep}"
        if rep and args.naturality:
            nat = check_unit_naturality(h)
            data["naturality"] = nat.ok
            text += f"\nunit naturality: {nat}"
            rep = nat
        out.result(data, text)
        return EXIT_PASS if rep else EXIT_FAIL
    phi = obj
    rep = validate_morphism(phi.mapping, phi.source, phi.target)
    data = {"ok": rep.ok, "failure": rep.failure, "witness": rep.witness}
    text = f"quotient morphism: {rep}"
    if rep and args.naturality:
        nat = check_counit_naturality(phi)
        data["naturality"] = nat.ok
        text += f"\ncounit naturality: {nat}"
        rep = nat
    out.result(data, text)
    return EXIT_PASS if rep else EXIT_FAIL


def cmd_check_adjunction(args, out: _Output) -> int:
    obj = load(args.file)
    if isinstance(obj, AlgebraFile):
        rep = check_extended_triangles(SA=obj.signed)
    elif isinstance(obj, QuotientFile):
        rep = check_extended_triangles(SQ=obj.signed)
    else:
        raise PreconditionError("check-adjunction takes an algebra or a quotient file")
    out.result({"ok": rep.ok, "failure": rep.failure, "witness": rep.witness}, f"triangle identities: {rep}")
    return EXIT_PASS if rep else EXIT_FAIL


def cmd_complete(args, out: _Output) -> int:
    f = parse_algebra(_read(args.file))
    w = compatible_completion(f.algebra)
    alg_text = emit_algebra(w.completion)
    map_text = emit_homomorphism_map(w.embedding.mapping)
    if args.output:
        d = Path(args.output)
        d.mkdir(parents=True, exist_ok=True)
        (d / "completion.txt").write_text(alg_text, encoding="utf-8")
        (d / "embedding.txt").write_text(map_text, encoding="utf-8")
    out.result({"size": len(w.completion), "elements": [str(e) for e in w.completion.elements],
                "embedding": list(w.embedding.mapping)},
               alg_text + "\n" + map_text)
    return EXIT_PASS


def cmd_represent(args, out: _Output) -> int:
    f = parse_algebra(_read(args.file))
    A = f.algebra
    budget = SearchBudget(max_base=args.max_base if args.max_base is not None else 2 * A.size,
                          max_nodes=args.max_nodes, seed=args.seed)
    res = brute_force_representation(A, budget, seed_base=args.seed_base)
    data = {"status": res.status, "nodes": res.nodes, "bases_tried": res.bases_tried}
    lines = [f"status: {res.status}", f"nodes: {res.nodes}"]
    if res.found:
        w = res.witness
        data["base_size"] = w.base_size
        data["assignment"] = [str(g) for g in w.assignment]
        lines.append(f"base: {w.base_size}")
        lines += [f"  {a} -> {g}" for a, g in enumerate(w.assignment)]
        if args.output:
            alg = ConcreteAlgebra.from_elements(w.assignment, base_size=w.base_size)
            Path(args.output).write_text(emit_algebra(alg), encoding="utf-8")
    out.result(data, "\n".join(lines))
    if res.found:
        return EXIT_PASS
    return EXIT_FAIL if res.status == "impossible" else EXIT_CAP


def cmd_embed_poset(args, out: _Output) -> int:
    P = parse_poset(_read(args.file))
    emb = embed_poset_with_compatibility(P)
    points = [sorted(p) for p in emb.points]
    data = {"points": points, "images": [str(g) for g in emb.images]}
    lines = [f"base points: {' '.join('{' + ','.join(map(str, p)) + '}' for p in points)}"]
    lines += [f"  {p} -> {g}" for p, g in enumerate(emb.images)]
    out.result(data, "\n".join(lines))
    return EXIT_PASS


def cmd_run_suite(args, out: _Output) -> int:
    cfg = GeneratorConfig(seed=args.seed, max_carrier=args.max_carrier, max_elements=args.max_size)
    names = list(SUITES) if args.name == "all" else [args.name]
    reports = [run_suite(nm, cfg, iterations=args.iters, jobs=args.jobs, out_dir=args.out, inputs=args.input)
               for nm in names]
    data = {"reports": [r.to_dict() for r in reports]}
    lines = []
    for r in reports:
        status = "PASS" if r.passed else ("FAIL" if r.failures else "CAP")
        lines.append(f"{status} {r.suite}: {r.checks} checks, {len(r.failures)} failures, {r.seconds}s")
        for f in r.failures[:10]:
            lines.append(f"  instance {f.instance} {f.check}: {' '.join(f.detail.split())[:200]}")
        lines += [f"  artifact {p}" for p in r.artifacts]
    out.result(data, "\n".join(lines))
    return max(r.exit_code for r in reports)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    def globals_(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults so they never override the top level
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        g.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
        g.add_argument("--max-size", type=int, default=d(64), help="element cap for generated algebras")
        g.add_argument("--format", choices=("text", "json"), default=d("text"), dest="fmt")
        g.add_argument("--jobs", type=int, default=d(1), help="worker processes for suites")
        return g

    common = globals_(False)
    p = argparse.ArgumentParser(prog="diffrest", parents=[globals_(True)],
                                description="Algebras of partial functions under minus and domain restriction.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    verb("check-axioms", cmd_check_axioms, "evaluate the five axioms").add_argument("file")
    verb("atoms", cmd_atoms, "atoms and completeness properties").add_argument("file")
    verb("dualize", cmd_dualize, "set quotient of an atomic algebra").add_argument("file")
    verb("dual-algebra", cmd_dual_algebra, "algebra of partial sections of a quotient").add_argument("file")
    s = verb("check-morphism", cmd_check_morphism, "validate a quotient morphism or a homomorphism")
    s.add_argument("file")
    s.add_argument("--source", help="source algebra (homomorphism files)")
    s.add_argument("--target", help="target algebra (homomorphism files)")
    s.add_argument("--naturality", action="store_true", help="also check the naturality square")
    verb("check-adjunction", cmd_check_adjunction, "triangle identities at an algebra or quotient").add_argument("file")
    s = verb("complete", cmd_complete, "compatible completion and its embedding")
    s.add_argument("file")
    s.add_argument("-o", "--output", help="directory for completion.txt and embedding.txt")
    s = verb("represent", cmd_represent, "brute-force search for a representation")
    s.add_argument("file")
    s.add_argument("--max-base", type=int, default=None, help="largest base tried (default 2*size)")
    s.add_argument("--max-nodes", type=int, default=200_000)
    s.add_argument("--seed-base", type=int, default=None, help="base size tried first")
    s.add_argument("-o", "--output", help="write the representation as a concrete algebra file")
    verb("embed-poset", cmd_embed_poset, "represent a poset with compatibility").add_argument("file")
    s = verb("run-suite", cmd_run_suite, "run a property suite")
    s.add_argument("name", choices=list(SUITES) + ["all"])
    s.add_argument("--iters", type=int, default=None, help="instances (default: the suite's own count)")
    s.add_argument("--max-carrier", type=int, default=6)
    s.add_argument("--out", default=None, help="directory for counterexample files")
    s.add_argument("--input", action="append", default=[], help="extra algebra file to check (repeatable)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Output(args.fmt)
    try:
        return args.fn(args, out)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceededError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ClosureError, PreconditionError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DiffRestError as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
