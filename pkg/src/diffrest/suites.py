"""Reproducible property suites with machine-readable reports.

Every instance ``i`` of suite ``s`` draws from its own random stream
``(seed, s, i)``, so results do not depend on ``jobs`` or on which other
instances ran.  Failures carry a witness and, where one makes sense, a
counterexample file in the formats of :mod:`diffrest.fileformat`.
"""

from __future__ import annotations

import math
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

from .algebra import (
    atoms,
    check_axioms,
    embed_poset_with_compatibility,
    is_atomic,
    is_compatibly_complete,
    is_meet_complete,
    is_pairwise_compatible,
    join_of,
    meet_of,
)
from .completion import commuting_isomorphisms, compatible_completion, completion_uniqueness_iso, monad_idempotent
from .duality import (
    F_morphism,
    F_object,
    G_algebra,
    G_morphism,
    G_object,
    check_counit_naturality,
    check_triangle_identities,
    check_unit_naturality,
    compose_homomorphisms,
    identity_homomorphism,
    relabel_homomorphism,
    section,
    unit,
)
from .errors import CapExceededError, DiffRestError
from .fileformat import emit_algebra, emit_morphism, emit_quotient, load
from .fixtures import fault_fixtures, negative_operator_fixtures, two_singletons
from .generators import (
    GeneratorConfig,
    all_compatibility_posets,
    random_atomic_algebra,
    random_compatible_subset,
    random_concrete_algebra,
    random_homomorphism,
    random_operator_algebra,
    random_quotient,
    random_quotient_morphism,
    random_signed_quotient,
    section_count,
)
from .operators import (
    check_extended_triangles,
    is_completely_additive,
    is_compatibility_preserving,
    operation_roundtrip_holds,
    relation_roundtrip_holds,
)
from .oracle import SearchBudget, brute_force_representation, enumerate_partial_sections, validate_representation
from .pfun import compatible
from .setq import compose_morphisms, identity_morphism, quotients_isomorphic

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


@dataclass
class Failure:
    instance: int
    check: str
    detail: str
    artifact: tuple[str, str] | None = None  # (suffix, file text)


@dataclass
class InstanceResult:
    instance: int
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)
    capped: bool = False

    def expect(self, ok, check: str, detail="", artifact: tuple[str, str] | None = None) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(Failure(self.instance, check, str(detail or ok), artifact))
        return bool(ok)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    iterations: int
    checks: int
    failures: list[Failure]
    capped: int
    seconds: float
    artifacts: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.capped

    @property
    def exit_code(self) -> int:
        if self.failures:
            return EXIT_FAIL
        return EXIT_CAP if self.capped else EXIT_PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = "pass" if self.passed else ("fail" if self.failures else "cap")
        d["exit_code"] = self.exit_code
        for f in d["failures"]:
            f.pop("artifact")
        return d


# ---------------------------------------------------------------- suites

def _axioms(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"axioms:{i}")
    alg = random_concrete_algebra(rng, max_base=min(cfg.max_carrier, 5), max_elements=cfg.max_elements)
    r.expect(check_axioms(alg.abstract), "axioms", artifact=("algebra.txt", emit_algebra(alg)))


def _axioms_fixed(cfg: GeneratorConfig, r: InstanceResult) -> None:
    for name, A in fault_fixtures().items():
        rep = check_axioms(A)
        r.expect(rep.failure == name and rep.witness, f"detect-{name}", f"got {rep}")


def _singletons_fixed(cfg: GeneratorConfig, r: InstanceResult) -> None:
    A = two_singletons().abstract
    r.expect(check_axioms(A), "axioms")
    r.expect(is_meet_complete(A), "meet-complete")
    r.expect(not is_compatibly_complete(A), "not-compatibly-complete")
    r.expect(len(atoms(A)) == 2, "two-atoms", f"atoms {atoms(A)}")
    r.expect(is_atomic(A), "atomic")


def _gobject(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    pi = random_quotient(cfg.rng(f"gobject:{i}"), cfg.max_carrier)
    art = ("quotient.txt", emit_quotient(pi))
    G = G_object(pi)
    r.expect(len(G) == math.prod(1 + s for s in pi.fiber_sizes()), "cardinality", f"{len(G)} elements", art)
    r.expect(list(G.elements) == enumerate_partial_sections(pi), "matches-oracle", artifact=art)
    found = {G.elements[a] for a in atoms(G.abstract)}
    r.expect(found == {section(pi, [x]) for x in range(pi.carrier_size)}, "atoms-are-singletons", artifact=art)
    r.expect(is_compatibly_complete(G.abstract), "compatibly-complete", artifact=art)


def _bounded_quotient(rng, cfg: GeneratorConfig):
    for _ in range(100):
        pi = random_quotient(rng, cfg.max_carrier)
        if section_count(pi) <= cfg.max_elements:
            return pi
    raise CapExceededError("no quotient within the element bound")


def _adjunction(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"adjunction:{i}")
    alg = random_atomic_algebra(rng, cfg.max_carrier, cfg.max_elements)
    A = alg.abstract
    pi = _bounded_quotient(rng, cfg)
    a_art = ("algebra.txt", emit_algebra(alg))
    q_art = ("quotient.txt", emit_quotient(pi))
    r.expect(check_triangle_identities(A=A), "triangle-algebra", artifact=a_art)
    r.expect(check_triangle_identities(pi=pi), "triangle-quotient", artifact=q_art)
    r.expect(quotients_isomorphic(F_object(G_algebra(pi)), pi) is not None, "FG-iso", artifact=q_art)
    h = random_homomorphism(rng, A, cfg.max_carrier, cfg.max_elements)
    r.expect(check_unit_naturality(h), "unit-natural", artifact=a_art)
    rho = _bounded_quotient(rng, cfg)
    phi = random_quotient_morphism(rng, pi, rho)
    r.expect(check_counit_naturality(phi), "counit-natural", artifact=("morphism.txt", emit_morphism(phi)))
    if i < 50:
        _functor_laws(rng, cfg, A, h, phi, r)


def _functor_laws(rng, cfg, A, h, phi, r: InstanceResult) -> None:
    tau = _bounded_quotient(rng, cfg)
    psi = random_quotient_morphism(rng, phi.target, tau)
    art = ("morphism.txt", emit_morphism(compose_morphisms(psi, phi)))
    r.expect(G_morphism(compose_morphisms(psi, phi)) == compose_homomorphisms(G_morphism(phi), G_morphism(psi)),
             "G-composition", artifact=art)
    r.expect(G_morphism(identity_morphism(phi.source)) == identity_homomorphism(G_algebra(phi.source)),
             "G-identity")
    g = random_homomorphism(rng, h.target, cfg.max_carrier, cfg.max_elements)
    r.expect(F_morphism(compose_homomorphisms(g, h)) == compose_morphisms(F_morphism(h), F_morphism(g)),
             "F-composition")
    r.expect(F_morphism(identity_homomorphism(A)) == identity_morphism(F_object(A)), "F-identity")


def _completion(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"completion:{i}")
    alg = random_atomic_algebra(rng, cfg.max_carrier, cfg.max_elements)
    A = alg.abstract
    art = ("algebra.txt", emit_algebra(alg))
    w = compatible_completion(A)  # verifies injective, complete, join dense, compatibly complete
    r.expect(True, "completion")
    r.expect(monad_idempotent(A), "idempotent", artifact=art)
    perm = list(range(A.size))
    rng.shuffle(perm)
    relabel = relabel_homomorphism(A, perm)
    other = compatible_completion(relabel.target)
    iota_p = compose_homomorphisms(other.embedding, relabel)
    theta = completion_uniqueness_iso(w.embedding, iota_p)
    r.expect(theta.is_bijective(), "unique-iso", artifact=art)
    if len(w.completion) <= 8:
        isos = commuting_isomorphisms(w.embedding, iota_p)
        r.expect(isos == [theta.mapping], "brute-force-unique", f"{len(isos)} commuting isomorphisms", art)


def _distributivity(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"distributivity:{i}")
    alg = random_atomic_algebra(rng, cfg.max_carrier, cfg.max_elements)
    completion = compatible_completion(alg.abstract).completion
    C = completion.abstract
    art = ("algebra.txt", emit_algebra(completion))
    M, R = C.minus, C.restrict
    for k in range(20):
        S = random_compatible_subset(rng, C) or [int(rng.randrange(C.size))]
        T = random_compatible_subset(rng, C)
        jS, jT = join_of(C, S), join_of(C, T)
        ST = sorted({int(R[s, t]) for s in S for t in T})
        r.expect(is_pairwise_compatible(C, ST), "restrict-set-compatible", f"S={S} T={T}", art)
        r.expect(R[jS, jT] == join_of(C, ST), "join-restrict", f"S={S} T={T}", art)
        a = rng.randrange(C.size)
        r.expect(meet_of(C, sorted({int(M[a, s]) for s in S})) == M[a, jS], "meet-minus", f"a={a} S={S}", art)


def _operators(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"operators:{i}")
    names = ("compose", "domain", "range", "fixset", "range_restrict", "one", "restrict")
    SA = random_operator_algebra(rng, max_base=3, max_elements=cfg.max_elements, operators=names)
    A = SA.algebra
    art = ("algebra.txt", emit_algebra(SA))
    for op in SA.operators:
        r.expect(is_completely_additive(A, op), f"additive-{op.name}", artifact=art)
        r.expect(is_compatibility_preserving(A, op), f"compat-{op.name}", artifact=art)
    r.expect(operation_roundtrip_holds(SA), "operation-roundtrip", artifact=art)
    r.expect(check_extended_triangles(SA=SA), "extended-triangle-algebra", artifact=art)
    SQ = random_signed_quotient(rng, 4, (("unary", 1), ("binary", 2)), cfg.max_elements)
    q_art = ("quotient.txt", emit_quotient(SQ))
    r.expect(relation_roundtrip_holds(SQ), "relation-roundtrip", artifact=q_art)
    r.expect(check_extended_triangles(SQ=SQ), "extended-triangle-quotient", artifact=q_art)


def _operators_fixed(cfg: GeneratorConfig, r: InstanceResult) -> None:
    for name, (alg, op) in negative_operator_fixtures().items():
        A = alg.abstract
        add, comp = is_completely_additive(A, op), is_compatibility_preserving(A, op)
        r.expect(not (add and comp), f"reject-{name}", "accepted")


@lru_cache(maxsize=1)
def _posets():
    return tuple(all_compatibility_posets(5))


def _poset(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    P = _posets()[i % len(_posets())]
    theta = embed_poset_with_compatibility(P).images
    n = P.size
    r.expect(len(set(theta)) == n, "injective", f"poset {P}")
    for p in range(n):
        for q in range(n):
            r.expect(P.leq[p][q] == theta[p].issubset(theta[q]), "order", f"p={p} q={q} poset {P}")
            r.expect(P.compat[p][q] == compatible(theta[p], theta[q]), "compat", f"p={p} q={q} poset {P}")


def _oracle(cfg: GeneratorConfig, i: int, r: InstanceResult) -> None:
    rng = cfg.rng(f"oracle:{i}")
    for _ in range(200):
        alg = random_atomic_algebra(rng, cfg.max_carrier, 16)
        if len(alg) <= 16:
            break
    A = alg.abstract
    art = ("algebra.txt", emit_algebra(alg))
    res = brute_force_representation(A, SearchBudget(max_base=2 * A.size), seed_base=len(atoms(A)))
    r.expect(res.found, "search-found", res.status, art)
    if res.found:
        r.expect(validate_representation(A, res.witness.assignment), "witness-valid", artifact=art)
    GF = G_object(F_object(A))
    eta = unit(A)
    r.expect(validate_representation(A, [GF.elements[b] for b in eta.mapping]), "unit-valid", artifact=art)


@dataclass(frozen=True)
class Suite:
    name: str
    iterations: int
    instance: Callable | None = None
    fixed: Callable | None = None
    description: str = ""


SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("axioms", 500, _axioms, _axioms_fixed, "random concrete algebras satisfy the axioms; faults are detected"),
    Suite("singletons", 0, None, _singletons_fixed, "two disjoint singleton functions"),
    Suite("gobject", 200, _gobject, None, "size, atoms and compatible completeness of G(pi)"),
    Suite("adjunction", 100, _adjunction, None, "triangle identities, naturality, functor laws"),
    Suite("completion", 100, _completion, None, "unit is a compatible completion, unique up to iso"),
    Suite("distributivity", 100, _distributivity, None, "joins distribute over restriction and minus"),
    Suite("operators", 50, _operators, _operators_fixed, "extra operations and relations"),
    Suite("poset", 1942, _poset, None, "every 5-element poset with compatibility embeds"),
    Suite("oracle", 100, _oracle, None, "brute-force representation agrees with the unit"),
)}


def _run_instance(args) -> InstanceResult:
    name, cfg, i = args
    suite = SUITES[name]
    r = InstanceResult(i)
    try:
        if i < 0:
            suite.fixed(cfg, r)
        else:
            suite.instance(cfg, i, r)
    except CapExceededError as e:
        r.capped = True
        r.failures.append(Failure(i, "cap", str(e)))
    except (DiffRestError, AssertionError) as e:
        r.checks += 1
        r.failures.append(Failure(i, "exception", f"{type(e).__name__}: {e}\n{traceback.format_exc(limit=3)}"))
    return r


def _check_inputs(paths: Sequence[str]) -> list[InstanceResult]:
    out = []
    for k, p in enumerate(paths):
        r = InstanceResult(-2 - k)
        obj = load(p)
        r.expect(check_axioms(obj.algebra), f"axioms:{Path(p).name}", artifact=("algebra.txt", emit_algebra(obj.signed, concrete=obj.concrete)))
        out.append(r)
    return out


def run_suite(name: str, config: GeneratorConfig | None = None, iterations: int | None = None,
              jobs: int = 1, out_dir: str | Path | None = None, inputs: Sequence[str] = ()) -> SuiteReport:
    """Run one suite; ``inputs`` are extra algebra files checked against the axioms."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    cfg = config or GeneratorConfig()
    suite = SUITES[name]
    n = suite.iterations if iterations is None else iterations
    if suite.instance is None:
        n = 0
    tasks = ([(name, cfg, -1)] if suite.fixed else []) + [(name, cfg, i) for i in range(n)]
    start = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_instance, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_instance(t) for t in tasks]
    results += _check_inputs(inputs)
    failures = [f for r in results for f in r.failures if f.check != "cap"]
    report = SuiteReport(name, cfg.seed, n, sum(r.checks for r in results), failures,
                         sum(r.capped for r in results), round(time.perf_counter() - start, 3))
    if out_dir is not None and failures:
        report.artifacts = write_artifacts(report, out_dir)
    return report


def write_artifacts(report: SuiteReport, out_dir: str | Path) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, f in enumerate(report.failures):
        if f.artifact is None:
            continue
        suffix, text = f.artifact
        path = out / f"{report.suite}-{f.instance}-{f.check}-{k}-{suffix}"
        detail = " ".join(f.detail.split())
        header = f"# {report.suite} seed {report.seed} instance {f.instance}: {f.check} {detail}\n"
        path.write_text(header + text, encoding="utf-8")
        paths.append(str(path))
    return paths
