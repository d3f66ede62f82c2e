"""Seeded random instances.  Same config, same stream."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .algebra import AbstractAlgebra, CompatibilityPoset
from .duality import CompleteHomomorphism, G_morphism, G_object, F_object, compose_homomorphisms, unit
from .errors import CapExceededError
from .operators import (
    QuotientRelation,
    SignedAlgebra,
    SignedQuotient,
    concrete_operator_catalog,
    has_compatibility_property,
    quotient_compat,
    signed_concrete,
)
from .pfun import UNDEF, ConcreteAlgebra, PartialFunction, close_under_ops
from .setq import QuotientMorphism, SetQuotient, validate_morphism

OPERATOR_CLOSURE = ("compose", "domain", "fixset", "range_restrict", "one")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_carrier: int = 6
    max_elements: int = 64
    sigma: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.max_carrier < 1 or self.max_elements < 1:
            raise ValueError("bounds must be positive")

    def rng(self, stream: str = "") -> random.Random:
        """Independent generator per named stream, all derived from ``seed``."""
        return random.Random(f"{self.seed}:{stream}")


# ---------------------------------------------------------------- quotients

def random_composition(rng: random.Random, n: int) -> list[int]:
    """Uniform composition of ``n``: each of the ``n - 1`` gaps is a cut with probability 1/2."""
    sizes, cur = [], 1
    for _ in range(n - 1):
        if rng.random() < 0.5:
            sizes.append(cur)
            cur = 1
        else:
            cur += 1
    sizes.append(cur)
    return sizes


def random_quotient(rng: random.Random, max_carrier: int, min_carrier: int = 1,
                    shuffle: bool = True) -> SetQuotient:
    n = rng.randint(min_carrier, max_carrier)
    proj = [c for c, s in enumerate(random_composition(rng, n)) for _ in range(s)]
    if shuffle:
        rng.shuffle(proj)
        relabel: dict[int, int] = {}
        proj = [relabel.setdefault(c, len(relabel)) for c in proj]
    return SetQuotient(tuple(proj))


def random_compatible_relation(rng: random.Random, pi: SetQuotient, name: str, arity: int,
                               density: float = 0.3, cap: int = 2000) -> QuotientRelation:
    """Random tuples, repaired by dropping any tuple that breaks the compatibility property."""
    n = pi.carrier_size
    space = list(itertools.product(range(n), repeat=arity + 1))
    if len(space) > cap:
        space = rng.sample(space, cap)
    candidates = [t for t in space if rng.random() < density]
    rng.shuffle(candidates)
    C = quotient_compat(pi)
    kept: list[tuple[int, ...]] = []
    for t in candidates:
        if all(not all(C[t[k], u[k]] for k in range(arity)) or C[t[-1], u[-1]] for u in kept):
            kept.append(t)
    R = QuotientRelation.of(name, arity, kept)
    assert has_compatibility_property(pi, R)
    return R


def random_signed_quotient(rng: random.Random, max_carrier: int,
                           sigma: Sequence[tuple[str, int]], max_sections: int = 64) -> SignedQuotient:
    for _ in range(100):
        pi = random_quotient(rng, max_carrier)
        if section_count(pi) <= max_sections:
            break
    else:
        raise CapExceededError("no quotient within the section bound")
    return SignedQuotient(pi, tuple(random_compatible_relation(rng, pi, nm, ar) for nm, ar in sigma))


def section_count(pi: SetQuotient) -> int:
    out = 1
    for s in pi.fiber_sizes():
        out *= 1 + s
    return out


def random_quotient_morphism(rng: random.Random, pi: SetQuotient, rho: SetQuotient,
                             p_defined: float = 0.7) -> QuotientMorphism:
    """Random partial class map, then an injection of each target fibre into its source fibre."""
    mapping: list[int | None] = [None] * pi.carrier_size
    for fiber in pi.fibers:
        options = [f for f in rho.fibers if len(f) <= len(fiber)]
        if not options or rng.random() >= p_defined:
            continue
        target = rng.choice(options)
        for x, y in zip(rng.sample(fiber, len(target)), target):
            mapping[x] = y
    assert validate_morphism(mapping, pi, rho)
    return QuotientMorphism(pi, rho, tuple(mapping))


# ---------------------------------------------------------------- algebras

def random_partial_function(rng: random.Random, base: int, density: float = 0.5) -> PartialFunction:
    return PartialFunction(tuple(rng.randrange(base) if rng.random() < density else UNDEF for _ in range(base)))


def random_concrete_algebra(rng: random.Random, max_base: int = 5, max_elements: int = 64,
                            operators: Sequence[str] = (), max_seeds: int = 6) -> ConcreteAlgebra:
    """Closure of a few random partial functions, retried until within ``max_elements``."""
    catalog = None
    for _ in range(200):
        base = rng.randint(min(2, max_base), max_base)
        catalog = concrete_operator_catalog(base)
        seeds = [random_partial_function(rng, base, rng.choice((0.3, 0.5, 0.8)))
                 for _ in range(rng.randint(1, max_seeds))]
        try:
            return close_under_ops(seeds, [catalog[nm] for nm in operators], cap=max_elements)
        except CapExceededError:
            continue
    raise CapExceededError(f"no closure within {max_elements} elements")


def random_subalgebra(rng: random.Random, alg: ConcreteAlgebra, max_seeds: int = 6) -> ConcreteAlgebra:
    k = rng.randint(1, max(1, min(max_seeds, len(alg))))
    seeds = rng.sample(alg.elements, k)
    return close_under_ops(seeds, alg.operators, base_size=alg.base_size)


def random_atomic_algebra(rng: random.Random, max_carrier: int = 6, max_elements: int = 64) -> ConcreteAlgebra:
    """Either a whole ``G(pi)`` or a random closed subalgebra of one."""
    for _ in range(100):
        pi = random_quotient(rng, max_carrier, min_carrier=min(2, max_carrier))
        if section_count(pi) <= max_elements:
            break
    Gp = G_object(pi)
    if rng.random() < 0.3:
        return Gp
    return random_subalgebra(rng, Gp)


def random_operator_algebra(rng: random.Random, max_base: int = 3, max_elements: int = 64,
                            operators: Sequence[str] = OPERATOR_CLOSURE) -> SignedAlgebra:
    alg = random_concrete_algebra(rng, max_base, max_elements, operators)
    return signed_concrete(alg, operators)


def random_homomorphism(rng: random.Random, A: AbstractAlgebra, max_carrier: int = 6,
                        max_elements: int = 64) -> CompleteHomomorphism:
    """``G(phi) . eta_A`` for a random quotient morphism ``phi`` into ``F(A)``."""
    FA = F_object(A)
    eta = unit(A)
    for _ in range(100):
        pi = random_quotient(rng, max_carrier)
        if section_count(pi) <= max_elements:
            break
    phi = random_quotient_morphism(rng, pi, FA)
    return compose_homomorphisms(G_morphism(phi), eta)


def random_compatible_subset(rng: random.Random, A: AbstractAlgebra, max_size: int = 4) -> list[int]:
    C = A.compat_matrix
    order = list(range(A.size))
    rng.shuffle(order)
    out: list[int] = []
    target = rng.randint(0, max_size)
    for a in order:
        if len(out) >= target:
            break
        if all(C[a, b] for b in out):
            out.append(a)
    return sorted(out)


# ---------------------------------------------------------------- posets

def _posets_naturally_labelled(n: int) -> Iterator[tuple[tuple[bool, ...], ...]]:
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        L = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                L[i][j] = True
        if all(not (L[i][j] and L[j][k]) or L[i][k] for i, j, k in itertools.product(range(n), repeat=3)):
            yield tuple(tuple(r) for r in L)


def posets_up_to_isomorphism(n: int) -> list[tuple[tuple[bool, ...], ...]]:
    """One representative per isomorphism class of ``n``-element posets."""
    perms = list(itertools.permutations(range(n)))
    seen: set = set()
    out = []
    for L in _posets_naturally_labelled(n):
        key = min(tuple(L[p[i]][p[j]] for i in range(n) for j in range(n)) for p in perms)
        if key not in seen:
            seen.add(key)
            out.append(L)
    return out


def compatibility_relations(leq: Sequence[Sequence[bool]]) -> Iterator[tuple[tuple[bool, ...], ...]]:
    """Every reflexive, symmetric, downward-closed relation on the poset."""
    n = len(leq)
    pairs = list(itertools.combinations(range(n), 2))
    below = [[r for r in range(n) if leq[r][p]] for p in range(n)]
    for mask in range(1 << len(pairs)):
        C = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                C[i][j] = C[j][i] = True
        if all(C[r][s] for p, q in itertools.product(range(n), repeat=2) if C[p][q]
               for r in below[p] for s in below[q]):
            yield tuple(tuple(r) for r in C)


def all_compatibility_posets(n: int) -> Iterator[CompatibilityPoset]:
    for L in posets_up_to_isomorphism(n):
        for C in compatibility_relations(L):
            yield CompatibilityPoset(L, C)
