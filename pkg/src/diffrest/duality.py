"""The functors between atomic algebras and set quotients, and the adjunction data.

``F`` sends an atomic algebra to the projection of its atoms onto their
domain classes; ``G`` sends a quotient to the algebra of all its partial
sections.  Morphisms go the other way round in both directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .algebra import (
    AbstractAlgebra,
    atoms,
    check_axioms,
    domain_classes,
    is_atomic,
    is_meet_complete,
    join_of,
    meet_of,
)
from .errors import CapExceededError, PreconditionError, Report, VerificationError
from .pfun import ConcreteAlgebra, PartialFunction
from .setq import QuotientMorphism, SetQuotient, compose_morphisms, identity_morphism, validate_morphism

G_ELEMENT_CAP = 4096
EXHAUSTIVE_COMPLETENESS_CAP = 16


# ---------------------------------------------------------------- homomorphisms

@dataclass(frozen=True, eq=False)
class CompleteHomomorphism:
    source: AbstractAlgebra
    target: AbstractAlgebra
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.size:
            raise ValueError("mapping length differs from source size")
        if any(not 0 <= b < self.target.size for b in self.mapping):
            raise ValueError("mapping leaves the target")

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompleteHomomorphism):
            return NotImplemented
        return (self.mapping == other.mapping and self.source == other.source
                and self.target == other.target)

    def __hash__(self) -> int:
        return hash(self.mapping)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=np.int64)

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def is_bijective(self) -> bool:
        return self.is_injective() and len(self.mapping) == self.target.size

    def check(self, exhaustive: bool = False) -> Report:
        rep = check_homomorphism(self)
        if not rep:
            return rep
        return check_completeness(self, exhaustive=exhaustive)


def check_homomorphism(h: CompleteHomomorphism) -> Report:
    A, B, m = h.source, h.target, h.array
    for name, ta, tb in (("minus", A.minus, B.minus), ("restrict", A.restrict, B.restrict)):
        bad = np.argwhere(m[ta] != tb[m[:, None], m[None, :]])
        if len(bad):
            a, b = (int(v) for v in bad[0])
            return Report.failed(f"preserves-{name}", a=a, b=b)
    return Report.passed()


def check_completeness(h: CompleteHomomorphism, exhaustive: bool = False,
                       cap: int = EXHAUSTIVE_COMPLETENESS_CAP) -> Report:
    """Join and meet completeness.

    The default pairwise mode is exact for algebras satisfying the axioms:
    a set with a join is bounded, so its join is an iterated binary join
    whose partial joins all exist (and likewise for nonempty meets).  The
    exhaustive mode walks every subset of the source and is capped.
    """
    A, B, m = h.source, h.target, h.array
    if exhaustive:
        if A.size > cap:
            raise CapExceededError(f"exhaustive completeness capped at {cap} source elements")
        for r in range(A.size + 1):
            for S in itertools.combinations(range(A.size), r):
                img = sorted(set(m[list(S)].tolist()))
                j = join_of(A, S)
                if j is not None and join_of(B, img) != m[j]:
                    return Report.failed("join-complete", subset=S)
                if S:
                    mt = meet_of(A, S)
                    if mt is not None and meet_of(B, img) != m[mt]:
                        return Report.failed("meet-complete", subset=S)
        return Report.passed()
    if A.zero is None or B.zero is None or m[A.zero] != B.zero:
        return Report.failed("join-complete", subset=())
    JA, JB = A.join_table, B.join_table
    hj = np.where(JA >= 0, m[np.maximum(JA, 0)], -1)
    bad = np.argwhere((JA >= 0) & (JB[m[:, None], m[None, :]] != hj))
    if len(bad):
        return Report.failed("join-complete", subset=tuple(int(v) for v in bad[0]))
    if not is_meet_complete(B):
        return Report.failed("meet-complete", subset="target lacks binary meets")
    bad = np.argwhere(m[A.meet_table] != B.meet_table[m[:, None], m[None, :]])
    if len(bad):
        return Report.failed("meet-complete", subset=tuple(int(v) for v in bad[0]))
    return Report.passed()


def identity_homomorphism(A: AbstractAlgebra) -> CompleteHomomorphism:
    return CompleteHomomorphism(A, A, tuple(range(A.size)))


def compose_homomorphisms(g: CompleteHomomorphism, h: CompleteHomomorphism) -> CompleteHomomorphism:
    """``g . h``: apply ``h`` first."""
    if h.target != g.source:
        raise PreconditionError("target of h is not the source of g")
    return CompleteHomomorphism(h.source, g.target, tuple(g.mapping[b] for b in h.mapping))


# ---------------------------------------------------------------- F on objects

def _require_atomic(A: AbstractAlgebra) -> None:
    rep = check_axioms(A)
    if not rep:
        raise PreconditionError(f"axioms fail: {rep}")
    if not is_atomic(A):
        raise PreconditionError("algebra is not atomic")


def F_object(A: AbstractAlgebra) -> SetQuotient:
    """Atoms (ascending) projected onto their domain classes.

    Carrier point ``i`` is ``atoms(A)[i]``; classes are numbered by first
    occurrence.
    """
    _require_atomic(A)
    at = atoms(A)
    cls = domain_classes(A).class_of
    number: dict[int, int] = {}
    projection = tuple(number.setdefault(cls[x], len(number)) for x in at)
    return SetQuotient(projection)


# ---------------------------------------------------------------- G on objects

def section(pi: SetQuotient, points) -> PartialFunction:
    """The partial section of ``pi`` whose image is ``points``."""
    return PartialFunction.from_pairs(((pi.projection[x], x) for x in points), pi.carrier_size)


def section_points(f: PartialFunction) -> frozenset[int]:
    return f.image


@lru_cache(maxsize=512)
def G_object(pi: SetQuotient, cap: int = G_ELEMENT_CAP) -> ConcreteAlgebra:
    """All partial functions contained in ``{(pi(x), x)}``."""
    count = 1
    for f in pi.fibers:
        count *= 1 + len(f)
    if count > cap:
        raise CapExceededError(f"G would have {count} elements (cap {cap})")
    choices = [(None,) + f for f in pi.fibers]
    elems = [section(pi, [x for x in pick if x is not None]) for pick in itertools.product(*choices)]
    return ConcreteAlgebra(pi.carrier_size, tuple(sorted(elems)))


def G_algebra(pi: SetQuotient) -> AbstractAlgebra:
    return G_object(pi).abstract


# ---------------------------------------------------------------- morphisms

@dataclass(frozen=True)
class GaloisDual:
    """Per-element atom maps ``phi_a`` and the assembled partial map on atoms."""

    local: dict[int, dict[int, int]]  # a -> {atom y of B below h(a): atom of A below a}
    assembled: dict[int, int]         # atom y of B -> atom of A


def galois_dual(h: CompleteHomomorphism) -> GaloisDual:
    """Compute each ``phi_a(y)`` as the least ``a' <= a`` with ``y <= h(a')``.

    Asserts the Galois property, agreement across different ``a``, and
    ``y <= h(Fh(y))``.
    """
    A, B, m = h.source, h.target, h.array
    leq_a, leq_b, meet_a = A.leq_matrix, B.leq_matrix, A.meet_table
    at_a, at_b = set(atoms(A)), atoms(B)
    local: dict[int, dict[int, int]] = {}
    assembled: dict[int, int] = {}
    for a in range(A.size):
        down = np.flatnonzero(leq_a[:, a])
        local[a] = {}
        for y in at_b:
            if not leq_b[y, m[a]]:
                continue
            hits = leq_b[y, m[down]]
            cands = down[hits].tolist()
            least = reduce(lambda u, v: int(meet_a[u, v]), cands)
            # phi_a(y) <= a'  <=>  y <= h(a')   for every a' <= a
            if not np.array_equal(leq_a[least, down], hits):
                raise VerificationError(f"Galois property fails for a={a}, y={y}")
            if least not in at_a:
                raise VerificationError(f"phi_{a}({y}) = {least} is not an atom")
            local[a][y] = least
            prev = assembled.setdefault(y, least)
            if prev != least:
                raise VerificationError(f"Fh not well defined at atom {y}")
    for y, x in assembled.items():
        if not leq_b[y, m[x]]:
            raise VerificationError(f"y <= h(Fh(y)) fails at {y}")
    return GaloisDual(local, assembled)


def F_morphism(h: CompleteHomomorphism) -> QuotientMorphism:
    """The partial map ``F(B) -> F(A)`` dual to ``h: A -> B``."""
    A, B = h.source, h.target
    src, tgt = F_object(B), F_object(A)
    pos_a = {x: i for i, x in enumerate(atoms(A))}
    dual = galois_dual(h)
    mapping = tuple(
        pos_a[dual.assembled[y]] if y in dual.assembled else None for y in atoms(B))
    rep = validate_morphism(mapping, src, tgt)
    if not rep:
        raise VerificationError(f"Fh is not a quotient morphism ({rep}); h was not complete")
    return QuotientMorphism(src, tgt, mapping)


def G_morphism(phi: QuotientMorphism) -> CompleteHomomorphism:
    """``G(phi): G(rho) -> G(pi)`` for ``phi: pi -> rho``.

    ``g`` goes to ``{(pi(x), x) | x in dom(phi), (rho(phi x), phi x) in g}``.
    """
    pi, rho = phi.source, phi.target
    Gr, Gp = G_object(rho), G_object(pi)
    idx = Gp.index
    mapping = []
    for g in Gr.elements:
        pts = g.image
        mapping.append(idx[section(pi, [x for x, y in enumerate(phi.mapping) if y is not None and y in pts])])
    out = CompleteHomomorphism(Gr.abstract, Gp.abstract, tuple(mapping))
    rep = out.check()
    if not rep:
        raise VerificationError(f"G(phi) is not a complete homomorphism: {rep}")
    return out


def domain_equivalence_holds(phi: QuotientMorphism) -> bool:
    """``rho(phi x) in dom(g)  <=>  pi(x) in dom(G(phi)(g))`` for all x, g."""
    Gphi = G_morphism(phi)
    Gr, Gp = G_object(phi.target), G_object(phi.source)
    for gi, g in enumerate(Gr.elements):
        image = Gp.elements[Gphi.mapping[gi]]
        for x, y in enumerate(phi.mapping):
            if y is None:
                continue
            if (phi.target.projection[y] in g.domain) != (phi.source.projection[x] in image.domain):
                return False
    return True


# ---------------------------------------------------------------- unit and counit

def unit(A: AbstractAlgebra) -> CompleteHomomorphism:
    """``a -> {([x], x) | x an atom below a}`` into ``G(F(A))``."""
    pi = F_object(A)
    GF = G_object(pi)
    at = atoms(A)
    leq_m = A.leq_matrix
    mapping = tuple(
        GF.index[section(pi, [i for i, x in enumerate(at) if leq_m[x, a]])] for a in range(A.size))
    return CompleteHomomorphism(A, GF.abstract, mapping)


def counit(pi: SetQuotient) -> QuotientMorphism:
    """``x -> {(pi(x), x)}``, a total bijection ``pi -> F(G(pi))``."""
    Gp = G_object(pi)
    FG = F_object(Gp.abstract)
    pos = {Gp.elements[x]: i for i, x in enumerate(atoms(Gp.abstract))}
    mapping = tuple(pos[section(pi, [x])] for x in range(pi.carrier_size))
    return QuotientMorphism.checked(pi, FG, mapping)


# ---------------------------------------------------------------- adjunction checks

def check_triangle_identities(A: AbstractAlgebra | None = None, pi: SetQuotient | None = None) -> Report:
    """``F(eta_A) . lambda_{F(A)} = id`` and ``G(lambda_pi) . eta_{G(pi)} = id``."""
    if A is not None:
        FA = F_object(A)
        left = compose_morphisms(F_morphism(unit(A)), counit(FA))
        if left != identity_morphism(FA):
            bad = next(x for x, y in enumerate(left.mapping) if y != x)
            return Report.failed("F-triangle", point=bad, image=left.mapping[bad])
    if pi is not None:
        Gp = G_algebra(pi)
        right = compose_homomorphisms(G_morphism(counit(pi)), unit(Gp))
        if right != identity_homomorphism(Gp):
            bad = next(a for a, b in enumerate(right.mapping) if a != b)
            return Report.failed("G-triangle", element=bad, image=right.mapping[bad])
    return Report.passed()


def check_unit_naturality(h: CompleteHomomorphism) -> Report:
    """``G(F(h)) . eta_A = eta_B . h``."""
    lhs = compose_homomorphisms(G_morphism(F_morphism(h)), unit(h.source))
    rhs = compose_homomorphisms(unit(h.target), h)
    if lhs != rhs:
        bad = next(a for a, (u, v) in enumerate(zip(lhs.mapping, rhs.mapping)) if u != v)
        return Report.failed("eta-natural", element=bad)
    return Report.passed()


def check_counit_naturality(phi: QuotientMorphism) -> Report:
    """``F(G(phi)) . lambda_pi = lambda_rho . phi``."""
    lhs = compose_morphisms(F_morphism(G_morphism(phi)), counit(phi.source))
    rhs = compose_morphisms(counit(phi.target), phi)
    if lhs != rhs:
        bad = next(x for x, (u, v) in enumerate(zip(lhs.mapping, rhs.mapping)) if u != v)
        return Report.failed("lambda-natural", point=bad)
    return Report.passed()


def check_naturality(morphism) -> Report:
    if isinstance(morphism, CompleteHomomorphism):
        return check_unit_naturality(morphism)
    return check_counit_naturality(morphism)


def fiber_multiset(pi: SetQuotient) -> tuple[int, ...]:
    return tuple(sorted(pi.fiber_sizes()))


def relabel_homomorphism(A: AbstractAlgebra, perm: Sequence[int]) -> CompleteHomomorphism:
    """The isomorphism ``A -> A.relabel(perm)``."""
    return CompleteHomomorphism(A, A.relabel(perm), tuple(int(p) for p in perm))
