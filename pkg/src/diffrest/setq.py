"""Set quotients and the partial maps between them.

A quotient ``pi: X ->> X0`` is stored as its projection table with classes
numbered ``0..k-1``.  A morphism is a partial map of carriers, ``None`` where
undefined, subject to the three fibre conditions.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .errors import PreconditionError, Report


@dataclass(frozen=True)
class SetQuotient:
    projection: tuple[int, ...]

    def __post_init__(self):
        classes = set(self.projection)
        if classes != set(range(len(classes))):
            raise ValueError(f"projection {self.projection} is not onto 0..{len(classes) - 1}")

    @classmethod
    def from_fibers(cls, sizes: Sequence[int]) -> "SetQuotient":
        """Quotient with consecutive fibres of the given sizes."""
        if any(s < 1 for s in sizes):
            raise ValueError("fibres must be nonempty")
        return cls(tuple(c for c, s in enumerate(sizes) for _ in range(s)))

    @property
    def carrier_size(self) -> int:
        return len(self.projection)

    @cached_property
    def class_count(self) -> int:
        return max(self.projection, default=-1) + 1

    @cached_property
    def fibers(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.class_count)]
        for x, c in enumerate(self.projection):
            out[c].append(x)
        return tuple(tuple(f) for f in out)

    def fiber_sizes(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fibers)

    def __call__(self, x: int) -> int:
        return self.projection[x]


PartialMap = tuple[Optional[int], ...]


@dataclass(frozen=True)
class QuotientMorphism:
    source: SetQuotient
    target: SetQuotient
    mapping: PartialMap

    def __post_init__(self):
        if len(self.mapping) != self.source.carrier_size:
            raise ValueError("mapping length differs from source carrier")
        for y in self.mapping:
            if y is not None and not 0 <= y < self.target.carrier_size:
                raise ValueError(f"image {y} outside target carrier")

    @classmethod
    def checked(cls, source: SetQuotient, target: SetQuotient, mapping: Sequence[Optional[int]]) -> "QuotientMorphism":
        rep = validate_morphism(mapping, source, target)
        if not rep:
            raise PreconditionError(f"not a quotient morphism: {rep}")
        return cls(source, target, tuple(mapping))

    def __call__(self, x: int) -> int | None:
        return self.mapping[x]

    @property
    def domain(self) -> list[int]:
        return [x for x, y in enumerate(self.mapping) if y is not None]


def identity_morphism(pi: SetQuotient) -> QuotientMorphism:
    return QuotientMorphism(pi, pi, tuple(range(pi.carrier_size)))


def validate_morphism(mapping: Sequence[Optional[int]], source: SetQuotient, target: SetQuotient) -> Report:
    """Check preservation of equivalence, then fibrewise injectivity and surjectivity."""
    if len(mapping) != source.carrier_size:
        return Report.failed("SHAPE", length=len(mapping))
    pi, rho = source.projection, target.projection
    dom = [x for x, y in enumerate(mapping) if y is not None]
    for x in dom:
        if not 0 <= mapping[x] < target.carrier_size:
            return Report.failed("SHAPE", x=x, image=mapping[x])
    for x, x2 in itertools.combinations(dom, 2):
        if pi[x] == pi[x2] and rho[mapping[x]] != rho[mapping[x2]]:
            return Report.failed("Q1", x=x, x2=x2)
    tilde = _class_map(mapping, source, target)
    for x0, y0 in sorted(tilde.items()):
        restricted = {x: mapping[x] for x in source.fibers[x0] if mapping[x] is not None}
        seen: dict[int, int] = {}
        for x, y in sorted(restricted.items()):
            if y in seen:
                return Report.failed("Q2", x0=x0, y0=y0, x=seen[y], x2=x)
            seen[y] = x
        for y in target.fibers[y0]:
            if y not in seen:
                return Report.failed("Q3", x0=x0, y0=y0, uncovered=y)
    return Report.passed()


def _class_map(mapping: Sequence[Optional[int]], source: SetQuotient, target: SetQuotient) -> dict[int, int]:
    out: dict[int, int] = {}
    for x, y in enumerate(mapping):
        if y is not None:
            out.setdefault(source.projection[x], target.projection[y])
    return out


def induced_class_map(phi: QuotientMorphism) -> dict[int, int]:
    """The partial map on classes ``pi(x) -> rho(phi(x))``."""
    return _class_map(phi.mapping, phi.source, phi.target)


def compose_morphisms(psi: QuotientMorphism, phi: QuotientMorphism) -> QuotientMorphism:
    """``psi . phi``: apply ``phi`` first."""
    if phi.target != psi.source:
        raise PreconditionError("target of phi is not the source of psi")
    mapping = tuple(None if y is None else psi.mapping[y] for y in phi.mapping)
    rep = validate_morphism(mapping, phi.source, psi.target)
    assert rep, f"composite failed {rep}"
    return QuotientMorphism(phi.source, psi.target, mapping)


def quotients_isomorphic(pi: SetQuotient, rho: SetQuotient,
                         brute_force: bool = False) -> tuple[QuotientMorphism, QuotientMorphism] | None:
    """A pair of mutually inverse total morphisms, or None.

    The fast path matches fibres of equal size; ``brute_force`` instead tries
    every bijection of carriers (small carriers only) as a cross-check.
    """
    if pi.carrier_size != rho.carrier_size:
        return None
    if brute_force:
        return _iso_brute(pi, rho)
    if Counter(pi.fiber_sizes()) != Counter(rho.fiber_sizes()):
        return None
    free = {}
    for c, f in enumerate(rho.fibers):
        free.setdefault(len(f), []).append(c)
    mapping: list[int] = [0] * pi.carrier_size
    for c, f in enumerate(pi.fibers):
        d = free[len(f)].pop(0)
        for x, y in zip(f, rho.fibers[d]):
            mapping[x] = y
    inverse: list[int] = [0] * rho.carrier_size
    for x, y in enumerate(mapping):
        inverse[y] = x
    return (QuotientMorphism.checked(pi, rho, mapping), QuotientMorphism.checked(rho, pi, inverse))


def _iso_brute(pi: SetQuotient, rho: SetQuotient):
    n = pi.carrier_size
    if n > 8:
        raise PreconditionError("brute-force quotient isomorphism limited to 8 points")
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for x, y in enumerate(perm):
            inv[y] = x
        if validate_morphism(perm, pi, rho) and validate_morphism(inv, rho, pi):
            return (QuotientMorphism(pi, rho, tuple(perm)), QuotientMorphism(rho, pi, tuple(inv)))
    return None
