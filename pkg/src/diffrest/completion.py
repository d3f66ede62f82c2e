"""Compatible completion through the monad ``G . F``.

All constructions are verified elementwise by enumeration; the brute-force
isomorphism search in :mod:`diffrest.oracle` backs uniqueness for small
completions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AbstractAlgebra, is_compatibly_complete, join_of, product_algebra
from .duality import (
    CompleteHomomorphism,
    F_object,
    G_object,
    compose_homomorphisms,
    identity_homomorphism,
    unit,
)
from .errors import PreconditionError, VerificationError
from .oracle import iter_isomorphisms
from .pfun import ConcreteAlgebra, PartialFunction, close_under_ops

BRUTE_FORCE_UNIQUENESS_CAP = 8


def is_join_dense(h: CompleteHomomorphism) -> bool:
    """Every target element is the join of the image elements below it."""
    B = h.target
    image = np.zeros(B.size, dtype=bool)
    image[list(h.mapping)] = True
    leq_b = B.leq_matrix
    for c in range(B.size):
        if join_of(B, np.flatnonzero(image & leq_b[:, c]).tolist()) != c:
            return False
    return True


def is_complete_embedding(h: CompleteHomomorphism) -> bool:
    return h.is_injective() and h.check().ok


@dataclass(frozen=True)
class CompletionWitness:
    algebra: AbstractAlgebra
    completion: ConcreteAlgebra
    embedding: CompleteHomomorphism


def compatible_completion(A: AbstractAlgebra) -> CompletionWitness:
    """``eta_A: A -> G(F(A))``, with the completion properties checked."""
    eta = unit(A)  # raises on non-atomic input
    completion = G_object(F_object(A))
    if not eta.is_injective():
        raise VerificationError("unit is not injective")
    rep = eta.check()
    if not rep:
        raise VerificationError(f"unit is not a complete homomorphism: {rep}")
    if not is_join_dense(eta):
        raise VerificationError("unit image is not join dense")
    if not is_compatibly_complete(completion.abstract):
        raise VerificationError("G(F(A)) is not compatibly complete")
    return CompletionWitness(A, completion, eta)


def key_embedding(iota: CompleteHomomorphism, iota_p: CompleteHomomorphism) -> CompleteHomomorphism:
    """``theta(b) = join{iota'(a) | iota(a) <= b}`` from ``B`` into ``C``.

    Hypotheses: both maps are complete embeddings of the same algebra,
    ``iota`` has join-dense image and the target of ``iota_p`` is compatibly
    complete.
    """
    if iota.source != iota_p.source:
        raise PreconditionError("the two embeddings have different sources")
    for name, h in (("iota", iota), ("iota'", iota_p)):
        if not h.is_injective():
            raise PreconditionError(f"{name} is not injective")
        rep = h.check()
        if not rep:
            raise PreconditionError(f"{name} is not a complete homomorphism: {rep}")
    if not is_join_dense(iota):
        raise PreconditionError("iota does not have join-dense image")
    B, C = iota.target, iota_p.target
    if not is_compatibly_complete(C):
        raise PreconditionError("target of iota' is not compatibly complete")
    A = iota.source
    leq_b = B.leq_matrix
    mapping = []
    for b in range(B.size):
        below = [iota_p.mapping[a] for a in range(A.size) if leq_b[iota.mapping[a], b]]
        j = join_of(C, below)
        if j is None:
            raise VerificationError(f"theta({b}) undefined: no join of {below}")
        mapping.append(j)
    theta = CompleteHomomorphism(B, C, tuple(mapping))
    if not theta.is_injective():
        raise VerificationError("theta is not injective")
    rep = theta.check()
    if not rep:
        raise VerificationError(f"theta is not a complete homomorphism: {rep}")
    if compose_homomorphisms(theta, iota).mapping != iota_p.mapping:
        raise VerificationError("theta . iota != iota'")
    return theta


def _require_completion(h: CompleteHomomorphism, name: str) -> None:
    if not h.is_injective():
        raise PreconditionError(f"{name} is not injective")
    if not is_join_dense(h):
        raise PreconditionError(f"{name} does not have join-dense image")
    if not is_compatibly_complete(h.target):
        raise PreconditionError(f"target of {name} is not compatibly complete")


def commuting_isomorphisms(iota: CompleteHomomorphism, iota_p: CompleteHomomorphism) -> list[tuple[int, ...]]:
    """All isomorphisms ``theta`` with ``theta . iota = iota'``, by exhaustive search."""
    return [iso for iso in iter_isomorphisms(iota.target, iota_p.target)
            if all(iso[b] == c for b, c in zip(iota.mapping, iota_p.mapping))]


def completion_uniqueness_iso(iota: CompleteHomomorphism, iota_p: CompleteHomomorphism,
                              brute_force_cap: int = BRUTE_FORCE_UNIQUENESS_CAP) -> CompleteHomomorphism:
    """The isomorphism between two completions of the same algebra.

    Uniqueness is confirmed by enumerating every commuting isomorphism when
    the completion has at most ``brute_force_cap`` elements; above that it
    rests on join density, which forces the value at every element.
    """
    _require_completion(iota, "iota")
    _require_completion(iota_p, "iota'")
    theta = key_embedding(iota, iota_p)
    back = key_embedding(iota_p, iota)
    if not theta.is_bijective():
        raise VerificationError("theta is not a bijection")
    if compose_homomorphisms(back, theta) != identity_homomorphism(iota.target):
        raise VerificationError("theta' . theta is not the identity")
    if iota.target.size <= brute_force_cap:
        isos = commuting_isomorphisms(iota, iota_p)
        if isos != [theta.mapping]:
            raise VerificationError(f"expected exactly one commuting isomorphism, found {len(isos)}")
    return theta


@dataclass(frozen=True)
class ExtensionResult:
    smallest: CompleteHomomorphism | None  # C -> B, when B is compatibly complete
    largest: CompleteHomomorphism | None   # B -> C, when kappa has join-dense image


def check_smallest_largest_extension(iota: CompleteHomomorphism, kappa: CompleteHomomorphism) -> ExtensionResult:
    """Factor ``kappa`` through the completion ``iota`` in whichever direction applies."""
    _require_completion(iota, "iota")
    if not kappa.is_injective() or not kappa.check():
        raise PreconditionError("kappa is not a complete embedding")
    smallest = largest = None
    if is_compatibly_complete(kappa.target):
        smallest = key_embedding(iota, kappa)
    if is_join_dense(kappa):
        largest = key_embedding(kappa, iota)
    return ExtensionResult(smallest, largest)


def two_element_algebra() -> AbstractAlgebra:
    """``{empty, Id}`` on a one-point base."""
    return close_under_ops([PartialFunction.identity(1)]).abstract


def enlarge_with_flag(C: AbstractAlgebra) -> tuple[AbstractAlgebra, CompleteHomomorphism]:
    """``C x {empty, Id}`` and the embedding ``c -> (c, empty)``."""
    two = two_element_algebra()
    B = product_algebra(C, two)
    return B, CompleteHomomorphism(C, B, tuple(c * two.size for c in range(C.size)))


def monad_idempotent(A: AbstractAlgebra) -> bool:
    """``eta`` at ``G(F(A))`` is an isomorphism."""
    GF = compatible_completion(A).completion.abstract
    return unit(GF).is_bijective()
