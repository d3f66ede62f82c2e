"""Finite {-, |>}-algebras given by operation tables.

Everything here is exhaustive over the element set, vectorised with numpy
where the tuple space is cubic.  Elements are the integers ``0..size-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError, Report, VerificationError
from .pfun import PartialFunction

SUBSET_ENUMERATION_CAP = 20


class AbstractAlgebra:
    """Operation tables for ``-`` and ``|>`` on ``size`` elements.

    ``labels`` is optional display data (for table algebras extracted from a
    concrete algebra it holds the partial functions).
    """

    def __init__(self, minus, restrict, labels: Sequence | None = None):
        minus = np.asarray(minus, dtype=np.int64)
        restrict = np.asarray(restrict, dtype=np.int64)
        n = minus.shape[0] if minus.ndim == 2 else -1
        for name, t in (("minus", minus), ("restrict", restrict)):
            if t.shape != (n, n) or n < 1:
                raise ValueError(f"{name} table must be a nonempty square matrix")
            if t.min() < 0 or t.max() >= n:
                raise ValueError(f"{name} table has entries outside 0..{n - 1}")
        if labels is not None and len(labels) != n:
            raise ValueError("labels length differs from table size")
        minus.setflags(write=False)
        restrict.setflags(write=False)
        self.minus = minus
        self.restrict = restrict
        self.labels = tuple(labels) if labels is not None else None

    @property
    def size(self) -> int:
        return self.minus.shape[0]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbstractAlgebra):
            return NotImplemented
        return np.array_equal(self.minus, other.minus) and np.array_equal(self.restrict, other.restrict)

    def __hash__(self) -> int:
        return hash((self.minus.tobytes(), self.restrict.tobytes()))

    def __repr__(self) -> str:
        return f"AbstractAlgebra(size={self.size})"

    def label(self, a: int) -> str:
        return str(self.labels[a]) if self.labels is not None else str(a)

    def sub(self, a: int, b: int) -> int:
        return int(self.minus[a, b])

    def rest(self, a: int, b: int) -> int:
        return int(self.restrict[a, b])

    @cached_property
    def meet_table(self) -> np.ndarray:
        ar = np.arange(self.size)
        return self.minus[ar[:, None], self.minus]

    @cached_property
    def leq_matrix(self) -> np.ndarray:
        """``leq_matrix[a, b]`` iff ``a . b == a``."""
        return self.meet_table == np.arange(self.size)[:, None]

    @cached_property
    def zero(self) -> int | None:
        bottoms = np.flatnonzero(self.leq_matrix.all(axis=1))
        return int(bottoms[0]) if len(bottoms) == 1 else None

    @cached_property
    def domain_leq_matrix(self) -> np.ndarray:
        """``[a, b]`` iff ``a <= b |> a``."""
        ar = np.arange(self.size)
        return self.leq_matrix[ar[:, None], self.restrict.T]

    @cached_property
    def compat_matrix(self) -> np.ndarray:
        return self.restrict == self.restrict.T

    @cached_property
    def join_table(self) -> np.ndarray:
        """Binary joins under <=, ``-1`` where no least upper bound exists."""
        leq = self.leq_matrix
        n = self.size
        ub = (leq[:, None, :] & leq[None, :, :]).reshape(n * n, n)
        # u is least in ub(a,b) iff every upper bound of {a,b} lies above u
        above = ub.astype(np.int32) @ leq.T.astype(np.int32)
        least = ub & (above == ub.sum(axis=1, keepdims=True))
        counts = least.sum(axis=1)
        if counts.max(initial=0) > 1:
            raise VerificationError("<= is not antisymmetric: two least upper bounds")
        out = np.where(counts == 1, least.argmax(axis=1), -1)
        return out.reshape(n, n)

    def relabel(self, perm: Sequence[int]) -> "AbstractAlgebra":
        """Isomorphic copy in which old element ``a`` becomes ``perm[a]``."""
        perm = np.asarray(perm, dtype=np.int64)
        n = self.size
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("not a permutation")
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        minus = perm[self.minus[inv[:, None], inv[None, :]]]
        restrict = perm[self.restrict[inv[:, None], inv[None, :]]]
        labels = [self.labels[i] for i in inv] if self.labels is not None else None
        return AbstractAlgebra(minus, restrict, labels)


# ---------------------------------------------------------------- axioms

AXIOM_NAMES = ("AX1", "AX2", "AX3", "AX4", "AX5")


def _axiom_violations(A: AbstractAlgebra) -> Iterator[tuple[str, np.ndarray, tuple[str, ...]]]:
    M, R = A.minus, A.restrict
    n = A.size
    ar = np.arange(n)
    meet = A.meet_table
    # Ax.1  a - (b - a) = a
    yield "AX1", M[ar[:, None], M.T] != ar[:, None], ("a", "b")
    # Ax.2  a . b = b . a
    yield "AX2", meet != meet.T, ("a", "b")
    # Ax.3  (a - b) - c = (a - c) - b
    lhs = M[M[:, :, None], ar[None, None, :]]
    rhs = M[M[:, None, :], ar[None, :, None]]
    yield "AX3", lhs != rhs, ("a", "b", "c")
    # Ax.4  (a |> c) . (b |> c) = (a |> b) |> c
    lhs = meet[R[:, None, :], R[None, :, :]]
    rhs = R[R[:, :, None], ar[None, None, :]]
    yield "AX4", lhs != rhs, ("a", "b", "c")
    # Ax.5  (a . b) |> a = a . b
    yield "AX5", R[meet, ar[:, None]] != meet, ("a", "b")


def check_axioms(A: AbstractAlgebra) -> Report:
    """Evaluate the five defining equations over every tuple.

    Reports the first counterexample: lowest-numbered axiom, then the
    lexicographically least argument tuple.
    """
    for name, bad, vars_ in _axiom_violations(A):
        hits = np.argwhere(bad)
        if len(hits):
            return Report.failed(name, **{v: int(x) for v, x in zip(vars_, hits[0])})
    return Report.passed()


def satisfies_axioms(A: AbstractAlgebra) -> bool:
    return check_axioms(A).ok


def _require_axioms(A: AbstractAlgebra) -> None:
    rep = check_axioms(A)
    if not rep:
        raise PreconditionError(f"axioms fail: {rep}")


# ---------------------------------------------------------------- order

def leq(A: AbstractAlgebra, a: int, b: int) -> bool:
    return bool(A.leq_matrix[a, b])


def domain_preorder(A: AbstractAlgebra, a: int, b: int) -> bool:
    return bool(A.domain_leq_matrix[a, b])


def downset(A: AbstractAlgebra, a: int) -> list[int]:
    return np.flatnonzero(A.leq_matrix[:, a]).tolist()


@dataclass(frozen=True)
class DomainClass:
    representative: int
    members: frozenset[int]


@dataclass(frozen=True)
class DomainClasses:
    classes: tuple[DomainClass, ...]
    class_of: tuple[int, ...]
    meet: np.ndarray  # class index x class index -> class index of [a |> b]

    def __len__(self) -> int:
        return len(self.classes)


def domain_classes(A: AbstractAlgebra) -> DomainClasses:
    """Partition by mutual domain inclusion, with the meet ``[a] ^ [b] = [a |> b]``."""
    dle = A.domain_leq_matrix
    equiv = dle & dle.T
    n = A.size
    class_of = [-1] * n
    classes: list[DomainClass] = []
    for a in range(n):
        if class_of[a] >= 0:
            continue
        members = np.flatnonzero(equiv[a]).tolist()
        for m in members:
            if class_of[m] >= 0:
                raise VerificationError("domain preorder is not transitive")
            class_of[m] = len(classes)
        classes.append(DomainClass(a, frozenset(members)))
    k = len(classes)
    cm = np.full((k, k), -1, dtype=np.int64)
    co = np.asarray(class_of)
    table = co[A.restrict]
    for a in range(n):
        for b in range(n):
            i, j, c = class_of[a], class_of[b], int(table[a, b])
            if cm[i, j] == -1:
                cm[i, j] = c
            elif cm[i, j] != c:
                raise VerificationError(f"class meet not well defined at ({a},{b})")
    z = A.zero
    if z is not None and classes[class_of[z]].members != frozenset([z]):
        raise VerificationError("[0] != {0}")
    return DomainClasses(tuple(classes), tuple(class_of), cm)


# ---------------------------------------------------------------- atoms

def atoms(A: AbstractAlgebra) -> list[int]:
    """Minimal nonzero elements, ascending."""
    z = A.zero
    if z is None:
        raise PreconditionError("no least element")
    leq_m = A.leq_matrix
    nonzero = np.ones(A.size, dtype=bool)
    nonzero[z] = False
    below = leq_m & nonzero[:, None] & nonzero[None, :]
    # a is an atom iff the only nonzero element below it is itself
    return [a for a in range(A.size) if nonzero[a] and below[:, a].sum() == 1]


def atoms_below(A: AbstractAlgebra, a: int) -> list[int]:
    col = A.leq_matrix[:, a]
    return [x for x in atoms(A) if col[x]]


def is_atomic(A: AbstractAlgebra) -> bool:
    z = A.zero
    at = atoms(A)
    leq_m = A.leq_matrix
    return all(a == z or leq_m[at, a].any() for a in range(A.size))


def is_atomistic(A: AbstractAlgebra) -> bool:
    at = atoms(A)
    leq_m = A.leq_matrix
    for a in range(A.size):
        below = [x for x in at if leq_m[x, a]]
        if join_of(A, below) != a:
            return False
    return True


# ---------------------------------------------------------------- bounds

def join_of(A: AbstractAlgebra, S: Iterable[int]) -> int | None:
    """Least upper bound by scanning all elements; None when it does not exist."""
    S = list(S)
    leq_m = A.leq_matrix
    ub = leq_m[S].all(axis=0) if S else np.ones(A.size, dtype=bool)
    cand = np.flatnonzero(ub)
    least = [u for u in cand if leq_m[u, cand].all()]
    if len(least) > 1:
        raise VerificationError("two least upper bounds: <= is not a partial order")
    return int(least[0]) if least else None


def meet_of(A: AbstractAlgebra, S: Iterable[int]) -> int | None:
    S = list(S)
    if not S:
        raise ValueError("meet_of needs a nonempty set")
    leq_m = A.leq_matrix
    lb = leq_m[:, S].all(axis=1)
    cand = np.flatnonzero(lb)
    greatest = [l for l in cand if leq_m[cand, l].all()]
    if len(greatest) > 1:
        raise VerificationError("two greatest lower bounds: <= is not a partial order")
    return int(greatest[0]) if greatest else None


# ---------------------------------------------------------------- compatibility

def compatible_abstract(A: AbstractAlgebra, a: int, b: int) -> bool:
    return bool(A.compat_matrix[a, b])


def is_pairwise_compatible(A: AbstractAlgebra, S: Sequence[int]) -> bool:
    S = list(S)
    return bool(A.compat_matrix[np.ix_(S, S)].all()) if S else True


def iter_compatible_subsets(A: AbstractAlgebra) -> Iterator[tuple[int, ...]]:
    """All pairwise-compatible subsets (cliques of the compatibility graph), the empty one first."""
    C = A.compat_matrix
    n = A.size

    def extend(clique: tuple[int, ...], start: int, allowed: np.ndarray):
        yield clique
        for v in range(start, n):
            if allowed[v]:
                yield from extend(clique + (v,), v + 1, allowed & C[v])

    yield from extend((), 0, np.ones(n, dtype=bool))


def _check_cap(A: AbstractAlgebra, cap: int) -> None:
    if A.size > cap:
        raise CapExceededError(f"subset enumeration capped at {cap} elements, algebra has {A.size}")


def is_meet_complete(A: AbstractAlgebra, method: str = "pairs",
                     cap: int = SUBSET_ENUMERATION_CAP) -> bool:
    """Every nonempty subset has a meet.

    ``"pairs"`` checks binary meets only, which is exact for finite posets
    (finite meets are iterated binary meets).  ``"enumerate"`` scans every
    nonempty subset and is capped.
    """
    if method == "enumerate":
        _check_cap(A, cap)
        n = A.size
        for r in range(1, n + 1):
            for S in itertools.combinations(range(n), r):
                if meet_of(A, S) is None:
                    return False
        return True
    if method != "pairs":
        raise ValueError(f"unknown method {method!r}")
    leq_m = A.leq_matrix
    m = A.meet_table
    # m[a,b] must be a lower bound of a and b above every other lower bound
    ar = np.arange(A.size)
    if not (leq_m[m, ar[:, None]] & leq_m[m, ar[None, :]]).all():
        return False
    lower = leq_m[:, None, :] & leq_m[:, :, None]   # [l, a, b]: l <= a and l <= b
    above = leq_m[np.arange(A.size)[:, None, None], m[None, :, :]]  # l <= m[a,b]
    return bool((~lower | above).all())


def compatibly_complete_witness(A: AbstractAlgebra, method: str = "pairs",
                                cap: int = SUBSET_ENUMERATION_CAP) -> tuple[int, ...] | None:
    """A pairwise-compatible subset without a join, or None.

    ``"pairs"`` uses an exact reduction valid whenever compatibility is
    reflexive, symmetric and downward closed: a least element exists, every
    compatible pair has a join ``d``, and every ``c`` compatible with both
    members is compatible with ``d``.  ``"enumerate"`` scans all cliques.
    """
    if method == "enumerate":
        _check_cap(A, cap)
        for S in iter_compatible_subsets(A):
            if join_of(A, S) is None:
                return S
        return None
    if method != "pairs":
        raise ValueError(f"unknown method {method!r}")
    if A.zero is None:
        return ()
    C = A.compat_matrix
    J = A.join_table
    bad = np.argwhere(C & (J < 0))
    if len(bad):
        return tuple(int(x) for x in bad[0])
    n = A.size
    for a in range(n):
        for b in np.flatnonzero(C[a]):
            d = J[a, b]
            cs = C[a] & C[b] & ~C[d]
            if cs.any():
                # {a, b, c} is pairwise compatible but has no upper bound
                return (a, int(b), int(np.flatnonzero(cs)[0]))
    return None


def is_compatibly_complete(A: AbstractAlgebra, method: str = "pairs",
                           cap: int = SUBSET_ENUMERATION_CAP) -> bool:
    return compatibly_complete_witness(A, method, cap) is None


# ---------------------------------------------------------------- constructions

def product_algebra(A: AbstractAlgebra, B: AbstractAlgebra) -> AbstractAlgebra:
    """Direct product; element ``(a, b)`` is encoded as ``a * |B| + b``."""
    na, nb = A.size, B.size
    a_idx = np.repeat(np.arange(na), nb)
    b_idx = np.tile(np.arange(nb), na)
    minus = A.minus[a_idx[:, None], a_idx[None, :]] * nb + B.minus[b_idx[:, None], b_idx[None, :]]
    restrict = A.restrict[a_idx[:, None], a_idx[None, :]] * nb + B.restrict[b_idx[:, None], b_idx[None, :]]
    labels = None
    if A.labels is not None and B.labels is not None:
        labels = [(A.labels[i], B.labels[j]) for i, j in zip(a_idx, b_idx)]
    return AbstractAlgebra(minus, restrict, labels)


def subalgebra(A: AbstractAlgebra, elements: Iterable[int]) -> tuple[AbstractAlgebra, list[int]]:
    """Restriction of ``A`` to a closed subset; returns it with the inclusion map."""
    elems = sorted(set(elements))
    pos = {e: i for i, e in enumerate(elems)}
    try:
        minus = [[pos[int(A.minus[a, b])] for b in elems] for a in elems]
        restrict = [[pos[int(A.restrict[a, b])] for b in elems] for a in elems]
    except KeyError as exc:
        raise PreconditionError(f"subset not closed: missing {exc.args[0]}") from None
    labels = [A.labels[e] for e in elems] if A.labels is not None else None
    return AbstractAlgebra(minus, restrict, labels), elems


# ---------------------------------------------------------------- poset embedding

@dataclass(frozen=True)
class CompatibilityPoset:
    """``leq[p][q]`` is the order, ``compat[p][q]`` the compatibility relation."""

    leq: tuple[tuple[bool, ...], ...]
    compat: tuple[tuple[bool, ...], ...]

    @property
    def size(self) -> int:
        return len(self.leq)

    def check(self) -> Report:
        n = self.size
        L, C = self.leq, self.compat
        for p in range(n):
            if not L[p][p]:
                return Report.failed("leq-reflexive", p=p)
            if not C[p][p]:
                return Report.failed("compat-reflexive", p=p)
        for p, q in itertools.product(range(n), repeat=2):
            if p != q and L[p][q] and L[q][p]:
                return Report.failed("leq-antisymmetric", p=p, q=q)
            if C[p][q] != C[q][p]:
                return Report.failed("compat-symmetric", p=p, q=q)
        for p, q, r in itertools.product(range(n), repeat=3):
            if L[p][q] and L[q][r] and not L[p][r]:
                return Report.failed("leq-transitive", p=p, q=q, r=r)
        for p, q, r in itertools.product(range(n), repeat=3):
            if C[p][q] and L[r][p] and not C[r][q]:
                return Report.failed("compat-downward-closed", p=p, q=q, r=r)
        return Report.passed()


@dataclass(frozen=True)
class PosetEmbedding:
    points: tuple[frozenset[int], ...]  # base point index -> subset of P it encodes
    images: tuple[PartialFunction, ...]

    def __getitem__(self, p: int) -> PartialFunction:
        return self.images[p]


def embed_poset_with_compatibility(P: CompatibilityPoset) -> PosetEmbedding:
    """Represent ``P`` as partial functions ordered by inclusion.

    The point ``{p'}`` carries ``p'`` for every ``p' <= p``, and the point
    ``{p', q}`` carries ``p'`` whenever ``p' <= p`` and ``p'`` is
    incompatible with ``q``.  Base points are the singletons in order
    followed by the incompatible pairs in order.
    """
    rep = P.check()
    if not rep:
        raise PreconditionError(f"not a poset with a compatibility relation: {rep}")
    n = P.size
    points: list[frozenset[int]] = [frozenset([p]) for p in range(n)]
    points += [frozenset(pq) for pq in itertools.combinations(range(n), 2) if not P.compat[pq[0]][pq[1]]]
    where = {pt: i for i, pt in enumerate(points)}
    base = max(len(points), n)
    images = []
    for p in range(n):
        pairs = []
        for p1 in range(n):
            if not P.leq[p1][p]:
                continue
            pairs.append((where[frozenset([p1])], p1))
            for q in range(n):
                if q != p1 and not P.compat[p1][q]:
                    pairs.append((where[frozenset([p1, q])], p1))
        images.append(PartialFunction.from_pairs(pairs, base))
    return PosetEmbedding(tuple(points), tuple(images))
