"""Extra operations on algebras and the matching relations on set quotients.

An operation is stored as a total numpy table of shape ``(N,) * arity``.
On the quotient side each operation name carries an ``arity + 1`` relation
over the carrier.  ``F_prime``/``G_prime`` attach these to the plain
functors and verify that everything they build is admissible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import AbstractAlgebra, atoms, join_of
from .duality import (
    CompleteHomomorphism,
    F_morphism,
    F_object,
    G_morphism,
    G_object,
    check_triangle_identities,
    counit,
    unit,
)
from .errors import CapExceededError, ClosureError, PreconditionError, Report, VerificationError
from .pfun import UNDEF, ConcreteAlgebra, ConcreteOperator, PartialFunction, domain_restriction
from .setq import QuotientMorphism, SetQuotient

EXHAUSTIVE_ADDITIVITY_CAP = 12
BROADCAST_LIMIT = 1 << 26


@dataclass(frozen=True, eq=False)
class OperatorTable:
    name: str
    arity: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim != self.arity:
            raise ValueError(f"{self.name}: table has {t.ndim} axes, arity is {self.arity}")
        if self.arity and len(set(t.shape)) != 1:
            raise ValueError(f"{self.name}: table is not square")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorTable):
            return NotImplemented
        return (self.name, self.arity) == (other.name, other.arity) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.name, self.arity, self.table.tobytes()))

    def __call__(self, *args: int) -> int:
        return int(self.table[tuple(args)])

    def fits(self, A: AbstractAlgebra) -> bool:
        t = self.table
        return (self.arity == 0 or t.shape[0] == A.size) and bool(((t >= 0) & (t < A.size)).all())


@dataclass(frozen=True)
class QuotientRelation:
    name: str
    arity: int  # arity of the matching operation; tuples have arity + 1 entries
    tuples: frozenset[tuple[int, ...]]

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity + 1:
                raise ValueError(f"{self.name}: tuple {t} does not have {self.arity + 1} entries")

    @classmethod
    def of(cls, name: str, arity: int, tuples: Iterable[Sequence[int]]) -> "QuotientRelation":
        return cls(name, arity, frozenset(tuple(int(x) for x in t) for t in tuples))

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)


# ---------------------------------------------------------------- algebra-side checks

def _require_fit(A: AbstractAlgebra, op: OperatorTable) -> None:
    if not op.fits(A):
        raise PreconditionError(f"table {op.name} does not fit an algebra of size {A.size}")


def is_completely_additive(A: AbstractAlgebra, op: OperatorTable, method: str = "pairs",
                           cap: int = EXHAUSTIVE_ADDITIVITY_CAP) -> Report:
    """Each coordinate commutes with every existing join, the empty one included.

    ``pairs`` checks normality and binary joins, which is exact for
    algebras satisfying the axioms (any set with a join sits inside a
    Boolean downset, so its join is reached through existing binary
    joins).  ``enumerate`` walks every subset and is capped.
    """
    _require_fit(A, op)
    n, T = op.arity, op.table
    if n == 0:
        return Report.passed()
    if method == "enumerate":
        return _additive_enumerate(A, op, cap)
    if method != "pairs":
        raise ValueError(f"unknown method {method!r}")
    z = A.zero
    if z is None:
        raise PreconditionError("algebra has no least element")
    J = A.join_table
    for i in range(n):
        Ti = np.moveaxis(T, i, 0)
        bad = np.argwhere(Ti[z] != z)
        if len(bad):
            rest = tuple(int(v) for v in bad[0])
            return Report.failed("ADDITIVE", coordinate=i, subset=(), others=rest)
        exists = J >= 0
        joined = Ti[np.maximum(J, 0)]  # (N, N, rest...)
        pair_join = J[Ti[:, None], Ti[None, :]]
        mask = exists.reshape(exists.shape + (1,) * (n - 1))
        bad = np.argwhere(mask & (joined != pair_join))
        if len(bad):
            s, t, *rest = (int(v) for v in bad[0])
            return Report.failed("ADDITIVE", coordinate=i, subset=(s, t), others=tuple(rest))
    return Report.passed()


def _additive_enumerate(A: AbstractAlgebra, op: OperatorTable, cap: int) -> Report:
    if A.size > cap:
        raise CapExceededError(f"subset enumeration capped at {cap} elements")
    n, T = op.arity, op.table
    joins = []
    for r in range(A.size + 1):
        for S in itertools.combinations(range(A.size), r):
            j = join_of(A, S)
            if j is not None:
                joins.append((S, j))
    for i in range(n):
        for others in itertools.product(range(A.size), repeat=n - 1):
            def at(x):
                args = others[:i] + (x,) + others[i:]
                return int(T[args])
            for S, j in joins:
                if join_of(A, sorted({at(s) for s in S})) != at(j):
                    return Report.failed("ADDITIVE", coordinate=i, subset=S, others=others)
    return Report.passed()


def is_compatibility_preserving(A: AbstractAlgebra, op: OperatorTable) -> Report:
    """Coordinatewise compatible arguments give compatible results."""
    _require_fit(A, op)
    n = op.arity
    C = A.compat_matrix
    if n == 0:
        return Report.passed()
    N = A.size
    if N ** (2 * n) > BROADCAST_LIMIT:
        raise CapExceededError(f"{N ** (2 * n)} tuple pairs exceed the broadcast limit")
    flat = op.table.reshape(-1)
    # only pairs of argument tuples with incompatible results can be witnesses
    u, v = np.nonzero(~C[flat[:, None], flat[None, :]])
    if len(u) == 0:
        return Report.passed()
    left = np.unravel_index(u, op.table.shape)
    right = np.unravel_index(v, op.table.shape)
    ok = np.ones(len(u), dtype=bool)
    for k in range(n):
        ok &= C[left[k], right[k]]
    hits = np.flatnonzero(ok)
    if len(hits):
        w = hits[0]
        return Report.failed("COMPAT", left=tuple(int(x[w]) for x in left), right=tuple(int(x[w]) for x in right))
    return Report.passed()


def is_order_preserving(A: AbstractAlgebra, op: OperatorTable) -> bool:
    n, T = op.arity, op.table
    L = A.leq_matrix
    for i in range(n):
        Ti = np.moveaxis(T, i, 0)
        if not (~L.reshape(L.shape + (1,) * (n - 1)) | L[Ti[:, None], Ti[None, :]]).all():
            return False
    return True


def validate_operator(A: AbstractAlgebra, op: OperatorTable) -> None:
    for rep in (is_completely_additive(A, op), is_compatibility_preserving(A, op)):
        if not rep:
            raise PreconditionError(f"operator {op.name} rejected: {rep}")


# ---------------------------------------------------------------- relations

def quotient_compat(pi: SetQuotient) -> np.ndarray:
    """``x C y`` iff ``x == y`` or the two points lie in different fibres."""
    p = np.asarray(pi.projection, dtype=np.int64)
    return (p[:, None] != p[None, :]) | np.eye(len(p), dtype=bool)


def compatibility_property_witness(pi: SetQuotient, R: QuotientRelation) -> tuple | None:
    """A pair of tuples breaking the compatibility property, or None."""
    if not R.tuples:
        return None
    C = quotient_compat(pi)
    tup = np.array(R.sorted_tuples(), dtype=np.int64)
    if (tup < 0).any() or (tup >= pi.carrier_size).any():
        raise PreconditionError(f"{R.name}: tuple outside the carrier")
    ok_in = np.ones((len(tup), len(tup)), dtype=bool)
    for k in range(R.arity):
        ok_in &= C[tup[:, k][:, None], tup[:, k][None, :]]
    out = C[tup[:, -1][:, None], tup[:, -1][None, :]]
    bad = np.argwhere(ok_in & ~out)
    if len(bad):
        u, v = bad[0]
        return tuple(int(x) for x in tup[u]), tuple(int(x) for x in tup[v])
    return None


def has_compatibility_property(pi: SetQuotient, R: QuotientRelation) -> bool:
    return compatibility_property_witness(pi, R) is None


def relation_from_operation(A: AbstractAlgebra, op: OperatorTable, validate: bool = True) -> QuotientRelation:
    """Tuples of atoms ``(x1..xn, y)`` with ``op(x1..xn) >= y``, as carrier points of ``F(A)``."""
    _require_fit(A, op)
    if validate:
        validate_operator(A, op)
    at = atoms(A)
    L = A.leq_matrix
    at_arr = np.asarray(at, dtype=np.int64)
    if op.arity == 0:
        vals = np.asarray(op.table).reshape(1)
    else:
        vals = op.table[np.ix_(*([at_arr] * op.arity))].reshape(-1)
    hits = L[at_arr[None, :], vals[:, None]]  # (tuples, atoms): atom y <= value
    shape = (len(at),) * op.arity
    tuples = []
    for u, j in np.argwhere(hits):
        args = np.unravel_index(int(u), shape) if op.arity else ()
        tuples.append(tuple(int(x) for x in args) + (int(j),))
    R = QuotientRelation.of(op.name, op.arity, tuples)
    if validate:
        w = compatibility_property_witness(F_object(A), R)
        if w is not None:
            raise VerificationError(f"R_{op.name} lacks the compatibility property at {w}")
    return R


def operation_from_relation(pi: SetQuotient, R: QuotientRelation, validate: bool = True) -> OperatorTable:
    """``(X1..Xn) -> {y | R x1..xn y for some xi in Xi}`` on ``G(pi)``."""
    w = compatibility_property_witness(pi, R)
    if w is not None:
        raise PreconditionError(f"{R.name} lacks the compatibility property: {w}")
    Gp = G_object(pi)
    N, n = len(Gp), R.arity
    if N ** max(n, 1) > BROADCAST_LIMIT:
        raise CapExceededError(f"table of {N ** n} entries exceeds the broadcast limit")
    contains = np.zeros((N, pi.carrier_size), dtype=bool)
    for e, f in enumerate(Gp.elements):
        contains[e, sorted(f.image)] = True
    # accumulate the result points as bitmasks
    acc = np.zeros((N,) * n, dtype=np.int64)
    for t in R.tuples:
        mask = np.ones((), dtype=bool)
        for k in range(n):
            mask = np.multiply.outer(mask, contains[:, t[k]])
        acc |= np.where(mask, 1 << t[-1], 0)
    by_mask = {sum(1 << x for x in f.image): e for e, f in enumerate(Gp.elements)}
    flat = acc.reshape(-1)
    table = np.empty(flat.shape, dtype=np.int64)
    for u, bits in enumerate(flat.tolist()):
        if bits not in by_mask:
            raise VerificationError(f"{R.name}: result {bits:b} is not a partial section")
        table[u] = by_mask[bits]
    out = OperatorTable(R.name, n, table.reshape((N,) * n))
    if validate:
        A = Gp.abstract
        for rep in (is_completely_additive(A, out), is_compatibility_preserving(A, out)):
            if not rep:
                raise VerificationError(f"Omega_{R.name} not admissible: {rep}")
    return out


def check_forth_back(phi: QuotientMorphism, R_X: QuotientRelation, R_Y: QuotientRelation) -> Report:
    """Reverse forth and back conditions for ``phi`` from ``R_X`` to ``R_Y``."""
    if R_X.arity != R_Y.arity:
        raise PreconditionError("relations have different arities")
    m = phi.mapping
    for t in R_X.sorted_tuples():
        if all(m[x] is not None for x in t[:-1]):
            img = m[t[-1]]
            if img is None:
                return Report.failed("FORTH", tuple=t, undefined=t[-1])
            if tuple(m[x] for x in t[:-1]) + (img,) not in R_Y.tuples:
                return Report.failed("FORTH", tuple=t)
    pre: dict[int, list[int]] = {}
    for x, y in enumerate(m):
        if y is not None:
            pre.setdefault(y, []).append(x)
    by_last: dict[int, list[tuple]] = {}
    for t in R_Y.sorted_tuples():
        by_last.setdefault(t[-1], []).append(t)
    for x_last, y_last in enumerate(m):
        if y_last is None:
            continue
        for t in by_last.get(y_last, []):
            choices = [pre.get(y, []) for y in t[:-1]]
            if not any(xs + (x_last,) in R_X.tuples for xs in itertools.product(*choices)):
                return Report.failed("BACK", point=x_last, tuple=t)
    return Report.passed()


# ---------------------------------------------------------------- signed objects

Signature = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SignedAlgebra:
    algebra: AbstractAlgebra
    operators: tuple[OperatorTable, ...] = ()

    def __post_init__(self):
        names = [op.name for op in self.operators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate operator names")
        for op in self.operators:
            _require_fit(self.algebra, op)

    @property
    def signature(self) -> Signature:
        return tuple(sorted((op.name, op.arity) for op in self.operators))

    def operator(self, name: str) -> OperatorTable:
        return next(op for op in self.operators if op.name == name)


@dataclass(frozen=True)
class SignedQuotient:
    quotient: SetQuotient
    relations: tuple[QuotientRelation, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation names")

    @property
    def signature(self) -> Signature:
        return tuple(sorted((r.name, r.arity) for r in self.relations))

    def relation(self, name: str) -> QuotientRelation:
        return next(r for r in self.relations if r.name == name)


def _same_signature(a, b) -> None:
    if a.signature != b.signature:
        raise PreconditionError(f"signatures differ: {a.signature} vs {b.signature}")


@lru_cache(maxsize=256)
def F_prime(SA: SignedAlgebra) -> SignedQuotient:
    return SignedQuotient(F_object(SA.algebra),
                          tuple(relation_from_operation(SA.algebra, op) for op in SA.operators))


@lru_cache(maxsize=256)
def G_prime(SQ: SignedQuotient) -> SignedAlgebra:
    return SignedAlgebra(G_object(SQ.quotient).abstract,
                         tuple(operation_from_relation(SQ.quotient, r) for r in SQ.relations))


def preserves_operations(h: CompleteHomomorphism, SA: SignedAlgebra, SB: SignedAlgebra) -> Report:
    """``h(op_A(a..)) = op_B(h(a)..)`` for every operator name and argument tuple."""
    _same_signature(SA, SB)
    m = h.array
    for opA in SA.operators:
        opB = SB.operator(opA.name)
        n = opA.arity
        if n == 0:
            if m[int(opA.table)] != int(opB.table):
                return Report.failed("PRESERVE", op=opA.name, args=())
            continue
        bad = np.argwhere(m[opA.table] != opB.table[np.ix_(*([m] * n))])
        if len(bad):
            return Report.failed("PRESERVE", op=opA.name, args=tuple(int(v) for v in bad[0]))
    return Report.passed()


def F_prime_morphism(h: CompleteHomomorphism, SA: SignedAlgebra, SB: SignedAlgebra) -> QuotientMorphism:
    """``Fh: F'(B) -> F'(A)`` after checking that ``h`` preserves the operations."""
    if h.source != SA.algebra or h.target != SB.algebra:
        raise PreconditionError("h does not run between the given algebras")
    rep = preserves_operations(h, SA, SB)
    if not rep:
        raise PreconditionError(f"h does not preserve the operations: {rep}")
    Fh = F_morphism(h)
    FA, FB = F_prime(SA), F_prime(SB)
    for r in FB.relations:
        rep = check_forth_back(Fh, r, FA.relation(r.name))
        if not rep:
            raise VerificationError(f"Fh fails forth/back for {r.name}: {rep}")
    return Fh


def G_prime_morphism(phi: QuotientMorphism, SP: SignedQuotient, SR: SignedQuotient) -> CompleteHomomorphism:
    """``G(phi): G'(rho) -> G'(pi)`` after checking forth and back."""
    if phi.source != SP.quotient or phi.target != SR.quotient:
        raise PreconditionError("phi does not run between the given quotients")
    _same_signature(SP, SR)
    for r in SP.relations:
        rep = check_forth_back(phi, r, SR.relation(r.name))
        if not rep:
            raise PreconditionError(f"phi fails forth/back for {r.name}: {rep}")
    Gphi = G_morphism(phi)
    rep = preserves_operations(Gphi, G_prime(SR), G_prime(SP))
    if not rep:
        raise VerificationError(f"G(phi) does not preserve the operations: {rep}")
    return Gphi


def check_extended_triangles(SA: SignedAlgebra | None = None, SQ: SignedQuotient | None = None) -> Report:
    """Triangle identities of the reducts plus admissibility of unit and counit."""
    rep = check_triangle_identities(SA.algebra if SA else None, SQ.quotient if SQ else None)
    if not rep:
        return rep
    if SA is not None:
        FA = F_prime(SA)
        eta = unit(SA.algebra)
        rep = preserves_operations(eta, SA, G_prime(FA))
        if not rep:
            return rep
        lam = counit(FA.quotient)
        rep = _forth_back_all(lam, FA, F_prime(G_prime(FA)))
        if not rep:
            return rep
        F_prime_morphism(eta, SA, G_prime(FA))
    if SQ is not None:
        GQ = G_prime(SQ)
        lam = counit(SQ.quotient)
        FG = F_prime(GQ)
        rep = _forth_back_all(lam, SQ, FG)
        if not rep:
            return rep
        rep = preserves_operations(unit(GQ.algebra), GQ, G_prime(FG))
        if not rep:
            return rep
        G_prime_morphism(lam, SQ, FG)
    return Report.passed()


def _forth_back_all(phi: QuotientMorphism, SP: SignedQuotient, SR: SignedQuotient) -> Report:
    _same_signature(SP, SR)
    for r in SP.relations:
        rep = check_forth_back(phi, r, SR.relation(r.name))
        if not rep:
            return rep
    return Report.passed()


def relation_roundtrip_holds(SQ: SignedQuotient) -> bool:
    """``R_{Omega_R}`` read back through ``x -> {x}`` equals ``R``."""
    lam = counit(SQ.quotient)
    FG = F_prime(G_prime(SQ))
    inverse = {y: x for x, y in enumerate(lam.mapping)}
    for r in SQ.relations:
        back = frozenset(tuple(inverse[y] for y in t) for t in FG.relation(r.name).tuples)
        if back != r.tuples:
            return False
    return True


def operation_roundtrip_holds(SA: SignedAlgebra) -> bool:
    """``eta(op(a..)) = Omega_{R_op}(eta(a)..)`` for every tuple."""
    return bool(preserves_operations(unit(SA.algebra), SA, G_prime(F_prime(SA))))


# ---------------------------------------------------------------- concrete catalog

def _compose(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """``f ; g``: apply ``f`` first."""
    return PartialFunction(tuple(UNDEF if v == UNDEF else g.values[v] for v in f.values))


def _diagonal(f: PartialFunction, keep: Callable[[int], bool]) -> PartialFunction:
    return PartialFunction(tuple(x if keep(x) else UNDEF for x in range(f.base_size)))


def _domain(f: PartialFunction) -> PartialFunction:
    return _diagonal(f, lambda x: f.values[x] != UNDEF)


def _range(f: PartialFunction) -> PartialFunction:
    img = f.image
    return _diagonal(f, lambda x: x in img)


def _fixset(f: PartialFunction) -> PartialFunction:
    return _diagonal(f, lambda x: f.values[x] == x)


def _range_restrict(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    img = f.image
    return PartialFunction(tuple(v if v in img else UNDEF for v in g.values))


def _override(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    return PartialFunction(tuple(v if v != UNDEF else w for v, w in zip(f.values, g.values)))


def _antidomain(f: PartialFunction) -> PartialFunction:
    return _diagonal(f, lambda x: f.values[x] == UNDEF)


def _converse(f: PartialFunction) -> PartialFunction:
    if len(f.image) != len(f):
        raise PreconditionError(f"converse of non-injective {f}")
    return PartialFunction.from_pairs(((y, x) for x, y in f.pairs), f.base_size)


def concrete_operator_catalog(base_size: int) -> dict[str, ConcreteOperator]:
    """Named operations on partial functions over ``base_size`` points."""
    one = PartialFunction.identity(base_size)
    return {
        "compose": ConcreteOperator("compose", 2, _compose),
        "domain": ConcreteOperator("domain", 1, _domain),
        "range": ConcreteOperator("range", 1, _range),
        "fixset": ConcreteOperator("fixset", 1, _fixset),
        "one": ConcreteOperator("one", 0, lambda: one),
        "range_restrict": ConcreteOperator("range_restrict", 2, _range_restrict),
        "restrict": ConcreteOperator("restrict", 2, domain_restriction),
        "override": ConcreteOperator("override", 2, _override, positive=False),
        "antidomain": ConcreteOperator("antidomain", 1, _antidomain, positive=False),
        "converse": ConcreteOperator("converse", 1, _converse, positive=False),
    }


POSITIVE_OPERATORS = ("compose", "domain", "range", "fixset", "one", "range_restrict", "restrict")
NEGATIVE_OPERATORS = ("override", "antidomain", "converse")


def operator_table(alg: ConcreteAlgebra, op: ConcreteOperator) -> OperatorTable:
    """Tabulate ``op`` on ``alg``; raises ClosureError if ``alg`` is not closed under it."""
    idx = alg.index
    n = len(alg)
    t = np.empty((n,) * op.arity, dtype=np.int64)
    for args in itertools.product(range(n), repeat=op.arity):
        r = op(*(alg.elements[a] for a in args))
        if r not in idx:
            raise ClosureError(f"{op.name} leaves the algebra at {r}", missing=r)
        t[args] = idx[r]
    return OperatorTable(op.name, op.arity, t)


def signed_concrete(alg: ConcreteAlgebra, names: Sequence[str]) -> SignedAlgebra:
    catalog = concrete_operator_catalog(alg.base_size)
    return SignedAlgebra(alg.abstract, tuple(operator_table(alg, catalog[nm]) for nm in names))
