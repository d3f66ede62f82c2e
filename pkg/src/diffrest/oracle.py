"""Brute-force engines used as ground truth by the rest of the package.

Nothing in here calls into the duality or completion code.  The searches
are plain backtracking with constraint propagation through the tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .algebra import AbstractAlgebra
from .errors import CapExceededError
from .pfun import (
    UNDEF,
    PartialFunction,
    domain_restriction,
    relative_complement,
)
from .setq import SetQuotient

SECTION_CAP = 4096


@dataclass(frozen=True)
class SearchBudget:
    max_base: int
    max_nodes: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.max_base < 0 or self.max_nodes < 1:
            raise ValueError("budget bounds must be positive")


@dataclass(frozen=True)
class RepresentationWitness:
    base_size: int
    assignment: tuple[PartialFunction, ...]


@dataclass
class RepresentationResult:
    status: str  # "found", "not_found" (budget ran out) or "impossible"
    witness: RepresentationWitness | None = None
    nodes: int = 0
    bases_tried: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == "found"


def validate_representation(A: AbstractAlgebra, assignment: Sequence[PartialFunction]) -> bool:
    """Injective and preserves both operation tables exactly."""
    if len(assignment) != A.size or len(set(assignment)) != A.size:
        return False
    bases = {f.base_size for f in assignment}
    if len(bases) != 1:
        return False
    where = {f: i for i, f in enumerate(assignment)}
    for a, fa in enumerate(assignment):
        for b, fb in enumerate(assignment):
            if where.get(relative_complement(fa, fb)) != A.minus[a, b]:
                return False
            if where.get(domain_restriction(fa, fb)) != A.restrict[a, b]:
                return False
    return True


class _BudgetExhausted(Exception):
    pass


def _candidates(base: int, nonempty: bool = False) -> Iterator[PartialFunction]:
    """Partial functions on ``base`` points, smallest first."""
    for k in range(1 if nonempty else 0, base + 1):
        for dom in itertools.combinations(range(base), k):
            for vals in itertools.product(range(base), repeat=k):
                values = [UNDEF] * base
                for x, y in zip(dom, vals):
                    values[x] = y
                yield PartialFunction(tuple(values))


def _order_atoms(A: AbstractAlgebra) -> tuple[int | None, list[int]]:
    """Least element and minimal nonzero elements read straight off the tables."""
    meet = A.minus[np.arange(A.size)[:, None], A.minus]
    leq = meet == np.arange(A.size)[:, None]
    bottoms = np.flatnonzero(leq.all(axis=1))
    if len(bottoms) != 1:
        return None, []
    z = int(bottoms[0])
    out = []
    for a in range(A.size):
        if a == z:
            continue
        if all(b in (a, z) for b in np.flatnonzero(leq[:, a])):
            out.append(a)
    return z, out


def _search_atoms(A: AbstractAlgebra, base: int, counter: list[int], max_nodes: int) -> list[PartialFunction] | None:
    """Assign the atoms, then every element the union of the atoms below it."""
    z, at = _order_atoms(A)
    if z is None or not at:
        return None
    n = A.size
    meet = A.minus[np.arange(n)[:, None], A.minus]
    leq = meet == np.arange(n)[:, None]
    below = {a: [x for x in at if leq[x, a]] for a in range(n)}
    bounded = {(x, y): bool((leq[x] & leq[y]).any()) for x in at for y in at}
    cands = list(_candidates(base, nonempty=True))
    chosen: dict[int, PartialFunction] = {}

    def consistent(x: int, fx: PartialFunction) -> bool:
        for y, fy in chosen.items():
            # distinct atoms are disjoint; |> between atoms must match the table
            if any(v != UNDEF and v == w for v, w in zip(fx.values, fy.values)):
                return False
            if A.restrict[x, y] == y and not fy.domain <= fx.domain:
                return False
            if A.restrict[x, y] == z and fx.domain & fy.domain:
                return False
            if A.restrict[y, x] == x and not fx.domain <= fy.domain:
                return False
            if A.restrict[y, x] == z and fx.domain & fy.domain:
                return False
            if bounded[x, y] and any(v != UNDEF and w != UNDEF and v != w for v, w in zip(fx.values, fy.values)):
                return False
        return True

    def finish() -> list[PartialFunction] | None:
        out = []
        for a in range(n):
            values = [UNDEF] * base
            for x in below[a]:
                for p, v in enumerate(chosen[x].values):
                    if v == UNDEF:
                        continue
                    if values[p] not in (UNDEF, v):
                        return None
                    values[p] = v
            out.append(PartialFunction(tuple(values)))
        return out if validate_representation(A, out) else None

    def extend(i: int) -> list[PartialFunction] | None:
        if i == len(at):
            return finish()
        x = at[i]
        for f in cands:
            counter[0] += 1
            if counter[0] > max_nodes:
                raise _BudgetExhausted
            if consistent(x, f):
                chosen[x] = f
                got = extend(i + 1)
                if got is not None:
                    return got
                del chosen[x]
        return None

    return extend(0)


def _search_raw(A: AbstractAlgebra, base: int, counter: list[int], max_nodes: int) -> list[PartialFunction] | None:
    """Element-by-element backtracking with forced values propagated through the tables."""
    n = A.size
    cands = list(_candidates(base))

    def propagate(assign: dict[int, PartialFunction], used: dict[PartialFunction, int]) -> bool:
        changed = True
        while changed:
            changed = False
            for a, b in itertools.product(list(assign), repeat=2):
                for table, op in ((A.minus, relative_complement), (A.restrict, domain_restriction)):
                    t = int(table[a, b])
                    val = op(assign[a], assign[b])
                    if t in assign:
                        if assign[t] != val:
                            return False
                    else:
                        if val in used:
                            return False
                        assign[t] = val
                        used[val] = t
                        changed = True
        return True

    def extend(assign: dict[int, PartialFunction], used: dict[PartialFunction, int]):
        free = [a for a in range(n) if a not in assign]
        if not free:
            out = [assign[a] for a in range(n)]
            return out if validate_representation(A, out) else None
        a = free[0]
        for f in cands:
            counter[0] += 1
            if counter[0] > max_nodes:
                raise _BudgetExhausted
            if f in used:
                continue
            trial, tused = dict(assign), dict(used)
            trial[a] = f
            tused[f] = a
            if propagate(trial, tused):
                got = extend(trial, tused)
                if got is not None:
                    return got
        return None

    return extend({}, {})


def brute_force_representation(A: AbstractAlgebra, budget: SearchBudget | None = None,
                               seed_base: int | None = None) -> RepresentationResult:
    """Search for an isomorphic algebra of partial functions.

    Bases are tried from ``seed_base`` (when given) and then upwards to
    ``budget.max_base``.  The atoms-first strategy runs before the raw one;
    "impossible" is only reported after the raw search exhausted the whole
    space at ``max_base`` (a representation on a smaller base transfers to a
    larger one by adding unused points).
    """
    if budget is None:
        budget = SearchBudget(max_base=2 * A.size)
    counter = [0]
    result = RepresentationResult("not_found")
    bases = list(range(budget.max_base + 1))
    if seed_base is not None:
        bases = [seed_base] + [b for b in bases if b != seed_base]
    for base in bases:
        result.bases_tried.append(base)
        try:
            for strategy in (_search_atoms, _search_raw):
                got = strategy(A, base, counter, budget.max_nodes)
                if got is not None:
                    result.status = "found"
                    result.witness = RepresentationWitness(base, tuple(got))
                    result.nodes = counter[0]
                    return result
        except _BudgetExhausted:
            result.nodes = counter[0]
            return result
        if base == budget.max_base:
            result.status = "impossible"
            break
    result.nodes = counter[0]
    return result


# ---------------------------------------------------------------- sections

def enumerate_partial_sections(pi: SetQuotient, cap: int = SECTION_CAP) -> list[PartialFunction]:
    """Every subset of ``{(pi(x), x)}`` that is a function, by filtering all subsets."""
    n = pi.carrier_size
    if 2 ** n > cap * 16:
        raise CapExceededError(f"carrier of {n} points too large for subset filtering")
    graph = [(pi.projection[x], x) for x in range(n)]
    out = []
    for mask in range(2 ** n):
        chosen = [graph[i] for i in range(n) if mask >> i & 1]
        dom = [p for p, _ in chosen]
        if len(dom) == len(set(dom)):
            out.append(PartialFunction.from_pairs(chosen, n))
            if len(out) > cap:
                raise CapExceededError(f"more than {cap} sections")
    return sorted(out)


# ---------------------------------------------------------------- isomorphism

def _invariants(A: AbstractAlgebra) -> list[tuple]:
    meet = A.minus[np.arange(A.size)[:, None], A.minus]
    leq = meet == np.arange(A.size)[:, None]
    compat = A.restrict == A.restrict.T
    idem_m = np.diag(A.minus) == np.arange(A.size)
    idem_r = np.diag(A.restrict) == np.arange(A.size)
    return [(int(leq[:, a].sum()), int(leq[a].sum()), int(compat[a].sum()), bool(idem_m[a]), bool(idem_r[a]))
            for a in range(A.size)]


def iter_isomorphisms(A: AbstractAlgebra, B: AbstractAlgebra, cap: int = 4096) -> Iterator[tuple[int, ...]]:
    """Every bijection preserving both tables, by backtracking."""
    n = A.size
    if n != B.size:
        return
    if n > cap:
        raise CapExceededError(f"isomorphism search capped at {cap} elements")
    inv_a, inv_b = _invariants(A), _invariants(B)
    if sorted(inv_a) != sorted(inv_b):
        return
    by_inv: dict[tuple, list[int]] = {}
    for b, key in enumerate(inv_b):
        by_inv.setdefault(key, []).append(b)
    order = sorted(range(n), key=lambda a: (len(by_inv[inv_a[a]]), a))

    def propagate(m: dict[int, int], rev: dict[int, int], start: int) -> bool:
        todo = [start]
        done = [k for k in m if k != start]
        while todo:
            a = todo.pop()
            done.append(a)
            for c in done:
                for x, y in ((a, c), (c, a)):
                    for ta, tb in ((A.minus, B.minus), (A.restrict, B.restrict)):
                        s, t = int(ta[x, y]), int(tb[m[x], m[y]])
                        if s in m:
                            if m[s] != t:
                                return False
                        elif t in rev or inv_a[s] != inv_b[t]:
                            return False
                        else:
                            m[s], rev[t] = t, s
                            todo.append(s)
        return True

    def extend(m: dict[int, int], rev: dict[int, int]):
        free = [a for a in order if a not in m]
        if not free:
            yield tuple(m[a] for a in range(n))
            return
        a = free[0]
        for b in by_inv[inv_a[a]]:
            if b in rev:
                continue
            m2, r2 = dict(m), dict(rev)
            m2[a], r2[b] = b, a
            if propagate(m2, r2, a):
                yield from extend(m2, r2)

    yield from extend({}, {})


def algebra_isomorphic(A: AbstractAlgebra, B: AbstractAlgebra) -> tuple[int, ...] | None:
    return next(iter_isomorphisms(A, B), None)
