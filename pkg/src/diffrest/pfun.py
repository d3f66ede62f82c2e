"""Finite partial functions on a common base and concrete algebras of them.

A partial function on the base ``{0, ..., n-1}`` is stored as a tuple of
length ``n`` whose entry ``x`` is ``f(x)`` or ``-1`` where ``f`` is undefined.
That encoding makes functionality automatic and gives cheap hashing; the
textual form and the canonical ordering both use the sorted pair list.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import BaseMismatchError, CapExceededError, ClosureError

UNDEF = -1
DEFAULT_CLOSURE_CAP = 4096

_PAIR_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


@dataclass(frozen=True)
class PartialFunction:
    values: tuple[int, ...]

    def __post_init__(self):
        n = len(self.values)
        for v in self.values:
            if v != UNDEF and not 0 <= v < n:
                raise ValueError(f"value {v} outside base of size {n}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], base_size: int) -> "PartialFunction":
        values = [UNDEF] * base_size
        for x, y in pairs:
            if not (0 <= x < base_size and 0 <= y < base_size):
                raise ValueError(f"pair ({x},{y}) outside base of size {base_size}")
            if values[x] != UNDEF and values[x] != y:
                raise ValueError(f"not functional: {x} maps to both {values[x]} and {y}")
            values[x] = y
        return cls(tuple(values))

    @classmethod
    def empty(cls, base_size: int) -> "PartialFunction":
        return cls((UNDEF,) * base_size)

    @classmethod
    def identity(cls, base_size: int) -> "PartialFunction":
        return cls(tuple(range(base_size)))

    @classmethod
    def parse(cls, text: str, base_size: int) -> "PartialFunction":
        """Parse ``"[(0,1),(2,2)]"``."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"expected a bracketed pair list, got {text!r}")
        inner = body[1:-1].strip()
        pairs = [(int(a), int(b)) for a, b in _PAIR_RE.findall(inner)]
        if _PAIR_RE.sub("", inner).replace(",", "").strip():
            raise ValueError(f"malformed pair list {text!r}")
        return cls.from_pairs(pairs, base_size)

    @property
    def base_size(self) -> int:
        return len(self.values)

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for x, y in enumerate(self.values) if y != UNDEF)

    @cached_property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, y in enumerate(self.values) if y != UNDEF)

    @cached_property
    def image(self) -> frozenset[int]:
        return frozenset(y for y in self.values if y != UNDEF)

    def sort_key(self) -> tuple:
        return (self.base_size, self.pairs)

    def __lt__(self, other: "PartialFunction") -> bool:
        return self.sort_key() < other.sort_key()

    def __len__(self) -> int:
        return len(self.pairs)

    def __bool__(self) -> bool:
        return any(v != UNDEF for v in self.values)

    def __call__(self, x: int) -> int | None:
        v = self.values[x]
        return None if v == UNDEF else v

    def issubset(self, other: "PartialFunction") -> bool:
        _check_base(self, other)
        return all(v == UNDEF or v == w for v, w in zip(self.values, other.values))

    def __str__(self) -> str:
        return "[" + ",".join(f"({x},{y})" for x, y in self.pairs) + "]"

    def __repr__(self) -> str:
        return f"PartialFunction({self}, base={self.base_size})"


def _check_base(f: PartialFunction, g: PartialFunction) -> None:
    if len(f.values) != len(g.values):
        raise BaseMismatchError(f"base sizes differ: {len(f.values)} vs {len(g.values)}")


def relative_complement(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """``f - g``: the pairs of ``f`` that are not pairs of ``g``."""
    _check_base(f, g)
    return PartialFunction(tuple(UNDEF if v == w else v for v, w in zip(f.values, g.values)))


def domain_restriction(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """``f |> g``: ``g`` restricted to the domain of ``f``."""
    _check_base(f, g)
    return PartialFunction(tuple(w if v != UNDEF else UNDEF for v, w in zip(f.values, g.values)))


def meet(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    m = relative_complement(f, relative_complement(f, g))
    direct = PartialFunction(tuple(v if v == w else UNDEF for v, w in zip(f.values, g.values)))
    assert m == direct, (f, g)
    return m


def compatible(f: PartialFunction, g: PartialFunction) -> bool:
    """Agreement on the shared domain, i.e. ``f |> g == g |> f``."""
    _check_base(f, g)
    return all(v == UNDEF or w == UNDEF or v == w for v, w in zip(f.values, g.values))


def union(fs: Iterable[PartialFunction], base_size: int) -> PartialFunction | None:
    """Union of pairwise-compatible partial functions, or None if not a function."""
    values = [UNDEF] * base_size
    for f in fs:
        if f.base_size != base_size:
            raise BaseMismatchError("base sizes differ")
        for x, y in enumerate(f.values):
            if y == UNDEF:
                continue
            if values[x] not in (UNDEF, y):
                return None
            values[x] = y
    return PartialFunction(tuple(values))


def all_partial_functions(base_size: int) -> Iterator[PartialFunction]:
    """Every partial function on the base, in canonical order."""
    fs = [PartialFunction(vals) for vals in itertools.product(range(-1, base_size), repeat=base_size)]
    return iter(sorted(fs))


@dataclass(frozen=True)
class ConcreteOperator:
    """A named operation on partial functions of a fixed arity.

    ``positive`` records whether the operation is expected to be compatibility
    preserving and completely additive.
    """

    name: str
    arity: int
    fn: Callable[..., PartialFunction]
    positive: bool = True

    def __call__(self, *args: PartialFunction) -> PartialFunction:
        return self.fn(*args)


@dataclass(frozen=True, eq=False)
class ConcreteAlgebra:
    base_size: int
    elements: tuple[PartialFunction, ...]
    operators: tuple[ConcreteOperator, ...] = ()

    def __post_init__(self):
        if list(self.elements) != sorted(set(self.elements)):
            raise ValueError("elements must be distinct and in canonical order")
        for f in self.elements:
            if f.base_size != self.base_size:
                raise BaseMismatchError("element base differs from algebra base")

    @classmethod
    def from_elements(cls, elements: Iterable[PartialFunction],
                      operators: Sequence[ConcreteOperator] = (),
                      base_size: int | None = None) -> "ConcreteAlgebra":
        """Build and validate closure; raises ClosureError naming a missing element."""
        elems = sorted(set(elements))
        if base_size is None:
            if not elems:
                raise ValueError("cannot infer base size of an empty element list")
            base_size = elems[0].base_size
        alg = cls(base_size, tuple(elems), tuple(operators))
        alg.check_closure()
        return alg

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcreteAlgebra):
            return NotImplemented
        return (self.base_size == other.base_size and self.elements == other.elements
                and [op.name for op in self.operators] == [op.name for op in other.operators])

    def __hash__(self) -> int:
        return hash((self.base_size, self.elements, tuple(op.name for op in self.operators)))

    @cached_property
    def index(self) -> dict[PartialFunction, int]:
        return {f: i for i, f in enumerate(self.elements)}

    def check_closure(self) -> None:
        idx = self.index
        if not self.elements:
            raise ClosureError("algebras are nonempty")
        for f in self.elements:
            for g in self.elements:
                for name, op in (("-", relative_complement), ("|>", domain_restriction)):
                    r = op(f, g)
                    if r not in idx:
                        raise ClosureError(f"{f} {name} {g} = {r} is missing", missing=r)
        for op in self.operators:
            for args in itertools.product(self.elements, repeat=op.arity):
                r = op(*args)
                if r not in idx:
                    shown = ", ".join(map(str, args))
                    raise ClosureError(f"{op.name}({shown}) = {r} is missing", missing=r)

    @cached_property
    def minus_table(self) -> np.ndarray:
        return self._table(relative_complement)

    @cached_property
    def restrict_table(self) -> np.ndarray:
        return self._table(domain_restriction)

    def _table(self, op) -> np.ndarray:
        n = len(self.elements)
        idx = self.index
        t = np.empty((n, n), dtype=np.int64)
        for i, f in enumerate(self.elements):
            for j, g in enumerate(self.elements):
                t[i, j] = idx[op(f, g)]
        return t

    def operator_table(self, op: ConcreteOperator) -> np.ndarray:
        idx = self.index
        n = len(self.elements)
        t = np.empty((n,) * op.arity, dtype=np.int64)
        for args in itertools.product(range(n), repeat=op.arity):
            t[args] = idx[op(*(self.elements[a] for a in args))]
        return t

    @cached_property
    def abstract(self):
        from .algebra import AbstractAlgebra

        return AbstractAlgebra(self.minus_table, self.restrict_table, labels=self.elements)


def close_under_ops(seed: Iterable[PartialFunction],
                    operators: Sequence[ConcreteOperator] = (),
                    cap: int = DEFAULT_CLOSURE_CAP,
                    base_size: int | None = None) -> ConcreteAlgebra:
    """Least superset of ``seed`` closed under -, |> and ``operators``."""
    seed = list(seed)
    if base_size is None:
        if not seed:
            raise ValueError("cannot infer base size from an empty seed")
        base_size = seed[0].base_size
    for f in seed:
        if f.base_size != base_size:
            raise BaseMismatchError("seed elements have different bases")
    ops: list[tuple[int, Callable[..., PartialFunction]]] = [
        (2, relative_complement), (2, domain_restriction)]
    ops += [(op.arity, op.fn) for op in operators]

    known: set[PartialFunction] = set()
    order: list[PartialFunction] = []

    def add(f: PartialFunction, frontier: list[PartialFunction]) -> None:
        if f not in known:
            known.add(f)
            order.append(f)
            frontier.append(f)
            if len(known) > cap:
                raise CapExceededError(f"closure exceeds {cap} elements")

    frontier: list[PartialFunction] = []
    add(PartialFunction.empty(base_size), frontier)
    for f in seed:
        add(f, frontier)
    for arity, fn in ops:
        if arity == 0:
            add(fn(), frontier)

    # semi-naive: each round only evaluates tuples touching the previous frontier
    while frontier:
        new_start = len(order) - len(frontier)
        current, frontier = frontier, []
        old = order[:new_start]
        everything = old + current
        for arity, fn in ops:
            if arity == 0:
                continue
            for k in range(arity):
                # position k takes a fresh element, earlier positions old ones only
                pools = [old] * k + [current] + [everything] * (arity - k - 1)
                for args in itertools.product(*pools):
                    add(fn(*args), frontier)
    return ConcreteAlgebra(base_size, tuple(sorted(known)), tuple(operators))
