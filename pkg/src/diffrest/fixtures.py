"""Small hand-built instances used by the suites and the tests."""

from __future__ import annotations

import numpy as np

from .algebra import AbstractAlgebra
from .operators import concrete_operator_catalog, operator_table, OperatorTable
from .pfun import ConcreteAlgebra, PartialFunction, close_under_ops


def two_singletons() -> ConcreteAlgebra:
    """``{empty, {(1,1)}, {(2,2)}}`` on three points: meet complete but not compatibly complete."""
    P = PartialFunction.from_pairs
    return close_under_ops([P([(1, 1)], 3), P([(2, 2)], 3)])


# Each table breaks exactly one axiom and satisfies the other four.
_FAULTS = {
    "AX1": ([[0, 0], [0, 0]],
            [[0, 0], [0, 0]]),
    "AX2": ([[0, 0], [1, 1]],
            [[0, 0], [1, 1]]),
    "AX3": ([[0, 0, 0, 0, 0, 0],
             [1, 0, 3, 1, 1, 1],
             [2, 5, 0, 2, 1, 1],
             [3, 3, 3, 0, 0, 3],
             [4, 4, 3, 5, 0, 3],
             [5, 5, 0, 5, 0, 0]],
            [[0, 0, 0, 0, 0, 0],
             [0, 1, 1, 3, 3, 0],
             [0, 1, 2, 3, 4, 5],
             [0, 1, 1, 3, 3, 0],
             [0, 1, 2, 3, 4, 5],
             [0, 0, 5, 0, 5, 5]]),
    "AX4": ([[0, 0], [1, 0]],
            [[0, 0], [1, 1]]),
    "AX5": ([[0, 0], [1, 0]],
            [[0, 0], [0, 0]]),
}


def fault_fixtures() -> dict[str, AbstractAlgebra]:
    return {name: AbstractAlgebra(np.array(m), np.array(r)) for name, (m, r) in _FAULTS.items()}


def negative_operator_fixtures() -> dict[str, tuple[ConcreteAlgebra, OperatorTable]]:
    """Algebras closed under each rejected operation, with its table."""
    P = PartialFunction.from_pairs
    cat = concrete_operator_catalog(3)
    seeds = {
        "override": [P([(0, 1)], 3), P([(1, 2)], 3)],
        "antidomain": [P([(0, 1)], 3)],
        # injective functions with disjoint domains and a shared value
        "converse": [P([(0, 1)], 3), P([(2, 1)], 3)],
    }
    out = {}
    for name, seed in seeds.items():
        alg = close_under_ops(seed, [cat[name]])
        out[name] = (alg, operator_table(alg, cat[name]))
    return out
