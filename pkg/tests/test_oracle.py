import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffrest.algebra import atoms
from diffrest.duality import F_object, G_object, unit
from diffrest.errors import CapExceededError
from diffrest.fixtures import fault_fixtures
from diffrest.generators import random_atomic_algebra
from diffrest.oracle import (
    SearchBudget,
    algebra_isomorphic,
    brute_force_representation,
    enumerate_partial_sections,
    iter_isomorphisms,
    validate_representation,
)
from diffrest.pfun import UNDEF, PartialFunction, close_under_ops
from diffrest.setq import SetQuotient
from strategies import concrete_algebras, pf, rng_of, seeds


def conjugate(f, perm):
    """Rename base points through ``perm``."""
    values = [UNDEF] * f.base_size
    for x, y in f.pairs:
        values[perm[x]] = perm[y]
    return PartialFunction(tuple(values))


class TestRepresentation:
    def test_zero_only(self):
        A = close_under_ops([PartialFunction.empty(1)]).abstract
        res = brute_force_representation(A)
        assert res.found and validate_representation(A, res.witness.assignment)
        assert res.witness.assignment[0] == PartialFunction.empty(res.witness.base_size)

    def test_two_singletons(self, singletons):
        A = singletons.abstract
        res = brute_force_representation(A, SearchBudget(max_base=4))
        assert res.found and res.witness.base_size >= 2
        assert validate_representation(A, res.witness.assignment)

    def test_axiom_failure_is_impossible(self):
        A = fault_fixtures()["AX1"]
        res = brute_force_representation(A, SearchBudget(max_base=3))
        assert res.status == "impossible" and res.witness is None
        assert res.bases_tried == [0, 1, 2, 3]

    def test_budget(self):
        A = G_object(SetQuotient.from_fibers([2, 2])).abstract
        res = brute_force_representation(A, SearchBudget(max_base=6, max_nodes=1), seed_base=4)
        assert res.status == "not_found"

    def test_seed_base_is_tried_first(self, singletons):
        res = brute_force_representation(singletons.abstract, SearchBudget(max_base=5), seed_base=2)
        assert res.bases_tried[0] == 2 and res.witness.base_size == 2

    def test_bad_budget(self):
        with pytest.raises(ValueError):
            SearchBudget(max_base=-1)

    @given(seeds)
    def test_random_atomic_algebras_are_found(self, s):
        A = random_atomic_algebra(rng_of(s), 4, 16).abstract
        res = brute_force_representation(A, SearchBudget(max_base=2 * A.size), seed_base=len(atoms(A)))
        assert res.found and validate_representation(A, res.witness.assignment)
        GF = G_object(F_object(A))
        assert validate_representation(A, [GF.elements[b] for b in unit(A).mapping])

    def test_validator_rejects_wrong_assignment(self, singletons):
        A = singletons.abstract
        wrong = [pf([], 2), pf([(0, 0)], 2), pf([(0, 1)], 2)]
        assert not validate_representation(A, wrong)
        assert not validate_representation(A, wrong[:2])


class TestSections:
    @pytest.mark.parametrize("sizes,count", [((1,), 2), ((2, 2), 9), ((2, 1), 6)])
    def test_counts(self, sizes, count):
        pi = SetQuotient.from_fibers(list(sizes))
        secs = enumerate_partial_sections(pi)
        assert len(secs) == count
        assert tuple(secs) == G_object(pi).elements

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_partial_sections(SetQuotient.from_fibers([1] * 12), cap=100)


def brute_isomorphisms(A, B):
    if A.size != B.size:
        return []
    out = []
    for perm in itertools.permutations(range(B.size)):
        p = np.array(perm)
        if (p[A.minus] == B.minus[p[:, None], p[None, :]]).all() and \
                (p[A.restrict] == B.restrict[p[:, None], p[None, :]]).all():
            out.append(perm)
    return out


class TestIsomorphism:
    def test_self(self, singletons):
        A = singletons.abstract
        assert algebra_isomorphic(A, A) == (0, 1, 2)
        assert sorted(iter_isomorphisms(A, A)) == [(0, 1, 2), (0, 2, 1)]

    @given(st.permutations(range(3)))
    def test_renamed_base_points(self, perm):
        seed = [pf([(0, 1), (1, 1)], 3), pf([(2, 0)], 3)]
        A = close_under_ops(seed).abstract
        B = close_under_ops([conjugate(f, perm) for f in reversed(seed)]).abstract
        assert algebra_isomorphic(A, B) is not None

    def test_different_atom_counts(self, singletons):
        B = close_under_ops([pf([(0, 0), (1, 1)], 2)]).abstract
        C = G_object(SetQuotient.from_fibers([1])).abstract
        assert algebra_isomorphic(singletons.abstract, C) is None
        assert algebra_isomorphic(B, C) is not None
        D = G_object(SetQuotient.from_fibers([2])).abstract
        assert algebra_isomorphic(singletons.abstract, D) is None

    @given(concrete_algebras(max_base=3, max_elements=7), concrete_algebras(max_base=3, max_elements=7))
    def test_agrees_with_all_permutations(self, a, b):
        A, B = a.abstract, b.abstract
        assert sorted(iter_isomorphisms(A, B)) == brute_isomorphisms(A, B)

    @given(concrete_algebras(max_base=3, max_elements=7), st.randoms(use_true_random=False))
    def test_agrees_on_relabelled_copies(self, a, rnd):
        A = a.abstract
        perm = list(range(A.size))
        rnd.shuffle(perm)
        B = A.relabel(perm)
        isos = sorted(iter_isomorphisms(A, B))
        assert tuple(perm) in isos
        assert isos == brute_isomorphisms(A, B)
