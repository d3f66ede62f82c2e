import pytest
from hypothesis import given

from diffrest.algebra import check_axioms, is_compatibly_complete, join_of, meet_of
from diffrest.completion import (
    check_smallest_largest_extension,
    commuting_isomorphisms,
    compatible_completion,
    completion_uniqueness_iso,
    enlarge_with_flag,
    is_join_dense,
    key_embedding,
    monad_idempotent,
    two_element_algebra,
)
from diffrest.duality import (
    G_algebra,
    compose_homomorphisms,
    identity_homomorphism,
    relabel_homomorphism,
    unit,
)
from diffrest.errors import PreconditionError
from diffrest.generators import random_atomic_algebra, random_compatible_subset
from diffrest.pfun import union
from diffrest.setq import SetQuotient
from strategies import pf, quotients, rng_of, seeds


def atomic(s, max_carrier=4, max_elements=32):
    return random_atomic_algebra(rng_of(s), max_carrier, max_elements).abstract


class TestCompletion:
    def test_two_singletons_gain_their_union(self, singletons):
        w = compatible_completion(singletons.abstract)
        assert len(w.completion) == 4
        missing = set(w.completion.elements) - {w.completion.elements[b] for b in w.embedding.mapping}
        assert missing == {pf([(0, 0), (1, 1)], 2)}

    @given(quotients())
    def test_complete_input_is_fixed(self, pi):
        assert compatible_completion(G_algebra(pi)).embedding.is_bijective()

    @given(seeds)
    def test_random_atomic_algebras(self, s):
        A = atomic(s)
        w = compatible_completion(A)
        assert w.embedding.is_injective() and w.embedding.check() and is_join_dense(w.embedding)
        assert monad_idempotent(A)

    def test_not_atomic(self):
        from diffrest.fixtures import fault_fixtures

        with pytest.raises(PreconditionError):
            compatible_completion(fault_fixtures()["AX4"])


class TestKeyEmbedding:
    def test_identities(self, singletons):
        A = singletons.abstract
        ident = identity_homomorphism(A)
        w = compatible_completion(A)
        # the identity is dense but A is not compatibly complete
        with pytest.raises(PreconditionError):
            key_embedding(ident, ident)
        C = G_algebra(SetQuotient.from_fibers([2, 1]))
        assert key_embedding(identity_homomorphism(C), identity_homomorphism(C)) == identity_homomorphism(C)
        assert key_embedding(w.embedding, w.embedding) == identity_homomorphism(w.embedding.target)
        assert key_embedding(ident, w.embedding) == w.embedding

    def test_needs_dense_source_map(self, singletons):
        A = singletons.abstract
        B, flag = enlarge_with_flag(G_algebra(SetQuotient.from_fibers([1, 1])))
        eta = unit(A)
        kappa = compose_homomorphisms(flag, eta)
        with pytest.raises(PreconditionError, match="join-dense"):
            key_embedding(kappa, eta)

    @given(seeds)
    def test_theta_commutes(self, s):
        A = atomic(s)
        w = compatible_completion(A)
        B, flag = enlarge_with_flag(w.embedding.target)
        kappa = compose_homomorphisms(flag, w.embedding)
        theta = key_embedding(w.embedding, kappa)
        assert compose_homomorphisms(theta, w.embedding) == kappa


class TestUniqueness:
    def test_same_completion(self, singletons):
        w = compatible_completion(singletons.abstract)
        assert completion_uniqueness_iso(w.embedding, w.embedding) == identity_homomorphism(w.embedding.target)

    def test_relabelled_copy(self, singletons):
        w = compatible_completion(singletons.abstract)
        perm = [3, 1, 0, 2]
        relabel = relabel_homomorphism(w.embedding.target, perm)
        theta = completion_uniqueness_iso(w.embedding, compose_homomorphisms(relabel, w.embedding))
        assert theta.mapping == tuple(perm)

    @given(seeds)
    def test_two_pipelines_agree(self, s):
        rng = rng_of(s)
        A = random_atomic_algebra(rng, 4, 32).abstract
        perm = list(range(A.size))
        rng.shuffle(perm)
        relabel = relabel_homomorphism(A, perm)
        w, other = compatible_completion(A), compatible_completion(relabel.target)
        iota_p = compose_homomorphisms(other.embedding, relabel)
        theta = completion_uniqueness_iso(w.embedding, iota_p, brute_force_cap=16)
        assert theta.is_bijective()
        if len(w.completion) <= 16:
            assert commuting_isomorphisms(w.embedding, iota_p) == [theta.mapping]


class TestExtensions:
    def test_completion_against_itself(self, singletons):
        w = compatible_completion(singletons.abstract)
        ext = check_smallest_largest_extension(w.embedding, w.embedding)
        ident = identity_homomorphism(w.embedding.target)
        assert ext.smallest == ident and ext.largest == ident

    def test_enlargement_gives_proper_smallest_extension(self, singletons):
        w = compatible_completion(singletons.abstract)
        B, flag = enlarge_with_flag(w.embedding.target)
        assert check_axioms(B) and is_compatibly_complete(B)
        ext = check_smallest_largest_extension(w.embedding, compose_homomorphisms(flag, w.embedding))
        assert ext.smallest.mapping == (0, 2, 4, 6)
        assert not ext.smallest.is_bijective()
        assert ext.largest is None

    def test_dense_identity_gives_unit(self, singletons):
        A = singletons.abstract
        w = compatible_completion(A)
        ext = check_smallest_largest_extension(w.embedding, identity_homomorphism(A))
        assert ext.smallest is None
        assert ext.largest == w.embedding

    def test_two_element_algebra(self):
        T = two_element_algebra()
        assert T.size == 2 and check_axioms(T)


class TestDistributivity:
    @given(seeds)
    def test_joins_distribute(self, s):
        rng = rng_of(s)
        w = compatible_completion(random_atomic_algebra(rng, 4, 32).abstract)
        G, C = w.completion, w.completion.abstract
        for _ in range(10):
            S = random_compatible_subset(rng, C) or [rng.randrange(C.size)]
            T = random_compatible_subset(rng, C)
            jS, jT = join_of(C, S), join_of(C, T)
            # the join of a compatible set of sections is their union
            assert G.elements[jS] == union([G.elements[x] for x in S], G.base_size)
            ST = {C.rest(x, y) for x in S for y in T}
            assert C.rest(jS, jT) == join_of(C, ST)
            a = rng.randrange(C.size)
            assert meet_of(C, {C.sub(a, x) for x in S}) == C.sub(a, jS)
