import pytest
from hypothesis import given

from diffrest.errors import ClosureError, ParseError
from diffrest.fileformat import (
    emit_algebra,
    emit_homomorphism_map,
    emit_morphism,
    emit_poset,
    emit_quotient,
    load,
    parse_algebra,
    parse_homomorphism_map,
    parse_morphism,
    parse_poset,
    parse_quotient,
)
from diffrest.fixtures import fault_fixtures
from diffrest.generators import (
    OPERATOR_CLOSURE,
    all_compatibility_posets,
    random_operator_algebra,
    random_quotient_morphism,
    random_signed_quotient,
)
from strategies import concrete_algebras, quotients, rng_of, seeds

SINGLETONS = """format 1
kind concrete
base 3
[elements]
[]
[(1,1)]
[(2,2)]
"""


class TestAlgebraFiles:
    def test_canonical_concrete_round_trip(self):
        f = parse_algebra(SINGLETONS)
        assert f.algebra.size == 3 and f.concrete.base_size == 3
        assert emit_algebra(f.signed, concrete=f.concrete) == SINGLETONS

    @given(concrete_algebras())
    def test_concrete_round_trip(self, alg):
        text = emit_algebra(alg)
        assert emit_algebra(parse_algebra(text).concrete) == text

    @given(concrete_algebras())
    def test_table_round_trip(self, alg):
        text = emit_algebra(alg.abstract)
        back = parse_algebra(text)
        assert back.algebra == alg.abstract and back.concrete is None
        assert emit_algebra(back.algebra) == text

    @given(seeds)
    def test_operators_round_trip(self, s):
        SA = random_operator_algebra(rng_of(s), 2, 16, OPERATOR_CLOSURE)
        text = emit_algebra(SA)
        back = parse_algebra(text).signed
        assert {op.name: op for op in back.operators} == {op.name: op for op in SA.operators}
        assert emit_algebra(back) == text

    def test_tables_need_not_satisfy_axioms(self):
        A = fault_fixtures()["AX3"]
        assert parse_algebra(emit_algebra(A)).algebra == A

    def test_comments_and_blank_lines(self):
        text = "# note\n\n" + SINGLETONS.replace("[elements]\n", "[elements]\n# first\n\n")
        assert parse_algebra(text).algebra.size == 3

    def test_not_closed_names_missing_element(self):
        text = SINGLETONS.replace("[]\n", "")
        with pytest.raises(ClosureError) as exc:
            parse_algebra(text)
        assert "[]" in str(exc.value)

    def test_short_row(self):
        text = "format 1\nkind table\nsize 2\n[minus]\n0 0\n1\n[restrict]\n0 0\n0 1\n"
        with pytest.raises(ParseError) as exc:
            parse_algebra(text)
        assert exc.value.line == 6

    def test_entry_out_of_range(self):
        text = "format 1\nkind table\nsize 2\n[minus]\n0 0\n1 7\n[restrict]\n0 0\n0 1\n"
        with pytest.raises(ParseError) as exc:
            parse_algebra(text)
        assert (exc.value.line, exc.value.column) == (6, 3)

    def test_bad_token(self):
        with pytest.raises(ParseError) as exc:
            parse_algebra(SINGLETONS.replace("[(1,1)]", "[(1,x)]"))
        assert exc.value.line == 6

    def test_missing_section(self):
        with pytest.raises(ParseError, match="restrict"):
            parse_algebra("format 1\nkind table\nsize 1\n[minus]\n0\n")

    def test_wrong_format_version(self):
        with pytest.raises(ParseError):
            parse_algebra(SINGLETONS.replace("format 1", "format 9"))

    def test_unknown_section(self):
        with pytest.raises(ParseError):
            parse_algebra(SINGLETONS + "[extra]\n1\n")

    def test_wrong_kind(self):
        with pytest.raises(ParseError):
            parse_quotient(SINGLETONS)


class TestQuotientFiles:
    @given(quotients())
    def test_round_trip(self, pi):
        text = emit_quotient(pi)
        assert parse_quotient(text).quotient == pi
        assert emit_quotient(parse_quotient(text).signed) == text

    @given(seeds)
    def test_relations_round_trip(self, s):
        SQ = random_signed_quotient(rng_of(s), 4, (("u", 1), ("b", 2)))
        back = parse_quotient(emit_quotient(SQ)).signed
        assert back.quotient == SQ.quotient
        assert set(back.relations) == set(SQ.relations)

    def test_projection_missing_a_class(self):
        with pytest.raises(ParseError, match="projection"):
            parse_quotient("format 1\nkind quotient\n[projection]\n0 2 2\n")

    def test_relation_point_outside(self):
        with pytest.raises(ParseError):
            parse_quotient("format 1\nkind quotient\n[projection]\n0 1\n[sigma r 1]\n0 5\n")

    def test_relation_arity(self):
        with pytest.raises(ParseError):
            parse_quotient("format 1\nkind quotient\n[projection]\n0 1\n[sigma r 1]\n0 1 1\n")


class TestMorphismFiles:
    @given(quotients(), quotients(), seeds)
    def test_round_trip(self, pi, rho, s):
        phi = random_quotient_morphism(rng_of(s), pi, rho)
        text = emit_morphism(phi)
        assert parse_morphism(text) == phi
        assert emit_morphism(parse_morphism(text)) == text

    def test_invalid_morphism_still_parses(self):
        text = "format 1\nkind morphism\n[source]\n0 0 1\n[target]\n0 0 1\n[map]\n0 - -\n"
        assert parse_morphism(text).mapping == (0, None, None)

    def test_length_mismatch(self):
        with pytest.raises(ParseError):
            parse_morphism("format 1\nkind morphism\n[source]\n0 0\n[target]\n0\n[map]\n0\n")

    def test_homomorphism_map(self):
        text = emit_homomorphism_map((0, 1, 3))
        assert parse_homomorphism_map(text) == (0, 1, 3)


class TestPosetFiles:
    def test_round_trip(self):
        for P in list(all_compatibility_posets(3)):
            text = emit_poset(P)
            assert parse_poset(text) == P
            assert emit_poset(parse_poset(text)) == text

    def test_rejects_non_poset(self):
        text = "format 1\nkind poset\nsize 2\n[leq]\n1 1\n1 1\n[compat]\n1 1\n1 1\n"
        with pytest.raises(ParseError, match="antisymmetric"):
            parse_poset(text)


def test_load_dispatches(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text(SINGLETONS)
    assert load(p).algebra.size == 3
    q = tmp_path / "q.txt"
    q.write_text("format 1\nkind quotient\n[projection]\n0 0 1\n")
    assert load(q).quotient.fiber_sizes() == (2, 1)
    h = tmp_path / "h.txt"
    h.write_text(emit_homomorphism_map((0, 2)))
    assert load(h) == (0, 2)
    bad = tmp_path / "bad.txt"
    bad.write_text("format 1\nkind nonsense\n")
    with pytest.raises(ParseError):
        load(bad)
