from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structmap import CorpusError, GeneratorSpec, generate_domain, isomorphic, load_corpus, parse_corpus, serialize
from structmap.dsl import serialize_corpus

GOLDEN = Path(__file__).parent / "golden" / "water-flow.anl"


def codes(result):
    return [d.code for d in result.diagnostics]


class TestParse:
    def test_empty_domain(self):
        r = parse_corpus("domain d { }")
        assert r.ok
        d = r.domains["d"]
        assert d.entities == () and d.facts == ()

    def test_single_relation(self):
        r = parse_corpus("domain d { entities: a, b; relation loves/2; facts: loves(a,b); }")
        d = r.domains["d"]
        assert len(d.facts) == 1 and len(d.entities) == 2
        assert d.elements[d.facts[0]].level == 1

    def test_arity_mismatch_location(self):
        src = "domain d {\n  entities: x, y, z;\n  relation greater/2;\n  facts:\n    greater(x, y, z);\n}\n"
        r = parse_corpus(src)
        assert not r.ok
        (diag,) = r.diagnostics
        assert diag.code == "arity-mismatch"
        assert (diag.line, diag.column) == (5, 5)

    def test_error_aborts_only_its_block(self):
        src = "domain bad { relation r/2; facts: r(a); }\ndomain good { entities: a; attribute p/1; facts: p(a); }"
        r = parse_corpus(src)
        assert list(r.domains) == ["good"]
        assert codes(r) == ["arity-mismatch"]

    def test_syntax_error_recovers_at_next_block(self):
        r = parse_corpus("domain d { entities: a b; }\ndomain e { }")
        assert list(r.domains) == ["e"]
        assert codes(r) == ["syntax"]
        assert r.diagnostics[0].line == 1

    def test_undeclared_predicate(self):
        assert codes(parse_corpus("domain d { facts: foo(a); }")) == ["undeclared-predicate"]

    def test_duplicate_declaration(self):
        assert codes(parse_corpus("domain d { relation r/2; relation r/2; }")) == ["duplicate-name"]

    def test_duplicate_domain(self):
        r = parse_corpus("domain d { } domain d { }")
        assert codes(r) == ["duplicate-name"] and list(r.domains) == ["d"]

    def test_repeated_entity_is_only_a_warning(self):
        r = parse_corpus("domain d { entities: a, a; }")
        assert r.ok
        assert [d.severity for d in r.diagnostics] == ["warning"]

    def test_attribute_over_function(self):
        r = parse_corpus("domain d { attribute hot/1; function f/1; facts: hot(f(a)); }")
        assert codes(r) == ["attribute-nonentity-arg"]

    def test_predicate_name_reused_as_entity(self):
        assert codes(parse_corpus("domain d { relation r/1; entities: r; }")) == ["duplicate-name"]

    def test_unknown_character(self):
        assert codes(parse_corpus("domain d { entities: a$; }")) == ["syntax"]

    def test_empty_source(self):
        assert codes(parse_corpus("")) == ["syntax"]

    def test_comments_and_implicit_entities(self):
        r = parse_corpus("# header\ndomain d { relation r/2; # trailing\n facts: r(a, b); }")
        assert r.ok
        assert [r.domains["d"].elements[e].name for e in r.domains["d"].entities] == ["a", "b"]

    def test_deterministic(self):
        src = "domain d { relation r/2; facts: r(a); r(a, b, c); }"
        assert parse_corpus(src).diagnostics == parse_corpus(src).diagnostics

    def test_diagnostics_point_inside_source(self):
        src = "domain d {\n relation r/2;\n facts: r(a);\n}\ndomain e { attribute p/2; }"
        lines = src.split("\n")
        for d in parse_corpus(src).diagnostics:
            assert 1 <= d.line <= len(lines)
            assert 1 <= d.column <= len(lines[d.line - 1]) + 1

    def test_load_corpus_raises(self, tmp_path):
        p = tmp_path / "bad.anl"
        p.write_text("domain d { facts: foo(a); }")
        with pytest.raises(CorpusError) as err:
            load_corpus(p)
        assert err.value.diagnostics[0].code == "undeclared-predicate"


class TestSerialize:
    def test_empty_domain(self):
        assert serialize(parse_corpus("domain d { }").domains["d"]) == "domain d {\n}\n"

    def test_golden_water_flow(self, classics):
        assert serialize(classics["water-flow"]) == GOLDEN.read_text()

    def test_declarations_sorted(self, classics):
        text = serialize(classics["solar-system"])
        decls = [ln.strip() for ln in text.splitlines() if ln.strip().split(" ")[0] in ("attribute", "function", "relation")]
        kinds = ["attribute", "function", "relation"]
        assert decls == sorted(decls, key=lambda s: (kinds.index(s.split()[0]), s.split()[1]))

    def test_round_trip_bundled(self, classics, classics_path):
        text = serialize_corpus(classics)
        again = parse_corpus(text)
        assert again.ok
        for name, d in classics.items():
            assert isomorphic(d, again.domains[name])
        assert serialize_corpus(again.domains) == text

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(1, 12), f=st.integers(1, 12), lvl=st.integers(1, 4),
        amb=st.sampled_from([0.0, 0.3, 0.7, 1.0]), seed=st.integers(0, 10_000),
    )
    def test_round_trip_generated(self, n, f, lvl, amb, seed):
        d = generate_domain(GeneratorSpec(n, f, lvl, 200, amb, seed), "g")
        again = parse_corpus(serialize(d)).domains["g"]
        assert isomorphic(d, again)
