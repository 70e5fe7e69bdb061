import random
import re

import pytest

from helpers import random_pattern, random_taxonomy
from nesypat.catalog import Catalog
from nesypat.colimit import combine, evaluate_combines
from nesypat.dsl import parse, resolve
from nesypat.emitters import (
    emit_abox,
    emit_dot,
    emit_json,
    emit_manchester,
    pattern_from_json,
)
from nesypat.pattern import build_pattern, isomorphic
from nesypat.taxonomy import default_taxonomy, parse_taxonomy

FIG_DOC_TEXT = None


@pytest.fixture(scope="module")
def t():
    return default_taxonomy()


@pytest.fixture(scope="module")
def fig_lib():
    from pathlib import Path
    corpus = Path(__file__).resolve().parents[1] / "src" / "nesypat" / "corpus"
    doc = parse((corpus / "semantic_generate_and_train.nesy").read_text())
    return resolve(doc, Catalog.default())


def pat(t, name, labeled_nodes, edges=()):
    nodes = [(i, t.lookup(l)) for i, l in labeled_nodes]
    return build_pattern(name, t, nodes, list(edges))


# A permissive line-level DOT checker, independent of the emitter.
_DOT_NODE = re.compile(r'^  "(?:[^"\\]|\\.)*" \[label="(?:[^"\\]|\\.)*", '
                       r'shape=[a-z]+\];$')
_DOT_EDGE = re.compile(r'^  "(?:[^"\\]|\\.)*" -> "(?:[^"\\]|\\.)*";$')


def check_dot_syntax(text: str) -> None:
    lines = text.splitlines()
    assert lines[0].startswith('digraph "') and lines[0].endswith('" {')
    assert lines[-1] == "}"
    for line in lines[1:-1]:
        assert _DOT_NODE.match(line) or _DOT_EDGE.match(line), line


class TestEmitDot:
    def test_train_pattern(self, fig_lib):
        text = emit_dot(fig_lib.patterns["Train"])
        check_dot_syntax(text)
        assert text.count("->") == 2
        assert text.count("[label=") == 3
        assert 'shape=ellipse' in text  # Training node
        assert 'anon2 : Training' in text

    def test_single_node(self, t):
        text = emit_dot(pat(t, "one", [("m", "Model")]))
        check_dot_syntax(text)
        assert text.count("[label=") == 1
        assert "shape=hexagon" in text

    def test_combined_pattern(self, fig_lib):
        lib = evaluate_combines(fig_lib)
        text = emit_dot(lib.patterns["SemanticGenerateAndTrain"])
        check_dot_syntax(text)
        assert text.count("[label=") == 6
        assert text.count("->") == 5

    def test_shapes_by_ancestor(self, t):
        p = pat(t, "zoo", [("i", "Data"), ("m", "Semantic_Model"),
                           ("pr", "Deduction"), ("a", "Actor"),
                           ("top", "NeSy_Pattern_Element")])
        text = emit_dot(p)
        assert '"i" [label="i : Data", shape=box];' in text
        assert '"m" [label="m : Semantic_Model", shape=hexagon];' in text
        assert '"pr" [label="pr : Deduction", shape=ellipse];' in text
        assert '"a" [label="a : Actor", shape=diamond];' in text
        assert '"top" [label="top : NeSy_Pattern_Element", shape=plaintext];' in text

    def test_arbitrary_patterns_are_valid_dot(self):
        rng = random.Random(67)
        for _ in range(25):
            tax = random_taxonomy(rng, rng.randint(2, 8))
            check_dot_syntax(emit_dot(random_pattern(rng, tax, "r",
                                                     rng.randint(1, 6), 0.4)))


class TestEmitJson:
    def test_single_node_shape(self, t):
        p = pat(t, "one", [("anon1", "Model")])
        text = emit_json(p)
        assert text == ('{"edges":[],"name":"one",'
                        '"nodes":[{"id":"anon1","label":"Model"}]}\n')

    def test_combination_payload(self, fig_lib):
        result = combine(fig_lib.networks["N"])
        text = emit_json(result)
        import json
        obj = json.loads(text)
        assert len(obj["nodes"]) == 6
        assert len(obj["edges"]) == 5
        assert set(obj["injections"]) == {"Model", "Train", "SemanticDeduction"}
        merged = [c for c, members in obj["classes"].items() if len(members) > 1]
        assert merged == ["Model.anon1"]

    def test_network_payload(self, fig_lib):
        import json
        obj = json.loads(emit_json(fig_lib.networks["N"]))
        assert len(obj["patterns"]) == 3
        assert {r["name"] for r in obj["refinements"]} == {"R1", "R2"}

    def test_byte_identical_for_equal_inputs(self, fig_lib):
        a = emit_json(fig_lib.patterns["Train"])
        b = emit_json(fig_lib.patterns["Train"])
        assert a == b

    def test_roundtrip_through_reader(self, t):
        rng = random.Random(71)
        for _ in range(20):
            p = random_pattern(rng, t, "r", rng.randint(1, 6), 0.4)
            q = pattern_from_json(emit_json(p), t)
            assert isomorphic(p, q)


class TestEmitAbox:
    def test_paper_chain_exactly(self, t):
        p = pat(t, "chain",
                [("a", "Symbol"), ("b", "Training"), ("c", "Model")],
                [("a", "b"), ("b", "c")])
        triples = emit_abox(p)
        assert triples.render() == (
            "a : Symbol\n"
            "providesInput(a,b)\n"
            "b : Training\n"
            "hasOutput(b,c)\n"
            "c : Model\n")
        assert len(triples.memberships) == 3
        assert len(triples.links) == 2

    def test_process_to_process_is_throughput(self, t):
        p = pat(t, "pp", [("d1", "Deduction"), ("d2", "Deduction")],
                [("d1", "d2")])
        triples = emit_abox(p)
        assert ("throughput", "d1", "d2") in triples.links

    def test_non_process_edge_warns_connected_to(self, t):
        p = pat(t, "np", [("s", "Symbol"), ("d", "Data")], [("s", "d")])
        diags = []
        triples = emit_abox(p, diags)
        assert ("connectedTo", "s", "d") in triples.links
        assert any(d.severity == "warning" for d in diags)

    def test_counts_match_pattern(self, t):
        rng = random.Random(73)
        for _ in range(20):
            p = random_pattern(rng, t, "r", rng.randint(1, 6), 0.4)
            triples = emit_abox(p)
            assert len(triples.memberships) == len(p.nodes)
            assert len(triples.links) == len(p.edges)
            assert len(triples.lines) == len(p.nodes) + len(p.edges)


class TestEmitManchester:
    def test_default_roundtrip_order_isomorphic(self, t):
        text = emit_manchester(t)
        back = parse_taxonomy(text)
        assert {c.local_name for c in back.classes} == \
            {c.local_name for c in t.classes}
        names = sorted(c.local_name for c in t.classes)
        for a in names:
            for b in names:
                assert t.leq(t.lookup(a), t.lookup(b)) == \
                    back.leq(back.lookup(a), back.lookup(b))

    def test_random_taxonomies_roundtrip(self):
        rng = random.Random(79)
        for _ in range(15):
            t = random_taxonomy(rng, rng.randint(1, 10))
            back = parse_taxonomy(emit_manchester(t))
            assert {c.local_name for c in back.classes} == \
                {c.local_name for c in t.classes}
            for a in t.classes:
                for b in t.classes:
                    assert t.leq(a, b) == back.leq(
                        back.lookup(a.local_name), back.lookup(b.local_name))

    def test_extended_taxonomy_roundtrip(self, t):
        ext = t.extend("Class: Hybrid_Model SubClassOf: Semantic_Model, Statistical_Model")
        back = parse_taxonomy(emit_manchester(ext))
        hybrid = back.lookup("Hybrid_Model")
        assert back.leq(hybrid, back.lookup("Semantic_Model"))
        assert back.leq(hybrid, back.lookup("Statistical_Model"))

    def test_bundled_omn_file_matches_default(self, t):
        from pathlib import Path
        corpus = Path(__file__).resolve().parents[1] / "src" / "nesypat" / "corpus"
        parsed = parse_taxonomy((corpus / "nesy_patterns.omn").read_text())
        assert parsed == t
