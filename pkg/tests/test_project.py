"""project-graph: .proj parsing, refinement tracing, concept lookup."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture

from qvl.errors import ParseError, RefinementCycle, UnknownFragment
from qvl.model import Name
from qvl.project import (
    DocumentDecl,
    FragmentDecl,
    ProjectGraph,
    fragments_of_concept,
    parse_project,
    trace,
)


@pytest.fixture(scope="module")
def crane_graph() -> ProjectGraph:
    return parse_project(load_fixture("crane.proj"), "crane", file="crane.proj")


class TestParseProject:
    def test_crane_fixture_shape(self, crane_graph):
        assert crane_graph.name == "crane"
        assert [d.stage for d in crane_graph.documents] == ["S1", "S2", "S3", "S4", "S5"]
        assert len(crane_graph.refines) == 3
        assert len(crane_graph.illustrates) == 2

    def test_documents_only_graph_has_no_edges(self):
        graph = parse_project('project p\ndocument D stage S4 kind sketch file "d.png"')
        assert graph.refines == () and graph.illustrates == ()

    def test_refinement_cycle_rejected(self):
        text = ('project p\n'
                'document A stage S3 kind text file "a"\n'
                'document B stage S4 kind text file "b"\n'
                'fragment A#x\nfragment B#y\n'
                'refines B#y of A#x\nrefines A#x of B#y')
        with pytest.raises(RefinementCycle) as exc:
            parse_project(text)
        assert exc.value.path[0] == exc.value.path[-1]

    def test_edge_endpoints_must_be_declared(self):
        text = ('project p\ndocument A stage S3 kind text file "a"\n'
                'fragment A#x\nrefines A#x of A#ghost')
        with pytest.raises(UnknownFragment):
            parse_project(text)

    def test_fragment_of_unknown_document(self):
        with pytest.raises(UnknownFragment):
            parse_project("project p\nfragment Z#x")

    def test_same_document_refinement_rejected(self):
        text = ('project p\ndocument A stage S3 kind text file "a"\n'
                'fragment A#x\nfragment A#y\nrefines A#x of A#y')
        with pytest.raises(ParseError):
            parse_project(text)

    def test_invalid_stage_rejected(self):
        with pytest.raises(ParseError):
            parse_project('project p\ndocument A stage S9 kind text file "a"')


class TestTrace:
    def test_upward_trace_reaches_the_requirement(self, crane_graph):
        assert trace(crane_graph, "S5#S17", "up") == ["S4#S13", "S3#S3"]

    def test_downward_trace_lists_cad_refinements(self, crane_graph):
        assert trace(crane_graph, "S4#S13", "down") == ["S5#S17", "S5#S19"]

    def test_isolated_fragment_traces_empty(self, crane_graph):
        assert trace(crane_graph, "S4#S14", "up") == []
        assert trace(crane_graph, "S4#S14", "down") == []

    def test_unknown_fragment(self, crane_graph):
        with pytest.raises(UnknownFragment):
            trace(crane_graph, "S9#S99", "up")

    def test_bad_direction(self, crane_graph):
        with pytest.raises(ValueError):
            trace(crane_graph, "S5#S17", "sideways")


class TestFragmentsOfConcept:
    def test_sheave_fragments_in_document_order(self, crane_graph):
        assert fragments_of_concept(crane_graph, Name("crane", "Sheave")) \
            == ["S4#S13", "S4#S14"]

    def test_unknown_concept_is_empty(self, crane_graph):
        assert fragments_of_concept(crane_graph, Name("crane", "Gearbox")) == []

    def test_adding_an_edge_grows_the_result_by_that_fragment(self, crane_graph):
        concept = Name("crane", "Sheave")
        before = fragments_of_concept(crane_graph, concept)
        grown = ProjectGraph(crane_graph.name, crane_graph.documents,
                             crane_graph.fragments, crane_graph.refines,
                             crane_graph.illustrates + (("S5#S17", concept),))
        after = fragments_of_concept(grown, concept)
        assert set(after) - set(before) == {"S5#S17"}
        assert len(after) == len(before) + 1


def _random_dag(draw_edges: list[tuple[int, int]], n: int) -> ProjectGraph:
    documents = tuple(DocumentDecl(f"D{i}", "S4", "text", f"d{i}.txt") for i in range(n))
    fragments = tuple(FragmentDecl(f"D{i}#f", f"D{i}") for i in range(n))
    refines = tuple((f"D{a}#f", f"D{b}#f") for a, b in draw_edges)
    return ProjectGraph("p", documents, fragments, refines, ())


@given(st.integers(2, 8).flatmap(
    lambda n: st.tuples(st.just(n),
                        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                                 .filter(lambda e: e[0] > e[1]), max_size=12))))
@settings(max_examples=60, deadline=None)
def test_trace_closure_properties(case):
    n, edges = case
    graph = _random_dag(sorted(set(edges)), n)
    for i in range(n):
        frag = f"D{i}#f"
        up = trace(graph, frag, "up")
        down = trace(graph, frag, "down")
        # acyclic graphs: ancestors and descendants are disjoint
        assert not (set(up) & set(down))
        # closure symmetry in both directions
        for other in up:
            assert frag in trace(graph, other, "down")
        for other in down:
            assert frag in trace(graph, other, "up")
