import json

import pytest

from powergraph.bench import solve
from powergraph.core import (
    DirectedGraph,
    add_module,
    flat_configuration,
    representative_edges,
    signature,
)
from powergraph.datahandler import (
    FORMAT_VERSION,
    PowerGraphDocument,
    format_edge_list,
    parse_edge_list,
    parse_json,
    read_document,
    read_edge_list,
    to_dot,
    to_json,
    write_document,
    write_edge_list,
)
from powergraph.errors import ParseError, VerificationError


@pytest.fixture
def biclique_solution(biclique):
    c = add_module(add_module(flat_configuration(biclique), [0, 1]), [2, 3])
    return c, representative_edges(c)


@pytest.fixture
def biclique_document(biclique_solution):
    c, r = biclique_solution
    return PowerGraphDocument.from_solution(c, r, {"method": "beam"})


def test_parse_edge_list():
    g = parse_edge_list("0 1\n1 2\n")
    assert g.n == 3
    assert g.edges == {(0, 1), (1, 2)}


def test_parse_comments_and_header():
    g = parse_edge_list("# a comment\n\nn 5\n 0   1 \n\n4 2\n")
    assert g.n == 5
    assert g.edges == {(0, 1), (4, 2)}
    assert parse_edge_list("").n == 0
    assert parse_edge_list("n 3\n").m == 0


@pytest.mark.parametrize(
    ("text", "line", "fragment"),
    [
        ("0 0\n", 1, "self-loop"),
        ("0 1\n# again\n0 1\n", 3, "first on line 1"),
        ("0 1\n1 x\n", 2, "non-negative integer"),
        ("0 -1\n", 1, "non-negative"),
        ("0 1 2\n", 1, "two vertex ids"),
        ("n 3\nn 3\n", 2, "declared twice"),
        ("n 3\n0 3\n", 2, "exceeds n=3"),
        ("0 4\n1 2\nn 3\n", 3, "line 1"),
        ("n\n", 1, "header"),
        ("0 1_0\n", 1, "non-negative integer"),
        ("+3 1\n", 1, "non-negative integer"),
        ("0 \u0663\n", 1, "non-negative integer"),
        ("n +3\n", 1, "non-negative integer"),
        ("0 -\n", 1, "non-negative integer"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_edge_list(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_parse_error_names_file():
    with pytest.raises(ParseError) as info:
        parse_edge_list("1 2\n2 2\n", "graph.edges")
    assert str(info.value).startswith("graph.edges:2: ")


def test_edge_list_files(tmp_path, make_graph):
    g = make_graph(9, 0.3, 2)
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    assert path.read_text().startswith("n 9\n")
    assert read_edge_list(path) == g
    assert format_edge_list(DirectedGraph(2)) == "n 2\n"


def test_document_json(biclique_document):
    data = json.loads(to_json(biclique_document))
    assert data["version"] == FORMAT_VERSION
    assert data["n"] == 4
    assert data["modules"][0] == {"id": 0, "leaf": 0}
    assert data["modules"][4] == {"id": 4, "children": [0, 1]}
    assert data["modules"][5] == {"id": 5, "children": [2, 3]}
    assert data["edges"] == [[4, 5]]
    assert data["metadata"] == {"method": "beam"}
    assert data["labels"] is None


def test_document_files(tmp_path, biclique_document):
    path = tmp_path / "solution.json"
    write_document(biclique_document, path)
    assert read_document(path) == biclique_document
    assert parse_json(to_json(biclique_document)) == biclique_document


def test_solver_outputs_survive_json(make_graph):
    for seed in range(12):
        g = make_graph(7, [0.3, 0.5, 0.7][seed % 3], seed)
        for method in ("jaccard", "beam_1", "beam_4", "optimal"):
            c = solve(method, g)
            r = representative_edges(c)
            doc = PowerGraphDocument.from_solution(c, r, {"method": method})
            back = parse_json(to_json(doc))
            assert back == doc
            rebuilt, edges = back.to_configuration(g)
            assert signature(rebuilt) == signature(c)
            assert edges.edges == r.edges
            assert back.verify(g) == []


def test_document_to_configuration(biclique, biclique_solution):
    c, r = biclique_solution
    doc = PowerGraphDocument.from_solution(c, r)
    rebuilt, edges = doc.to_configuration(biclique)
    assert signature(rebuilt) == signature(c)
    assert edges.edges == r.edges
    expanded, _ = doc.to_configuration()
    assert expanded.graph == biclique


def test_document_verify(biclique, biclique_document):
    assert biclique_document.verify(biclique) == []
    fewer = DirectedGraph(4, biclique.edges - {(0, 2)})
    assert biclique_document.verify(fewer)
    assert biclique_document.verify(DirectedGraph(5, biclique.edges))


@pytest.mark.parametrize(
    "modules",
    [
        {4: (0, 1), 5: (1, 2)},
        {4: (0, 7)},
        {2: (0, 1)},
        {4: (0,)},
    ],
)
def test_broken_hierarchies(modules):
    doc = PowerGraphDocument(4, modules, [])
    with pytest.raises(VerificationError):
        doc.to_configuration()


def test_edges_to_unknown_modules():
    doc = PowerGraphDocument(4, {}, [(0, 9)])
    with pytest.raises(VerificationError):
        doc.to_configuration()


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"version": 1}',
        '{"version": 2, "n": 0, "modules": [], "edges": []}',
        '{"version": 1, "n": 2, "modules": [{"id": 0, "leaf": 1}], '
        '"edges": []}',
        '{"version": 1, "n": 2, "modules": [], "edges": [[0]]}',
    ],
)
def test_parse_json_errors(text):
    with pytest.raises(ParseError):
        parse_json(text)


def test_dot_of_flat_graph(biclique):
    c = flat_configuration(biclique)
    text = to_dot(PowerGraphDocument.from_solution(c, representative_edges(c)))
    assert text.startswith("digraph powergraph {")
    assert text.count("->") == biclique.m
    assert "cluster" not in text


def test_dot_of_single_module(biclique):
    c = add_module(flat_configuration(biclique), [0, 1])
    doc = PowerGraphDocument.from_solution(c, representative_edges(c))
    text = to_dot(doc)
    assert text.count("subgraph cluster_") == 1
    assert "subgraph cluster_4" in text
    assert text.count("ltail=cluster_4") == 2
    assert "lhead" not in text


def test_dot_of_nested_modules(biclique_document):
    text = to_dot(biclique_document)
    assert text.count("subgraph cluster_") == 2
    assert "m4 -> m5" in text
    assert "lhead=cluster_5" in text


def test_dot_of_clique(triangle):
    c = add_module(flat_configuration(triangle), [0, 1, 2])
    r = representative_edges(c)
    assert set(r) == {(3, 3)}
    text = to_dot(PowerGraphDocument.from_solution(c, r))
    assert "m3 -> m3" in text
    assert "clique" in text


def test_dot_labels(biclique):
    c = flat_configuration(biclique)
    doc = PowerGraphDocument.from_solution(
        c, representative_edges(c), labels=["a", "b", "c", "d"]
    )
    assert "label=a" in to_dot(doc)
