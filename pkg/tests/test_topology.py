import random

import pytest

from c2ka import semimodule, topology
from c2ka.topology import (
    Classification,
    CommGraph,
    EdgeType,
    Interaction,
    PathSyntaxError,
    classify,
    enumerate_interactions,
    parse_path,
    paths_over,
)

S, E = EdgeType.STIMULI, EdgeType.ENVIRONMENT


def test_interaction_validation():
    with pytest.raises(ValueError):
        Interaction(("A",), ())
    with pytest.raises(ValueError):
        Interaction(("A", "A"), (S,))
    with pytest.raises(ValueError):
        Interaction(("A", "B", "C"), (S,))
    p = Interaction(("A", "B", "A"), (S, E))  # revisiting is fine if not adjacent
    assert not p.is_simple()


def test_source_sink_length_suffix():
    p = parse_path("SV1 -S-> SM2 -S-> PC -E-> SV2")
    assert p.source == "SV1" and p.sink == "SV2" and len(p) == 3
    assert str(p.suffix(2)) == "SM2 -S-> PC -E-> SV2"
    assert p.suffix(3) == p
    with pytest.raises(ValueError):
        p.suffix(4)


def test_path_literal_round_trip():
    for text in ("A -S-> B", "SV1 -E-> TM -E-> SV2", "A -S-> B -E-> C -S-> D"):
        assert str(parse_path(text)) == text


def test_path_literal_errors():
    for bad in ("A", "A -> B", "A -X-> B", "A -S-> A", "-S-> B", "A -S->"):
        with pytest.raises(PathSyntaxError):
            parse_path(bad)


def test_fixture_graph_edges(port):
    graph = semimodule.graph_of(port)
    assert graph.has_edge("SV1", "TM", E)  # numCranes[1] feeds the allocator
    assert graph.has_edge("SM2", "PC", S)  # deprt2 influences the captain
    assert not graph.has_edge("SV1", "SV2", S)
    assert not graph.has_edge("SV1", "SV2", E)
    assert all(a != b for a, b in graph.s_edges | graph.e_edges)
    assert len(graph.s_edges) == 22 and len(graph.e_edges) == 16


def test_inert_agents_have_no_edges():
    from c2ka import specfile

    model = specfile.compile_text(
        "system T\nstimuli s\nbehaviours a, b\n"
        "agent A { behaviour = a }\nagent B { behaviour = b }\n"
    )
    graph = semimodule.graph_of(model)
    assert not graph.s_edges and not graph.e_edges
    assert enumerate_interactions(model) == []


def test_enumeration_contains_the_implicit_paths(port):
    paths = enumerate_interactions(port, "SV1", "SV2")
    assert len(paths) == 23
    literals = {str(p) for p in paths}
    assert "SV1 -S-> SM2 -S-> PC -E-> SV2" in literals
    assert "SV1 -E-> TM -E-> SV2" in literals


def test_enumeration_is_sorted_and_simple(port):
    paths = enumerate_interactions(port, max_len=3)
    assert paths == sorted(paths, key=Interaction.sort_key)
    assert all(p.is_simple() for p in paths)
    assert all(len(p) <= 3 for p in paths)


def test_same_source_and_sink_yields_nothing(port):
    assert enumerate_interactions(port, "SV1", "SV1") == []


def test_unknown_agent_filter(port):
    with pytest.raises(KeyError):
        enumerate_interactions(port, "nosuch", None)


def _naive_paths(graph: CommGraph, names, to_agent, max_len):
    """Plain recursive enumeration used as an independent oracle."""
    results = []

    def walk(path, types):
        if len(types) >= 1 and (to_agent is None or path[-1] == to_agent):
            results.append(Interaction(tuple(path), tuple(types)))
        if max_len is not None and len(types) >= max_len:
            return
        for nxt in names:
            if nxt in path:
                continue
            for etype, pool in ((S, graph.s_edges), (E, graph.e_edges)):
                if (path[-1], nxt) in pool:
                    walk(path + [nxt], types + [etype])

    for src in names:
        walk([src], [])
    return sorted(results, key=Interaction.sort_key)


def test_enumeration_matches_naive_oracle_on_random_graphs():
    rng = random.Random(42)
    for _ in range(150):
        n = rng.randint(2, 6)
        names = [f"N{i}" for i in range(n)]
        s_edges, e_edges = set(), set()
        for a in names:
            for b in names:
                if a == b:
                    continue
                if rng.random() < 0.25:
                    s_edges.add((a, b))
                if rng.random() < 0.25:
                    e_edges.add((a, b))
        graph = CommGraph(frozenset(s_edges), frozenset(e_edges))
        cap = rng.choice([None, 2, 3, None])
        target = rng.choice([None, names[0]])
        got = paths_over(graph, sorted(names), target, cap)
        want = _naive_paths(graph, sorted(names), target, cap)
        assert got == want
        assert len(set(got)) == len(got)


def test_classify_coverage(port):
    for declared in port.intended:
        assert classify(declared, port.intended) is Classification.INTENDED
    # a strict contiguous segment of an intended path is intended
    spine = next(p for p in port.intended if len(p) > 4)
    segment = Interaction(spine.agents[1:4], spine.edge_types[1:3])
    assert classify(segment, port.intended) is Classification.INTENDED
    p7 = parse_path("SV1 -S-> SM2 -S-> PC -E-> SV2")
    assert classify(p7, port.intended) is Classification.IMPLICIT
    # same agents, different edge types: not covered
    variant = parse_path("SV1 -S-> TM -E-> SV2")
    assert classify(variant, port.intended) is Classification.IMPLICIT


def test_enumerated_edges_are_graph_backed(port):
    graph = semimodule.graph_of(port)
    for p in enumerate_interactions(port, "SV1", None, max_len=2):
        for a, b, t in p.edges():
            assert graph.has_edge(a, b, t)
