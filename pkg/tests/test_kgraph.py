import random

import pytest

from aisensei.kgraph import (
    CycleError,
    DanglingEdgeError,
    DifficultyBand,
    ParseError,
    UnknownConceptError,
    classify_difficulty,
    load_graph,
    prerequisite_closure,
    prerequisite_distances,
    questions_for_band,
)


def make_doc(concept_ids, edges, questions=None):
    questions = questions or {}
    return {
        "concepts": [
            {"id": cid, "title": f"Concept {cid}", "questions": questions.get(cid, [])}
            for cid in concept_ids
        ],
        "edges": [{"prerequisite": frm, "dependent": to} for frm, to in edges],
    }


def reachable_oracle(edges, start):
    """Independent recursive DFS over reversed edges (dependent -> prerequisite)."""
    prereqs = {}
    for frm, to in edges:
        prereqs.setdefault(to, set()).add(frm)
    seen = set()

    def walk(node):
        for p in prereqs.get(node, ()):
            if p not in seen:
                seen.add(p)
                walk(p)

    walk(start)
    return seen


def random_dag(rng, max_nodes=50, edge_prob=0.15):
    n = rng.randint(1, max_nodes)
    ids = [f"c{i:02d}" for i in range(n)]
    edges = [
        (ids[i], ids[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    ]
    return ids, edges


# -- loading and validation ---------------------------------------------------


def test_single_concept_document():
    g = load_graph(make_doc(["1-2"], []))
    assert len(g.concepts) == 1
    assert not g.edges


def test_two_cycle_rejected():
    with pytest.raises(CycleError) as exc:
        load_graph(make_doc(["A", "B"], [("A", "B"), ("B", "A")]))
    assert set(exc.value.cycle) == {"A", "B"}


def test_longer_cycle_named():
    with pytest.raises(CycleError) as exc:
        load_graph(make_doc(["A", "B", "C", "D"], [("A", "B"), ("B", "C"), ("C", "A"), ("C", "D")]))
    assert set(exc.value.cycle) == {"A", "B", "C"}


def test_dangling_edge_rejected():
    with pytest.raises(DanglingEdgeError):
        load_graph(make_doc(["A"], [("A", "Z")]))


def test_self_edge_rejected():
    with pytest.raises(ParseError):
        load_graph(make_doc(["A"], [("A", "A")]))


def test_duplicate_concept_rejected():
    doc = make_doc(["A"], [])
    doc["concepts"].append({"id": "A", "title": "again"})
    with pytest.raises(ParseError):
        load_graph(doc)


def test_malformed_json_text():
    with pytest.raises(ParseError):
        load_graph("{not json")


def test_missing_file():
    with pytest.raises(ParseError):
        load_graph("/nonexistent/graph.json")


def test_shipped_document_loads(algebra_graph):
    assert "1-2" in algebra_graph.concepts
    assert algebra_graph.concept("1-2").title == "Algebraic Expressions"
    assert not algebra_graph.prerequisites_of("1-2")


# -- closure ------------------------------------------------------------------


def test_closure_single_node():
    g = load_graph(make_doc(["X"], []))
    assert prerequisite_closure(g, "X") == []


def test_closure_chain():
    g = load_graph(make_doc(["P", "Q", "R"], [("P", "Q"), ("Q", "R")]))
    assert prerequisite_closure(g, "R") == ["Q", "P"]


def test_closure_unknown_concept(algebra_graph):
    with pytest.raises(UnknownConceptError):
        prerequisite_closure(algebra_graph, "9-9")


def test_closure_bfs_order_with_tie_break():
    # d depends on b and c, both of which depend on a.
    g = load_graph(make_doc(["a", "b", "c", "d"], [("b", "d"), ("c", "d"), ("a", "b"), ("a", "c")]))
    assert prerequisite_closure(g, "d") == ["b", "c", "a"]
    assert prerequisite_distances(g, "d") == {"b": 1, "c": 1, "a": 2}


def test_closure_excludes_self_and_is_monotone(algebra_graph):
    for cid in algebra_graph.concepts:
        closure = prerequisite_closure(algebra_graph, cid)
        assert cid not in closure
        for member in closure:
            inner = set(prerequisite_closure(algebra_graph, member))
            assert inner <= set(closure)


def test_closure_matches_reachability_oracle_on_random_dags():
    rng = random.Random(20240611)
    for _ in range(100):
        ids, edges = random_dag(rng)
        g = load_graph(make_doc(ids, edges))
        target = rng.choice(ids)
        assert set(prerequisite_closure(g, target)) == reachable_oracle(edges, target)


# -- difficulty bands ---------------------------------------------------------


def test_shipped_band_assignment(algebra_graph):
    assert classify_difficulty(algebra_graph, "1-2") is DifficultyBand.A
    assert classify_difficulty(algebra_graph, "1-3") is DifficultyBand.B
    assert classify_difficulty(algebra_graph, "3-2") is DifficultyBand.C


def test_isolated_node_is_band_a():
    g = load_graph(make_doc(["solo"], []))
    assert classify_difficulty(g, "solo") is DifficultyBand.A


def test_every_root_is_band_a():
    rng = random.Random(7)
    ids, edges = random_dag(rng, max_nodes=30)
    g = load_graph(make_doc(ids, edges))
    with_prereq = {to for _, to in edges}
    for cid in ids:
        band = classify_difficulty(g, cid)
        if cid not in with_prereq:
            assert band is DifficultyBand.A
        else:
            assert band in (DifficultyBand.B, DifficultyBand.C)


def test_band_order():
    assert DifficultyBand.A < DifficultyBand.B < DifficultyBand.C


def test_question_difficulty_cached_at_load(algebra_graph):
    for q in algebra_graph.questions.values():
        assert q.difficulty is classify_difficulty(algebra_graph, q.concept_id)


# -- questions_for_band -------------------------------------------------------


def test_questions_for_band_empty_graph():
    g = load_graph(make_doc([], []))
    assert questions_for_band(g, DifficultyBand.A) == []


def test_shipped_band_a_has_only_the_easy_question(algebra_graph):
    qs = questions_for_band(algebra_graph, DifficultyBand.A)
    assert [q.id for q in qs] == ["q-1-2-1"]


def test_questions_for_band_ordering():
    questions = {
        "mid": [
            {"id": "q2", "text": "t2", "standard_solution": "s2"},
            {"id": "q1", "text": "t1", "standard_solution": "s1"},
        ]
    }
    g = load_graph(make_doc(["base", "mid", "top"], [("base", "mid"), ("mid", "top")], questions))
    assert classify_difficulty(g, "mid") is DifficultyBand.B
    assert [q.id for q in questions_for_band(g, DifficultyBand.B)] == ["q1", "q2"]
