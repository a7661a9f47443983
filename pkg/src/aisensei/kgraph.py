"""Prerequisite knowledge graph: loading, validation, traversal and difficulty bands.

A graph document is a JSON file with two top-level keys:

* ``concepts``: array of ``{id, title, questions: [{id, text, standard_solution}]}``
* ``edges``: array of ``{prerequisite, dependent}``

Edges are stored prerequisite -> dependent, so a basic concept (one that needs
no help from anywhere) has no incoming edges. Graphs are immutable after load
and all operations here are pure reads.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union


class ParseError(Exception):
    """Graph document is malformed (bad JSON, missing keys, duplicate ids...)."""


class CycleError(Exception):
    """Prerequisite edges form a cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("prerequisite cycle: " + " -> ".join(self.cycle + [self.cycle[0]]))


class DanglingEdgeError(Exception):
    """An edge references a concept id that is not in the document."""


class UnknownConceptError(KeyError):
    """A concept id was requested that does not exist in the graph."""

    def __init__(self, concept_id: str):
        self.concept_id = concept_id
        super().__init__(f"unknown concept: {concept_id!r}")


class DifficultyBand(str, enum.Enum):
    """Question difficulty, derived from the concept's position in the graph.

    A = easy (a basic concept, no prerequisites), C = hard (an advanced
    terminal concept), B = everything in between. The str mixin makes the
    natural A < B < C ordering hold.
    """

    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class Concept:
    id: str
    title: str
    question_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Question:
    id: str
    concept_id: str
    text: str
    standard_solution: str
    difficulty: DifficultyBand


@dataclass(frozen=True)
class KnowledgeGraph:
    """Validated, immutable prerequisite graph with attached questions."""

    concepts: dict[str, Concept]
    questions: dict[str, Question]
    edges: frozenset[tuple[str, str]]  # (prerequisite, dependent)
    _prereqs: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)
    _dependents: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None

    def question(self, question_id: str) -> Question:
        try:
            return self.questions[question_id]
        except KeyError:
            raise KeyError(f"unknown question: {question_id!r}") from None

    def prerequisites_of(self, concept_id: str) -> tuple[str, ...]:
        """Direct prerequisites of a concept, ascending by id."""
        self.concept(concept_id)
        return self._prereqs.get(concept_id, ())

    def dependents_of(self, concept_id: str) -> tuple[str, ...]:
        """Concepts that list this one as a prerequisite, ascending by id."""
        self.concept(concept_id)
        return self._dependents.get(concept_id, ())


GraphSource = Union[str, Path, dict]


def load_graph(source: GraphSource) -> KnowledgeGraph:
    """Load and validate a graph document (path, JSON text, or parsed dict).

    Raises ParseError on malformed documents, DanglingEdgeError when an edge
    endpoint is unknown, and CycleError (naming one offending cycle) when the
    prerequisite relation is not acyclic.
    """
    doc = _read_document(source)

    if not isinstance(doc, dict) or "concepts" not in doc:
        raise ParseError("graph document must be an object with a 'concepts' key")
    raw_concepts = doc["concepts"]
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_concepts, list) or not isinstance(raw_edges, list):
        raise ParseError("'concepts' and 'edges' must be arrays")

    concepts: dict[str, Concept] = {}
    raw_questions: list[dict] = []
    for entry in raw_concepts:
        if not isinstance(entry, dict) or not entry.get("id"):
            raise ParseError(f"concept entry missing non-empty 'id': {entry!r}")
        cid = str(entry["id"])
        if cid in concepts:
            raise ParseError(f"duplicate concept id: {cid!r}")
        qs = entry.get("questions", [])
        if not isinstance(qs, list):
            raise ParseError(f"'questions' of concept {cid!r} must be an array")
        qids = []
        for q in qs:
            if not isinstance(q, dict) or not q.get("id"):
                raise ParseError(f"question entry under {cid!r} missing 'id': {q!r}")
            qids.append(str(q["id"]))
            raw_questions.append({**q, "concept_id": cid})
        concepts[cid] = Concept(id=cid, title=str(entry.get("title", cid)), question_ids=tuple(qids))

    edges: set[tuple[str, str]] = set()
    for entry in raw_edges:
        if not isinstance(entry, dict) or "prerequisite" not in entry or "dependent" not in entry:
            raise ParseError(f"edge entry must have 'prerequisite' and 'dependent': {entry!r}")
        frm, to = str(entry["prerequisite"]), str(entry["dependent"])
        if frm == to:
            raise ParseError(f"self-edge on concept {frm!r}")
        for endpoint in (frm, to):
            if endpoint not in concepts:
                raise DanglingEdgeError(f"edge {frm!r} -> {to!r} references unknown concept {endpoint!r}")
        edges.add((frm, to))

    prereqs: dict[str, list[str]] = {cid: [] for cid in concepts}
    dependents: dict[str, list[str]] = {cid: [] for cid in concepts}
    for frm, to in edges:
        prereqs[to].append(frm)
        dependents[frm].append(to)

    _check_acyclic(concepts.keys(), prereqs)

    graph = KnowledgeGraph(
        concepts=concepts,
        questions={},
        edges=frozenset(edges),
        _prereqs={c: tuple(sorted(v)) for c, v in prereqs.items()},
        _dependents={c: tuple(sorted(v)) for c, v in dependents.items()},
    )

    questions: dict[str, Question] = {}
    for raw in raw_questions:
        qid = str(raw["id"])
        if qid in questions:
            raise ParseError(f"duplicate question id: {qid!r}")
        questions[qid] = Question(
            id=qid,
            concept_id=raw["concept_id"],
            text=str(raw.get("text", "")),
            standard_solution=str(raw.get("standard_solution", "")),
            difficulty=classify_difficulty(graph, raw["concept_id"]),
        )
    graph.questions.update(questions)
    return graph


def _read_document(source: GraphSource) -> dict:
    if isinstance(source, dict):
        return source
    text: str
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read graph document {source!r}: {exc}") from exc
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"graph document is not valid JSON: {exc}") from exc


def _check_acyclic(node_ids: Iterable[str], prereqs: dict[str, list[str]]) -> None:
    # Iterative DFS over prerequisite links; a back edge yields the cycle path.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {cid: WHITE for cid in node_ids}
    for root in sorted(color):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        path = [root]
        color[root] = GRAY
        while stack:
            node, idx = stack[-1]
            children = sorted(prereqs[node])
            if idx < len(children):
                stack[-1] = (node, idx + 1)
                child = children[idx]
                if color[child] == GRAY:
                    cycle = path[path.index(child):]
                    raise CycleError(cycle)
                if color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
                    path.append(child)
            else:
                color[node] = BLACK
                stack.pop()
                path.pop()


def prerequisite_closure(g: KnowledgeGraph, concept_id: str) -> list[str]:
    """All transitive prerequisites of a concept, nearest first.

    Breadth-first from the concept following prerequisite edges backwards;
    within a distance level ids come out ascending. The concept itself is
    excluded.
    """
    g.concept(concept_id)
    seen = {concept_id}
    order: list[str] = []
    frontier = [concept_id]
    while frontier:
        level = sorted({p for node in frontier for p in g.prerequisites_of(node) if p not in seen})
        seen.update(level)
        order.extend(level)
        frontier = level
    return order


def prerequisite_distances(g: KnowledgeGraph, concept_id: str) -> dict[str, int]:
    """Closure members mapped to their breadth-first distance from the concept."""
    g.concept(concept_id)
    distances: dict[str, int] = {}
    seen = {concept_id}
    frontier = [concept_id]
    depth = 0
    while frontier:
        depth += 1
        level = sorted({p for node in frontier for p in g.prerequisites_of(node) if p not in seen})
        for cid in level:
            distances[cid] = depth
        seen.update(level)
        frontier = level
    return distances


def classify_difficulty(g: KnowledgeGraph, concept_id: str) -> DifficultyBand:
    """Band a concept by graph position.

    No prerequisites -> A. Prerequisites but no dependents (a terminal,
    advanced concept) -> C. Everything else -> B.
    """
    if not g.prerequisites_of(concept_id):
        return DifficultyBand.A
    if not g.dependents_of(concept_id):
        return DifficultyBand.C
    return DifficultyBand.B


def questions_for_band(g: KnowledgeGraph, band: DifficultyBand) -> list[Question]:
    """All questions on concepts of the given band, ordered by (concept id, question id)."""
    out = [q for q in g.questions.values() if q.difficulty is band]
    out.sort(key=lambda q: (q.concept_id, q.id))
    return out
