"""Per-concept mastery, S1/S2/S3 profile derivation and impasse cause ranking.

Assessment records come in as ``{concept_id, score}`` JSON (score = fraction of
correct answers). Expert impasse files are JSON objects
``{question_id, profile, impasse_text, ranked_prerequisites: [concept_id]}``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

from .kgraph import (
    KnowledgeGraph,
    ParseError,
    Question,
    UnknownConceptError,
    classify_difficulty,
    prerequisite_closure,
    prerequisite_distances,
    DifficultyBand,
)

DEFAULT_THRESHOLDS = (0.8, 0.5)  # (good_min, avg_min)


class ThresholdError(ValueError):
    """Mastery thresholds are out of order or out of range."""


class InvalidOverrideError(ValueError):
    """An expert ranking names a concept outside the question's prerequisite closure."""


class MasteryLevel(enum.IntEnum):
    """Categorized understanding of one concept; Poor < Average < Good."""

    Poor = 0
    Average = 1
    Good = 2


class StudentProfile(str, enum.Enum):
    S1 = "S1"  # gaps in foundational (basic) prerequisites
    S2 = "S2"  # middling grasp; intermediate prerequisites still shaky
    S3 = "S3"  # all prerequisites solid


class ImpasseSource(str, enum.Enum):
    ExpertProvided = "expert_provided"
    SystemRanked = "system_ranked"


class RankedPrerequisite(NamedTuple):
    concept_id: str
    title: str


@dataclass(frozen=True)
class AssessmentRecord:
    concept_id: str
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")


@dataclass(frozen=True)
class KnowledgeState:
    """Mastery level for every concept in the graph (unassessed concepts are Poor)."""

    levels: dict[str, MasteryLevel]

    def level(self, concept_id: str) -> MasteryLevel:
        try:
            return self.levels[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None


@dataclass(frozen=True)
class ImpasseRecord:
    question_id: str
    impasse_text: str
    ranked_prerequisites: tuple[RankedPrerequisite, ...]
    source: ImpasseSource


def derive_knowledge_state(
    records: Sequence[AssessmentRecord],
    g: KnowledgeGraph,
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
) -> KnowledgeState:
    """Map assessment scores to Good/Average/Poor against (good_min, avg_min).

    score >= good_min -> Good; avg_min <= score < good_min -> Average; below
    avg_min -> Poor. Concepts with no record default to Poor so missing data
    triggers more support rather than less.
    """
    good_min, avg_min = thresholds
    if not (0.0 < avg_min < good_min < 1.0):
        raise ThresholdError(f"need 0 < avg_min < good_min < 1, got avg_min={avg_min}, good_min={good_min}")

    levels = {cid: MasteryLevel.Poor for cid in g.concepts}
    for rec in records:
        if rec.concept_id not in g.concepts:
            raise UnknownConceptError(rec.concept_id)
        if rec.score >= good_min:
            levels[rec.concept_id] = MasteryLevel.Good
        elif rec.score >= avg_min:
            levels[rec.concept_id] = MasteryLevel.Average
        else:
            levels[rec.concept_id] = MasteryLevel.Poor
    return KnowledgeState(levels=levels)


def classify_profile(state: KnowledgeState, question: Question, g: KnowledgeGraph) -> StudentProfile:
    """Derive the student profile from mastery over the question's prerequisites.

    S1 when any basic (band-A) prerequisite is Poor; otherwise S2 when any
    prerequisite is below Good; otherwise S3. A question with no prerequisites
    always classifies S3.
    """
    closure = prerequisite_closure(g, question.concept_id)
    basic_poor = any(
        classify_difficulty(g, cid) is DifficultyBand.A and state.level(cid) is MasteryLevel.Poor
        for cid in closure
    )
    if basic_poor:
        return StudentProfile.S1
    if any(state.level(cid) is not MasteryLevel.Good for cid in closure):
        return StudentProfile.S2
    return StudentProfile.S3


def rank_prerequisites(
    state: KnowledgeState,
    question: Question,
    g: KnowledgeGraph,
    override: Optional[Sequence[str]] = None,
) -> list[RankedPrerequisite]:
    """Order the question's prerequisite closure by likely relevance to an impasse.

    Weakest mastery first, then nearest in the graph, then ascending id. An
    expert ``override`` (a list of concept ids) is returned verbatim after
    validating it stays inside the closure.
    """
    closure = prerequisite_closure(g, question.concept_id)
    if override is not None:
        allowed = set(closure)
        seen: set[str] = set()
        for cid in override:
            if cid not in allowed:
                raise InvalidOverrideError(
                    f"override concept {cid!r} is not a prerequisite of {question.concept_id!r}"
                )
            if cid in seen:
                raise InvalidOverrideError(f"override repeats concept {cid!r}")
            seen.add(cid)
        return [RankedPrerequisite(cid, g.concept(cid).title) for cid in override]

    distances = prerequisite_distances(g, question.concept_id)
    ordered = sorted(closure, key=lambda cid: (int(state.level(cid)), distances[cid], cid))
    return [RankedPrerequisite(cid, g.concept(cid).title) for cid in ordered]


def build_impasse_record(
    state: KnowledgeState,
    question: Question,
    g: KnowledgeGraph,
    impasse_text: str,
    override: Optional[Sequence[str]] = None,
) -> ImpasseRecord:
    """Bundle an impasse description with its ranked prerequisite causes."""
    ranked = rank_prerequisites(state, question, g, override=override)
    source = ImpasseSource.ExpertProvided if override is not None else ImpasseSource.SystemRanked
    return ImpasseRecord(
        question_id=question.id,
        impasse_text=impasse_text,
        ranked_prerequisites=tuple(ranked),
        source=source,
    )


def load_assessments(source: Union[str, Path]) -> list[AssessmentRecord]:
    """Read a JSON array of ``{concept_id, score}`` records."""
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ParseError("assessment file must be a JSON array")
    return [AssessmentRecord(concept_id=str(e["concept_id"]), score=float(e["score"])) for e in data]


def load_impasse_file(source: Union[str, Path], g: KnowledgeGraph) -> tuple[StudentProfile, ImpasseRecord]:
    """Read one expert impasse file and validate it against the graph.

    The listed prerequisite causes must all lie inside the question's
    prerequisite closure; order is kept exactly as the expert wrote it.
    """
    try:
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read impasse file {source!r}: {exc}") from exc
    for key in ("question_id", "profile", "impasse_text", "ranked_prerequisites"):
        if key not in data:
            raise ParseError(f"impasse file {source!r} missing key {key!r}")

    question = g.question(str(data["question_id"]))
    profile = StudentProfile(str(data["profile"]))
    allowed = set(prerequisite_closure(g, question.concept_id))
    ranked: list[RankedPrerequisite] = []
    seen: set[str] = set()
    for cid in data["ranked_prerequisites"]:
        cid = str(cid)
        if cid not in allowed:
            raise InvalidOverrideError(
                f"impasse file {source!r}: {cid!r} is not a prerequisite of {question.concept_id!r}"
            )
        if cid in seen:
            raise InvalidOverrideError(f"impasse file {source!r}: duplicate cause {cid!r}")
        seen.add(cid)
        ranked.append(RankedPrerequisite(cid, g.concept(cid).title))

    record = ImpasseRecord(
        question_id=question.id,
        impasse_text=str(data["impasse_text"]),
        ranked_prerequisites=tuple(ranked),
        source=ImpasseSource.ExpertProvided,
    )
    return profile, record
