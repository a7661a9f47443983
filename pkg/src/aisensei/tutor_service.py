"""Live tutoring sessions for the pilot-study flow.

A session pins a student profile and one question; the student steers the
exchange through three guidance modes (clarify / follow-up / refresher),
rates each response once, and completes pre/post surveys. Everything is
persisted to append-only JSONL files (one per record type, fsync on write) so
a restarted service exports the exact same bundle.
"""

from __future__ import annotations

import enum
import json
import os
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Union

from .kgraph import DifficultyBand, KnowledgeGraph, Question, load_graph, questions_for_band
from .llm_gateway import CompletionRequest, GatewayConfig, LlmGateway
from .prompt_engine import RenderedPrompt, TIER_DIRECTIVES, render_p1, PromptRequest
from .student_model import ImpasseRecord, MasteryLevel, StudentProfile, load_impasse_file

REFRESHER_TEMPLATE_ID = "refresher-v1"
_TEMPLATE_PATH = Path(__file__).parent / "templates" / "refresher_v1.txt"
_REFRESHER_TEMPLATE = _TEMPLATE_PATH.read_text(encoding="utf-8").strip()


def render_refresher(question: Question, prerequisite_titles, fallback_title: str) -> RenderedPrompt:
    """Prerequisite-refresher prompt: the ranked concept titles (or, for a
    question with no prerequisites, its own concept) plus the deep-explanation
    directive."""
    concepts = list(prerequisite_titles) or [fallback_title]
    text = _REFRESHER_TEMPLATE.format(question=question.text, concepts=", ".join(concepts))
    text = f"{text} {TIER_DIRECTIVES[MasteryLevel.Poor]}"
    return RenderedPrompt.from_text(text, REFRESHER_TEMPLATE_ID)

# Survey item keys; every answer is a 1..5 Likert value.
PRE_SURVEY_ITEMS = (
    "ai_familiarity",
    "llm_familiarity",
    "llm_use_frequency",
    "llm_usefulness_feedback",
    "llm_usefulness_questions",
    "llm_usefulness_current_learning",
)
POST_SURVEY_ITEMS = (
    "ease_of_use",
    "correctness",
    "usefulness",
    "hallucination_frequency",
)


class SessionNotFoundError(KeyError):
    pass


class NotFoundError(KeyError):
    """Exchange index out of range."""


class SessionCompletedError(Exception):
    pass


class MissingInputError(ValueError):
    """Follow-up guidance needs the student's question text."""


class AlreadyRatedError(Exception):
    pass


class RangeError(ValueError):
    """Rating score outside 1..5."""


class DuplicateSurveyError(Exception):
    pass


class UnknownItemError(ValueError):
    pass


class EmptyBankError(Exception):
    """No questions available to assign."""


class ServiceConfigError(Exception):
    """The service is missing data it needs to serve a request."""


class GuidanceMode(str, enum.Enum):
    Clarify = "clarify"
    FollowUp = "follow_up"
    Refresher = "refresher"


class SessionState(str, enum.Enum):
    Active = "active"
    Completed = "completed"


class SurveyPhase(str, enum.Enum):
    Pre = "pre"
    Post = "post"


@dataclass
class GuidanceExchange:
    index: int
    mode: GuidanceMode
    student_input: Optional[str]
    response_text: str
    prompt_fingerprint: str
    cassette_key: str
    timestamp: str
    rating: Optional[int] = None


@dataclass
class SurveyResponse:
    session_id: str
    phase: SurveyPhase
    items: dict[str, int]
    free_text: Optional[str] = None
    timestamp: str = ""


@dataclass
class Session:
    session_id: str
    seq: int
    profile: StudentProfile
    question_id: str
    created_at: str
    state: SessionState = SessionState.Active
    exchanges: list[GuidanceExchange] = field(default_factory=list)
    surveys: dict[SurveyPhase, SurveyResponse] = field(default_factory=dict)


class EventStore:
    """Append-only JSONL persistence, one file per record type.

    Writes flush and fsync before returning; nothing is ever rewritten. The
    only logical mutations in the model (a rating fill-in, the post-survey
    state transition) are represented as fresh appended records.
    """

    KINDS = ("sessions", "exchanges", "ratings", "surveys")

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._handles = {}

    def append(self, kind: str, record: dict) -> None:
        if kind not in self.KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            fh = self._handles.get(kind)
            if fh is None:
                fh = open(self.directory / f"{kind}.jsonl", "a", encoding="utf-8")
                self._handles[kind] = fh
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read_all(self, kind: str) -> list[dict]:
        path = self.directory / f"{kind}.jsonl"
        if not path.exists():
            return []
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def close(self) -> None:
        with self._lock:
            for fh in self._handles.values():
                fh.close()
            self._handles.clear()


class TutorService:
    """Session lifecycle on top of the graph, the impasse bank and the gateway.

    ``impasses`` maps (band, profile) to the prepared hypothetical impasse for
    that cell. Per-session operations are serialized with a per-session lock;
    store writes are serialized by the store itself.
    """

    def __init__(
        self,
        graph: KnowledgeGraph,
        impasses: dict[tuple[DifficultyBand, StudentProfile], ImpasseRecord],
        gateway: LlmGateway,
        store: EventStore,
        rng: Optional[random.Random] = None,
        clock: Callable[[], str] = None,
    ):
        self.graph = graph
        self.impasses = impasses
        self.gateway = gateway
        self.store = store
        self.rng = rng or random.Random()
        self.clock = clock or (lambda: datetime.now(timezone.utc).isoformat())
        self.sessions: dict[str, Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._create_lock = threading.Lock()
        self._next_seq = 0
        self._load()

    # -- persistence replay ----------------------------------------------

    def _load(self) -> None:
        for rec in self.store.read_all("sessions"):
            session = Session(
                session_id=rec["session_id"],
                seq=int(rec["seq"]),
                profile=StudentProfile(rec["profile"]),
                question_id=rec["question_id"],
                created_at=rec["created_at"],
            )
            self.sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()
            self._next_seq = max(self._next_seq, session.seq + 1)
        for rec in self.store.read_all("exchanges"):
            self.sessions[rec["session_id"]].exchanges.append(
                GuidanceExchange(
                    index=int(rec["index"]),
                    mode=GuidanceMode(rec["mode"]),
                    student_input=rec.get("student_input"),
                    response_text=rec["response_text"],
                    prompt_fingerprint=rec.get("prompt_fingerprint", ""),
                    cassette_key=rec.get("cassette_key", ""),
                    timestamp=rec["timestamp"],
                )
            )
        for rec in self.store.read_all("ratings"):
            self.sessions[rec["session_id"]].exchanges[int(rec["index"])].rating = int(rec["score"])
        for rec in self.store.read_all("surveys"):
            session = self.sessions[rec["session_id"]]
            phase = SurveyPhase(rec["phase"])
            session.surveys[phase] = SurveyResponse(
                session_id=rec["session_id"],
                phase=phase,
                items={k: int(v) for k, v in rec["items"].items()},
                free_text=rec.get("free_text"),
                timestamp=rec["timestamp"],
            )
            if phase is SurveyPhase.Post:
                session.state = SessionState.Completed

    # -- operations --------------------------------------------------------

    def create_session(self, requested_profile: Optional[StudentProfile] = None) -> Session:
        """Assign a profile (requested or uniform-random) and the next question.

        Questions rotate through the difficulty bands A, B, C across
        successive sessions; within a band the lowest question id wins. The
        session is persisted before it is returned.
        """
        bands_with_questions = [b for b in DifficultyBand if questions_for_band(self.graph, b)]
        if not bands_with_questions:
            raise EmptyBankError("no questions in the bank")

        with self._create_lock:
            seq = self._next_seq
            self._next_seq += 1
            profile = requested_profile or self.rng.choice(list(StudentProfile))
            band = bands_with_questions[seq % len(bands_with_questions)]
            question = min(questions_for_band(self.graph, band), key=lambda q: q.id)
            session = Session(
                session_id=uuid.uuid4().hex,
                seq=seq,
                profile=profile,
                question_id=question.id,
                created_at=self.clock(),
            )
            self.store.append(
                "sessions",
                {
                    "session_id": session.session_id,
                    "seq": session.seq,
                    "profile": session.profile.value,
                    "question_id": session.question_id,
                    "created_at": session.created_at,
                },
            )
            self.sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFoundError(session_id) from None

    def get_question(self, session_id: str) -> Question:
        return self.graph.question(self.get_session(session_id).question_id)

    def request_guidance(
        self,
        session_id: str,
        mode: GuidanceMode,
        student_input: Optional[str] = None,
    ) -> GuidanceExchange:
        """One guidance round-trip: build the mode's prompt, call the gateway once,
        append the exchange to the session log."""
        mode = GuidanceMode(mode)
        session = self.get_session(session_id)
        with self._session_locks[session_id]:
            if session.state is not SessionState.Active:
                raise SessionCompletedError(session_id)
            if mode is GuidanceMode.FollowUp and not (student_input and student_input.strip()):
                raise MissingInputError("follow-up guidance needs the student's question")

            question = self.graph.question(session.question_id)
            prompt = self._build_prompt(session, question, mode, student_input)
            artifact = self.gateway.complete(
                CompletionRequest(prompt=prompt, model_id=self.gateway.config.model)
            )
            exchange = GuidanceExchange(
                index=len(session.exchanges),
                mode=mode,
                student_input=student_input if mode is GuidanceMode.FollowUp else None,
                response_text=artifact.response_text,
                prompt_fingerprint=prompt.fingerprint,
                cassette_key=artifact.cassette_key,
                timestamp=self.clock(),
            )
            self.store.append(
                "exchanges",
                {
                    "session_id": session_id,
                    "index": exchange.index,
                    "mode": exchange.mode.value,
                    "student_input": exchange.student_input,
                    "response_text": exchange.response_text,
                    "prompt_fingerprint": exchange.prompt_fingerprint,
                    "cassette_key": exchange.cassette_key,
                    "timestamp": exchange.timestamp,
                },
            )
            session.exchanges.append(exchange)
            return exchange

    def _build_prompt(
        self,
        session: Session,
        question: Question,
        mode: GuidanceMode,
        student_input: Optional[str],
    ) -> RenderedPrompt:
        impasse = self._impasse_for(session, question)
        titles = tuple(t for _, t in impasse.ranked_prerequisites)
        if mode is GuidanceMode.Clarify:
            return render_p1(
                PromptRequest(
                    question_text=question.text,
                    standard_solution=question.standard_solution,
                    impasse_text=impasse.impasse_text,
                    ranked_prerequisites=titles,
                )
            )
        if mode is GuidanceMode.FollowUp:
            return render_p1(
                PromptRequest(
                    question_text=question.text,
                    standard_solution=question.standard_solution,
                    impasse_text=student_input.strip(),
                    ranked_prerequisites=titles,
                )
            )
        return render_refresher(question, titles, self.graph.concept(question.concept_id).title)

    def _impasse_for(self, session: Session, question: Question) -> ImpasseRecord:
        key = (question.difficulty, session.profile)
        try:
            return self.impasses[key]
        except KeyError:
            raise ServiceConfigError(
                f"no impasse prepared for (band {question.difficulty.value}, {session.profile.value})"
            ) from None

    def rate_exchange(self, session_id: str, exchange_index: int, score: int) -> GuidanceExchange:
        """Store the 1..5 rating for one exchange; a rating is immutable once set."""
        session = self.get_session(session_id)
        with self._session_locks[session_id]:
            if not 0 <= exchange_index < len(session.exchanges):
                raise NotFoundError(f"no exchange {exchange_index} in session {session_id}")
            if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
                raise RangeError(f"score must be an integer 1..5, got {score!r}")
            exchange = session.exchanges[exchange_index]
            if exchange.rating is not None:
                raise AlreadyRatedError(f"exchange {exchange_index} already rated")
            self.store.append(
                "ratings",
                {
                    "session_id": session_id,
                    "index": exchange_index,
                    "score": score,
                    "timestamp": self.clock(),
                },
            )
            exchange.rating = score
            return exchange

    def submit_survey(
        self,
        session_id: str,
        phase: SurveyPhase,
        items: dict[str, int],
        free_text: Optional[str] = None,
    ) -> SurveyResponse:
        """Record a pre or post survey; the post survey completes the session."""
        phase = SurveyPhase(phase)
        session = self.get_session(session_id)
        with self._session_locks[session_id]:
            if phase in session.surveys:
                raise DuplicateSurveyError(f"{phase.value} survey already submitted")
            schema = PRE_SURVEY_ITEMS if phase is SurveyPhase.Pre else POST_SURVEY_ITEMS
            for key, value in items.items():
                if key not in schema:
                    raise UnknownItemError(f"unknown {phase.value}-survey item {key!r}")
                if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                    raise RangeError(f"survey item {key!r} must be an integer 1..5, got {value!r}")
            response = SurveyResponse(
                session_id=session_id,
                phase=phase,
                items=dict(items),
                free_text=free_text,
                timestamp=self.clock(),
            )
            self.store.append(
                "surveys",
                {
                    "session_id": session_id,
                    "phase": phase.value,
                    "items": response.items,
                    "free_text": response.free_text,
                    "timestamp": response.timestamp,
                },
            )
            session.surveys[phase] = response
            if phase is SurveyPhase.Post:
                session.state = SessionState.Completed
            return response

    # -- export ------------------------------------------------------------

    def export_logs(
        self,
        since: Optional[str] = None,
        session_id: Optional[str] = None,
    ) -> list[dict]:
        """Canonical analytics bundle: one dict per record, deterministic order.

        Sessions (by creation order), each followed by its exchanges (ratings
        folded in) and surveys. ``since`` filters on session created_at.
        """
        records: list[dict] = []
        for session in sorted(self.sessions.values(), key=lambda s: s.seq):
            if session_id is not None and session.session_id != session_id:
                continue
            if since is not None and session.created_at < since:
                continue
            records.append(
                {
                    "kind": "session",
                    "session_id": session.session_id,
                    "seq": session.seq,
                    "profile": session.profile.value,
                    "question_id": session.question_id,
                    "created_at": session.created_at,
                    "state": session.state.value,
                }
            )
            for ex in session.exchanges:
                records.append(
                    {
                        "kind": "exchange",
                        "session_id": session.session_id,
                        "index": ex.index,
                        "mode": ex.mode.value,
                        "student_input": ex.student_input,
                        "response_text": ex.response_text,
                        "prompt_fingerprint": ex.prompt_fingerprint,
                        "cassette_key": ex.cassette_key,
                        "rating": ex.rating,
                        "timestamp": ex.timestamp,
                    }
                )
            for phase in (SurveyPhase.Pre, SurveyPhase.Post):
                if phase in session.surveys:
                    survey = session.surveys[phase]
                    records.append(
                        {
                            "kind": "survey",
                            "session_id": session.session_id,
                            "phase": phase.value,
                            "items": survey.items,
                            "free_text": survey.free_text,
                            "timestamp": survey.timestamp,
                        }
                    )
        return records

    def export_jsonl(self, since: Optional[str] = None, session_id: Optional[str] = None) -> str:
        return "".join(
            json.dumps(rec, sort_keys=True) + "\n" for rec in self.export_logs(since, session_id)
        )


def summarize_exchange_ratings(bundle: list[dict]) -> Optional[dict]:
    """Mean / sample-SD / count of all exchange ratings in an exported bundle."""
    import statistics

    values = [r["rating"] for r in bundle if r.get("kind") == "exchange" and r.get("rating") is not None]
    if not values:
        return None
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return {"mean": statistics.mean(values), "sd": sd, "count": len(values)}


def summarize_survey_items(bundle: list[dict], phase: str) -> dict[str, float]:
    """Per-item mean over all submitted surveys of one phase."""
    import statistics

    by_item: dict[str, list[int]] = {}
    for rec in bundle:
        if rec.get("kind") == "survey" and rec.get("phase") == phase:
            for key, value in rec["items"].items():
                by_item.setdefault(key, []).append(value)
    return {key: statistics.mean(vals) for key, vals in sorted(by_item.items())}


# -- wiring ------------------------------------------------------------------


@dataclass
class ServiceConfig:
    graph_path: Path
    impasse_files: dict[tuple[DifficultyBand, StudentProfile], Path]
    data_dir: Path
    gateway: GatewayConfig
    seed: Optional[int] = None

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ServiceConfig":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent

        def resolve(p: str) -> Path:
            p = Path(p)
            return p if p.is_absolute() else (base / p)

        impasses = {}
        for band_key, cells in raw["impasses"].items():
            for profile_key, file_path in cells.items():
                impasses[(DifficultyBand(band_key.upper()), StudentProfile(profile_key.upper()))] = resolve(file_path)
        gw = raw.get("gateway", {})
        gateway = GatewayConfig(
            mode=gw.get("mode", "replay"),
            api_key=gw.get("api_key", os.environ.get("LLM_API_KEY", "")),
            base_url=gw.get("base_url", os.environ.get("LLM_BASE_URL", "https://api.openai.com/v1")),
            model=gw.get("model", "gpt-4"),
            cassette_dir=resolve(gw["cassette_dir"]) if gw.get("cassette_dir") else None,
        )
        return cls(
            graph_path=resolve(raw["graph"]),
            impasse_files=impasses,
            data_dir=resolve(raw.get("data_dir", "var/tutor")),
            gateway=gateway,
            seed=raw.get("seed"),
        )


def build_service(config: ServiceConfig, gateway: Optional[LlmGateway] = None) -> TutorService:
    graph = load_graph(config.graph_path)
    impasses = {}
    for key, file_path in config.impasse_files.items():
        _, record = load_impasse_file(file_path, graph)
        impasses[key] = record
    return TutorService(
        graph=graph,
        impasses=impasses,
        gateway=gateway or LlmGateway(config.gateway),
        store=EventStore(config.data_dir),
        rng=random.Random(config.seed) if config.seed is not None else None,
    )
