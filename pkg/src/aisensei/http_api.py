"""HTTP JSON surface for the tutoring service.

Module errors map to {error, message} bodies with 404/409/422 status codes;
gateway failures surface as 502. State lives entirely in the TutorService -
handlers only translate between wire and domain shapes.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .llm_gateway import AuthError, CassetteMissError, ProviderError
from .student_model import StudentProfile
from .tutor_service import (
    AlreadyRatedError,
    DuplicateSurveyError,
    EmptyBankError,
    GuidanceExchange,
    GuidanceMode,
    MissingInputError,
    NotFoundError,
    RangeError,
    ServiceConfigError,
    Session,
    SessionCompletedError,
    SessionNotFoundError,
    SurveyPhase,
    TutorService,
    UnknownItemError,
)

_ERROR_MAP = [
    (SessionNotFoundError, 404, "session_not_found"),
    (NotFoundError, 404, "exchange_not_found"),
    (AlreadyRatedError, 409, "already_rated"),
    (DuplicateSurveyError, 409, "duplicate_survey"),
    (SessionCompletedError, 409, "session_completed"),
    (EmptyBankError, 409, "empty_bank"),
    (MissingInputError, 422, "missing_input"),
    (RangeError, 422, "out_of_range"),
    (UnknownItemError, 422, "unknown_item"),
    (CassetteMissError, 502, "provider_error"),
    (AuthError, 502, "provider_error"),
    (ProviderError, 502, "provider_error"),
    (ServiceConfigError, 500, "service_misconfigured"),
]


class CreateSessionBody(BaseModel):
    profile: Optional[str] = None


class GuidanceBody(BaseModel):
    mode: str
    input: Optional[str] = None


class RatingBody(BaseModel):
    score: int


class SurveyBody(BaseModel):
    items: dict[str, int]
    free_text: Optional[str] = None


def session_view(service: TutorService, session: Session) -> dict:
    question = service.graph.question(session.question_id)
    return {
        "session_id": session.session_id,
        "profile": session.profile.value,
        "question_id": session.question_id,
        "question_text": question.text,
        "band": question.difficulty.value,
        "state": session.state.value,
        "created_at": session.created_at,
        "exchanges": [exchange_view(ex) for ex in session.exchanges],
        "surveys_submitted": sorted(phase.value for phase in session.surveys),
    }


def exchange_view(ex: GuidanceExchange) -> dict:
    return {
        "index": ex.index,
        "mode": ex.mode.value,
        "student_input": ex.student_input,
        "response_text": ex.response_text,
        "rating": ex.rating,
        "timestamp": ex.timestamp,
    }


def create_app(service: TutorService) -> FastAPI:
    app = FastAPI(title="aisensei tutor service")
    app.state.service = service

    def fail(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, "message": message})

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return fail(422, "validation_error", str(exc.errors()[:1]))

    @app.exception_handler(Exception)
    async def on_domain_error(request: Request, exc: Exception):
        for etype, status, code in _ERROR_MAP:
            if isinstance(exc, etype):
                return fail(status, code, str(exc))
        raise exc

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: Optional[CreateSessionBody] = None):
        requested = None
        if body is not None and body.profile is not None:
            try:
                requested = StudentProfile(body.profile.upper())
            except ValueError:
                return fail(422, "invalid_profile", f"unknown profile {body.profile!r}")
        session = service.create_session(requested_profile=requested)
        return session_view(service, session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(service, service.get_session(session_id))

    @app.get("/sessions/{session_id}/question")
    def get_question(session_id: str):
        question = service.get_question(session_id)
        concept = service.graph.concept(question.concept_id)
        return {
            "question_id": question.id,
            "text": question.text,
            "band": question.difficulty.value,
            "concept_id": concept.id,
            "concept_title": concept.title,
        }

    @app.post("/sessions/{session_id}/guidance", status_code=201)
    def post_guidance(session_id: str, body: GuidanceBody):
        try:
            mode = GuidanceMode(body.mode)
        except ValueError:
            return fail(422, "invalid_mode", f"unknown guidance mode {body.mode!r}")
        exchange = service.request_guidance(session_id, mode, student_input=body.input)
        return exchange_view(exchange)

    @app.post("/sessions/{session_id}/exchanges/{index}/rating", status_code=201)
    def post_rating(session_id: str, index: int, body: RatingBody):
        exchange = service.rate_exchange(session_id, index, body.score)
        return exchange_view(exchange)

    @app.post("/sessions/{session_id}/surveys/{phase}", status_code=201)
    def post_survey(session_id: str, phase: str, body: SurveyBody):
        try:
            survey_phase = SurveyPhase(phase)
        except ValueError:
            return fail(422, "invalid_phase", f"unknown survey phase {phase!r}")
        service.submit_survey(session_id, survey_phase, body.items, free_text=body.free_text)
        return session_view(service, service.get_session(session_id))

    @app.get("/export")
    def export(since: Optional[str] = None, session: Optional[str] = None):
        return PlainTextResponse(
            service.export_jsonl(since=since, session_id=session),
            media_type="application/x-ndjson",
        )

    return app
