#!/usr/bin/env python3
"""A complete tutoring session against the in-process service, offline.

Creates a session with a fixed profile, exercises all three guidance modes
using the shipped replay cassettes, rates a response, submits both surveys,
and prints the exported analytics bundle.
"""

import tempfile
from pathlib import Path

from aisensei.kgraph import DifficultyBand, load_graph
from aisensei.llm_gateway import GatewayConfig, LlmGateway
from aisensei.student_model import StudentProfile, load_impasse_file
from aisensei.tutor_service import (
    EventStore,
    GuidanceMode,
    POST_SURVEY_ITEMS,
    PRE_SURVEY_ITEMS,
    SurveyPhase,
    TutorService,
    summarize_exchange_ratings,
)

DATA = Path(__file__).resolve().parent.parent / "data"

graph = load_graph(DATA / "algebra2.kg.json")
impasses = {}
for band in "ABC":
    for profile in ("S1", "S2", "S3"):
        declared, record = load_impasse_file(DATA / "impasses" / f"{band}_{profile}.json", graph)
        impasses[(DifficultyBand(band), declared)] = record

gateway = LlmGateway(GatewayConfig(mode="replay", cassette_dir=DATA / "cassettes"))
store_dir = tempfile.mkdtemp(prefix="aisensei-demo-")
service = TutorService(graph=graph, impasses=impasses, gateway=gateway, store=EventStore(store_dir))

session = service.create_session(requested_profile=StudentProfile.S2)
question = service.get_question(session.session_id)
print(f"session {session.session_id[:8]}... profile={session.profile.value}")
print(f"question [{question.difficulty.value}]: {question.text}\n")

clarify = service.request_guidance(session.session_id, GuidanceMode.Clarify)
print(f"clarify -> {clarify.response_text[:90]}...\n")

followup = service.request_guidance(
    session.session_id,
    GuidanceMode.FollowUp,
    student_input="Why does multiplying two negative numbers give a positive result?",
)
print(f"follow-up -> {followup.response_text[:90]}...\n")

refresher = service.request_guidance(session.session_id, GuidanceMode.Refresher)
print(f"refresher -> {refresher.response_text[:90]}...\n")

service.rate_exchange(session.session_id, clarify.index, 5)
service.rate_exchange(session.session_id, refresher.index, 4)
service.submit_survey(session.session_id, SurveyPhase.Pre, {k: 4 for k in PRE_SURVEY_ITEMS})
service.submit_survey(session.session_id, SurveyPhase.Post, {k: 4 for k in POST_SURVEY_ITEMS}, free_text="clear and patient")

bundle = service.export_logs()
print(f"exported {len(bundle)} records; rating summary: {summarize_exchange_ratings(bundle)}")
print(f"(store persisted under {store_dir})")
