#!/usr/bin/env python3
"""From assessment scores to a classified profile to a rendered prompt.

Derives a knowledge state from raw scores, classifies the student against the
hard question, ranks the likely impasse causes, and renders the feedback
prompt (with and without a tier directive).
"""

from pathlib import Path

from aisensei.kgraph import load_graph
from aisensei.prompt_engine import PromptRequest, append_tier_directive, render_p1
from aisensei.student_model import (
    MasteryLevel,
    classify_profile,
    derive_knowledge_state,
    load_assessments,
    rank_prerequisites,
)

DATA = Path(__file__).resolve().parent.parent / "data"

g = load_graph(DATA / "algebra2.kg.json")
question = g.question("q-3-2-1")

# A student who aced the basics but is shaky on the intermediate material.
scores = load_assessments(DATA / "assessments.sample.json")
state = derive_knowledge_state(scores, g)

print("knowledge state over the question's closure:")
for cid, title in rank_prerequisites(state, question, g):
    print(f"  {state.level(cid).name:<8} {cid} {title}")

profile = classify_profile(state, question, g)
print(f"\nclassified profile: {profile.value}")

ranked = rank_prerequisites(state, question, g)
prompt = render_p1(
    PromptRequest(
        question_text=question.text,
        standard_solution=question.standard_solution,
        impasse_text="I can line up the equations but the elimination step loses me",
        ranked_prerequisites=tuple(t for _, t in ranked),
    )
)
print(f"\nrendered prompt ({prompt.template_id}, fingerprint {prompt.fingerprint[:12]}...):")
print(f"  {prompt.text}")

tiered = append_tier_directive(prompt, MasteryLevel.Average)
print(f"\nwith the Average-tier directive appended:\n  ...{tiered.text[-60:]}")
