"""Deterministic prompt construction for personalized feedback requests.

The base template interleaves the question, its standard solution, the
student's impasse and the ranked prerequisite causes. The double colon after
"impasse" is intentional and preserved byte-for-byte (it is what the original
experiment sent); pass ``normalize_colons=True`` to clean it up for production
use.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

from .student_model import MasteryLevel

P1_TEMPLATE_ID = "P1"
TIERED_SUFFIX = "+tier"

# One directive sentence per mastery tier, appended after the base prompt.
TIER_DIRECTIVES = {
    MasteryLevel.Good: "Provide advanced assistance.",
    MasteryLevel.Average: "Provide a foundational review.",
    MasteryLevel.Poor: "Provide an in-depth explanation of the prerequisites.",
}


class EmptyFieldError(ValueError):
    """A required prompt field (question or standard solution) is empty."""


class AlreadyTieredError(ValueError):
    """A tier directive was already appended to this prompt."""


@dataclass(frozen=True)
class PromptRequest:
    question_text: str
    standard_solution: str
    impasse_text: str = ""
    ranked_prerequisites: tuple[str, ...] = ()  # concept titles, most relevant first
    tier: Optional[MasteryLevel] = None


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    template_id: str
    fingerprint: str

    @classmethod
    def from_text(cls, text: str, template_id: str) -> "RenderedPrompt":
        return cls(text=text, template_id=template_id, fingerprint=fingerprint(text))


def fingerprint(text: str) -> str:
    """Stable content hash used as the prompt's identity in logs and cassettes."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def render_p1(req: PromptRequest, normalize_colons: bool = False) -> RenderedPrompt:
    """Render the base feedback prompt, byte-exactly.

    The prerequisite titles are joined with ", " in the given order and the
    template ends with a literal "?". If ``req.tier`` is set, the matching
    directive sentence is appended.
    """
    if not req.question_text.strip():
        raise EmptyFieldError("question_text must be non-empty")
    if not req.standard_solution.strip():
        raise EmptyFieldError("standard_solution must be non-empty")

    causes = ", ".join(req.ranked_prerequisites)
    text = (
        f"Solve this question: {req.question_text}. "
        f"The correct and standard solution is {req.standard_solution}. "
        f"Your solution should include detailed explanation to help this impasse:: {req.impasse_text}. "
        f"This impasse exists because: {causes}?"
    )
    if normalize_colons:
        text = text.replace("impasse::", "impasse:", 1)
    prompt = RenderedPrompt.from_text(text, P1_TEMPLATE_ID)
    if req.tier is not None:
        prompt = append_tier_directive(prompt, req.tier)
    return prompt


def append_tier_directive(prompt: RenderedPrompt, level: MasteryLevel) -> RenderedPrompt:
    """Append the single guidance-tier sentence for the given mastery level.

    Applying a directive twice is an error (the template id records whether
    one was already added).
    """
    if prompt.template_id.endswith(TIERED_SUFFIX):
        raise AlreadyTieredError(f"prompt {prompt.fingerprint[:12]} already carries a tier directive")
    text = f"{prompt.text} {TIER_DIRECTIVES[level]}"
    return RenderedPrompt.from_text(text, prompt.template_id + TIERED_SUFFIX)
