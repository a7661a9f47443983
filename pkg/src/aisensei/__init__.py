"""Knowledge-graph-guided personalized tutoring feedback.

Subpackages cover the prerequisite graph (kgraph), mastery and profile
derivation (student_model), prompt construction (prompt_engine), the
record/replay completion client (llm_gateway), similarity and agreement
metrics (eval_metrics), the experiment orchestrator (experiment_runner) and
the pilot tutoring service (tutor_service + http_api).
"""

__version__ = "0.1.0"

from .kgraph import DifficultyBand, KnowledgeGraph, load_graph  # noqa: F401
from .student_model import MasteryLevel, StudentProfile  # noqa: F401
