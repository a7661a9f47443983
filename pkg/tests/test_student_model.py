import itertools
import json

import pytest

from aisensei.kgraph import UnknownConceptError, load_graph
from aisensei.student_model import (
    AssessmentRecord,
    ImpasseSource,
    InvalidOverrideError,
    MasteryLevel,
    StudentProfile,
    ThresholdError,
    build_impasse_record,
    classify_profile,
    derive_knowledge_state,
    load_impasse_file,
    rank_prerequisites,
)

from test_kgraph import make_doc


@pytest.fixture()
def chain_graph():
    # base -> mid -> top, question on top; base is band A, mid band B.
    questions = {"top": [{"id": "q-top", "text": "solve", "standard_solution": "answer"}]}
    return load_graph(make_doc(["base", "mid", "top"], [("base", "mid"), ("mid", "top")], questions))


def state_for(g, **scores):
    records = [AssessmentRecord(concept_id=c, score=s) for c, s in scores.items()]
    return derive_knowledge_state(records, g)


# -- knowledge state ----------------------------------------------------------


def test_threshold_mapping(chain_graph):
    state = state_for(chain_graph, base=1.0, mid=0.5, top=0.49)
    assert state.level("base") is MasteryLevel.Good
    assert state.level("mid") is MasteryLevel.Average  # boundary inclusive at avg_min
    assert state.level("top") is MasteryLevel.Poor


def test_good_boundary_inclusive(chain_graph):
    state = state_for(chain_graph, base=0.8)
    assert state.level("base") is MasteryLevel.Good


def test_unassessed_defaults_poor(chain_graph):
    state = derive_knowledge_state([], chain_graph)
    assert all(state.level(c) is MasteryLevel.Poor for c in chain_graph.concepts)


def test_unknown_concept_in_records(chain_graph):
    with pytest.raises(UnknownConceptError):
        derive_knowledge_state([AssessmentRecord("ghost", 0.9)], chain_graph)


def test_bad_thresholds(chain_graph):
    with pytest.raises(ThresholdError):
        derive_knowledge_state([], chain_graph, thresholds=(0.5, 0.8))
    with pytest.raises(ThresholdError):
        derive_knowledge_state([], chain_graph, thresholds=(1.0, 0.5))


def test_score_out_of_range():
    with pytest.raises(ValueError):
        AssessmentRecord("base", 1.5)


def test_mastery_order():
    assert MasteryLevel.Poor < MasteryLevel.Average < MasteryLevel.Good


# -- profile classification ---------------------------------------------------


def test_all_good_is_s3(chain_graph):
    state = state_for(chain_graph, base=1.0, mid=1.0, top=1.0)
    q = chain_graph.question("q-top")
    assert classify_profile(state, q, chain_graph) is StudentProfile.S3


def test_poor_basic_is_s1(chain_graph):
    state = state_for(chain_graph, base=0.1, mid=1.0, top=1.0)
    q = chain_graph.question("q-top")
    assert classify_profile(state, q, chain_graph) is StudentProfile.S1


def test_average_intermediate_is_s2(chain_graph):
    state = state_for(chain_graph, base=1.0, mid=0.6, top=1.0)
    q = chain_graph.question("q-top")
    assert classify_profile(state, q, chain_graph) is StudentProfile.S2


def test_empty_closure_always_s3():
    questions = {"solo": [{"id": "q-solo", "text": "t", "standard_solution": "s"}]}
    g = load_graph(make_doc(["solo"], [], questions))
    state = derive_knowledge_state([], g)  # everything Poor
    assert classify_profile(state, g.question("q-solo"), g) is StudentProfile.S3


def test_profile_monotone_in_mastery(chain_graph):
    # Upgrading any concept never moves the profile backwards (S1 < S2 < S3).
    order = [StudentProfile.S1, StudentProfile.S2, StudentProfile.S3]
    q = chain_graph.question("q-top")
    levels = [0.1, 0.6, 1.0]  # Poor / Average / Good under default thresholds
    for base_i, mid_i in itertools.product(range(3), range(3)):
        state = state_for(chain_graph, base=levels[base_i], mid=levels[mid_i])
        rank = order.index(classify_profile(state, q, chain_graph))
        for upgrade in ("base", "mid"):
            idx = {"base": base_i, "mid": mid_i}[upgrade]
            if idx == 2:
                continue
            bumped = {
                "base": levels[base_i + 1 if upgrade == "base" else base_i],
                "mid": levels[mid_i + 1 if upgrade == "mid" else mid_i],
            }
            new_rank = order.index(classify_profile(state_for(chain_graph, **bumped), q, chain_graph))
            assert new_rank >= rank


# -- prerequisite ranking -----------------------------------------------------


def test_rank_empty_closure():
    questions = {"solo": [{"id": "q-solo", "text": "t", "standard_solution": "s"}]}
    g = load_graph(make_doc(["solo"], [], questions))
    state = derive_knowledge_state([], g)
    assert rank_prerequisites(state, g.question("q-solo"), g) == []


def test_rank_mastery_beats_distance(chain_graph):
    # base: Poor at distance 2, mid: Average at distance 1 -> base first.
    state = state_for(chain_graph, base=0.1, mid=0.6)
    q = chain_graph.question("q-top")
    ranked = rank_prerequisites(state, q, chain_graph)
    assert [r.concept_id for r in ranked] == ["base", "mid"]
    # Exhaustive check of the comparator on the two-element case: the other
    # order would require mid to sort before base.
    key = lambda cid, dist: (int(state.level(cid)), dist, cid)
    assert key("base", 2) < key("mid", 1)


def test_rank_distance_breaks_mastery_ties(chain_graph):
    state = state_for(chain_graph)  # all Poor
    q = chain_graph.question("q-top")
    ranked = rank_prerequisites(state, q, chain_graph)
    assert [r.concept_id for r in ranked] == ["mid", "base"]


def test_rank_is_stable(chain_graph):
    state = state_for(chain_graph, base=0.9)
    q = chain_graph.question("q-top")
    first = rank_prerequisites(state, q, chain_graph)
    assert first == rank_prerequisites(state, q, chain_graph)
    assert {r.concept_id for r in first} == set(["base", "mid"])


def test_override_passthrough(chain_graph):
    state = state_for(chain_graph)
    q = chain_graph.question("q-top")
    ranked = rank_prerequisites(state, q, chain_graph, override=["base", "mid"])
    assert [r.concept_id for r in ranked] == ["base", "mid"]


def test_override_outside_closure(chain_graph):
    state = state_for(chain_graph)
    q = chain_graph.question("q-top")
    with pytest.raises(InvalidOverrideError):
        rank_prerequisites(state, q, chain_graph, override=["top"])


def test_override_duplicate(chain_graph):
    state = state_for(chain_graph)
    q = chain_graph.question("q-top")
    with pytest.raises(InvalidOverrideError):
        rank_prerequisites(state, q, chain_graph, override=["mid", "mid"])


def test_build_impasse_record_sources(chain_graph):
    state = state_for(chain_graph)
    q = chain_graph.question("q-top")
    system = build_impasse_record(state, q, chain_graph, "stuck")
    assert system.source is ImpasseSource.SystemRanked
    expert = build_impasse_record(state, q, chain_graph, "stuck", override=["base"])
    assert expert.source is ImpasseSource.ExpertProvided
    assert [r.concept_id for r in expert.ranked_prerequisites] == ["base"]


# -- assessment files ---------------------------------------------------------


def test_load_assessments(data_dir, algebra_graph):
    from aisensei.student_model import load_assessments

    records = load_assessments(data_dir / "assessments.sample.json")
    assert len(records) == 6
    state = derive_knowledge_state(records, algebra_graph)
    assert state.level("1-1") is MasteryLevel.Good
    assert state.level("2-2") is MasteryLevel.Poor
    assert state.level("3-4") is MasteryLevel.Poor  # unassessed


def test_load_assessments_rejects_non_array(tmp_path):
    from aisensei.kgraph import ParseError
    from aisensei.student_model import load_assessments

    path = tmp_path / "bad.json"
    path.write_text('{"concept_id": "1-1", "score": 1}')
    with pytest.raises(ParseError):
        load_assessments(path)


# -- impasse files ------------------------------------------------------------


def test_load_impasse_file(tmp_path, algebra_graph):
    path = tmp_path / "imp.json"
    path.write_text(
        json.dumps(
            {
                "question_id": "q-1-3-1",
                "profile": "S1",
                "impasse_text": "cannot distribute",
                "ranked_prerequisites": ["1-2", "1-1"],
            }
        )
    )
    profile, record = load_impasse_file(path, algebra_graph)
    assert profile is StudentProfile.S1
    assert record.source is ImpasseSource.ExpertProvided
    assert [r.concept_id for r in record.ranked_prerequisites] == ["1-2", "1-1"]
    assert record.ranked_prerequisites[0].title == "Algebraic Expressions"


def test_load_impasse_file_rejects_outside_closure(tmp_path, algebra_graph):
    path = tmp_path / "imp.json"
    path.write_text(
        json.dumps(
            {
                "question_id": "q-1-3-1",
                "profile": "S1",
                "impasse_text": "x",
                "ranked_prerequisites": ["3-4"],
            }
        )
    )
    with pytest.raises(InvalidOverrideError):
        load_impasse_file(path, algebra_graph)


def test_shipped_impasse_files_validate(data_dir, algebra_graph):
    for band in "ABC":
        for profile in ("S1", "S2", "S3"):
            declared, record = load_impasse_file(data_dir / "impasses" / f"{band}_{profile}.json", algebra_graph)
            assert declared.value == profile
            assert record.impasse_text
