"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred to calibration.
"""

import random
import re
import time

import pytest

from aisensei.eval_metrics import cohens_kappa, rating_stats, rouge_l, rouge_n
from aisensei.experiment_runner import (
    ExperimentConfig,
    REPRODUCIBILITY_NOTE,
    render_report_text,
    report_hash,
    run_experiment,
)
from aisensei.kgraph import (
    CycleError,
    DifficultyBand,
    classify_difficulty,
    load_graph,
    prerequisite_closure,
)
from aisensei.llm_gateway import GatewayConfig, LlmGateway
from aisensei.prompt_engine import PromptRequest, render_p1
from aisensei.student_model import StudentProfile
from aisensei.tutor_service import GuidanceMode, SessionState, SurveyPhase

from conftest import DATA, REPO
from test_eval_metrics import (
    lcs_dp_oracle,
    lcs_exhaustive_oracle,
    ngram_overlap_oracle,
    prf,
    random_tokens,
)
from test_kgraph import make_doc, random_dag, reachable_oracle
from test_tutor_service import POST_ANSWERS, PRE_ANSWERS, build


def _pass(name):
    print(f"PASS: {name}")


# -- metric criteria ----------------------------------------------------------


def test_criterion_rouge_oracle_equivalence():
    """rouge-1/2/l match independent oracles on 200 random pairs within 1e-9, under 10s."""
    started = time.monotonic()
    rng = random.Random(424242)
    for case in range(200):
        if case < 120:
            ref = random_tokens(rng, 12, vocab=("a", "b", "c"))
            cand = random_tokens(rng, 12, vocab=("a", "b", "c"))
            lcs_want = lcs_exhaustive_oracle(ref, cand)
        else:
            ref = random_tokens(rng, 200)
            cand = random_tokens(rng, 200)
            lcs_want = lcs_dp_oracle(ref, cand)

        for n in (1, 2):
            want = prf(*ngram_overlap_oracle(ref, cand, n))
            got = rouge_n(ref, cand, n)
            assert abs(got.recall - want[0]) <= 1e-9
            assert abs(got.precision - want[1]) <= 1e-9
            assert abs(got.f_score - want[2]) <= 1e-9

        want_l = prf(lcs_want, len(ref), len(cand))
        got_l = rouge_l(ref, cand)
        assert abs(got_l.recall - want_l[0]) <= 1e-9
        assert abs(got_l.precision - want_l[1]) <= 1e-9
        assert abs(got_l.f_score - want_l[2]) <= 1e-9

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"oracle equivalence took {elapsed:.1f}s"
    _pass(f"ROUGE oracle equivalence (200 pairs, {elapsed:.2f}s)")


def test_criterion_rouge_hand_cases():
    """Frozen hand cases: unigram 2/3 and LCS 0.75, exact."""
    uni = rouge_n(["the", "cat", "ran"], ["the", "cat", "sat"], 1)
    assert uni.recall == pytest.approx(2 / 3, abs=0)
    assert uni.precision == pytest.approx(2 / 3, abs=0)
    assert uni.f_score == pytest.approx(2 / 3, abs=1e-15)

    lcs = rouge_l(["a", "b", "c", "d"], ["a", "c", "b", "d"])
    assert (lcs.recall, lcs.precision, lcs.f_score) == (0.75, 0.75, 0.75)
    _pass("ROUGE hand cases")


def test_criterion_kappa():
    """Identical vectors 1.0; the 4/2/1/3 table 0.4 +- 1e-9; independents near 0."""
    assert cohens_kappa([1, 2, 3], [1, 2, 3]) == 1.0

    a = ["y"] * 6 + ["n"] * 4
    b = ["y"] * 4 + ["n"] * 2 + ["y"] * 1 + ["n"] * 3
    assert cohens_kappa(a, b) == pytest.approx(0.4, abs=1e-9)

    rng = random.Random(11)
    n = 10_000
    x = [rng.randint(1, 5) for _ in range(n)]
    y = [rng.randint(1, 5) for _ in range(n)]
    assert abs(cohens_kappa(x, y)) < 0.05
    _pass("Cohen's kappa hand table and independence bound")


def test_criterion_rating_statistics():
    """Two-decimal mean/SD cells: {5,5,5} -> 5.00/0.00 and {5,5,4} -> 4.67/0.58."""
    from test_eval_metrics import rec

    perfect = rating_stats([rec("A", "S1", "correctness", 5, rater=f"r{i}") for i in range(3)])
    (cell,) = perfect.values()
    assert (f"{cell.mean:.2f}", f"{cell.sd:.2f}") == ("5.00", "0.00")

    mixed = rating_stats([rec("C", "S1", "correctness", v, rater=f"r{i}") for i, v in enumerate((5, 5, 4))])
    (cell,) = mixed.values()
    assert (f"{cell.mean:.2f}", f"{cell.sd:.2f}") == ("4.67", "0.58")
    _pass("rating statistics two-decimal cells")


# -- graph criterion ----------------------------------------------------------


def test_criterion_graph():
    """Shipped bands A/B/C, cycle rejection, closure vs oracle on 100 DAGs, under 5s."""
    started = time.monotonic()
    g = load_graph(DATA / "algebra2.kg.json")
    assert classify_difficulty(g, "1-2") is DifficultyBand.A
    assert classify_difficulty(g, "1-3") is DifficultyBand.B
    assert classify_difficulty(g, "3-2") is DifficultyBand.C

    with pytest.raises(CycleError):
        load_graph(make_doc(["A", "B"], [("A", "B"), ("B", "A")]))

    rng = random.Random(31337)
    for _ in range(100):
        ids, edges = random_dag(rng, max_nodes=50)
        dag = load_graph(make_doc(ids, edges))
        target = rng.choice(ids)
        assert set(prerequisite_closure(dag, target)) == reachable_oracle(edges, target)

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"graph criterion took {elapsed:.1f}s"
    _pass(f"graph bands, cycle rejection and closure oracle ({elapsed:.2f}s)")


# -- prompt criterion ---------------------------------------------------------

PROMPT_FIXTURES = [
    (
        PromptRequest("1+1?", "2", "cannot add", ("Arithmetic",)),
        "Solve this question: 1+1?. The correct and standard solution is 2. "
        "Your solution should include detailed explanation to help this impasse:: cannot add. "
        "This impasse exists because: Arithmetic?",
        "33ccee295135042f8f9e0342070c1c8c465684a9c638d084bb2d68f6b66c0fc1",
    ),
    (
        PromptRequest("Evaluate 5 - 3", "2", "", ()),
        "Solve this question: Evaluate 5 - 3. The correct and standard solution is 2. "
        "Your solution should include detailed explanation to help this impasse:: . "
        "This impasse exists because: ?",
        "0184f834078894583527ec0fce6e28e0f940b29c0932c75ba9d829283699f62f",
    ),
    (
        PromptRequest("Solve x + 1 = 3", "x = 2", "confused by inverse operations", ("A", "B")),
        "Solve this question: Solve x + 1 = 3. The correct and standard solution is x = 2. "
        "Your solution should include detailed explanation to help this impasse:: "
        "confused by inverse operations. This impasse exists because: A, B?",
        "85da32fea188a861cbb9cf31ab3569d1953f89e557245abe97bbaa9b34e7daa1",
    ),
]


def test_criterion_prompt_fidelity():
    """Byte-identical template output and frozen fingerprints for three fixtures."""
    for req, expected_text, expected_fingerprint in PROMPT_FIXTURES:
        prompt = render_p1(req)
        assert prompt.text == expected_text
        assert "impasse::" in prompt.text
        assert prompt.text.endswith("?")
        assert prompt.fingerprint == expected_fingerprint
        assert render_p1(req).fingerprint == expected_fingerprint
    _pass("prompt template fidelity and stable fingerprints")


# -- experiment criterion -----------------------------------------------------


def test_criterion_one_shot_determinism(tmp_path):
    """Replay run: exactly 9 lookups, zero network, identical hashes, 54 rows."""

    def panicking_transport(*args, **kwargs):
        raise AssertionError("network touched in replay mode")

    class CountingGateway(LlmGateway):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, **kwargs)
            self.lookups = 0

        def complete(self, req):
            self.lookups += 1
            return super().complete(req)

    cfg = ExperimentConfig.from_file(DATA / "experiment.replay.json")
    cfg.output_dir = tmp_path

    hashes = []
    for _ in range(2):
        gateway = CountingGateway(
            GatewayConfig(mode="replay", cassette_dir=cfg.cassette_dir, model=cfg.model),
            transport=panicking_transport,
        )
        report = run_experiment(cfg, gateway=gateway)
        assert gateway.lookups == 9
        hashes.append(report_hash(report))
    assert hashes[0] == hashes[1]

    row = re.compile(r"^\S+ vs \S+\s+rouge-[12l]\s+\d\.\d\d\s+\d\.\d\d\s+\d\.\d\d$")
    rows = [line for line in render_report_text(report).splitlines() if row.match(line)]
    assert len(rows) == 54
    _pass("one-shot replay determinism (9 lookups, 54 rows, stable hash)")


def test_criterion_irreproducibility_statement():
    """The suite states plainly which published numbers cannot be re-derived."""
    readme = (REPO / "README.md").read_text(encoding="utf-8")
    for text in (REPRODUCIBILITY_NOTE, readme):
        flat = " ".join(text.split())
        assert "cannot be reproduced" in flat
        assert "0.81" in flat and "0.47" in flat
        assert "never published" in flat or "unpublished" in flat
    _pass("explicit irreproducibility statement present")


# -- service criterion --------------------------------------------------------


def test_criterion_service_durability(tmp_path):
    """Full session, then a restart, exports the identical bundle."""
    store_dir = tmp_path / "durable"
    service, _ = build(tmp_path, store_dir=store_dir)
    session = service.create_session(requested_profile=StudentProfile.S1)
    service.request_guidance(session.session_id, GuidanceMode.Clarify)
    ex = service.request_guidance(session.session_id, GuidanceMode.Refresher)
    service.rate_exchange(session.session_id, ex.index, 5)
    service.submit_survey(session.session_id, SurveyPhase.Pre, PRE_ANSWERS)
    service.submit_survey(session.session_id, SurveyPhase.Post, POST_ANSWERS)
    before = service.export_jsonl()
    service.store.close()

    reborn, _ = build(tmp_path, store_dir=store_dir)
    after = reborn.export_jsonl()
    assert after == before
    assert reborn.get_session(session.session_id).state is SessionState.Completed
    _pass("service durability across restart")
