import string

import numpy as np
import pytest

from trajforge.exceptions import JudgeUnavailable, ShapeMismatch, UnparsableScore
from trajforge.metrics import (HallucinationItem, answer_consistency, evaluate_dataset,
                               hallucination_rate, is_successful, jaccard_similarity,
                               judge_score, mc_accuracy, parse_score, tool_consistency_f1,
                               tool_redundancy_rate, trajectory_success_score)
from trajforge.model import ComponentRun, MetaTrajectory, RunRecord, ToolCallRecord, TrajectoryStep


def ok(tool, text="x"):
    return ToolCallRecord(tool, text, True, "fine")


def failed(tool, text="x"):
    return ToolCallRecord(tool, text, False, "API call failed: down")


def steps(*actions):
    return tuple(TrajectoryStep(k + 1, "t", a, "x", "o") for k, a in enumerate(actions))


def run(sample_id, calls, answer="answer", termination="FinalAnswer"):
    planner = MetaTrajectory(sample_id, None, steps("GeneAgent", "Final Answer"), answer)
    component = ComponentRun("GeneAgent", MetaTrajectory(f"{sample_id}/GeneAgent", None,
                                                         steps("GeneTool"), "sub"), tuple(calls))
    return RunRecord(sample_id, f"question {sample_id}", None, planner, (component,), answer,
                     termination)


def truth(sample_id, actions, answer="reference", **extra):
    return MetaTrajectory(sample_id, None, steps(*actions, "Final Answer"), answer, extra=extra)


def test_trajectory_success_score_hand_cases():
    four_ok = [ok("A"), ok("B"), ok("C"), ok("D")]
    assert trajectory_success_score(True, four_ok) == 1.
    assert trajectory_success_score(True, four_ok[:2] + [failed("C"), failed("D")]) == 0.75
    assert trajectory_success_score(False, four_ok) == 0.5
    assert trajectory_success_score(True, []) == 1.
    assert is_successful(1.)
    assert not is_successful(0.75)


def test_jaccard_similarity_on_token_sets():
    assert jaccard_similarity("the BRCA1 gene", "BRCA1, gene function") == 0.5
    assert jaccard_similarity("", "  ") == 1.
    assert jaccard_similarity("HER2", "ERBB2") == 0.


def test_redundancy_counts_similar_calls_to_the_same_tool():
    calls = [ok("ProteinAtlasGeneInfoTool", '{"gene": "HER2"}'),
             ok("ProteinAtlasGeneInfoTool", '{"gene": "HER2"}'),
             ok("DocumentGeneQueryTool", '{"gene": "HER2"}')]
    assert tool_redundancy_rate(calls) == pytest.approx(1 / 3)
    assert tool_redundancy_rate(calls[:1]) == 0.
    assert tool_redundancy_rate([]) == 0.


def test_redundancy_threshold_is_strict():
    calls = [ok("A", "the BRCA1 gene"), ok("A", "BRCA1 gene function")]
    assert tool_redundancy_rate(calls, theta=0.5) == 0.
    assert tool_redundancy_rate(calls, theta=0.49) == 1.


def test_tool_consistency_f1_hand_cases():
    assert tuple(tool_consistency_f1({"A", "B"}, {"A", "C"})) == (0.5, 0.5, 0.5)
    assert tuple(tool_consistency_f1(set(), set())) == (1., 1., 1.)
    assert tool_consistency_f1({"A"}, {"B"}).f1 == 0.
    assert tuple(tool_consistency_f1({"A"}, set())) == (0., 0., 0.)


def test_parse_score_takes_first_number_and_clamps():
    assert parse_score("0.73") == pytest.approx(0.73)
    assert parse_score("Score: 0.8 out of 1") == pytest.approx(0.8)
    assert parse_score("I'd say 3") == 1.
    with pytest.raises(UnparsableScore):
        parse_score("very consistent")


def test_judge_score_needs_a_working_judge(scripted_backend):
    with pytest.raises(JudgeUnavailable):
        judge_score("prompt", None)
    with pytest.raises(JudgeUnavailable):
        judge_score("prompt", scripted_backend([]))


def test_answer_consistency_parses_the_judge_reply(scripted_backend):
    judge = scripted_backend(["1.0", "0.73", "they agree"])
    assert answer_consistency("BRCA1", "BRCA1", judge) == 1.
    assert answer_consistency("BRCA1", "BRCA2", judge) == pytest.approx(0.73)
    assert "Reference answer: BRCA1\nModel answer: BRCA2" in judge.requests[1].prompt
    with pytest.raises(UnparsableScore):
        answer_consistency("a", "b", judge)


def test_hallucination_rate_counts_scores_above_one_half(scripted_backend):
    judge = scripted_backend(["0.6", "0.4", "0.9", "0.1"])
    items = [HallucinationItem("q", "a", "Thought: t") for _ in range(4)]
    assert hallucination_rate(items, judge) == 0.5
    assert hallucination_rate([], judge) == 0.


def test_multiple_choice_exact_match_and_judged_similarity(scripted_backend):
    assert mc_accuracy(" b ", "B") == 1.
    assert mc_accuracy("B) adenocarcinoma", "B") == 0.
    judge = scripted_backend(["0.9"])
    assert mc_accuracy("B) adenocarcinoma", "B", judge) == pytest.approx(0.9)
    assert "adenocarcinoma" in judge.requests[0].prompt


def test_evaluation_without_judge_leaves_judged_metrics_absent():
    runs = [run("1", [ok("GeneTool"), ok("EchoTool")]),
            run("2", [failed("GeneTool")], termination="IterationLimit")]
    report = evaluate_dataset(runs)
    assert report.n == 2
    assert report.tss == pytest.approx((1. + 0.) / 2)
    assert report.acs is None
    assert report.hr is None
    assert report.tcf1 is None
    d = report.to_dict()
    assert list(d) == ["tss", "trr", "tcf1", "acs", "hr", "mc_f1", "n"]
    table = report.table()
    assert "TSS" in table
    assert table.splitlines()[-1].split() == ["n", "2"]


def test_evaluation_with_truth_and_judge(scripted_backend):
    runs = [run("1", [ok("GeneTool")], "BRCA1 repairs DNA"),
            run("2", [ok("EchoTool")], "no idea")]
    gt = [truth("1", ["GeneTool"]), truth("2", ["GeneTool", "OncoTreeTool"])]
    # two hallucination scores, then two consistency scores
    judge = scripted_backend(["0.2", "0.8", "1.0", "0.0"])
    report = evaluate_dataset(runs, gt, judge)
    assert report.hr == 0.5
    assert report.acs == 0.5
    assert report.tcf1["f1"] == pytest.approx(0.5)
    assert report.per_sample[0]["tcf1"] == {"precision": 1., "recall": 1., "f1": 1.}
    assert "Question: question 1" in judge.requests[0].prompt


def test_multiple_choice_items_are_scored_per_subtask():
    runs = [run("1", [], "b"), run("2", [], "C"), run("3", [], "long answer")]
    gt = [truth("1", [], "B", subtask="grading"), truth("2", [], "A", subtask="grading"),
          truth("3", [], "reference")]
    report = evaluate_dataset(runs, gt)
    assert report.mc_f1 == {"grading": 0.5}
    assert "MC F1 grading" in report.table()


def test_truth_must_cover_the_same_samples():
    with pytest.raises(ShapeMismatch):
        evaluate_dataset([run("1", [])], [truth("2", ["GeneTool"])])
    with pytest.raises(ShapeMismatch):
        evaluate_dataset([run("1", []), run("1", [])], [truth("1", ["GeneTool"])])


WORDS = ("BRCA1", "brca1,", "gene", "Gene.", "repair", "HER2", "(ERBB2)", "tumor", "-", "x")
TOOLS = ("GeneTool", "EchoTool", "OncoTreeTool")


def random_text(rng):
    return " ".join(str(w) for w in rng.choice(WORDS, size=int(rng.integers(0, 6))))


def random_calls(rng):
    calls = []
    for _ in range(int(rng.integers(0, 7))):
        make = ok if rng.random() < 0.7 else failed
        calls.append(make(str(rng.choice(TOOLS)), random_text(rng)))
    return calls


def brute_force_jaccard(a, b):
    def words(text):
        out = []
        for w in text.split():
            w = "".join(ch for ch in w.lower() if ch not in string.punctuation)
            if w and w not in out:
                out.append(w)
        return out
    wa, wb = words(a), words(b)
    if not wa and not wb:
        return 1.
    both = [w for w in wa if w in wb]
    return len(both) / (len(wa) + len(wb) - len(both))


def test_metric_scores_stay_in_the_unit_interval():
    rng = np.random.default_rng(0)
    for _ in range(10000):
        calls = random_calls(rng)
        assert 0. <= trajectory_success_score(bool(rng.random() < 0.5), calls) <= 1.
        assert 0. <= tool_redundancy_rate(calls, theta=float(rng.random())) <= 1.
        expected = {str(t) for t in rng.choice(TOOLS, size=int(rng.integers(0, 4)))}
        actual = {c.tool for c in calls}
        assert all(0. <= v <= 1. for v in tool_consistency_f1(expected, actual))


def test_redundancy_never_rises_with_the_threshold():
    rng = np.random.default_rng(1)
    thetas = np.linspace(0., 1., 11)
    for _ in range(500):
        calls = random_calls(rng)
        rates = [tool_redundancy_rate(calls, theta=float(t)) for t in thetas]
        assert all(a >= b for a, b in zip(rates[:-1], rates[1:]))


def test_tool_consistency_f1_is_symmetric():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        a = {str(t) for t in rng.choice(TOOLS, size=int(rng.integers(0, 4)))}
        b = {str(t) for t in rng.choice(TOOLS, size=int(rng.integers(0, 4)))}
        ab, ba = tool_consistency_f1(a, b), tool_consistency_f1(b, a)
        assert ab.f1 == pytest.approx(ba.f1)
        assert (ab.precision, ab.recall) == (ba.recall, ba.precision)


def test_jaccard_matches_a_brute_force_word_count():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        a, b = random_text(rng), random_text(rng)
        assert jaccard_similarity(a, b) == pytest.approx(brute_force_jaccard(a, b))
        assert jaccard_similarity(a, b) == jaccard_similarity(b, a)
        assert jaccard_similarity(a, a) == 1.
