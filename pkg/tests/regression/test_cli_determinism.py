"""
Running a subcommand twice on the same inputs, seed, clock and scripted or replayed
backend must give byte-identical outputs.
"""
import json
from pathlib import Path

import numpy as np

from trajforge.__main__ import main
from trajforge.model import (AenNode, ComponentRun, MetaTrajectory, RunRecord, ToolCallRecord,
                             TrajectoryStep, load_jsonl, save_jsonl)

from utils import random_nodes

OUTPUTS = ("connections.jsonl", "trajectories.jsonl", "train.jsonl", "validation.jsonl",
           "test.jsonl", "report.json")


def synthesize(tmpdir, name, nodes_file, script_file, seed="37"):
    save_path = Path(tmpdir).joinpath(name)
    save_path.mkdir()
    code = main(["synthesize", nodes_file, "--scorer", "hash", "--theta", "0.4",
                 "--max-length", "4", "--split", "60:20:20", "--seed", seed,
                 "--script-path", script_file, "--save-path", str(save_path)])
    assert code == 0
    return save_path


def test_synthesize_twice_gives_identical_files(tmpdir):
    nodes_file = str(tmpdir.join("nodes.jsonl"))
    save_jsonl(nodes_file, random_nodes(np.random.default_rng(8), 12))
    script_file = tmpdir.join("script.json")
    script_file.write(json.dumps(["Thought: enough\nFinal Answer: synthesized"] * 200))

    first = synthesize(tmpdir, "first", nodes_file, str(script_file))
    second = synthesize(tmpdir, "second", nodes_file, str(script_file))
    for name in OUTPUTS:
        assert first.joinpath(name).read_bytes() == second.joinpath(name).read_bytes(), name

    report = json.loads(first.joinpath("report.json").read_text())
    assert report["settings"]["seed"] == 37
    assert report["trajectories"] == sum(report["splits"].values())
    trajs = load_jsonl(first.joinpath("trajectories.jsonl"), MetaTrajectory)
    assert all(2 <= len(t) <= 4 for t in trajs)
    assert all(t.final_answer == "synthesized" for t in trajs)


def test_split_depends_on_the_seed(tmpdir):
    nodes_file = str(tmpdir.join("nodes.jsonl"))
    save_jsonl(nodes_file, random_nodes(np.random.default_rng(8), 12))
    script_file = tmpdir.join("script.json")
    script_file.write(json.dumps(["Final Answer: synthesized"] * 200))

    a = synthesize(tmpdir, "a", nodes_file, str(script_file), seed="1")
    b = synthesize(tmpdir, "b", nodes_file, str(script_file), seed="2")
    assert a.joinpath("trajectories.jsonl").read_bytes() != b""
    train_a = [t.sample_id for t in load_jsonl(a.joinpath("train.jsonl"), MetaTrajectory)]
    train_b = [t.sample_id for t in load_jsonl(b.joinpath("train.jsonl"), MetaTrajectory)]
    assert len(train_a) == len(train_b)
    assert train_a != train_b


def write_script(tmpdir, name, replies):
    filename = tmpdir.join(name)
    filename.write(json.dumps(replies))
    return str(filename)


def test_generate_twice_gives_identical_nodes(tmpdir):
    queries = tmpdir.join("queries.txt")
    queries.write("What does BRCA1 do?\nIs TP53 a tumor suppressor?\nWhat is HER2?\n")
    script = write_script(tmpdir, "script.json", [
        f'Thought: look up {g}\nAction: DocumentGeneQueryTool\nAction Input: {{"query": "{g}"}}'
        for g in ("BRCA1", "TP53", "ERBB2")])
    outputs = []
    for name in ("a.jsonl", "b.jsonl"):
        output = tmpdir.join(name)
        assert main(["generate", str(queries), "-o", str(output), "--script-path", script,
                     "--offline-tools", "1", "--clock", "fake"]) == 0
        outputs.append(output.read_binary())
    assert outputs[0] == outputs[1]
    nodes = load_jsonl(str(tmpdir.join("a.jsonl")), AenNode)
    assert [n.id for n in nodes] == ["0", "1", "2"]
    assert [n.action_input["query"] for n in nodes] == ["BRCA1", "TP53", "ERBB2"]


def test_run_twice_and_from_the_recorded_cassette_gives_identical_records(tmpdir):
    script = write_script(tmpdir, "script.json", [
        "Ask the gene expert.\nAction: GeneAgent\nAction Input: What does BRCA1 do?",
        'Look it up.\nAction: DocumentGeneQueryTool\nAction Input: {"query": "BRCA1"}',
        "Nothing found.\nFinal Answer: no summary available",
        "Enough.\nFinal Answer: BRCA1 takes part in DNA repair.",
    ])
    cassette = str(tmpdir.join("cassette.jsonl"))
    common = ["run", "--query", "What does BRCA1 do?", "--offline-tools", "1",
              "--clock", "fake"]
    outputs = []
    for name, extra in (("a", ["--script-path", script, "--record-cassette", cassette]),
                        ("b", ["--script-path", script]),
                        ("c", ["--backend", "replay", "--cassette-path", cassette])):
        output = tmpdir.join(f"{name}.jsonl")
        assert main(common + extra + ["-o", str(output)]) == 0
        outputs.append(output.read_binary())
    assert outputs[0] == outputs[1] == outputs[2]
    record = load_jsonl(str(tmpdir.join("a.jsonl")), RunRecord)[0]
    assert record.final_answer == "BRCA1 takes part in DNA repair."
    assert [c.tool for c in record.calls] == ["DocumentGeneQueryTool"]


def test_evaluate_twice_gives_identical_reports(tmpdir):
    def record(sample_id, answer):
        steps = (TrajectoryStep(1, "t", "GeneAgent", "q", "sub"),
                 TrajectoryStep(2, "t", "Final Answer", "", ""))
        sub = MetaTrajectory(f"{sample_id}/GeneAgent", None,
                             (TrajectoryStep(1, "t", "GeneTool", "x", "o"),), "sub")
        component = ComponentRun("GeneAgent", sub, (ToolCallRecord("GeneTool", "x", True, "o"),))
        return RunRecord(sample_id, f"question {sample_id}", None,
                         MetaTrajectory(sample_id, None, steps, answer), (component,), answer,
                         "FinalAnswer")

    runs = str(tmpdir.join("runs.jsonl"))
    save_jsonl(runs, [record("1", "BRCA1 repairs DNA"), record("2", "no idea")])
    truth = str(tmpdir.join("truth.jsonl"))
    save_jsonl(truth, [MetaTrajectory(k, None, (TrajectoryStep(1, "t", "GeneTool", "x", "o"),),
                                      "reference") for k in ("1", "2")])
    judge = write_script(tmpdir, "judge.json", ["0.2", "0.8", "1.0", "0.0"])
    outputs = []
    for name in ("a.json", "b.json"):
        output = tmpdir.join(name)
        assert main(["evaluate", runs, "--ground-truth", truth, "--judge", "scripted",
                     "--judge-script-path", judge, "--max-in-flight", "1",
                     "-o", str(output)]) == 0
        outputs.append(output.read_binary())
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0])
    assert report["n"] == 2
    assert report["hr"] == 0.5
    assert report["acs"] == 0.5


def test_parse_twice_gives_identical_segments(tmpdir, data_dir):
    transcript = str(data_dir.joinpath("transcripts", "lymphoid_tissue.txt"))
    outputs = []
    for name in ("a.json", "b.json"):
        output = tmpdir.join(name)
        assert main(["parse", transcript, "-o", str(output)]) == 0
        outputs.append(output.read_binary())
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0])["segments"]


def test_cluster_output_ignores_trajectory_order(tmpdir):
    rng = np.random.default_rng(4)
    chains = (("BLIPTool", "QwenVLCaptionTool", "OncoTreeTool"),
              ("DocumentGeneQueryTool", "ProteinAtlasGeneInfoTool", "PathwayKGTool"))
    trajs = []
    for k in range(30):
        chain = chains[k % 2]
        actions = [chain[int(i)] for i in rng.integers(0, 3, size=int(rng.integers(2, 6)))]
        steps = [TrajectoryStep(s + 1, "t", a, "x", "o") for s, a in enumerate(actions)]
        steps.append(TrajectoryStep(len(steps) + 1, "t", "Final Answer", "", ""))
        trajs.append(MetaTrajectory(str(k), None, tuple(steps), "done"))
    outputs = []
    for name, order in (("a", trajs), ("b", trajs), ("c", trajs[::-1])):
        corpus = str(tmpdir.join(f"{name}.jsonl"))
        save_jsonl(corpus, order)
        output = tmpdir.join(f"{name}.json")
        assert main(["cluster", corpus, "-o", str(output)]) == 0
        outputs.append(output.read_binary())
    assert outputs[0] == outputs[1] == outputs[2]
