import json
import os

from trajforge.__main__ import main
from trajforge.model import AenNode, MetaTrajectory, RunRecord, TrajectoryStep, save_jsonl


def write_nodes(tmpdir, n=3):
    filename = str(tmpdir.join("nodes.jsonl"))
    save_jsonl(filename, [AenNode(str(k), f"question {k}", "GeneTool", {"gene": f"G{k}"},
                                  f"observation {k}") for k in range(n)])
    return filename


def test_cli_help_test_appears_when_trajforge_is_called(capfd):
    os.system('trajforge --help')
    captured = capfd.readouterr()
    assert 'trajforge' in captured.out
    assert 'usage' in captured.out
    assert 'synthesize' in captured.out


def test_cli_version_test_appears_when_trajforge_is_called_locally(capfd):
    os.system('python -m trajforge --version')
    captured = capfd.readouterr()
    assert 'trajforge v' in captured.out


def test_cli_subcommand_help_lists_settings(capfd):
    os.system('python -m trajforge connect --help')
    captured = capfd.readouterr()
    assert '--max-pairs' in captured.out
    assert '--theta' in captured.out


def test_cli_config_error_exit_code(capsys):
    assert main(["run"]) == 2
    assert "run needs --query or --queries" in capsys.readouterr().err
    assert main(["connect", "nodes.jsonl", "--theta", "2"]) == 2


def test_cli_empty_result_exit_code(capsys, tmpdir):
    script = tmpdir.join("script.json")
    script.write(json.dumps([]))
    argv = ["synthesize", write_nodes(tmpdir), "--scorer", "hash", "--theta", "1",
            "--script-path", str(script), "--save-path", str(tmpdir)]
    assert main(argv) == 4
    assert "empty result" in capsys.readouterr().err
    with open(tmpdir.join("report.json")) as f:
        report = json.load(f)
    assert report["trajectories"] == 0
    assert report["pairs_evaluated"] == 6


def test_cli_single_node_exit_code(capsys, tmpdir):
    assert main(["connect", write_nodes(tmpdir, n=1), "--scorer", "hash",
                 "-o", str(tmpdir.join("c.jsonl"))]) == 4
    assert "at least 2 nodes" in capsys.readouterr().err


def test_cli_bad_record_exit_code(capsys, tmpdir):
    nodes = tmpdir.join("nodes.jsonl")
    nodes.write('{"id": "0"}\n')
    assert main(["connect", str(nodes), "--scorer", "hash"]) == 5
    assert "line 1" in capsys.readouterr().err


def test_cli_adapter_stats_prints_ratios(capsys):
    assert main(["adapter-stats"]) == 0
    out = capsys.readouterr().out
    assert "0.0061%" in out
    assert "0.024%" in out
    assert "12,288" in out
    assert main(["adapter-stats", "--d", "0"]) == 2


def test_cli_parse_writes_segments(capsys, tmpdir, data_dir):
    output = tmpdir.join("segments.json")
    transcript = data_dir.joinpath("transcripts", "brca_repair.txt")
    assert main(["parse", str(transcript), "-o", str(output)]) == 0
    with open(output) as f:
        parsed = json.load(f)
    assert [s["action"] for s in parsed["steps"]][:3] == [
        "ProteinAtlasGeneInfoTool", "DocumentGeneQueryTool", "ProteinAtlasGeneInfoTool"]
    assert parsed["final_answer"]


def test_cli_generate_from_an_empty_file_writes_no_nodes(capsys, tmpdir):
    queries = tmpdir.join("queries.txt")
    queries.write("")
    output = tmpdir.join("nodes.jsonl")
    assert main(["generate", str(queries), "-o", str(output)]) == 0
    assert output.read() == ""


def test_cli_evaluate_reports_and_rejects_mismatched_truth(capsys, tmpdir):
    step = TrajectoryStep(1, "t", "Final Answer", "", "")
    planner = MetaTrajectory("1", None, (step,), "42")
    runs = str(tmpdir.join("runs.jsonl"))
    save_jsonl(runs, [RunRecord("1", "question", None, planner, (), "42", "FinalAnswer")])
    report = tmpdir.join("metrics.json")
    assert main(["evaluate", runs, "-o", str(report)]) == 0
    with open(report) as f:
        d = json.load(f)
    assert d["tss"] == 1.
    assert d["acs"] is None
    assert d["n"] == 1

    truth = str(tmpdir.join("truth.jsonl"))
    save_jsonl(truth, [MetaTrajectory("2", None, (step,), "42")])
    assert main(["evaluate", runs, "--ground-truth", truth, "-o", str(report)]) == 5
    assert "data error" in capsys.readouterr().err


def test_cli_generate_rejects_sample_ids_with_the_id_separator(capsys, tmpdir):
    queries = tmpdir.join("queries.jsonl")
    queries.write(json.dumps({"query": "BRCA1?", "sample_id": "8780_1"}) + "\n")
    assert main(["generate", str(queries), "-o", str(tmpdir.join("nodes.jsonl"))]) == 2
    assert "must not contain '_'" in capsys.readouterr().err
