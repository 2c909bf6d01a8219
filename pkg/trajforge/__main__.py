"""
Copyright © 2024 trajforge developers.
"""
import argparse
import json
import logging
import sys

from . import run_pipeline
from .adapter import overhead_estimate, parameter_stats
from .default_settings import default_settings, validate_settings
from .exceptions import (BackendError, ConfigError, EmptyMatrix, EmptyResult, InsufficientNodes,
                         JudgeUnavailable, RecordError, ShapeMismatch)
from .model import AenNode, MetaTrajectory, RunRecord, load_jsonl, save_jsonl
from .version import version

EXIT_OK, EXIT_CONFIG, EXIT_BACKEND, EXIT_EMPTY, EXIT_MISMATCH = 0, 2, 3, 4, 5

# not user tunable
_SKIP = ("trajforge_version",)


def add_args(parser: argparse.ArgumentParser):
    """
    Adds one flag per default setting to parser, in both underscore and dash spellings.
    """
    parser.add_argument("--config", default="", type=str,
                        help="JSON file of settings; flags take precedence")
    settings0 = default_settings()
    for k, d in settings0.items():
        if k in _SKIP:
            continue
        flags = ["--" + k]
        if "_" in k:
            flags.append("--" + k.replace("_", "-"))
        v = dict(default=d, dest=k, help="{0} : {1}".format(k, d))
        if isinstance(d, bool):
            v["type"] = str
        elif isinstance(d, list):
            v["nargs"] = "*"
            v["type"] = str
        else:
            v["type"] = type(d)
        parser.add_argument(*flags, **v)
    return parser


def parse_settings(args: argparse.Namespace):
    """
    Merges defaults, the --config file and flags that differ from their default.
    """
    dargs = vars(args)
    settings0 = default_settings()
    settings = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                settings = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}")
        if not isinstance(settings, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
    set_param_msg = "->> Setting {0} to {1}"
    # options defined in the cli take precedence over the ones in the config file
    for k, default_key in settings0.items():
        if k in _SKIP:
            continue
        args_key = dargs[k]
        if isinstance(default_key, bool):
            if isinstance(args_key, str):
                try:
                    args_key = bool(int(args_key))  # bool("0") is true, must convert to int
                except ValueError:
                    raise ConfigError(f"setting '{k}' must be 0 or 1, got {args_key!r}")
            if args_key != default_key:
                settings[k] = args_key
                print(set_param_msg.format(k, args_key), file=sys.stderr)
        elif args_key != default_key:
            settings[k] = args_key
            print(set_param_msg.format(k, args_key), file=sys.stderr)
    return validate_settings({**settings0, **settings})


def cmd_generate(args, settings):
    queries = run_pipeline.load_queries(args.queries)
    nodes = run_pipeline.generate_nodes(settings, queries)
    save_jsonl(args.output or run_pipeline.output_path(settings, "nodes.jsonl"), nodes)


def cmd_connect(args, settings):
    nodes = load_jsonl(args.nodes, AenNode)
    connections, stats = run_pipeline.connect_nodes(settings, nodes)
    save_jsonl(args.output or run_pipeline.output_path(settings, "connections.jsonl"),
               connections)
    print(f"{stats['pairs_evaluated']} pairs evaluated, {len(connections)} kept",
          file=sys.stderr)


def cmd_synthesize(args, settings):
    nodes = load_jsonl(args.nodes, AenNode)
    report = run_pipeline.synthesize(settings, nodes)
    print(f"{report['trajectories']} trajectories kept from {report['nodes_in']} nodes",
          file=sys.stderr)


def cmd_run(args, settings):
    if args.queries:
        queries = run_pipeline.load_queries(args.queries)
    elif args.query:
        queries = [run_pipeline.Query(args.query, args.image or None)]
    else:
        raise ConfigError("run needs --query or --queries")
    records = run_pipeline.run_queries(settings, queries)
    save_jsonl(args.output or run_pipeline.output_path(settings, "runs.jsonl"), records)


def cmd_evaluate(args, settings):
    runs = load_jsonl(args.runs, RunRecord)
    truth = load_jsonl(args.ground_truth, MetaTrajectory) if args.ground_truth else None
    report = run_pipeline.evaluate(settings, runs, truth)
    print(report.table())
    filename = args.output or run_pipeline.output_path(settings, "metrics.json")
    with open(filename, "w") as f:
        json.dump(report.to_dict(), f, indent=2)


def cmd_parse(args, settings):
    with open(args.transcript, "r", encoding="utf-8") as f:
        parsed = run_pipeline.parse(f.read())
    text = json.dumps(parsed, indent=2, ensure_ascii=False)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def cmd_adapter_stats(args, settings):
    values = dict(layers=args.layers, d=args.d, ffn_mult=args.ffn_mult,
                  lora_rank=args.lora_rank, batch=args.batch, seq_len=args.seq_len)
    for k, v in values.items():
        if v <= 0:
            raise ConfigError(f"--{k.replace('_', '-')} must be positive, got {v}")
    text_len = args.seq_len if args.text_len is None else args.text_len
    if not 0 <= text_len <= args.seq_len:
        raise ConfigError(f"--text-len must lie in [0, {args.seq_len}], got {text_len}")
    stats = parameter_stats(args.layers, args.d, args.ffn_mult, args.lora_rank)
    overhead = overhead_estimate(args.batch, args.seq_len, text_len, args.d)
    print(f"{'adapter params':<24}{stats['adapter_params']:>16,d}")
    print(f"{'adapter params / layer':<24}{stats['adapter_per_layer']:>16,d}")
    print(f"{'ffn params':<24}{stats['ffn_params']:>16,d}")
    print(f"{'lora params':<24}{stats['lora_params']:>16,d}")
    print(f"{'lora params / layer':<24}{stats['lora_per_layer']:>16,d}")
    print(f"{'rho':<24}{stats['rho'] * 100:>15.4f}%")
    print(f"{'overhead':<24}{overhead * 100:>15.3f}%")


def cmd_cluster(args, settings):
    trajectories = load_jsonl(args.trajectories, MetaTrajectory)
    config = run_pipeline.cluster(
        settings, trajectories,
        args.output or run_pipeline.output_path(settings, "clusters.json"))
    for c in config["clusters"]:
        print(f"{c['agent_name']}: {', '.join(c['tools'])}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="trajforge: agent trajectory synthesis")
    parser.add_argument("--version", action="store_true", help="print version number.")
    sub = parser.add_subparsers(dest="command")

    def command(name, func, help):
        p = add_args(sub.add_parser(name, help=help))
        p.set_defaults(func=func)
        return p

    p = command("generate", cmd_generate, "one atomic execution node per query")
    p.add_argument("queries", help="text file, one query per line, or JSONL")
    p.add_argument("-o", "--output", default="", help="nodes JSONL")

    p = command("connect", cmd_connect, "score node pairs into connections")
    p.add_argument("nodes", help="nodes JSONL")
    p.add_argument("-o", "--output", default="", help="connections JSONL")

    p = command("synthesize", cmd_synthesize, "connections, trajectories, filter and split")
    p.add_argument("nodes", help="nodes JSONL")

    p = command("run", cmd_run, "answer queries with the planner and component agents")
    p.add_argument("--query", default="", help="single query")
    p.add_argument("--image", default="", help="image reference for --query")
    p.add_argument("--queries", default="", help="queries file")
    p.add_argument("-o", "--output", default="", help="run records JSONL")

    p = command("evaluate", cmd_evaluate, "metric report over run records")
    p.add_argument("runs", help="run records JSONL")
    p.add_argument("--ground-truth", "--ground_truth", dest="ground_truth", default="",
                   help="trajectories JSONL keyed by sample id")
    p.add_argument("-o", "--output", default="", help="report JSON")

    p = command("parse", cmd_parse, "transcript to segments JSON")
    p.add_argument("transcript", help="ReACT transcript text file")
    p.add_argument("-o", "--output", default="", help="segments JSON, stdout by default")

    p = command("adapter-stats", cmd_adapter_stats, "adapter parameter and flop accounting")
    p.add_argument("--layers", "-L", type=int, default=32, help="decoder layers")
    p.add_argument("--d", type=int, default=4096, help="hidden dimension")
    p.add_argument("--ffn-mult", "--ffn_mult", dest="ffn_mult", type=int, default=4)
    p.add_argument("--lora-rank", "--lora_rank", dest="lora_rank", type=int, default=8)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--seq-len", "--seq_len", dest="seq_len", type=int, default=2048)
    p.add_argument("--text-len", "--text_len", dest="text_len", type=int, default=None,
                   help="text positions, defaults to --seq-len")

    p = command("cluster", cmd_cluster, "tool clusters from trajectory co-occurrence")
    p.add_argument("trajectories", help="trajectories JSONL")
    p.add_argument("-o", "--output", default="", help="cluster config JSON")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.version:
        print("trajforge v{}".format(version))
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_OK
    try:
        settings = parse_settings(args)
        logging.basicConfig(level=settings["log_level"].upper(), stream=sys.stderr,
                            format="%(asctime)s %(name)s %(levelname)s: %(message)s")
        args.func(args, settings)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (BackendError, JudgeUnavailable) as e:
        print(f"backend error: {e}", file=sys.stderr)
        return EXIT_BACKEND
    except (EmptyResult, InsufficientNodes, EmptyMatrix) as e:
        print(f"empty result: {e}", file=sys.stderr)
        return EXIT_EMPTY
    except (ShapeMismatch, RecordError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
