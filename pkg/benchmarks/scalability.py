import argparse
import time
from typing import List, NamedTuple

import numpy as np

from trajforge.__main__ import add_args, parse_settings
from trajforge.model import AenNode, Connection
from trajforge.synthesis import (ConstructionParams, construct_trajectories, scalability_probe,
                                 uniform_expected_max, uniform_sampler)


class ConstructionTiming(NamedTuple):
    connections: int
    seconds: float
    trajectories: int


class FixedAnswer:
    """ answerer replying instantly with the same final answer """

    def complete(self, request):
        return "Final Answer: synthesized"


def synthetic_graph(n_nodes: int, n_connections: int, seed: int = 37):
    rng = np.random.default_rng(seed)
    nodes = [AenNode(str(k), f"query {k}", f"Tool{k % 7}", {"query": f"q{k}"}, f"obs {k}")
             for k in range(n_nodes)]
    flat = rng.choice(n_nodes * (n_nodes - 1), size=n_connections, replace=False)
    src = flat // (n_nodes - 1)
    dst = flat % (n_nodes - 1)
    dst = dst + (dst >= src)
    scores = rng.uniform(0.5, 1., n_connections)
    connections = [Connection(str(i), str(j), float(s), "next")
                   for i, j, s in zip(src, dst, scores)]
    connections.sort(key=lambda c: (-c.score, c.src, c.dst))
    return nodes, connections


def construction_scaling(n_nodes: int, start: int, doublings: int,
                         params: ConstructionParams, seed: int = 37) -> List[ConstructionTiming]:
    """
    Wall time of construct_trajectories as the connection count doubles at fixed K.
    """
    timings = []
    for k in range(doublings + 1):
        nodes, connections = synthetic_graph(n_nodes, start * 2 ** k, seed)
        t0 = time.perf_counter()
        trajectories = construct_trajectories(nodes, connections, params, FixedAnswer())
        timings.append(ConstructionTiming(len(connections), time.perf_counter() - t0,
                                          len(trajectories)))
    return timings


def main():
    default_parser = add_args(argparse.ArgumentParser(description="trajforge scalability benchmark"))
    default_parser.add_argument("--n_values", default=[10, 20, 40], type=int, nargs="*",
                                help="node pool sizes for the probe")
    default_parser.add_argument("--trials", default=200, type=int, help="Monte Carlo trials")
    default_parser.add_argument("--n_nodes", default=2000, type=int,
                                help="nodes of the synthetic construction graph")
    default_parser.add_argument("--start_connections", default=5000, type=int,
                                help="connections before the first doubling")
    default_parser.add_argument("--doublings", default=3, type=int)
    args = default_parser.parse_args()
    settings = parse_settings(args)

    points = scalability_probe(args.n_values, uniform_sampler, trials=args.trials,
                               seed=settings["seed"], max_length=settings["max_length"])
    print(f"{'n':>6}{'pairs':>8}{'E[max s]':>12}{'closed form':>13}{'stderr':>10}"
          f"{'length':>9}{'path score':>12}")
    for p in points:
        print(f"{p.n:>6d}{p.pairs:>8d}{p.mean_max:>12.5f}{uniform_expected_max(p.pairs):>13.5f}"
              f"{p.stderr:>10.5f}{p.mean_reachable_length:>9.2f}{p.mean_path_score:>12.3f}")

    timings = construction_scaling(args.n_nodes, args.start_connections, args.doublings,
                                   ConstructionParams.from_settings(settings), settings["seed"])
    print(f"\n{'|C|':>8}{'sec':>10}{'ratio':>8}{'trajectories':>14}")
    for prev, t in zip([None] + timings[:-1], timings):
        ratio = t.seconds / prev.seconds if prev is not None and prev.seconds > 0 else float("nan")
        print(f"{t.connections:>8d}{t.seconds:>10.4f}{ratio:>8.2f}{t.trajectories:>14d}")


if __name__ == "__main__":
    main()
