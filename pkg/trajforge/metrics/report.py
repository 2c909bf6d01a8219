"""
Copyright © 2024 trajforge developers.
"""
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import ShapeMismatch
from ..model.run import RunRecord
from ..model.trajectory import MetaTrajectory
from ..parsing.react import FINAL_ANSWER_ACTION, render_trajectory
from .judge import HallucinationItem, answer_consistency, hallucination_score, mc_accuracy
from .scores import tool_consistency_f1, tool_redundancy_rate, trajectory_success_score

logger = logging.getLogger(__name__)

SUBTASK_KEY = "subtask"


@dataclass
class MetricReport:
    n: int
    tss: float
    trr: float
    tcf1: Optional[Dict[str, float]] = None
    acs: Optional[float] = None
    hr: Optional[float] = None
    mc_f1: Optional[Dict[str, float]] = None
    per_sample: List[Dict] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict:
        return {"tss": self.tss, "trr": self.trr, "tcf1": self.tcf1, "acs": self.acs,
                "hr": self.hr, "mc_f1": self.mc_f1, "n": self.n}

    def table(self) -> str:
        """ fixed-width metric table """
        rows = [("TSS", self.tss), ("TRR", self.trr)]
        if self.tcf1 is not None:
            rows += [("TCF1 precision", self.tcf1["precision"]),
                     ("TCF1 recall", self.tcf1["recall"]), ("TCF1", self.tcf1["f1"])]
        else:
            rows.append(("TCF1", None))
        rows += [("ACS", self.acs), ("HR", self.hr)]
        for subtask, f1 in sorted((self.mc_f1 or {}).items()):
            rows.append((f"MC F1 {subtask}", f1))
        lines = [f"{'metric':<24}{'value':>10}", "-" * 34]
        lines += [f"{name:<24}{'-' if v is None else format(v, '.4f'):>10}" for name, v in rows]
        lines.append(f"{'n':<24}{self.n:>10d}")
        return "\n".join(lines)


def expected_tools(trajectory: MetaTrajectory):
    return {a for a in trajectory.actions if a != FINAL_ANSWER_ACTION}


def _mean(values) -> float:
    return float(np.mean(values)) if len(values) else 0.


def evaluate_dataset(runs: Sequence[RunRecord],
                     ground_truth: Optional[Sequence[MetaTrajectory]] = None,
                     judge=None, trr_theta: float = 0.7, max_workers: int = 1) -> MetricReport:
    """
    Aggregates per-sample metrics over a set of runs.

    Parameters
    ----------
    runs : sequence of RunRecord
    ground_truth : sequence of MetaTrajectory, optional
        keyed by sample id; supplies expected tools (TCF1) and reference answers (ACS).
        Records carrying a ``subtask`` field are multiple-choice items scored into MC F1.
    judge : completion backend, optional
        without one ACS and HR are absent
    trr_theta : float
        input similarity above which same-tool calls are redundant
    max_workers : int
        concurrent judge calls

    Returns
    -------
    report : MetricReport

    Raises
    ------
    ShapeMismatch
        the ground truth and the runs cover different sample ids
    """
    truth: Dict[str, MetaTrajectory] = {}
    if ground_truth is not None:
        truth = {t.sample_id: t for t in ground_truth}
        run_ids = {r.sample_id for r in runs}
        if set(truth) != run_ids or len(run_ids) != len(runs):
            raise ShapeMismatch(f"ground truth covers {len(truth)} sample ids, runs cover "
                                f"{len(run_ids)}; the id sets must be equal and unique")

    per_sample = []
    for run in runs:
        calls = run.calls
        sample = {"sample_id": run.sample_id,
                  "tss": trajectory_success_score(run.valid_output, calls),
                  "trr": tool_redundancy_rate(calls, trr_theta)}
        if truth:
            sample["tcf1"] = tool_consistency_f1(expected_tools(truth[run.sample_id]),
                                                 {c.tool for c in calls})._asdict()
        per_sample.append(sample)

    report = MetricReport(n=len(runs), tss=_mean([s["tss"] for s in per_sample]),
                          trr=_mean([s["trr"] for s in per_sample]), per_sample=per_sample)
    if truth:
        report.tcf1 = {k: _mean([s["tcf1"][k] for s in per_sample])
                       for k in ("precision", "recall", "f1")}

    def pool_map(fn, items):
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    if judge is not None:
        items = [HallucinationItem(r.query, r.final_answer,
                                   render_trajectory(r.planner_trajectory)) for r in runs]
        h = pool_map(lambda item: hallucination_score(item, judge), items)
        report.hr = _mean([float(s > 0.5) for s in h])
        for sample, s in zip(per_sample, h):
            sample["hallucination"] = s
        if truth:
            c = pool_map(lambda r: answer_consistency(truth[r.sample_id].final_answer,
                                                      r.final_answer, judge), runs)
            report.acs = _mean(c)
            for sample, s in zip(per_sample, c):
                sample["acs"] = s

    mc_runs = [r for r in runs if truth and SUBTASK_KEY in truth[r.sample_id].extra]
    if mc_runs:
        acc = pool_map(lambda r: mc_accuracy(r.final_answer, truth[r.sample_id].final_answer,
                                             judge), mc_runs)
        by_subtask = defaultdict(list)
        for r, a in zip(mc_runs, acc):
            by_subtask[str(truth[r.sample_id].extra[SUBTASK_KEY])].append(a)
        report.mc_f1 = {k: _mean(v) for k, v in sorted(by_subtask.items())}
    logger.info("evaluated %d runs", len(runs))
    return report
