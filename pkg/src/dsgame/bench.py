"""Benchmark harness: run the solvers over instance suites and emit CSV rows."""
from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .arith import format_rational
from .comparator import Relation
from .game import (
    Owner,
    QuantitativeGame,
    gen_random,
    gen_robustness,
    gen_scalable,
    parse_game,
)
from .product import comp_satisfice
from .vi import DeadlineExceeded, vi_optimize, vi_satisfice

__all__ = [
    "CSV_COLUMNS",
    "Task",
    "Row",
    "builtin_suite",
    "directory_suite",
    "run_task",
    "run_suite",
    "robustness_thresholds",
]

CSV_COLUMNS = [
    "instance",
    "states",
    "edges",
    "method",
    "answer",
    "iterations_or_product_states",
    "millis",
    "timed_out",
]

BUILTIN_SUITES = ("scaling", "robustness", "equivalence")


@dataclass(frozen=True)
class Task:
    instance: str
    game: QuantitativeGame
    method: str  # VI_OPT | VI_SAT | COMP_SAT
    threshold: Optional[Fraction] = None
    relation: Relation = Relation.LEQ
    player: Owner = Owner.MIN


@dataclass(frozen=True)
class Row:
    instance: str
    states: int
    edges: int
    method: str
    answer: str
    iterations_or_product_states: Optional[int]
    millis: float
    timed_out: bool

    def as_list(self):
        return [
            self.instance,
            self.states,
            self.edges,
            self.method,
            self.answer,
            "" if self.iterations_or_product_states is None else self.iterations_or_product_states,
            f"{self.millis:.3f}",
            "true" if self.timed_out else "false",
        ]


def _sat_tasks(name, g, v, rel=Relation.LEQ, player=Owner.MIN, methods=("VI_SAT", "COMP_SAT")):
    return [Task(name, g, m, Fraction(v), rel, player) for m in methods]


def robustness_thresholds(W: Fraction, mu: int, steps: int = 9):
    """``(side, j, v)`` for ``v = W -+ mu / 2**j``, ``j = 0..steps-1``."""
    out = []
    for side, sign in (("below", -1), ("above", 1)):
        for j in range(steps):
            out.append((side, j, W + sign * Fraction(mu, 2**j)))
    return out


def builtin_suite(name: str) -> list:
    if name == "scaling":
        tasks = []
        for i in range(4, 13):
            g = gen_scalable(i)
            inst = f"scalable_{i}"
            tasks.append(Task(inst, g, "VI_OPT"))
            tasks += _sat_tasks(inst, g, 3)
        return tasks
    if name == "robustness":
        g = gen_robustness()
        W = vi_optimize(g).W
        tasks = [Task("robust_opt", g, "VI_OPT")]
        for side, j, v in robustness_thresholds(W, g.mu):
            tasks += _sat_tasks(f"robust_{side}_{j}", g, v)
        return tasks
    if name == "equivalence":
        tasks = []
        for seed in range(40):
            g = gen_random(3 + seed % 6, 1 + seed % 4, 1 + seed % 3, seed)
            W = vi_optimize(g).W
            for k, v in enumerate((W - 1, W - Fraction(1, 3), W, W + Fraction(1, 3), W + 1)):
                for rel in Relation:
                    for player in Owner:
                        inst = f"random_{seed}_v{k}_{rel.value}_{player.value}"
                        tasks += _sat_tasks(inst, g, v, rel, player)
        return tasks
    raise ValueError(f"unknown builtin suite {name!r}; choose from {', '.join(BUILTIN_SUITES)}")


def directory_suite(path, v=Fraction(0), rel=Relation.LEQ, player=Owner.MIN) -> list:
    """Every ``*.game`` file in ``path``, each run with all three methods."""
    tasks = []
    for f in sorted(Path(path).glob("*.game")):
        g = parse_game(f.read_bytes())
        tasks.append(Task(f.stem, g, "VI_OPT"))
        methods = ("VI_SAT", "COMP_SAT") if g.discount.is_integer else ("VI_SAT",)
        tasks += _sat_tasks(f.stem, g, v, rel, player, methods)
    return tasks


def run_task(task: Task, timeout: Optional[float] = None) -> Row:
    g = task.game
    deadline = None if timeout is None else time.monotonic() + timeout
    t0 = time.perf_counter()
    answer, count, timed_out = "", None, False
    try:
        if task.method == "VI_OPT":
            r = vi_optimize(g, deadline)
            answer, count = format_rational(r.W), r.iterations_used
        elif task.method == "VI_SAT":
            r = vi_satisfice(g, task.threshold, task.relation, task.player, deadline)
            answer, count = ("YES" if r.holds else "NO"), r.iterations_used
        elif task.method == "COMP_SAT":
            r = comp_satisfice(g, task.threshold, task.relation, task.player, deadline)
            answer, count = ("YES" if r.holds else "NO"), r.product_states
        else:
            raise ValueError(f"unknown method {task.method!r}")
    except DeadlineExceeded:
        timed_out = True
    except Exception as e:  # recorded, the run goes on
        answer = f"error: {type(e).__name__}"
    millis = (time.perf_counter() - t0) * 1000
    if timeout is not None and millis > timeout * 1000:
        timed_out = True
    return Row(task.instance, g.n_states, g.n_edges, task.method, answer, count, millis, timed_out)


def _run_packed(args):
    return run_task(*args)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("DSG_JOBS", "1")))
    except ValueError:
        return 1


def run_suite(
    tasks: Iterable[Task],
    timeout: Optional[float] = None,
    jobs: int = 1,
    sink=None,
    skip_after_timeout: bool = True,
) -> list:
    """Run every task, writing rows to ``sink`` (a csv writer) in task order.

    With ``skip_after_timeout`` a method that timed out on one instance is
    not attempted on later instances of the same suite; those rows are
    recorded as timed out with no measurement.  Suites list instances in
    increasing size, so the skipped runs could only take longer.
    """
    tasks = list(tasks)
    rows = []

    def emit(row):
        rows.append(row)
        if sink is not None:
            sink.writerow(row.as_list())

    if jobs <= 1:
        gave_up = set()
        for t in tasks:
            if t.method in gave_up:
                emit(Row(t.instance, t.game.n_states, t.game.n_edges, t.method, "", None, 0.0, True))
                continue
            row = run_task(t, timeout)
            if row.timed_out and skip_after_timeout:
                gave_up.add(t.method)
            emit(row)
        return rows
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for row in pool.map(_run_packed, [(t, timeout) for t in tasks]):
            emit(row)
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.as_list())
