"""Per-class timing of generate / solve / verify in ops and wall-clock seconds.

Op counts are reproducible for a seed; wall-clock columns are not.
"""

from __future__ import annotations

import csv
import io
import time

import numpy as np

from . import core
from .backends import kov, tsp
from .base import OpCount, TaskClass
from .probes.report import probe_rng
from .probes.task_probes import random_context
from .supply import Fifo, TaskSupplyState

BENCH_COLUMNS = ("class", "phase", "trials", "ops_p50", "ops_p90", "ops_p99", "wall_p50", "wall_p90", "wall_p99")
PHASES = ("generate", "solve", "verify")
DEFAULT_SIZES = {
    TaskClass.CRYPTOPUZZLE: {"nonce_bits": 16, "difficulty": 1},
    TaskClass.KOV: {"k": 2, "n": 64, "d": 64, "density": 0.5},
    TaskClass.TSP: {"cities": 30, "restarts": 10, "alpha": 1.1},
}


def _supply(cls, rng, size):
    if cls is TaskClass.KOV:
        return kov.random_kov_instance(int(size["k"]), int(size["n"]), int(size["d"]), float(size["density"]), rng)
    inst = tsp.random_tsp_instance(int(size["cities"]), rng, scale=1000.0)
    return tsp.TspTask(inst, tsp.tsp_derive_threshold(inst, float(size["alpha"])))


def bench_samples(task_class, trials: int, seed: int = 0, **size) -> dict:
    """Raw per-trial ``{phase: (ops, wall)}`` arrays."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cls = TaskClass.parse(task_class)
    size = {**DEFAULT_SIZES[cls], **size}
    rng = probe_rng(f"bench_{cls.value}", seed)
    ops = {p: [] for p in PHASES}
    wall = {p: [] for p in PHASES}
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        tss = None if cls is TaskClass.CRYPTOPUZZLE else TaskSupplyState.from_instances([_supply(cls, rng, size)])
        diff = size.get("difficulty", 1)
        t0 = time.perf_counter()
        task = core.generate(cls, ctx, diff, tss, Fifo(), nonce_bits=int(size.get("nonce_bits", 32)))
        t1 = time.perf_counter()
        budget = int(size["restarts"]) if cls is TaskClass.TSP else None
        seed_i = int.from_bytes(task.bound_context[:8], "big")
        res = core.solve(task, budget, seed_i)
        t2 = time.perf_counter()
        counter = OpCount()
        if res.solved:
            core.verify(task, res.poc, counter=counter)
        t3 = time.perf_counter()
        ops["generate"].append(1 + (task.payload.instance.n if cls is TaskClass.TSP else 0))
        ops["solve"].append(res.ops)
        ops["verify"].append(counter.ops)
        wall["generate"].append(t1 - t0)
        wall["solve"].append(t2 - t1)
        wall["verify"].append(t3 - t2)
    return {p: (np.array(ops[p], dtype=float), np.array(wall[p])) for p in PHASES}


def bench_task(task_class, trials: int, seed: int = 0, **size) -> list:
    """Rows of BENCH_COLUMNS, one per phase."""
    cls = TaskClass.parse(task_class)
    samples = bench_samples(cls, trials, seed, **size)
    rows = []
    for phase in PHASES:
        o, w = samples[phase]
        rows.append([cls.value, phase, trials, *np.quantile(o, [0.5, 0.9, 0.99]), *np.quantile(w, [0.5, 0.9, 0.99])])
    return rows


def bench_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([r[0], r[1], r[2]] + [repr(float(x)) for x in r[3:]])
    return buf.getvalue()
