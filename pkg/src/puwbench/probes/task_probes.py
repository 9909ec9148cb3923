"""Backend micro-experiments for the block task properties.

Every probe draws from its own generator keyed by (probe id, seed), works
in abstract op counts rather than wall-clock time, and returns one or more
ProbeReport values.
"""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache

import numpy as np

from .. import core
from ..backends import cryptopuzzle as cp
from ..backends import kov
from ..backends import tsp
from ..base import FULL, BlockContext, OpCount, SpotCheck, TaskClass, context_digest
from ..errors import InsufficientData
from ..supply import Fifo, TaskSupplyState
from .report import ProbeReport, Verdict, bootstrap_stderr, cv, probe_rng, verdict_if

DEFAULT_BITS = 16
KOV_SHAPE = {"k": 2, "n": 64, "d": 64, "density": 0.5}
TSP_SHAPE = {"cities": 30, "alpha": 1.1, "restarts": 10}


def random_context(rng, height: int = 1) -> BlockContext:
    return BlockContext(rng.bytes(32), rng.bytes(32), height, float(rng.integers(0, 2**31)),
                        int(rng.integers(0, 2**16)), 0)


def _kov_instance(rng, shape=None):
    s = {**KOV_SHAPE, **(shape or {})}
    return kov.random_kov_instance(s["k"], s["n"], s["d"], s["density"], rng)


def _tsp_base(rng, shape=None):
    s = {**TSP_SHAPE, **(shape or {})}
    inst = tsp.random_tsp_instance(s["cities"], rng, scale=1000.0)
    return tsp.TspTask(inst, tsp.tsp_derive_threshold(inst, s["alpha"])), s["restarts"]


def _supply_task(cls, rng, ctx, shape=None, item=None):
    """A contextualized k-OV / TSP block task plus its restart budget."""
    if item is None:
        item = _kov_instance(rng, shape) if cls is TaskClass.KOV else _tsp_base(rng, shape)[0]
    restarts = {**TSP_SHAPE, **(shape or {})}["restarts"]
    task = core.generate(cls, ctx, 1, TaskSupplyState.from_instances([item]), Fifo())
    return task, restarts


def _tsp_seed(task) -> int:
    return int.from_bytes(task.bound_context[:8], "big")


@lru_cache(maxsize=32)
def crypto_mining_ops(trials: int, diff: float, nonce_bits: int, seed: int, stream: str = "mining") -> np.ndarray:
    """Hashes to the first solution, bumping extra_nonce as needed, per fresh context."""
    rng = probe_rng(stream, seed)
    return np.array([cp.mine(random_context(rng, i + 1), diff, nonce_bits).hashes for i in range(trials)], dtype=float)


def solve_ops_sample(backend, trials: int, seed: int, difficulty=1.0, nonce_bits: int = DEFAULT_BITS,
                     shape=None, stream: str = "solve_ops") -> np.ndarray:
    """Op counts to solve ``trials`` freshly generated tasks of one difficulty.

    TSP keeps one instance and varies the context (and so the relabelling
    and the solver seed); k-OV draws a fresh instance of the same shape.
    """
    cls = TaskClass.parse(backend)
    if cls is TaskClass.CRYPTOPUZZLE:
        return crypto_mining_ops(trials, float(difficulty), nonce_bits, seed, stream)
    rng = probe_rng(stream, seed)
    fixed = _tsp_base(rng, shape)[0] if cls is TaskClass.TSP else None
    out = []
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        task, restarts = _supply_task(cls, rng, ctx, shape, fixed)
        total = 0
        for _ in range(64):
            res = core.solve(task, restarts if cls is TaskClass.TSP else None, _tsp_seed(task))
            total += res.ops
            if res.solved:
                break
            ctx = ctx.bump()
            task, restarts = _supply_task(cls, rng, ctx, shape, fixed)
        out.append(total)
    return np.array(out, dtype=float)


def probe_variability(backend, difficulty=1.0, trials: int = 1000, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                      shape=None) -> ProbeReport:
    """Coefficient of variation of solve op counts."""
    if trials < 100:
        raise InsufficientData("variability needs >= 100 trials")
    cls = TaskClass.parse(backend)
    ops = solve_ops_sample(cls, trials, seed, difficulty, nonce_bits, shape)
    value = cv(ops)
    se = bootstrap_stderr(ops, cv, probe_rng("variability_boot", seed))
    verdict = verdict_if(cls is TaskClass.CRYPTOPUZZLE, abs(value - 1) <= 0.1)
    return ProbeReport("btp.variability", f"cv_solve_ops_{cls.value}", value, trials, se, "bootstrap_stderr",
                       verdict, {"mean_ops": float(ops.mean())})


def probe_hardness(backend, difficulty=1.0, trials: int = 1000, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                   shape=None, cutoff: float = 0.01) -> ProbeReport:
    """Share of tasks solved in under ``cutoff`` of the mean op count ("simple" tasks)."""
    cls = TaskClass.parse(backend)
    ops = solve_ops_sample(cls, trials, seed, difficulty, nonce_bits, shape)
    frac = float(np.mean(ops < cutoff * ops.mean()))
    return ProbeReport("btp.rate_a", f"simple_task_fraction_{cls.value}", frac, trials,
                       math.sqrt(frac * (1 - frac) / trials), "stderr", Verdict.REPORT_ONLY,
                       {"cutoff": cutoff, "expected_exponential": -math.expm1(-cutoff)})


def probe_tractability(backend, difficulty=1.0, trials: int = 1000, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                       shape=None) -> ProbeReport:
    """99th percentile of solve ops over the mean; ln(100) for an exponential law."""
    cls = TaskClass.parse(backend)
    ops = solve_ops_sample(cls, trials, seed, difficulty, nonce_bits, shape)
    stat = lambda x: float(np.quantile(x, 0.99) / x.mean())  # noqa: E731
    return ProbeReport("btp.timeliness_c", f"p99_over_mean_{cls.value}", stat(ops), trials,
                       bootstrap_stderr(ops, stat, probe_rng("tractability_boot", seed)), "bootstrap_stderr",
                       Verdict.REPORT_ONLY, {"exponential_reference": math.log(100.0)})


def probe_solvability(backend, difficulty=1.0, trials: int = 1000, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                      shape=None) -> ProbeReport:
    """Fraction of single-context tasks with no solution in reach.

    For cryptopuzzles this is the whole nonce space coming up empty, to be
    compared with ``p_no_solution``; k-OV always has a (possibly empty)
    answer; TSP reports the share exhausting its restart budget.
    """
    cls = TaskClass.parse(backend)
    rng = probe_rng("solvability", seed)
    misses = 0
    expected = None
    if cls is TaskClass.CRYPTOPUZZLE:
        expected = cp.p_no_solution(difficulty, nonce_bits)
        for i in range(trials):
            task = cp.puzzle_generate(context_digest(random_context(rng, i + 1)), difficulty, nonce_bits)
            proof, _ = cp.puzzle_solve(task)
            misses += proof is None
    else:
        fixed = _tsp_base(rng, shape)[0] if cls is TaskClass.TSP else None
        for i in range(trials):
            task, restarts = _supply_task(cls, rng, random_context(rng, i + 1), shape, fixed)
            res = core.solve(task, restarts if cls is TaskClass.TSP else None, _tsp_seed(task))
            misses += not res.solved
    p = misses / trials
    se = math.sqrt(p * (1 - p) / trials) if trials else 0.0
    declared = expected is not None
    ok = declared and abs(p - expected) <= max(3 * math.sqrt(expected * (1 - expected) / trials), 1e-12)
    if cls is TaskClass.KOV:
        declared, ok = True, misses == 0
    return ProbeReport("btp.timeliness_b", f"p_exhausted_{cls.value}", p, trials, se, "stderr",
                       verdict_if(declared, ok), {"analytic": expected})


def probe_context_sensitivity(backend, trials: int = 200, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                              shape=None) -> list:
    """Distinct task contents across contexts, and rejection of proofs re-stamped onto another context.

    A supplied k-OV instance is the same whatever the context, so a proof
    for it carries over; this is measured, not asserted.
    """
    cls = TaskClass.parse(backend)
    rng = probe_rng("context_sensitivity", seed)
    fixed = None
    if cls is TaskClass.KOV:
        fixed = _kov_instance(rng, {**(shape or {}), "n": 8, "d": 8})
    elif cls is TaskClass.TSP:
        fixed = _tsp_base(rng, {**(shape or {}), "cities": 10})[0]
    encodings = set()
    rejected = trials_done = 0
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        other = BlockContext(ctx.prev_block_id, ctx.payload_digest, ctx.height, ctx.timestamp, ctx.miner_id,
                             ctx.extra_nonce + 1)
        if cls is TaskClass.CRYPTOPUZZLE:
            a = core.generate(cls, ctx, 1, nonce_bits=min(nonce_bits, 12))
            b = core.generate(cls, other, 1, nonce_bits=min(nonce_bits, 12))
        else:
            a, _ = _supply_task(cls, rng, ctx, shape, fixed)
            b, _ = _supply_task(cls, rng, other, shape, fixed)
        encodings.add(_task_bytes(a))
        res = core.solve(a, None, _tsp_seed(a))
        if not res.solved:
            continue
        trials_done += 1
        replay = core.ProofOfComputation(cls, res.poc.solution_payload, b.bound_context, res.poc.solve_stats)
        rejected += not core.verify(b, replay) and not core.verify(b, res.poc)
    distinct = len(encodings) / trials
    rej = rejected / trials_done if trials_done else float("nan")
    crypto = cls is TaskClass.CRYPTOPUZZLE
    return [
        ProbeReport("btp.rate_b", f"distinct_task_fraction_{cls.value}", distinct, trials, 0.0, "exact",
                    verdict_if(crypto, distinct == 1.0)),
        ProbeReport("btp.rate_b", f"replay_rejection_rate_{cls.value}", rej, trials_done, 0.0, "exact",
                    verdict_if(crypto and trials_done > 0, rej == 1.0)),
    ]


def _task_bytes(task) -> bytes:
    """Task content without the context digest it is stamped with."""
    return task.payload.to_bytes()


class _HashCache:
    """Remembers every (prefix, nonce) hashed so a later solve could reuse it."""

    def __init__(self):
        self.seen = {}
        self.hits = 0

    def scan(self, task: cp.PuzzleTask) -> int:
        ops = 0
        for nonce in range(task.nonce_space):
            key = (task.bound_context, nonce)
            h = self.seen.get(key)
            if h is None:
                h = cp.puzzle_hash(task.bound_context, nonce)
                self.seen[key] = h
                ops += 1
            else:
                self.hits += 1
            if h <= task.target_bytes:
                break
        return ops


def probe_amortization(backend, overlap_fraction: float = 0.5, seed: int = 0, trials: int = 20,
                       nonce_bits: int = 12, shape=None) -> ProbeReport:
    """Cold / warm op ratio for a second task that shares structure with a solved first one.

    k-OV: B keeps A's sets 2..k and the first ``overlap_fraction`` of U_1,
    and the warm solver keeps a per-row memo.  Cryptopuzzle: A and B share
    every context field but the extra nonce, and the warm solver keeps
    every hash it computed; nothing carries over because the hash input
    starts with the context digest.
    """
    if not 0 <= overlap_fraction <= 1:
        raise ValueError("overlap_fraction must be in [0, 1]")
    cls = TaskClass.parse(backend)
    rng = probe_rng("amortization", seed)
    if cls is TaskClass.KOV:
        cold_ops = warm_ops = pair_cold = pair_warm = 0
        hits = 0
        for _ in range(trials):
            a = _kov_instance(rng, shape)
            fresh = _kov_instance(rng, shape)
            keep = int(round(overlap_fraction * a.n))
            u1 = np.vstack([a.sets[0][:keep], fresh.sets[0][keep:]])
            b = kov.KovInstance((u1,) + a.sets[1:])
            _, ops_a = kov.kov_solve(a)
            _, ops_b = kov.kov_solve(b)
            memo = kov.KovMemo()
            _, warm_a = kov.kov_solve(a, memo=memo)
            _, warm_b = kov.kov_solve(b, memo=memo)
            hits += memo.hits
            cold_ops += ops_b
            warm_ops += warm_b
            pair_cold += ops_a + ops_b
            pair_warm += warm_a + warm_b
        ratio = cold_ops / warm_ops if warm_ops else math.inf
        return ProbeReport("btp.rate_c", "cold_over_warm_ops_kov", ratio, trials, 0.0, "exact", Verdict.REPORT_ONLY,
                           {"pair_speedup": pair_cold / pair_warm if pair_warm else math.inf, "memo_hits": hits,
                            "overlap_fraction": overlap_fraction})
    if cls is not TaskClass.CRYPTOPUZZLE:
        raise ValueError("amortization probe supports cryptopuzzle and kov")
    cold = []
    warm = []
    hits = 0
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        ta = cp.puzzle_generate(context_digest(ctx), 1, nonce_bits)
        tb = cp.puzzle_generate(context_digest(ctx.bump()), 1, nonce_bits)
        cold.append(_HashCache().scan(tb))
        cache = _HashCache()
        cache.scan(ta)
        warm.append(cache.scan(tb))
        hits += cache.hits
    cold, warm = np.array(cold, float), np.array(warm, float)
    ratio = cold.sum() / warm.sum()
    diffs = cold - warm
    se = float(diffs.std(ddof=1) / math.sqrt(trials) / warm.mean()) if trials > 1 else 0.0
    return ProbeReport("btp.rate_c", "cold_over_warm_ops_cryptopuzzle", ratio, trials, se, "stderr",
                       verdict_if(True, 0.95 <= ratio <= 1.05), {"cache_hits": hits})


def probe_switchability(backend, difficulty=1.0, elapsed_fraction: float = 0.5, trials: int = 2000, seed: int = 0,
                        nonce_bits: int = 12, shape=None) -> ProbeReport:
    """E[remaining | switch to a fresh task] - E[remaining | continue], in units of a mean solve.

    Sampled tasks are split in two independent halves: one estimates the
    residual work of tasks still unsolved after ``elapsed_fraction`` of a
    mean solve, the other the full work of a fresh task.  k-OV progress is
    deterministic, so its penalty is read off the enumeration directly.
    """
    if not 0 <= elapsed_fraction < 1:
        raise ValueError("elapsed_fraction must be in [0, 1)")
    cls = TaskClass.parse(backend)
    pid = "btp.switch_c"
    stat = f"switch_penalty_fraction_{cls.value}"
    if elapsed_fraction == 0:
        return ProbeReport(pid, stat, 0.0, trials, 0.0, "exact", verdict_if(True, True), {"elapsed_fraction": 0.0})
    if cls is TaskClass.KOV:
        rng = probe_rng("switchability", seed)
        pens = []
        for _ in range(max(1, min(trials, 20))):
            inst = _kov_instance(rng, shape)
            _, full = kov.kov_solve(inst)
            _, done = kov.kov_solve(inst, budget=int(elapsed_fraction * full))
            cont = full - done
            pens.append((full - cont) / full)
        pens = np.array(pens)
        return ProbeReport(pid, stat, float(pens.mean()), pens.size, float(pens.std(ddof=1) / math.sqrt(pens.size))
                           if pens.size > 1 else 0.0, "stderr", Verdict.REPORT_ONLY,
                           {"elapsed_fraction": elapsed_fraction})
    ops = solve_ops_sample(cls, trials, seed, difficulty, nonce_bits, shape, stream="switchability")
    half = ops.size // 2
    first, second = ops[:half], ops[half:]
    m = ops.mean()
    e = elapsed_fraction * m
    survivors = first[first > e] - e
    if survivors.size < 2:
        raise InsufficientData("too few tasks still unsolved at the elapsed point")
    diff = second.mean() - survivors.mean()
    se = math.sqrt(second.var(ddof=1) / second.size + survivors.var(ddof=1) / survivors.size)
    value, se = diff / m, se / m
    declared = cls is TaskClass.CRYPTOPUZZLE
    return ProbeReport(pid, stat, float(value), int(survivors.size + second.size), float(se), "stderr",
                       verdict_if(declared, value <= 2 * se),
                       {"elapsed_fraction": elapsed_fraction, "within_2se_of_zero": abs(value) <= 2 * se})


def probe_verification_ratio(backend, difficulty=1.0, trials: int = 20, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                             shape=None, spot_fraction: float = 0.1) -> list:
    """Mean verify ops over mean solve ops; k-OV reports Full and SpotCheck separately."""
    if trials < 20:
        raise InsufficientData("verification ratio needs >= 20 trials")
    cls = TaskClass.parse(backend)
    rng = probe_rng("verification_ratio", seed)
    fixed = None
    if cls is TaskClass.TSP:
        fixed = _tsp_base(rng, shape)[0]
    modes = [("full", FULL)] + ([("spot", SpotCheck(spot_fraction))] if cls is TaskClass.KOV else [])
    solve_ops = []
    verify_ops = {name: [] for name, _ in modes}
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        for _ in range(64):
            if cls is TaskClass.CRYPTOPUZZLE:
                task = core.generate(cls, ctx, difficulty, nonce_bits=nonce_bits)
                res = core.solve(task)
            else:
                task, restarts = _supply_task(cls, rng, ctx, shape, fixed)
                res = core.solve(task, restarts if cls is TaskClass.TSP else None, _tsp_seed(task))
            if res.solved:
                break
            ctx = ctx.bump()
        solve_ops.append(res.ops)
        for name, mode in modes:
            c = OpCount()
            core.verify(task, res.poc, mode, c)
            verify_ops[name].append(c.ops)
    s = np.array(solve_ops, float)
    out = []
    for name, _ in modes:
        v = np.array(verify_ops[name], float)
        ratio = v.mean() / s.mean()
        se = ratio * math.sqrt((s.std(ddof=1) / s.mean()) ** 2 / s.size + (v.std(ddof=1) / max(v.mean(), 1e-300)) ** 2
                               / v.size)
        out.append(ProbeReport("btp.verif_b", f"verify_over_solve_ops_{cls.value}_{name}", float(ratio), trials,
                               float(se), "stderr", Verdict.REPORT_ONLY,
                               {"mean_verify_ops": float(v.mean()), "mean_solve_ops": float(s.mean())}))
    return out


def _generation_ops(cls, task) -> int:
    # one context hash; TSP also moves every city once
    return 1 + (task.payload.instance.n if cls is TaskClass.TSP else 0)


def probe_generation_ratio(backend, difficulty=1.0, trials: int = 20, seed: int = 0, nonce_bits: int = DEFAULT_BITS,
                           shape=None) -> ProbeReport:
    """Generate cost over solve cost, in op counts."""
    cls = TaskClass.parse(backend)
    rng = probe_rng("generation_ratio", seed)
    fixed = _tsp_base(rng, shape)[0] if cls is TaskClass.TSP else None
    gen, sol = [], []
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        if cls is TaskClass.CRYPTOPUZZLE:
            task = core.generate(cls, ctx, difficulty, nonce_bits=nonce_bits)
            res = core.solve(task)
        else:
            task, restarts = _supply_task(cls, rng, ctx, shape, fixed)
            res = core.solve(task, restarts if cls is TaskClass.TSP else None, _tsp_seed(task))
        gen.append(_generation_ops(cls, task))
        sol.append(res.ops)
    g, s = np.array(gen, float), np.array(sol, float)
    ratio = g.mean() / s.mean()
    se = ratio * s.std(ddof=1) / s.mean() / math.sqrt(s.size)
    return ProbeReport("btp.switch_b", f"generate_over_solve_ops_{cls.value}", float(ratio), trials, float(se),
                       "stderr", Verdict.REPORT_ONLY)


# soundness and completeness

def _oracle_crypto(task: cp.PuzzleTask, payload: bytes) -> bool:
    if len(payload) != 8:
        return False
    nonce = int.from_bytes(payload, "big")
    if nonce >= 1 << task.nonce_bits:
        return False
    digest = hashlib.sha256(task.bound_context + payload).digest()
    return int.from_bytes(digest, "big") <= task.target


def brute_force_kov(instance: kov.KovInstance) -> list:
    """Plain nested-loop reference; independent of the packed solver."""
    sets = [a.astype(int).tolist() for a in instance.sets]
    out = []

    def rec(prefix, partial):
        s = len(prefix)
        if s == instance.k:
            if not any(partial):
                out.append(tuple(prefix))
            return
        for i, vec in enumerate(sets[s]):
            rec(prefix + [i], [p & v for p, v in zip(partial, vec)] if partial is not None else list(vec))

    rec([], None)
    return out


def _oracle_kov(instance: kov.KovInstance, payload: bytes, truth: list) -> bool:
    try:
        proof = kov.KovProof.from_bytes(payload, instance.k)
    except ValueError:
        return False
    tuples = list(proof.tuples)
    if any(len(t) != instance.k or any(not 0 <= i < n for i, n in zip(t, instance.sizes)) for t in tuples):
        return False
    if tuples != sorted(set(tuples)):
        return False
    if proof.claimed_complete:
        return tuples == truth
    good = set(truth)
    return all(t in good for t in tuples)


def _oracle_tsp(task: tsp.TspTask, payload: bytes) -> bool:
    if len(payload) % 4:
        return False
    order = [int.from_bytes(payload[i:i + 4], "big") for i in range(0, len(payload), 4)]
    n = task.instance.n
    if sorted(order) != list(range(n)):
        return False
    c = task.instance.coords.tolist()
    total = 0.0
    for a, b in zip(order, order[1:] + order[:1]):
        d = math.hypot(c[a][0] - c[b][0], c[a][1] - c[b][1])
        total += float(int(d + 0.5)) if task.instance.mode is tsp.DistanceMode.EUC_2D_ROUNDED else d
    return total <= task.t_d + tsp.COST_RTOL * max(1.0, task.t_d)


def _mutate(payload: bytes, rng) -> bytes:
    data = bytearray(payload)
    if not data:
        return bytes([int(rng.integers(1, 256))])
    i = int(rng.integers(len(data)))
    data[i] ^= 1 << int(rng.integers(8))
    return bytes(data)


def probe_soundness_completeness(backend, trials: int = 1000, seed: int = 0, nonce_bits: int = 12,
                                 shape=None) -> list:
    """False-accept and false-reject rates of Full verification.

    Each trial solves a fresh task, verifies the untouched proof (any
    rejection is a false reject), flips one random bit of the payload and
    verifies again; an acceptance the independent oracle disagrees with
    is a false accept.
    """
    if trials < 100:
        raise InsufficientData("soundness needs >= 100 trials")
    cls = TaskClass.parse(backend)
    rng = probe_rng("soundness", seed)
    kshape = {"k": 2, "n": 8, "d": 6, "density": 0.5, **(shape or {})}
    tshape = {"cities": 8, "alpha": 1.05, "restarts": 5, **(shape or {})}
    false_accept = false_reject = invalid = 0
    for i in range(trials):
        ctx = random_context(rng, i + 1)
        for _ in range(64):
            if cls is TaskClass.CRYPTOPUZZLE:
                task = core.generate(cls, ctx, 1, nonce_bits=nonce_bits)
                res = core.solve(task)
            elif cls is TaskClass.KOV:
                task, _ = _supply_task(cls, rng, ctx, kshape)
                res = core.solve(task)
            else:
                base, restarts = _tsp_base(rng, tshape)
                task, _ = _supply_task(cls, rng, ctx, tshape, base)
                res = core.solve(task, restarts, _tsp_seed(task))
            if res.solved:
                break
            ctx = ctx.bump()
        false_reject += not core.verify(task, res.poc)
        mutated = res.poc.with_payload(_mutate(res.poc.solution_payload, rng))
        if cls is TaskClass.CRYPTOPUZZLE:
            truth = _oracle_crypto(task.payload, mutated.solution_payload)
        elif cls is TaskClass.KOV:
            truth = _oracle_kov(task.payload, mutated.solution_payload, brute_force_kov(task.payload))
        else:
            truth = _oracle_tsp(task.payload, mutated.solution_payload)
        accepted = core.verify(task, mutated)
        invalid += not truth
        false_accept += accepted and not truth
        false_reject += truth and not accepted
    fa = false_accept / max(invalid, 1)
    fr = false_reject / (trials + (trials - invalid))
    ok = false_accept == 0 and false_reject == 0
    return [
        ProbeReport("btp.sound", f"false_accept_rate_{cls.value}_full", fa, invalid,
                    math.sqrt(fa * (1 - fa) / max(invalid, 1)), "stderr", verdict_if(True, ok),
                    {"false_accepts": false_accept}),
        ProbeReport("btp.compl", f"false_reject_rate_{cls.value}_full", fr, 2 * trials - invalid,
                    math.sqrt(fr * (1 - fr) / (2 * trials - invalid)), "stderr", verdict_if(True, ok),
                    {"false_rejects": false_reject}),
    ]


def spot_check_instance(tuples: int = 100):
    """Instance and proof with ``tuples`` listed pairs of which exactly one is not orthogonal."""
    m = int(math.isqrt(tuples - 1)) + 1
    zeros = np.zeros((m, 4), dtype=np.uint8)
    ones = np.ones((1, 4), dtype=np.uint8)
    inst = kov.KovInstance((np.vstack([zeros, ones]), np.vstack([zeros, ones])))
    good = [(i, j) for i in range(m + 1) for j in range(m + 1) if (i, j) != (m, m)]
    chosen = sorted(good[: tuples - 1] + [(m, m)])
    return inst, kov.KovProof(tuple(chosen), claimed_complete=False)


def expected_spot_miss(tuples: int, fraction: float, bad: int = 1) -> float:
    """Chance that a sample of ceil(f*m) tuples drawn without replacement misses all bad ones."""
    m = tuples
    s = math.ceil(fraction * m)
    return math.comb(m - bad, s) / math.comb(m, s)


def probe_spot_check(fraction: float = 0.1, tuples: int = 100, trials: int = 1000, seed: int = 0) -> ProbeReport:
    """False-accept rate of SpotCheck on a proof with a single bad tuple."""
    inst, proof = spot_check_instance(tuples)
    rng = probe_rng("spot_check", seed)
    seeds = rng.integers(0, 2**63, size=trials)
    accepts = sum(kov.kov_verify(inst, proof, SpotCheck(fraction, int(s))) for s in seeds)
    rate = accepts / trials
    expected = expected_spot_miss(tuples, fraction)
    return ProbeReport("btp.sound", f"spot_check_false_accept_f{fraction:g}", rate, trials,
                       math.sqrt(rate * (1 - rate) / trials), "stderr", verdict_if(True, abs(rate - expected) <= 0.05),
                       {"expected": expected})


def probe_adjustability(backend, direction: str = "lower", trials: int = 200, seed: int = 0, nonce_bits: int = 12,
                        shape=None) -> ProbeReport:
    """Whether the difficulty knob moves solve work the right way.

    ``lower`` raises difficulty (cryptopuzzle: D -> 2D; k-OV: batch two
    instances; TSP: tighten alpha 2 -> 1.1), ``upper`` lowers it.  For the
    cryptopuzzle and k-OV the value is the op-count ratio hard/easy; for
    TSP it is success(easy) - success(hard) over random instances.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    cls = TaskClass.parse(backend)
    pid = "btp.adj" if direction == "lower" else "btp.adj2"
    rng = probe_rng(f"adjustability_{direction}", seed)
    if cls is TaskClass.CRYPTOPUZZLE:
        easy = crypto_mining_ops(trials, 1.0, nonce_bits, seed, f"adj_easy_{direction}")
        hard = crypto_mining_ops(trials, 2.0, nonce_bits, seed, f"adj_hard_{direction}")
        ratio = hard.mean() / easy.mean()
        se = ratio * math.sqrt(cv(hard) ** 2 / trials + cv(easy) ** 2 / trials)
        return ProbeReport(pid, "hard_over_easy_ops_cryptopuzzle", float(ratio), trials, float(se), "stderr",
                           verdict_if(True, ratio > 1), {"analytic": 2.0})
    if cls is TaskClass.KOV:
        kshape = {**KOV_SHAPE, "n": 16, "d": 16, **(shape or {})}
        worse = 0
        ratios = []
        for _ in range(max(1, min(trials, 20))):
            a = _kov_instance(rng, kshape)
            _, base = kov.kov_solve(a)
            if direction == "lower":
                _, other = kov.kov_solve(kov.kov_batch([a, _kov_instance(rng, kshape)]))
                ratios.append(other / base)
                worse += not other > base
            else:
                parts = kov.kov_partition(a, 2)
                _, other = kov.kov_solve(parts[0])
                ratios.append(base / other)
                worse += not other < base
        r = np.array(ratios)
        return ProbeReport(pid, f"hard_over_easy_ops_kov_{'batch' if direction == 'lower' else 'partition'}",
                           float(r.mean()), r.size, 0.0, "exact", verdict_if(True, worse == 0))
    tshape = {**TSP_SHAPE, **(shape or {})}
    n_inst = max(1, min(trials, 100))
    wins = {1.1: 0, 2.0: 0}
    for _ in range(n_inst):
        inst = tsp.random_tsp_instance(tshape["cities"], rng, scale=1000.0)
        base = tsp.baseline_cost(inst, seed=int(rng.integers(2**31)))
        for alpha in wins:
            t = tsp.TspTask(inst, alpha * base * 0.9)
            tour, _, _ = tsp.tsp_solve(t, int(rng.integers(2**31)), 1)
            wins[alpha] += tour is not None
    gap = (wins[2.0] - wins[1.1]) / n_inst
    return ProbeReport(pid, "success_gap_alpha2_vs_1.1_tsp", float(gap), n_inst,
                       math.sqrt(0.25 / n_inst), "stderr", verdict_if(True, gap >= 0),
                       {"success": {str(k): v / n_inst for k, v in wins.items()}})
