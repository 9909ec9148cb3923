"""Probes computed from an EventTrace: timing, forks and backbone properties."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..errors import InsufficientData
from ..sim.chain import GENESIS_ID
from ..sim.trace import EventTrace, main_chain, proposals
from .report import ProbeReport, Verdict, verdict_if

GENESIS_SHORT = GENESIS_ID[:8].hex()
MIN_INTERBLOCK_BLOCKS = 500
MIN_FAIRNESS_BLOCKS = 2000


def _is_crypto(trace: EventTrace) -> bool:
    return trace.metadata.get("task_class", "cryptopuzzle") == "cryptopuzzle"


def _miners(trace: EventTrace) -> list:
    return list(trace.metadata.get("miners", []))


def _honest_ids(trace: EventTrace) -> set:
    miners = _miners(trace)
    if not miners:
        return {e.miner for e in trace.events if e.event == "BlockProposed"}
    return {m["id"] for m in miners if m.get("honesty", "honest") == "honest"}


def interblock_times(trace: EventTrace) -> np.ndarray:
    t = np.array([e.t for e in main_chain(trace)])
    return np.diff(np.r_[0.0, t])


def probe_interblock(trace: EventTrace, min_blocks: int = MIN_INTERBLOCK_BLOCKS) -> ProbeReport:
    """Main-chain gaps against an exponential law with the sample mean."""
    gaps = interblock_times(trace)
    if gaps.size < min_blocks:
        raise InsufficientData(f"need >= {min_blocks} appended blocks, got {gaps.size}")
    mean = float(gaps.mean())
    c = float(gaps.std(ddof=1) / mean) if mean > 0 else 0.0
    if mean > 0:
        ks = stats.kstest(gaps, "expon", args=(0, mean))
        ks_stat, p = float(ks.statistic), float(ks.pvalue)
    else:
        ks_stat, p = 1.0, 0.0
    crypto = _is_crypto(trace)
    verdict = verdict_if(crypto, 0.9 <= c <= 1.1 and p > 0.01)
    return ProbeReport(
        "bpp.interblock_exponential", "cv", c, int(gaps.size), p, "ks_p", verdict,
        {"mean": mean, "ks_statistic": ks_stat, "p99_over_mean": float(np.quantile(gaps, 0.99) / mean) if mean else 0.0,
         "low_variability": c < 0.05},
    )


def probe_fork_rate(trace: EventTrace) -> ProbeReport:
    """Orphaned proposals per main-chain block."""
    props = proposals(trace)
    chain = main_chain(trace)
    appended = len(chain)
    orphans = len(props) - appended
    rate = orphans / appended if appended else 0.0
    se = math.sqrt(orphans) / appended if appended else 0.0
    return ProbeReport("bpp.fork_rate", "orphans_per_block", rate, appended, se, "stderr", Verdict.REPORT_ONLY,
                       {"proposed": len(props), "orphans": orphans})


class _Replay:
    """Per-node head history rebuilt from BlockAppended rows."""

    def __init__(self, trace: EventTrace):
        self.parent = {GENESIS_SHORT: None}
        self.height = {GENESIS_SHORT: 0}
        for e in trace.events:
            if e.event == "BlockProposed":
                self.parent[e.block_id] = e.parent_id
                self.height[e.block_id] = e.height

    def lca(self, a: str, b: str) -> str:
        ha, hb = self.height[a], self.height[b]
        while ha > hb:
            a = self.parent[a]
            ha -= 1
        while hb > ha:
            b = self.parent[b]
            hb -= 1
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def divergence(self, a: str, b: str) -> int:
        """Blocks to drop from the longer of two chains to reach their common prefix."""
        return max(self.height[a], self.height[b]) - self.height[self.lca(a, b)]


def probe_common_prefix(trace: EventTrace, T: int = 6) -> ProbeReport:
    """Instants where two honest nodes disagree deeper than ``T`` blocks.

    A companion count, per node and over time, of head switches that drop
    more than ``T`` blocks of that node's earlier chain is reported in
    ``details`` as the future self-consistency extra.
    """
    honest = sorted(_honest_ids(trace))
    rp = _Replay(trace)
    heads = {m: GENESIS_SHORT for m in honest}
    instants = violations = fsc = 0
    max_div = max_reorg = 0
    for e in trace.events:
        if e.event != "BlockAppended" or e.miner not in heads:
            continue
        old = heads[e.miner]
        if e.height <= rp.height[old]:
            continue
        heads[e.miner] = e.block_id
        if e.parent_id != old:
            depth = rp.height[old] - rp.height[rp.lca(old, e.block_id)]
            max_reorg = max(max_reorg, depth)
            fsc += depth > T
        instants += 1
        worst = max((rp.divergence(e.block_id, heads[o]) for o in honest if o != e.miner), default=0)
        max_div = max(max_div, worst)
        violations += worst > T
    frac = violations / instants if instants else 0.0
    se = math.sqrt(frac * (1 - frac) / instants) if instants else 0.0
    return ProbeReport(
        "backbone.common_prefix", f"violations_T{T}", float(violations), instants, se, "stderr",
        Verdict.REPORT_ONLY,
        {"violation_fraction": frac, "max_divergence": max_div, "fsc_violations": fsc, "max_reorg_depth": max_reorg},
    )


def probe_chain_quality(trace: EventTrace, T: int = 100) -> ProbeReport:
    """Minimum honest fraction over windows of ``T`` consecutive main-chain blocks."""
    honest = _honest_ids(trace)
    flags = np.array([e.miner in honest for e in main_chain(trace)], dtype=float)
    if flags.size == 0:
        raise InsufficientData("empty main chain")
    w = min(T, flags.size)
    windows = np.convolve(flags, np.ones(w), mode="valid") / w
    overall = float(flags.mean())
    se = math.sqrt(overall * (1 - overall) / flags.size)
    return ProbeReport("backbone.chain_quality", f"min_honest_fraction_T{w}", float(windows.min()), int(flags.size),
                       se, "stderr", Verdict.REPORT_ONLY, {"honest_fraction": overall})


def probe_chain_growth(trace: EventTrace, tolerance: float = 0.1) -> ProbeReport:
    """Main-chain blocks per second, measured from the first retarget on."""
    chain = main_chain(trace)
    if len(chain) < 2:
        raise InsufficientData("need at least two main-chain blocks")
    target = float(trace.metadata.get("target_interblock", 600.0))
    initial = trace.metadata.get("initial_difficulty")
    start = 0
    if trace.metadata.get("retarget") and initial is not None:
        start = next((i for i, e in enumerate(chain) if e.difficulty != initial), 0)
    start = min(start, len(chain) - 2)
    a, b = chain[start], chain[-1]
    blocks = b.height - a.height
    growth = blocks / (b.t - a.t) if b.t > a.t else math.inf
    ratio = growth * target
    declared = bool(trace.metadata.get("retarget")) and _is_crypto(trace)
    return ProbeReport(
        "backbone.chain_growth", "growth_over_target_rate", ratio, blocks, ratio / math.sqrt(max(blocks, 1)),
        "stderr", verdict_if(declared, abs(ratio - 1) <= tolerance),
        {"blocks_per_second": growth, "from_height": a.height},
    )


def probe_fairness(trace: EventTrace, min_blocks: int = MIN_FAIRNESS_BLOCKS) -> ProbeReport:
    """Slope of log(main-chain share) on log(power share).

    Zero counts get a +0.5 continuity correction so a miner that never
    wins stays on the plot instead of breaking the logarithm.
    """
    miners = _miners(trace)
    powers = {m["id"]: float(m["power"]) for m in miners}
    if len(set(powers.values())) < 3:
        raise InsufficientData("fairness needs at least three distinct power levels")
    chain = main_chain(trace)
    if len(chain) < min_blocks:
        raise InsufficientData(f"need >= {min_blocks} main-chain blocks, got {len(chain)}")
    counts = {m: 0 for m in powers}
    for e in chain:
        counts[e.miner] = counts.get(e.miner, 0) + 1
    ids = sorted(powers)
    c = np.array([counts[i] for i in ids], dtype=float)
    p = np.array([powers[i] for i in ids])
    share = (c + 0.5) / (c + 0.5).sum()
    fit = stats.linregress(np.log(p / p.sum()), np.log(share))
    top = ids[int(np.argmax(p))]
    return ProbeReport(
        "btp.fairness_a", "loglog_slope", float(fit.slope), len(chain), float(fit.stderr), "stderr",
        verdict_if(_is_crypto(trace), 0.9 <= fit.slope <= 1.1),
        {"shares": {i: counts[i] / len(chain) for i in ids}, "top_share": counts[top] / len(chain),
         "r2": float(fit.rvalue**2)},
    )


def window_means(trace: EventTrace, window: int | None = None) -> np.ndarray:
    """Mean main-chain gap per retarget window."""
    w = int(window or trace.metadata.get("retarget_window", 2016))
    t = np.r_[0.0, [e.t for e in main_chain(trace)]]
    full = (t.size - 1) // w
    return np.array([(t[(j + 1) * w] - t[j * w]) / w for j in range(full)])


def probe_retarget(trace: EventTrace, change_height: int, windows: int = 3, tolerance: float = 0.1) -> ProbeReport:
    """Windows after a power change until the mean gap is back within ``tolerance`` of target.

    The window containing ``change_height`` counts as the first.
    """
    w = int(trace.metadata.get("retarget_window", 2016))
    target = float(trace.metadata.get("target_interblock", 600.0))
    means = window_means(trace, w)
    j0 = change_height // w
    if means.size <= j0:
        raise InsufficientData("trace ends before the power change")
    needed = math.inf
    for j in range(j0, means.size):
        if abs(means[j] / target - 1) <= tolerance:
            needed = j - j0 + 1
            break
    after = means[j0:]
    return ProbeReport(
        "btp.adj", "windows_to_target", float(needed), int(after.size), 1.0 / math.sqrt(w), "window_rel_stderr",
        verdict_if(True, needed <= windows),
        {"window_means": [float(x) for x in after[: windows + 2]], "target": target},
    )
