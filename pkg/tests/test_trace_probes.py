import math

import pytest
from scipy import stats

from helpers import crypto, supplied
from puwbench.errors import InsufficientData
from puwbench.probes import (
    Verdict,
    probe_chain_growth,
    probe_chain_quality,
    probe_common_prefix,
    probe_fairness,
    probe_fork_rate,
    probe_interblock,
    probe_retarget,
    window_means,
)
from puwbench.probes.trace_probes import GENESIS_SHORT
from puwbench.sim.trace import Event, EventTrace
from puwbench.sim import reward_tally, run_scenario


@pytest.fixture(scope="module")
def long_trace():
    return run_scenario(crypto(1, 2, 4, blocks=10_000, seed=21))


def test_interblock_analytic_passes(long_trace):
    r = probe_interblock(long_trace)
    assert r.verdict is Verdict.PASS and r.n == 10_000
    assert 4.4 <= r.details["p99_over_mean"] <= 4.8


def test_interblock_too_short():
    with pytest.raises(InsufficientData):
        probe_interblock(run_scenario(crypto(1, blocks=10)))


def test_interblock_kov_equal_instances_low_variability():
    trace = run_scenario(supplied("kov", 1, blocks=500, count=500, n=8, d=8))
    r = probe_interblock(trace)
    assert r.value < 0.05 and r.details["low_variability"]
    assert r.verdict is Verdict.REPORT_ONLY


def test_single_miner_no_forks_no_violations():
    trace = run_scenario(crypto(1, blocks=200))
    assert probe_fork_rate(trace).value == 0
    for T in (0, 1, 6):
        assert probe_common_prefix(trace, T).value == 0


def test_isolated_miners_violate_common_prefix():
    trace = run_scenario(crypto(1, 1, blocks=100, delay=1e9))
    r = probe_common_prefix(trace, T=2)
    assert r.value > 0 and r.details["max_divergence"] > 2


def test_chain_quality_all_honest():
    assert probe_chain_quality(run_scenario(crypto(1, 2, blocks=300)), T=50).value == 1.0


def test_chain_quality_with_stubborn_quarter():
    fractions = []
    for seed in range(5):
        trace = run_scenario(crypto(3, 1, blocks=1000, seed=seed, stubborn=(1,)))
        r = probe_chain_quality(trace, T=100)
        assert r.verdict is Verdict.REPORT_ONLY
        fractions.append(r.details["honest_fraction"])
    assert min(fractions) >= 0.7


def test_chain_growth_after_first_retarget():
    trace = run_scenario(crypto(1, 3, blocks=3000, seed=8, retarget=True, retarget_window=64,
                                initial_difficulty=4.0))
    r = probe_chain_growth(trace)
    assert r.verdict is Verdict.PASS and r.details["from_height"] >= 64


def test_fairness_proportional(long_trace):
    r = probe_fairness(long_trace)
    assert r.verdict is Verdict.PASS
    assert 0.9 <= r.value <= 1.1


def test_fairness_needs_distinct_powers_and_blocks():
    with pytest.raises(InsufficientData):
        probe_fairness(run_scenario(crypto(1, 1, 2, blocks=100)))
    with pytest.raises(InsufficientData):
        probe_fairness(run_scenario(crypto(1, 2, 4, blocks=100)))


def test_equal_powers_uniform_shares():
    trace = run_scenario(crypto(1, 1, 1, blocks=3000, seed=13))
    counts = list(reward_tally(trace).values())
    assert stats.chisquare(counts).pvalue > 0.01


def test_fairness_kov_fastest_takes_all():
    trace = run_scenario(supplied("kov", 1, 2, 4, blocks=2000, count=2000, n=8, d=8))
    r = probe_fairness(trace)
    assert r.verdict is Verdict.REPORT_ONLY
    assert r.details["top_share"] > 0.95
    assert r.value > 2


def test_retarget_recovers_after_doubling():
    s = crypto(1, 1, blocks=64 * 12, seed=0, retarget=True, retarget_window=64, initial_difficulty=16.0,
               power_schedule=((320, 2.0),))
    r = probe_retarget(run_scenario(s), change_height=320)
    assert r.verdict is Verdict.PASS and r.value <= 3
    assert r.details["window_means"][0] < 0.6 * 600


def synthetic(gaps, w):
    t = 0.0
    trace = EventTrace(metadata={"retarget_window": w, "target_interblock": 10.0})
    parent = GENESIS_SHORT
    for h, g in enumerate(gaps, start=1):
        t += g
        trace.append(Event("BlockProposed", t, 0, f"b{h}", parent, h, 1.0))
        parent = f"b{h}"
    return trace


def test_retarget_window_counting():
    # windows of 4 blocks: on target, on target, halved (change inside), halved, 0.95, on target
    gaps = [10] * 8 + [5] * 8 + [9.5] * 4 + [10] * 4
    trace = synthetic(gaps, 4)
    assert list(window_means(trace)) == [10, 10, 5, 5, 9.5, 10]
    assert probe_retarget(trace, change_height=9).value == 3
    assert probe_retarget(trace, change_height=9, windows=2).verdict is Verdict.FAIL
    assert probe_retarget(synthetic([5] * 24, 4), change_height=9).value == math.inf


def test_retarget_probe_needs_data():
    with pytest.raises(InsufficientData):
        probe_retarget(run_scenario(crypto(1, blocks=100, retarget=True, retarget_window=64)), change_height=640)
