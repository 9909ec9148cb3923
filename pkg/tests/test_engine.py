import numpy as np
import pytest

from helpers import crypto, supplied
from puwbench.probes import probe_fork_rate
from puwbench.sim import Mode, NetworkSpec, main_chain, reward_tally, run_scenario, simulate
from puwbench.sim.trace import EVENT_KINDS


def test_single_miner_no_forks():
    trace = run_scenario(crypto(1, blocks=100))
    chain = main_chain(trace)
    assert len(chain) == 100 and chain[-1].height == 100
    assert trace.count("BlockProposed") == 100 == trace.count("BlockAppended")
    assert probe_fork_rate(trace).value == 0


def test_event_kinds_and_order():
    trace = run_scenario(crypto(1, 2, blocks=200, delay=5.0))
    assert {e.event for e in trace.events} <= set(EVENT_KINDS)
    ts = [e.t for e in trace.events]
    assert ts == sorted(ts)


def test_equal_miners_share_half():
    trace = run_scenario(crypto(1, 1, blocks=10_000, seed=4))
    tally = reward_tally(trace)
    share = tally[0] / sum(tally.values())
    assert abs(share - 0.5) <= 0.02
    assert sum(tally.values()) == len(main_chain(trace))


def test_huge_delay_forks_nearly_every_block():
    trace = run_scenario(crypto(1, 1, blocks=200, delay=1e7))
    assert probe_fork_rate(trace).value > 0.9


def test_same_seed_same_trace():
    a = run_scenario(crypto(1, 2, 4, blocks=300, delay=3.0, seed=9))
    b = run_scenario(crypto(1, 2, 4, blocks=300, delay=3.0, seed=9))
    c = run_scenario(crypto(1, 2, 4, blocks=300, delay=3.0, seed=10))
    assert a.to_csv() == b.to_csv() != c.to_csv()


def test_nodes_converge_at_zero_delay():
    sim = simulate(crypto(1, 2, 3, blocks=300, seed=2))
    heads = {m.chain.head.block_id for m in sim.miners.values()}
    assert len(heads) == 1


def test_stubborn_miner_loses_share():
    trace = run_scenario(crypto(3, 1, blocks=2000, seed=5, stubborn=(1,)))
    props = [e for e in trace.events if e.event == "BlockProposed"]
    race_share = sum(e.miner == 1 for e in props) / len(props)
    chain_share = sum(e.miner == 1 for e in main_chain(trace)) / len(main_chain(trace))
    assert chain_share < race_share
    assert chain_share <= 0.3


def test_stubborn_records_but_ignores_blocks():
    trace = run_scenario(crypto(3, 1, blocks=50, seed=5, stubborn=(1,)))
    assert any(e.event == "BlockReceived" and e.miner == 1 for e in trace.events)
    assert not any(e.event == "BlockAppended" and e.miner == 1 and e.block_id in
                   {p.block_id for p in trace.events if p.event == "BlockProposed" and p.miner == 0}
                   for e in trace.events)


def test_retarget_events_and_floor():
    s = crypto(1, blocks=400, retarget=True, retarget_window=64, seed=3, initial_difficulty=8.0)
    trace = run_scenario(s)
    assert trace.count("DifficultyRetargeted") == 400 // 64
    # far too little power: each window quarters the difficulty until the floor holds it at 1
    slow = run_scenario(s.with_(normalize_power=False, duration_blocks=260))
    diffs = sorted({e.difficulty for e in slow.of("BlockProposed")}, reverse=True)
    assert diffs == [8.0, 2.0, 1.0]


def test_power_change_is_logged():
    trace = run_scenario(crypto(1, blocks=200, power_schedule=((100, 2.0),)))
    (ev,) = trace.of("PowerChanged")
    assert ev.height == 100
    gaps = np.diff([e.t for e in main_chain(trace)])
    assert gaps[110:].mean() < gaps[:90].mean()


def test_measured_cryptopuzzle_blocks_verify():
    sim = simulate(crypto(1, 1, blocks=40, seed=6, nonce_bits=10, mode=Mode.MEASURED))
    assert sim.trace.count("BlockRejected") == 0
    for e in main_chain(sim.trace):
        assert sim.validate(next(b for b in sim.registry.values() if b.short_id == e.block_id))


def test_kov_fastest_takes_all():
    trace = run_scenario(supplied("kov", 1, 2, 4, blocks=60, n=16, d=16))
    tally = reward_tally(trace)
    assert tally[2] / sum(tally.values()) > 0.95


def test_kov_supply_consumed_then_stall():
    trace = run_scenario(supplied("kov", 1, blocks=20, count=5, n=8, d=8))
    assert trace.stalled
    assert len(main_chain(trace)) == 5
    assert trace.count("SupplyArrived") == 5


def test_kov_late_arrivals_resume_mining():
    trace = run_scenario(supplied("kov", 1, blocks=6, count=2, n=8, d=8, arrival_interval=5000, arrival_count=4))
    assert not trace.stalled
    assert len(main_chain(trace)) == 6


def test_tsp_measured_run():
    trace = run_scenario(supplied("tsp", 1, 1, blocks=10, count=20, cities=12, alpha=1.2))
    assert trace.count("BlockRejected") == 0
    assert len(main_chain(trace)) == 10


def test_analytic_needs_cryptopuzzle():
    with pytest.raises(ValueError):
        supplied("kov", 1).with_(mode=Mode.ANALYTIC)


def test_duration_seconds_stops():
    s = crypto(1, blocks=None, duration_seconds=6000.0)
    trace = run_scenario(s)
    assert all(e.t <= 6000.0 for e in trace.of("BlockProposed"))
    assert len(main_chain(trace)) > 0
