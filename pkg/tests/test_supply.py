import pytest

from puwbench import BlockContext, EmptySupply, Fifo, MinerChoice, TaskSupplyState, UniformRandom, context_digest
from puwbench import select_task
from puwbench.supply import parse_policy


def test_single_item_any_policy():
    tss = TaskSupplyState.from_instances(["only"])
    for policy in (Fifo(), UniformRandom(), MinerChoice(5)):
        assert select_task(tss, policy, bytes(32)).instance == "only"


def test_fifo_after_removal():
    tss = TaskSupplyState.from_instances(["a", "b", "c"])
    first = select_task(tss, Fifo())
    assert first.instance == "a"
    assert select_task(tss.remove(first.item_id), Fifo()).instance == "b"


def test_uniform_varies_with_context():
    tss = TaskSupplyState.from_instances(list(range(8)))
    picks = {select_task(tss, UniformRandom(), context_digest(BlockContext(extra_nonce=i))).instance
             for i in range(1000)}
    assert len(picks) == 8


def test_uniform_is_a_function_of_the_digest():
    tss = TaskSupplyState.from_instances(list(range(8)))
    d = context_digest(BlockContext(height=9))
    assert select_task(tss, UniformRandom(), d) == select_task(tss, UniformRandom(), d)


def test_miner_choice_clamps():
    tss = TaskSupplyState.from_instances(["a", "b"])
    assert select_task(tss, MinerChoice(9)).instance == "b"
    assert select_task(tss, MinerChoice(-3)).instance == "a"


def test_empty():
    with pytest.raises(EmptySupply):
        select_task(TaskSupplyState(), Fifo())


def test_push_assigns_fresh_ids():
    tss = TaskSupplyState.from_instances(["a"]).push("b", arrival_time=5.0)
    assert tss.ids() == (0, 1) and tss.items[1].arrival_time == 5.0
    with pytest.raises(KeyError):
        tss.remove(7)


@pytest.mark.parametrize("text,policy", [("fifo", Fifo()), ("uniform", UniformRandom()),
                                         ("miner_choice:2", MinerChoice(2))])
def test_parse_policy(text, policy):
    assert parse_policy(text) == policy
