"""Scenario builders shared by the simulation tests."""

from puwbench import TaskClass
from puwbench.sim import MinerSpec, NetworkSpec, Scenario, Strategy, SupplySpec


def miners(*powers, stubborn=()):
    return tuple(MinerSpec(i, float(p), Strategy.STUBBORN if i in stubborn else Strategy.HONEST_SWITCH)
                 for i, p in enumerate(powers))


def crypto(*powers, blocks=100, delay=0.0, seed=1, stubborn=(), **kw):
    kw.setdefault("retarget", False)
    return Scenario(miners=miners(*powers, stubborn=stubborn), network=NetworkSpec.constant(delay),
                    duration_blocks=blocks, seed=seed, normalize_power=True, **kw)


def supplied(cls, *powers, blocks=20, count=50, seed=1, **supply):
    return Scenario(miners=miners(*powers), task_class=TaskClass.parse(cls), duration_blocks=blocks, seed=seed,
                    normalize_power=True, supply=SupplySpec(count=count, **supply))
