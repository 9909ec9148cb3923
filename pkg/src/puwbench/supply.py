"""Task supply state and selection policies.

The supply is an ordered queue of externally supplied instances.  Nodes
that see the same chain derive the same supply, so it is kept as an
immutable value and every change returns a new state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any, Union

from .errors import EmptySupply


@dataclass(frozen=True)
class SupplyItem:
    instance: Any
    supplier_id: int = 0
    arrival_time: float = 0.0
    item_id: int = 0


@dataclass(frozen=True)
class TaskSupplyState:
    items: tuple = ()

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @classmethod
    def from_instances(cls, instances, supplier_id: int = 0) -> "TaskSupplyState":
        return cls(tuple(SupplyItem(inst, supplier_id, 0.0, i) for i, inst in enumerate(instances)))

    def push(self, instance, supplier_id: int = 0, arrival_time: float = 0.0) -> "TaskSupplyState":
        next_id = max((it.item_id for it in self.items), default=-1) + 1
        return TaskSupplyState(self.items + (SupplyItem(instance, supplier_id, arrival_time, next_id),))

    def remove(self, item_id: int) -> "TaskSupplyState":
        kept = tuple(it for it in self.items if it.item_id != item_id)
        if len(kept) == len(self.items):
            raise KeyError(item_id)
        return TaskSupplyState(kept)

    def ids(self) -> tuple:
        return tuple(it.item_id for it in self.items)


@dataclass(frozen=True)
class Fifo:
    name = "fifo"


@dataclass(frozen=True)
class UniformRandom:
    """Pseudo-random pick seeded by the block context digest."""

    name = "uniform"


@dataclass(frozen=True)
class MinerChoice:
    """Miner-configured queue position (clamped to the queue length)."""

    index: int = 0
    name = "miner_choice"


SelectionPolicy = Union[Fifo, UniformRandom, MinerChoice]


def parse_policy(text: str) -> SelectionPolicy:
    """``fifo``, ``uniform`` or ``miner_choice[:index]``."""
    name, _, arg = str(text).strip().lower().partition(":")
    if name == "fifo":
        return Fifo()
    if name in ("uniform", "uniform_random", "random"):
        return UniformRandom()
    if name in ("miner_choice", "minerchoice", "choice"):
        return MinerChoice(int(arg) if arg else 0)
    raise ValueError(f"unknown selection policy {text!r}")


def select_task(tss: TaskSupplyState, policy: SelectionPolicy, ctx_digest: bytes = bytes(32)) -> SupplyItem:
    if not len(tss):
        raise EmptySupply("task supply state is empty")
    if isinstance(policy, Fifo):
        return tss.items[0]
    if isinstance(policy, UniformRandom):
        h = hashlib.sha256(b"select" + bytes(ctx_digest)).digest()
        return tss.items[int.from_bytes(h, "big") % len(tss)]
    if isinstance(policy, MinerChoice):
        return tss.items[min(max(policy.index, 0), len(tss) - 1)]
    raise TypeError(f"not a selection policy: {policy!r}")
