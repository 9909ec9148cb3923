"""Blocks and the per-node block tree with the longest-chain rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..base import sha256
from ..errors import InvalidProof, UnknownParent

GENESIS_ID = sha256(b"puwbench genesis")


@dataclass(frozen=True, eq=False)
class Block:
    block_id: bytes
    parent_id: bytes | None
    height: int
    miner: int
    t: float
    difficulty: float
    context: Any = None
    task: Any = None
    poc: Any = None
    source_id: int | None = None

    @property
    def short_id(self) -> str:
        return self.block_id[:8].hex()


def genesis_block(difficulty: float = 1.0) -> Block:
    return Block(GENESIS_ID, None, 0, -1, 0.0, float(difficulty))


@dataclass
class ChainState:
    """One node's view: a block tree, its head, and blocks waiting for parents.

    The head moves only to a strictly higher block, so among equal-height
    branches the first one received wins.
    """

    genesis: Block = field(default_factory=genesis_block)
    blocks: dict = field(default_factory=dict)
    received: dict = field(default_factory=dict)
    pending: dict = field(default_factory=dict)
    head: Block = None

    def __post_init__(self):
        if not self.blocks:
            self.blocks[self.genesis.block_id] = self.genesis
            self.received[self.genesis.block_id] = 0
        if self.head is None:
            self.head = self.genesis

    def __contains__(self, block_id) -> bool:
        return block_id in self.blocks

    def __len__(self):
        return len(self.blocks)

    def get(self, block_id) -> Block:
        return self.blocks[block_id]

    def add(self, block: Block) -> bool:
        """Insert ``block``; returns True when the head moved to it."""
        if block.block_id in self.blocks:
            return False
        parent = self.blocks.get(block.parent_id)
        if parent is None:
            raise UnknownParent(f"parent {block.parent_id.hex()[:16]} not known")
        if block.height != parent.height + 1:
            raise InvalidProof("height does not follow parent")
        self.blocks[block.block_id] = block
        self.received[block.block_id] = len(self.received)
        if block.height > self.head.height:
            self.head = block
            return True
        return False

    def buffer(self, block: Block) -> None:
        waiting = self.pending.setdefault(block.parent_id, [])
        if all(b.block_id != block.block_id for b in waiting):
            waiting.append(block)

    def release(self, parent_id) -> list:
        return self.pending.pop(parent_id, [])

    def ancestor_at(self, block: Block, height: int) -> Block:
        while block.height > height:
            block = self.blocks[block.parent_id]
        return block

    def path(self, block: Block | None = None) -> list:
        """Genesis .. ``block`` (default: head)."""
        block = self.head if block is None else block
        out = [block]
        while block.parent_id is not None:
            block = self.blocks[block.parent_id]
            out.append(block)
        return out[::-1]

    def main_chain(self) -> list:
        return self.path(self.head)

    def orphans(self) -> set:
        """Ids of known blocks off the main chain."""
        on_chain = {b.block_id for b in self.main_chain()}
        return set(self.blocks) - on_chain

    def lca(self, a: Block, b: Block) -> Block:
        return lca(self.blocks, a, b)


def lca(blocks: dict, a: Block, b: Block) -> Block:
    while a.height > b.height:
        a = blocks[a.parent_id]
    while b.height > a.height:
        b = blocks[b.parent_id]
    while a.block_id != b.block_id:
        a = blocks[a.parent_id]
        b = blocks[b.parent_id]
    return a


def apply_block(chain: ChainState, block: Block, verifier: Callable[[Block], bool] | None = None) -> ChainState:
    """Validate and insert ``block`` into ``chain`` (in place) and return it.

    Raises InvalidProof when ``verifier`` rejects the block and
    UnknownParent when its parent has not been seen; callers buffer such
    blocks with ``chain.buffer`` and retry on the parent's arrival.
    """
    if verifier is not None and not verifier(block):
        raise InvalidProof(f"block {block.short_id} failed verification")
    chain.add(block)
    return chain
