"""Block context, difficulty and the small value types every backend shares."""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Union

DIGEST_SIZE = 32
ZERO_DIGEST = bytes(DIGEST_SIZE)

# prev_block_id, payload_digest, height, timestamp (IEEE-754 binary64), miner_id, extra_nonce
_CONTEXT_LAYOUT = struct.Struct(">32s32sQdQQ")
CONTEXT_SIZE = _CONTEXT_LAYOUT.size  # 96 bytes


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


class TaskClass(str, Enum):
    CRYPTOPUZZLE = "cryptopuzzle"
    KOV = "kov"
    TSP = "tsp"

    @classmethod
    def parse(cls, value) -> "TaskClass":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            from .errors import UnknownClass

            raise UnknownClass(f"unknown task class {value!r}") from None


@dataclass(frozen=True)
class BlockContext:
    """Input data a Block Task is bound to.

    The payload digest stands in for the transaction Merkle root.  A miner
    bumps ``extra_nonce`` after exhausting the nonce space of the current
    cryptopuzzle, which yields a fresh context and therefore a fresh task.
    """

    prev_block_id: bytes = ZERO_DIGEST
    payload_digest: bytes = ZERO_DIGEST
    height: int = 0
    timestamp: float = 0.0
    miner_id: int = 0
    extra_nonce: int = 0

    def __post_init__(self):
        for name in ("prev_block_id", "payload_digest"):
            value = getattr(self, name)
            if not isinstance(value, (bytes, bytearray)) or len(value) != DIGEST_SIZE:
                raise ValueError(f"{name} must be a {DIGEST_SIZE}-byte digest")
        for name in ("height", "miner_id", "extra_nonce"):
            value = getattr(self, name)
            if not 0 <= value < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError("timestamp must be finite and non-negative")

    def serialize(self) -> bytes:
        # +0.0 so that -0.0 and 0.0 share one encoding
        return _CONTEXT_LAYOUT.pack(
            bytes(self.prev_block_id),
            bytes(self.payload_digest),
            self.height,
            float(self.timestamp) + 0.0,
            self.miner_id,
            self.extra_nonce,
        )

    def bump(self) -> "BlockContext":
        return replace(self, extra_nonce=self.extra_nonce + 1)


def context_digest(ctx: BlockContext) -> bytes:
    """SHA-256 of the canonical 96-byte context serialization."""
    return sha256(ctx.serialize())


Number = Union[int, float, Fraction]


@dataclass(frozen=True, order=True)
class Difficulty:
    """Positive difficulty; its meaning is backend specific.

    For cryptopuzzles it is the expected number of full nonce-space scans
    needed to find a solution.
    """

    value: Number

    def __post_init__(self):
        if isinstance(self.value, float) and not math.isfinite(self.value):
            raise ValueError("difficulty must be finite")
        if not self.value > 0:
            raise ValueError("difficulty must be positive")

    def as_fraction(self) -> Fraction:
        return Fraction(self.value)

    def __float__(self):
        return float(self.value)


def as_difficulty(value) -> Difficulty:
    return value if isinstance(value, Difficulty) else Difficulty(value)


@dataclass
class OpCount:
    """Mutable tally of abstract work units (hashes, dot-product terms, distance lookups)."""

    ops: int = 0

    def add(self, n: int) -> None:
        self.ops += int(n)


@dataclass(frozen=True)
class Full:
    """Deterministic verification of the whole proof."""


@dataclass(frozen=True)
class SpotCheck:
    """Check a seeded random fraction of a k-OV proof; other backends ignore it."""

    fraction: float
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ValueError("spot-check fraction must be in (0, 1]")


VerifyMode = Union[Full, SpotCheck]
FULL = Full()


@dataclass(frozen=True)
class SolveStats:
    elapsed_ops: int = 0
    restarts: int = 0

    def __post_init__(self):
        if self.elapsed_ops < 0:
            raise ValueError("elapsed_ops must be non-negative")


@dataclass(frozen=True)
class ProofOfComputation:
    """Solver output, carried as class-tagged bytes so it can be broadcast and mutated."""

    class_id: TaskClass
    solution_payload: bytes
    bound_context: bytes = ZERO_DIGEST
    solve_stats: SolveStats = field(default_factory=SolveStats)

    def with_payload(self, payload: bytes) -> "ProofOfComputation":
        return replace(self, solution_payload=bytes(payload))
