"""Hashcash-style cryptopuzzle backend.

A task is a 256-bit target bound to a context digest; a solution is a nonce
with ``SHA-256(digest || be64(nonce)) <= target``.  The nonce space is
scaled down from Bitcoin's 32 bits so that statistics are feasible on a
desk, but ``target = 2**(256 - nonce_bits) / difficulty`` keeps the
per-nonce success probability at exactly ``2**-nonce_bits / difficulty``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

from ..base import DIGEST_SIZE, BlockContext, OpCount, as_difficulty, context_digest

try:
    from .._noncescan import scan as _scan_native
except ImportError:  # extension is optional
    _scan_native = None

NONCE_BYTES = 8
MIN_NONCE_BITS = 8
MAX_NONCE_BITS = 32
MAX_TARGET = 2**256 - 1


def base_target(nonce_bits: int) -> int:
    return 1 << (256 - nonce_bits)


@dataclass(frozen=True)
class PuzzleTask:
    target: int
    nonce_bits: int = 32
    bound_context: bytes = bytes(DIGEST_SIZE)

    def __post_init__(self):
        if not 0 <= self.target <= MAX_TARGET:
            raise ValueError("target must lie in [0, 2**256)")
        if not MIN_NONCE_BITS <= self.nonce_bits <= MAX_NONCE_BITS:
            raise ValueError(f"nonce_bits must be in [{MIN_NONCE_BITS}, {MAX_NONCE_BITS}]")
        if len(self.bound_context) != DIGEST_SIZE:
            raise ValueError("bound_context must be a 32-byte digest")

    @property
    def target_bytes(self) -> bytes:
        return self.target.to_bytes(32, "big")

    @property
    def nonce_space(self) -> int:
        return 1 << self.nonce_bits

    def to_bytes(self) -> bytes:
        return self.bound_context + self.target_bytes + bytes([self.nonce_bits])


@dataclass(frozen=True)
class PuzzleProof:
    nonce: int

    def to_bytes(self) -> bytes:
        return self.nonce.to_bytes(NONCE_BYTES, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "PuzzleProof":
        if len(data) != NONCE_BYTES:
            raise ValueError(f"nonce payload must be {NONCE_BYTES} bytes")
        return cls(int.from_bytes(data, "big"))


def puzzle_hash(bound_context: bytes, nonce: int) -> bytes:
    return hashlib.sha256(bound_context + nonce.to_bytes(NONCE_BYTES, "big")).digest()


def _scan_python(prefix: bytes, start: int, stop: int, target: bytes) -> int:
    base = hashlib.sha256(prefix)
    for nonce in range(start, stop):
        h = base.copy()
        h.update(nonce.to_bytes(NONCE_BYTES, "big"))
        if h.digest() <= target:
            return nonce
    return -1


def scan_nonces(prefix: bytes, start: int, stop: int, target: bytes, native: bool | None = None) -> int:
    """First nonce in ``[start, stop)`` whose hash is at most ``target``, else -1.

    Uses the compiled scanner when it is available; ``native=False`` forces
    the hashlib loop.
    """
    if stop <= start:
        return -1
    use_native = _scan_native is not None if native is None else native
    if use_native:
        if _scan_native is None:
            raise RuntimeError("compiled nonce scanner is not available")
        return _scan_native(prefix, start, stop, target)
    return _scan_python(prefix, start, stop, target)


def has_native_scanner() -> bool:
    return _scan_native is not None


def puzzle_generate(ctx_digest: bytes, diff, nonce_bits: int = 32) -> PuzzleTask:
    d = as_difficulty(diff).as_fraction()
    if d < 1:
        raise ValueError("cryptopuzzle difficulty must be >= 1")
    target = base_target(nonce_bits) * d.denominator // d.numerator
    return PuzzleTask(target=target, nonce_bits=nonce_bits, bound_context=bytes(ctx_digest))


def puzzle_solve(task: PuzzleTask, seed=None, budget: int | None = None):
    """Scan nonces 0, 1, ... in order.

    Returns ``(proof, hashes)``; ``proof`` is None when the nonce space (or
    the budget) is exhausted.  The seed is accepted for interface symmetry
    and ignored: the scan order is fixed.
    """
    stop = task.nonce_space if budget is None else min(task.nonce_space, int(budget))
    found = scan_nonces(task.bound_context, 0, stop, task.target_bytes)
    if found < 0:
        return None, stop
    return PuzzleProof(found), found + 1


def puzzle_verify(task: PuzzleTask, proof: PuzzleProof, counter: OpCount | None = None) -> bool:
    if not 0 <= proof.nonce < task.nonce_space:
        return False
    if counter is not None:
        counter.add(1)
    return puzzle_hash(task.bound_context, proof.nonce) <= task.target_bytes


def p_no_solution(diff, nonce_bits: int = 32) -> float:
    """Probability that a whole nonce space holds no valid nonce."""
    d = float(as_difficulty(diff).value)
    if d < 1:
        raise ValueError("difficulty must be >= 1")
    space = 2.0**nonce_bits
    return math.exp(space * math.log1p(-1.0 / (space * d)))


@dataclass(frozen=True)
class InterblockModel:
    mean_s: float
    p99_s: float

    def quantile(self, q: float) -> float:
        return -self.mean_s * math.log1p(-q)


def interblock_model(total_hashrate: float, diff, nonce_bits: int = 32) -> InterblockModel:
    """Exponential proposal-time model for a network hashing at ``total_hashrate``."""
    if total_hashrate <= 0:
        raise ValueError("hashrate must be positive")
    mean = float(as_difficulty(diff).value) * 2.0**nonce_bits / total_hashrate
    return InterblockModel(mean_s=mean, p99_s=mean * math.log(100.0))


def hashrate_for_mean(mean_s: float, diff, nonce_bits: int = 32) -> float:
    return float(as_difficulty(diff).value) * 2.0**nonce_bits / mean_s


@dataclass(frozen=True)
class MiningResult:
    context: BlockContext
    task: PuzzleTask
    proof: PuzzleProof
    hashes: int
    contexts_tried: int


def mine(ctx: BlockContext, diff, nonce_bits: int = 32, max_contexts: int = 1 << 20) -> MiningResult:
    """Solve, bumping ``extra_nonce`` after each exhausted nonce space."""
    total = 0
    for attempt in range(max_contexts):
        task = puzzle_generate(context_digest(ctx), diff, nonce_bits)
        proof, hashes = puzzle_solve(task)
        total += hashes
        if proof is not None:
            return MiningResult(ctx, task, proof, total, attempt + 1)
        ctx = ctx.bump()
    raise RuntimeError(f"no solution within {max_contexts} contexts")


def expected_hashes(diff, nonce_bits: int) -> float:
    """Mean hashes to a solution when mining across contexts (a geometric law)."""
    task = puzzle_generate(bytes(DIGEST_SIZE), diff, nonce_bits)
    p = Fraction(task.target + 1, 2**256)
    return float(1 / p)


__all__ = [
    "PuzzleTask",
    "PuzzleProof",
    "puzzle_generate",
    "puzzle_solve",
    "puzzle_verify",
    "puzzle_hash",
    "p_no_solution",
    "interblock_model",
    "InterblockModel",
    "hashrate_for_mean",
    "mine",
    "MiningResult",
    "scan_nonces",
    "has_native_scanner",
    "base_target",
    "expected_hashes",
]
