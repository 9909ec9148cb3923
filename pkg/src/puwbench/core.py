"""Class-agnostic Block Task interface: generate, solve, verify, reconstruct.

Every task carries the digest of the context it was generated for, and
every proof carries the digest it was solved against.  Verification
rejects a proof whose digest differs from the task's, which is how a
solution is tied to one block and cannot be replayed on another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .backends import cryptopuzzle as cp
from .backends import kov
from .backends import tsp
from .base import (
    FULL,
    BlockContext,
    Difficulty,
    OpCount,
    ProofOfComputation,
    SolveStats,
    TaskClass,
    as_difficulty,
    context_digest,
)
from .errors import ClassMismatch, MissingTransform, UnknownClass
from .supply import Fifo, SelectionPolicy, TaskSupplyState, select_task

DEFAULT_TSP_ALPHA = 1.1
DEFAULT_TSP_RESTARTS = 10


@dataclass(frozen=True)
class BlockTask:
    class_id: TaskClass
    payload: Any
    bound_context: bytes
    difficulty: Difficulty
    transform: Any = None
    source_id: int | None = None


@dataclass(frozen=True)
class SolveOutcome:
    """``poc`` is None when the search space or budget ran out."""

    poc: ProofOfComputation | None
    ops: int
    restarts: int = 0

    @property
    def solved(self) -> bool:
        return self.poc is not None

    def to_bytes(self) -> bytes:
        body = b"" if self.poc is None else self.poc.solution_payload
        return bytes([self.solved]) + self.ops.to_bytes(8, "big") + self.restarts.to_bytes(4, "big") + body


@dataclass(frozen=True)
class TaskSolution:
    class_id: TaskClass
    solution: Any


def _tsp_task_for(instance, alpha: float) -> tsp.TspTask:
    if isinstance(instance, tsp.TspTask):
        return instance
    return tsp.TspTask(instance, tsp.tsp_derive_threshold(instance, alpha))


def generate(task_class, ctx: BlockContext, diff, tss: TaskSupplyState | None = None,
             policy: SelectionPolicy | None = None, nonce_bits: int = 32, contextualize: bool = True,
             tsp_alpha: float = DEFAULT_TSP_ALPHA) -> BlockTask:
    """Build the Block Task bound to ``ctx``.

    Cryptopuzzles are a pure function of the context digest and the
    difficulty.  k-OV and TSP tasks take a policy-selected instance from
    the supply; TSP instances are relabelled and moved by a digest-seeded
    rigid transform, k-OV instances are bound by digest only.  Supply TSP
    entries may be a ready ``TspTask`` or a bare instance, whose threshold
    is then ``tsp_alpha`` times a 2-opt baseline.
    """
    cls = TaskClass.parse(task_class)
    diff = as_difficulty(diff)
    digest = context_digest(ctx)
    if cls is TaskClass.CRYPTOPUZZLE:
        return BlockTask(cls, cp.puzzle_generate(digest, diff, nonce_bits), digest, diff)
    item = select_task(tss if tss is not None else TaskSupplyState(), policy or Fifo(), digest)
    if cls is TaskClass.KOV:
        if not isinstance(item.instance, kov.KovInstance):
            raise TypeError("k-OV supply must hold KovInstance values")
        return BlockTask(cls, item.instance, digest, diff, None, item.item_id)
    base = _tsp_task_for(item.instance, tsp_alpha)
    if contextualize:
        task, transform = tsp.tsp_contextualize(base.instance, digest, base.t_d)
    else:
        task, transform = base, tsp.TspTransform.identity(base.instance.n)
    return BlockTask(cls, task, digest, diff, transform, item.item_id)


def solve(task: BlockTask, budget: int | None = None, seed: int = 0, memo=None) -> SolveOutcome:
    """Run the backend solver.

    ``budget`` counts hashes for cryptopuzzles, coordinate products for
    k-OV and restarts for TSP; None means the backend default.
    """
    if budget is not None and budget <= 0:
        raise ValueError("budget must be positive")
    cls = task.class_id
    if cls is TaskClass.CRYPTOPUZZLE:
        proof, ops = cp.puzzle_solve(task.payload, seed, budget)
        restarts = 0
    elif cls is TaskClass.KOV:
        proof, ops = kov.kov_solve(task.payload, seed, budget, memo=memo)
        restarts = 0
    elif cls is TaskClass.TSP:
        proof, ops, restarts = tsp.tsp_solve(task.payload, seed, budget or DEFAULT_TSP_RESTARTS)
    else:
        raise UnknownClass(f"unknown task class {cls!r}")
    if proof is None:
        return SolveOutcome(None, ops, restarts)
    poc = ProofOfComputation(cls, proof.to_bytes(), task.bound_context, SolveStats(ops, restarts))
    return SolveOutcome(poc, ops, restarts)


def _decode(cls: TaskClass, payload, data: bytes):
    if cls is TaskClass.CRYPTOPUZZLE:
        return cp.PuzzleProof.from_bytes(data)
    if cls is TaskClass.KOV:
        return kov.KovProof.from_bytes(data, payload.k)
    return tsp.TspTour.from_bytes(data)


def verify(task: BlockTask, poc: ProofOfComputation, mode=FULL, counter: OpCount | None = None) -> bool:
    if TaskClass.parse(poc.class_id) is not task.class_id:
        raise ClassMismatch(f"{poc.class_id} proof checked against a {task.class_id} task")
    if poc.bound_context != task.bound_context:
        return False
    try:
        proof = _decode(task.class_id, task.payload, poc.solution_payload)
    except ValueError:
        return False
    if task.class_id is TaskClass.CRYPTOPUZZLE:
        return cp.puzzle_verify(task.payload, proof, counter)
    if task.class_id is TaskClass.KOV:
        return kov.kov_verify(task.payload, proof, mode, counter)
    return tsp.tsp_verify(task.payload, proof, counter)


def reconstruct(poc: ProofOfComputation, transform_record=None) -> TaskSolution:
    """Express the solution in the supplier's original space."""
    cls = TaskClass.parse(poc.class_id)
    if cls is TaskClass.CRYPTOPUZZLE:
        return TaskSolution(cls, cp.PuzzleProof.from_bytes(poc.solution_payload))
    if cls is TaskClass.KOV:
        data = poc.solution_payload
        k = data[1] if len(data) > 1 else 0
        return TaskSolution(cls, kov.KovProof.from_bytes(data, k))
    if transform_record is None:
        raise MissingTransform("TSP solutions need the context transform to be restored")
    return TaskSolution(cls, transform_record.restore_tour(tsp.TspTour.from_bytes(poc.solution_payload)))
