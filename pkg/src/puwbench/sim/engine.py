"""Discrete-event simulation of a proof-of-work network.

Each miner works on one attempt at a time.  An attempt needs a number of
operations (hashes, coordinate products, distance lookups) and finishes
after ``ops / power`` simulated seconds.  In analytic mode the cryptopuzzle
op count is drawn from an exponential law with mean ``D * 2**nonce_bits``;
in measured mode the backend actually solves the task and reports its
count.  Power changes rescale the remaining work of every running attempt.

Blocks reach other nodes after a sampled propagation delay.  A node
verifies a block against its parent, appends it, and moves its head only
to a strictly higher block.  Honest miners restart on every head change;
stubborn miners ignore blocks they did not mine.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .. import core
from ..backends import kov as kov_backend
from ..backends import tsp as tsp_backend
from ..base import BlockContext, TaskClass, sha256
from ..supply import MinerChoice, SupplyItem, TaskSupplyState
from .chain import Block, ChainState, genesis_block
from .retarget import retarget_difficulty
from .scenario import Mode, Scenario, Strategy
from .trace import Event, EventTrace

MAX_CONTEXTS = 1 << 16
MAX_TSP_CONTEXTS = 64


def _short(block_id: bytes) -> str:
    return block_id[:8].hex()


@dataclass
class _Attempt:
    parent: Block
    ctx: BlockContext
    difficulty: float
    task: object
    poc: object
    source_id: int | None
    ops_total: float
    ops_done: float
    seg_start: float
    version: int = 0


class _Miner:
    def __init__(self, spec, power, genesis):
        self.spec = spec
        self.id = spec.id
        self.power = power
        self.chain = ChainState(genesis)
        self.attempt = None
        self.idle = False
        self.stubborn = spec.strategy is Strategy.STUBBORN


class Simulator:
    def __init__(self, scenario: Scenario):
        self.s = scenario
        self.cls = scenario.task_class
        self.mode = scenario.effective_mode
        self.rng = np.random.default_rng(scenario.seed)
        self.genesis = genesis_block(scenario.initial_difficulty)
        self.registry = {self.genesis.block_id: self.genesis}
        self.trace = EventTrace()
        self._heap = []
        self._seq = itertools.count()
        self._attempt_ids = itertools.count()
        self._diff_cache = {}
        self._consumed = {self.genesis.block_id: frozenset()}
        self._valid = {}
        self._kov_cache = {}
        self.items = self._build_supply()
        self.pending_arrivals = 0
        self.stopped = False
        self.halted = False
        self.max_height = 0
        self._schedule = list(scenario.power_schedule)
        powers = self._powers()
        self.miners = {m.id: _Miner(m, p, self.genesis) for m, p in zip(scenario.miners, powers)}
        self.trace.metadata = scenario.metadata()
        for entry, p in zip(self.trace.metadata["miners"], powers):
            entry["power"] = p

    # setup

    def _build_supply(self) -> list:
        sup = self.s.supply
        if self.cls is TaskClass.CRYPTOPUZZLE:
            return []
        rng = np.random.default_rng([self.s.seed if sup.seed is None else sup.seed, 1])
        total = sup.count + sup.arrival_count
        items = []
        for i in range(total):
            if self.cls is TaskClass.KOV:
                inst = kov_backend.random_kov_instance(sup.k, sup.n, sup.d, sup.density, rng)
            else:
                base = tsp_backend.random_tsp_instance(sup.cities, rng, scale=1000.0)
                inst = tsp_backend.TspTask(base, tsp_backend.tsp_derive_threshold(base, sup.alpha))
            arrival = 0.0 if i < sup.count else (i - sup.count + 1) * sup.arrival_interval
            items.append(SupplyItem(inst, supplier_id=0, arrival_time=arrival, item_id=i))
        return items

    def expected_block_ops(self) -> float:
        if self.cls is TaskClass.CRYPTOPUZZLE:
            return float(self.s.initial_difficulty) * 2.0**self.s.nonce_bits
        if not self.items:
            return 1.0
        first = self.items[0].instance
        if self.cls is TaskClass.KOV:
            return float(first.enumeration_ops)
        _, ops, _ = tsp_backend.tsp_solve(first, 0, self.s.supply.restarts)
        return float(ops)

    def _powers(self) -> list:
        raw = [m.power for m in self.s.miners]
        if not self.s.normalize_power:
            return raw
        scale = self.expected_block_ops() / self.s.target_interblock / sum(raw)
        return [p * scale for p in raw]

    # event plumbing

    def _push(self, t, kind, *data):
        heapq.heappush(self._heap, (t, next(self._seq), kind, data))

    def _emit(self, event, t, miner=None, block=None, parent_id="", height=None, difficulty=None):
        bid = "" if block is None else _short(block.block_id)
        if block is not None and not parent_id and block.parent_id is not None:
            parent_id = _short(block.parent_id)
        if block is not None and height is None:
            height = block.height
        if block is not None and difficulty is None:
            difficulty = block.difficulty
        self.trace.append(Event(event, t, miner, bid, parent_id, height, difficulty))

    # chain rules

    def next_difficulty(self, parent: Block) -> float:
        cached = self._diff_cache.get(parent.block_id)
        if cached is not None:
            return cached
        diff = parent.difficulty
        w = self.s.retarget_window
        if self.s.retargeting and parent.height > 0 and parent.height % w == 0:
            stamps = []
            b = parent
            while len(stamps) < w + 1:
                stamps.append(b.t)
                if b.parent_id is None:
                    break
                b = self.registry[b.parent_id]
            new = float(retarget_difficulty(stamps[::-1], diff, self.s.target_interblock).value)
            diff = max(new, self.s.min_difficulty)
        self._diff_cache[parent.block_id] = diff
        return diff

    def consumed(self, block: Block) -> frozenset:
        todo = []
        while block.block_id not in self._consumed:
            todo.append(block)
            block = self.registry[block.parent_id]
        got = self._consumed[block.block_id]
        for b in reversed(todo):
            if self.s.supply.consume and b.source_id is not None:
                got = got | {b.source_id}
            self._consumed[b.block_id] = got
        return got

    def supply_at(self, parent: Block, now: float) -> TaskSupplyState:
        used = self.consumed(parent)
        return TaskSupplyState(tuple(it for it in self.items if it.arrival_time <= now and it.item_id not in used))

    def _policy_for(self, miner: _Miner):
        pol = self.s.selection_policy
        return MinerChoice(miner.spec.choice) if isinstance(pol, MinerChoice) else pol

    # solving

    def _context(self, miner: _Miner, parent: Block, now: float) -> BlockContext:
        payload = sha256(b"payload" + miner.id.to_bytes(8, "big") + parent.block_id)
        return BlockContext(parent.block_id, payload, parent.height + 1, now, miner.id, 0)

    def _solve_crypto(self, ctx, diff):
        total = 0
        for _ in range(MAX_CONTEXTS):
            task = core.generate(TaskClass.CRYPTOPUZZLE, ctx, diff, nonce_bits=self.s.nonce_bits)
            out = core.solve(task)
            total += out.ops
            if out.solved:
                return ctx, task, out.poc, total
            ctx = ctx.bump()
        raise RuntimeError("no cryptopuzzle solution within the context budget")

    def _solve_supply(self, miner, ctx, diff, tss):
        total = 0
        policy = self._policy_for(miner)
        limit = MAX_TSP_CONTEXTS if self.cls is TaskClass.TSP else 1
        for _ in range(limit):
            task = core.generate(self.cls, ctx, diff, tss, policy)
            if self.cls is TaskClass.KOV:
                key = task.payload.digest
                hit = self._kov_cache.get(key)
                if hit is None:
                    hit = core.solve(task)
                    self._kov_cache[key] = hit
                out = core.SolveOutcome(
                    core.ProofOfComputation(TaskClass.KOV, hit.poc.solution_payload, task.bound_context,
                                            hit.poc.solve_stats),
                    hit.ops,
                )
            else:
                seed = int.from_bytes(task.bound_context[:8], "big")
                out = core.solve(task, self.s.supply.restarts, seed)
            total += out.ops
            if out.solved:
                return ctx, task, out.poc, total
            ctx = ctx.bump()
        raise RuntimeError("no TSP solution within the context budget")

    def start_attempt(self, miner: _Miner, now: float) -> None:
        miner.attempt = None
        if self.stopped or self.halted:
            return
        parent = miner.chain.head
        diff = self.next_difficulty(parent)
        ctx = self._context(miner, parent, now)
        task = poc = None
        source = None
        if self.cls is TaskClass.CRYPTOPUZZLE:
            if self.mode is Mode.ANALYTIC:
                ops = float(self.rng.exponential(diff * 2.0**self.s.nonce_bits))
            else:
                ctx, task, poc, ops = self._solve_crypto(ctx, diff)
        else:
            tss = self.supply_at(parent, now)
            if not len(tss):
                if self.pending_arrivals:
                    miner.idle = True
                    return
                self._emit("SupplyStall", now, miner.id, parent_id=_short(parent.block_id), height=parent.height + 1)
                self.halted = True
                return
            ctx, task, poc, ops = self._solve_supply(miner, ctx, diff, tss)
            source = task.source_id
        miner.idle = False
        att = _Attempt(parent, ctx, diff, task, poc, source, max(float(ops), 0.0), 0.0, now,
                       next(self._attempt_ids))
        miner.attempt = att
        self._emit("TaskGenerated", now, miner.id, parent_id=_short(parent.block_id), height=parent.height + 1,
                   difficulty=diff)
        self._schedule_finish(miner, now)

    def _schedule_finish(self, miner: _Miner, now: float) -> None:
        att = miner.attempt
        remaining = max(att.ops_total - att.ops_done, 0.0)
        self._push(now + remaining / miner.power, "finish", miner.id, att.version)

    # block flow

    def _on_finish(self, miner: _Miner, version: int, now: float) -> None:
        att = miner.attempt
        if att is None or att.version != version or self.stopped or self.halted:
            return
        if self.s.duration_seconds is not None and now > self.s.duration_seconds:
            self.stopped = True
            return
        payload = b"" if att.poc is None else att.poc.solution_payload
        block_id = sha256(att.ctx.serialize() + payload)
        block = Block(block_id, att.parent.block_id, att.parent.height + 1, miner.id, now, att.difficulty,
                      att.ctx, att.task, att.poc, att.source_id)
        self.registry[block_id] = block
        self._emit("BlockProposed", now, miner.id, block)
        if self.s.retargeting and block.difficulty != att.parent.difficulty:
            self._emit("DifficultyRetargeted", now, miner.id, block)
        if block.height > self.max_height:
            self.max_height = block.height
            self._apply_power_schedule(now)
        if self.s.duration_blocks is not None and block.height >= self.s.duration_blocks:
            self.stopped = True
        self._receive(miner, block, now, own=True)
        for other in self.miners.values():
            if other is not miner:
                self._push(now + self.s.network.sample(self.rng), "deliver", other.id, block)

    def _apply_power_schedule(self, now: float) -> None:
        while self._schedule and self._schedule[0][0] <= self.max_height:
            height, factor = self._schedule.pop(0)
            self._emit("PowerChanged", now, None, height=height, difficulty=None)
            for m in self.miners.values():
                att = m.attempt
                if att is not None:
                    att.ops_done += (now - att.seg_start) * m.power
                    att.seg_start = now
                    att.version = next(self._attempt_ids)
                m.power *= factor
                if att is not None:
                    self._schedule_finish(m, now)

    def validate(self, block: Block) -> bool:
        ok = self._valid.get(block.block_id)
        if ok is None:
            ok = self._validate(block)
            self._valid[block.block_id] = ok
        return ok

    def _validate(self, block: Block) -> bool:
        parent = self.registry[block.parent_id]
        ctx = block.context
        if ctx.prev_block_id != parent.block_id or ctx.height != block.height:
            return False
        if block.difficulty != self.next_difficulty(parent):
            return False
        if self.mode is Mode.ANALYTIC:
            return True
        if self.cls is TaskClass.CRYPTOPUZZLE:
            task = core.generate(self.cls, ctx, block.difficulty, nonce_bits=self.s.nonce_bits)
        else:
            admissible = self.supply_at(parent, ctx.timestamp)
            item = next((it for it in admissible if it.item_id == block.source_id), None)
            if item is None:
                return False
            task = core.generate(self.cls, ctx, block.difficulty, TaskSupplyState((item,)))
        return core.verify(task, block.poc)

    def _receive(self, node: _Miner, block: Block, now: float, own: bool = False) -> None:
        chain = node.chain
        if block.block_id in chain:
            return
        if not own:
            self._emit("BlockReceived", now, node.id, block)
            if node.stubborn:
                return
        old_head = chain.head
        self._insert(node, block, now)
        if chain.head is not old_head:
            if chain.head.parent_id != old_head.block_id:
                self._emit("ForkResolved", now, node.id, chain.head, parent_id=_short(old_head.block_id))
            self.start_attempt(node, now)

    def _insert(self, node: _Miner, block: Block, now: float) -> None:
        chain = node.chain
        if block.parent_id not in chain:
            chain.buffer(block)
            return
        if not self.validate(block):
            self._emit("BlockRejected", now, node.id, block)
            return
        chain.add(block)
        self._emit("BlockAppended", now, node.id, block)
        for child in chain.release(block.block_id):
            self._insert(node, child, now)

    # main loop

    def run(self) -> EventTrace:
        for it in self.items:
            if it.arrival_time == 0.0:
                self.trace.append(Event("SupplyArrived", 0.0, it.supplier_id, f"s{it.item_id}"))
            else:
                self.pending_arrivals += 1
                self._push(it.arrival_time, "arrive", it)
        for m in self.miners.values():
            self.start_attempt(m, 0.0)
        while self._heap and not self.halted:
            t, _, kind, data = heapq.heappop(self._heap)
            if kind == "finish":
                self._on_finish(self.miners[data[0]], data[1], t)
            elif kind == "deliver":
                self._receive(self.miners[data[0]], data[1], t)
            elif kind == "arrive":
                self.pending_arrivals -= 1
                if self.stopped:
                    continue
                item = data[0]
                self.trace.append(Event("SupplyArrived", t, item.supplier_id, f"s{item.item_id}"))
                for m in self.miners.values():
                    if m.idle:
                        self.start_attempt(m, t)
        return self.trace


def run_scenario(scenario: Scenario) -> EventTrace:
    return Simulator(scenario).run()


def simulate(scenario: Scenario) -> Simulator:
    """Run and return the simulator itself, for access to per-node chains."""
    sim = Simulator(scenario)
    sim.run()
    return sim
