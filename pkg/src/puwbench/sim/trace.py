"""Event trace: the simulator's totally ordered log and its CSV form."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

COLUMNS = ("event", "t", "miner", "block_id", "parent_id", "height", "difficulty")

EVENT_KINDS = (
    "TaskGenerated",
    "BlockProposed",
    "BlockReceived",
    "BlockAppended",
    "BlockRejected",
    "ForkResolved",
    "DifficultyRetargeted",
    "SupplyArrived",
    "SupplyStall",
    "PowerChanged",
)


@dataclass(frozen=True)
class Event:
    """One trace row.  ``miner`` is the acting node; ids are short hex strings."""

    event: str
    t: float
    miner: int | None = None
    block_id: str = ""
    parent_id: str = ""
    height: int | None = None
    difficulty: float | None = None

    def row(self) -> list:
        return [
            self.event,
            repr(float(self.t)),
            "" if self.miner is None else str(self.miner),
            self.block_id,
            self.parent_id,
            "" if self.height is None else str(self.height),
            "" if self.difficulty is None else repr(float(self.difficulty)),
        ]

    @classmethod
    def from_row(cls, row) -> "Event":
        ev, t, miner, bid, pid, height, diff = row
        return cls(
            ev,
            float(t),
            int(miner) if miner else None,
            bid,
            pid,
            int(height) if height else None,
            float(diff) if diff else None,
        )


@dataclass
class EventTrace:
    events: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def append(self, event: Event) -> None:
        if self.events and event.t < self.events[-1].t:
            raise ValueError("trace timestamps must be non-decreasing")
        self.events.append(event)

    def of(self, *kinds) -> list:
        return [e for e in self.events if e.event in kinds]

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.event == kind)

    @property
    def stalled(self) -> bool:
        return any(e.event == "SupplyStall" for e in self.events)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for e in self.events:
            w.writerow(e.row())
        return buf.getvalue()

    def write(self, directory, csv_name: str = "trace.csv", meta_name: str = "run.json", extra_meta=None) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / csv_name).write_text(self.to_csv())
        meta = dict(self.metadata)
        if extra_meta:
            meta.update(extra_meta)
        (directory / meta_name).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return directory / csv_name

    @classmethod
    def from_csv(cls, text: str, metadata: dict | None = None) -> "EventTrace":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if tuple(header or ()) != COLUMNS:
            raise ValueError(f"trace header must be {','.join(COLUMNS)}")
        return cls([Event.from_row(r) for r in reader if r], dict(metadata or {}))

    @classmethod
    def read(cls, path, meta_path=None) -> "EventTrace":
        path = Path(path)
        if path.is_dir():
            path = path / "trace.csv"
        meta_path = Path(meta_path) if meta_path else path.with_name("run.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        return cls.from_csv(path.read_text(), meta)


def proposals(trace: EventTrace) -> dict:
    """block id -> BlockProposed event, in proposal order."""
    return {e.block_id: e for e in trace.events if e.event == "BlockProposed"}


def main_chain(trace: EventTrace) -> list:
    """Proposal events on the longest chain, genesis excluded.

    Ties between equal-height tips go to the earliest proposal.
    """
    props = proposals(trace)
    if not props:
        return []
    tip = None
    for e in props.values():
        if tip is None or e.height > tip.height:
            tip = e
    chain = []
    cur = tip
    while cur is not None:
        chain.append(cur)
        cur = props.get(cur.parent_id)
    return chain[::-1]


def reward_tally(trace: EventTrace) -> dict:
    """Blocks per miner on the final main chain."""
    miners = [m["id"] for m in trace.metadata.get("miners", [])]
    tally = {m: 0 for m in miners}
    for e in main_chain(trace):
        tally[e.miner] = tally.get(e.miner, 0) + 1
    return tally


def proposal_tally(trace: EventTrace) -> dict:
    """Blocks per miner over all proposals, on chain or not."""
    miners = [m["id"] for m in trace.metadata.get("miners", [])]
    tally = {m: 0 for m in miners}
    for e in trace.events:
        if e.event == "BlockProposed":
            tally[e.miner] = tally.get(e.miner, 0) + 1
    return tally
