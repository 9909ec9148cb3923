"""Scenario description and its flat ``key = value`` text format.

Example::

    task_class = cryptopuzzle
    seed = 7
    nonce_bits = 16
    target_interblock = 600
    retarget_window = 64
    duration_blocks = 1000
    delay = uniform:0,2
    normalize_power = true
    miner.0.power = 1
    miner.1.power = 3
    miner.1.strategy = stubborn

Blank lines and ``#`` comments are ignored.  Keys:

========================  ==================================================
``task_class``            cryptopuzzle | kov | tsp
``seed``                  integer, drives every random draw
``mode``                  analytic (cryptopuzzle only) | measured
``nonce_bits``            8..32 (default 16)
``initial_difficulty``    positive number (default 1)
``min_difficulty``        cryptopuzzle floor after retargets (default 1)
``retarget``              on | off (default on; cryptopuzzle only)
``retarget_window``       blocks per window (default 2016)
``target_interblock``     seconds (default 600)
``duration_blocks``       stop proposing at this height
``duration_seconds``      stop proposing at this simulated time
``delay``                 constant:S | uniform:LO,HI
``policy``                fifo | uniform | miner_choice
``normalize_power``       scale powers so the initial mean gap is the target
``power_change``          ``H:factor`` list; scale every power at height H
``miner.N.power``         operations per second (or a relative share)
``miner.N.strategy``      honest_switch | stubborn
``miner.N.honesty``       honest | adversarial
``miner.N.choice``        queue index for the miner_choice policy
``supply.count``          initial instances (k-OV / TSP)
``supply.k/n/d/density``  k-OV instance shape
``supply.cities``         TSP instance size
``supply.alpha``          TSP threshold factor over a 2-opt baseline
``supply.restarts``       TSP restarts per solve attempt
``supply.consume``        remove an instance once it is on chain (default true)
``supply.arrival_interval``  seconds between later arrivals (0 = none)
``supply.arrival_count``  number of later arrivals
``supply.seed``           instance generation seed (default: seed)
========================  ==================================================
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from ..base import TaskClass
from ..errors import ScenarioError, UnknownClass
from ..supply import Fifo, SelectionPolicy, parse_policy


class Strategy(str, Enum):
    HONEST_SWITCH = "honest_switch"
    STUBBORN = "stubborn"


class Honesty(str, Enum):
    HONEST = "honest"
    ADVERSARIAL = "adversarial"


class Mode(str, Enum):
    ANALYTIC = "analytic"
    MEASURED = "measured"


@dataclass(frozen=True)
class MinerSpec:
    id: int
    power: float
    strategy: Strategy = Strategy.HONEST_SWITCH
    honesty: Honesty = Honesty.HONEST
    choice: int = 0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError(f"miner {self.id}: power must be positive")


@dataclass(frozen=True)
class NetworkSpec:
    kind: str = "constant"
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "uniform"):
            raise ValueError("delay kind must be constant or uniform")
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError("delays must satisfy 0 <= lo <= hi")

    @classmethod
    def constant(cls, s: float) -> "NetworkSpec":
        return cls("constant", s, s)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "NetworkSpec":
        return cls("uniform", lo, hi)

    def sample(self, rng) -> float:
        if self.kind == "constant" or self.hi == self.lo:
            return self.lo
        return float(rng.uniform(self.lo, self.hi))

    def describe(self) -> str:
        return f"constant:{self.lo!r}" if self.kind == "constant" else f"uniform:{self.lo!r},{self.hi!r}"


@dataclass(frozen=True)
class SupplySpec:
    count: int = 0
    k: int = 2
    n: int = 16
    d: int = 16
    density: float = 0.5
    cities: int = 30
    alpha: float = 1.1
    restarts: int = 10
    consume: bool = True
    arrival_interval: float = 0.0
    arrival_count: int = 0
    seed: int | None = None


@dataclass(frozen=True)
class Scenario:
    miners: tuple
    network: NetworkSpec = NetworkSpec()
    task_class: TaskClass = TaskClass.CRYPTOPUZZLE
    initial_difficulty: float = 1.0
    min_difficulty: float = 1.0
    retarget: bool = True
    retarget_window: int = 2016
    target_interblock: float = 600.0
    nonce_bits: int = 16
    selection_policy: SelectionPolicy = Fifo()
    supply: SupplySpec = SupplySpec()
    duration_blocks: int | None = None
    duration_seconds: float | None = None
    mode: Mode | None = None
    normalize_power: bool = False
    power_schedule: tuple = ()
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.miners:
            raise ValueError("scenario needs at least one miner")
        if self.retarget_window < 1:
            raise ValueError("retarget_window must be >= 1")
        if not self.target_interblock > 0:
            raise ValueError("target_interblock must be positive")
        if not self.initial_difficulty > 0:
            raise ValueError("initial_difficulty must be positive")
        if self.duration_blocks is None and self.duration_seconds is None:
            raise ValueError("set duration_blocks or duration_seconds")
        if self.mode is Mode.ANALYTIC and self.task_class is not TaskClass.CRYPTOPUZZLE:
            raise ValueError("analytic mode models cryptopuzzles only")

    @property
    def effective_mode(self) -> Mode:
        if self.mode is not None:
            return self.mode
        return Mode.ANALYTIC if self.task_class is TaskClass.CRYPTOPUZZLE else Mode.MEASURED

    @property
    def retargeting(self) -> bool:
        return self.retarget and self.task_class is TaskClass.CRYPTOPUZZLE

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def metadata(self) -> dict:
        return {
            "task_class": self.task_class.value,
            "mode": self.effective_mode.value,
            "seed": self.seed,
            "nonce_bits": self.nonce_bits,
            "initial_difficulty": self.initial_difficulty,
            "retarget": self.retargeting,
            "retarget_window": self.retarget_window,
            "target_interblock": self.target_interblock,
            "delay": self.network.describe(),
            "policy": getattr(self.selection_policy, "name", str(self.selection_policy)),
            "duration_blocks": self.duration_blocks,
            "duration_seconds": self.duration_seconds,
            "power_schedule": [list(p) for p in self.power_schedule],
            "miners": [
                {"id": m.id, "power": m.power, "strategy": m.strategy.value, "honesty": m.honesty.value}
                for m in self.miners
            ],
        }


_BOOL = {"true": True, "yes": True, "on": True, "1": True, "false": False, "no": False, "off": False, "0": False}
_MINER_KEY = re.compile(r"^miner\.(\d+)\.(power|strategy|honesty|choice)$")

_TOP_KEYS = {
    "task_class", "seed", "mode", "nonce_bits", "initial_difficulty", "min_difficulty", "retarget",
    "retarget_window", "target_interblock", "duration_blocks", "duration_seconds", "delay", "policy",
    "normalize_power", "power_change",
}
_SUPPLY_KEYS = {f.name for f in SupplySpec.__dataclass_fields__.values()}


def _parse_bool(value: str) -> bool:
    try:
        return _BOOL[value.lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {value!r}") from None


def _parse_delay(value: str) -> NetworkSpec:
    kind, _, arg = value.partition(":")
    kind = kind.strip().lower()
    if kind == "constant":
        return NetworkSpec.constant(float(arg))
    if kind == "uniform":
        lo, hi = (float(x) for x in arg.split(","))
        return NetworkSpec.uniform(lo, hi)
    raise ValueError(f"unknown delay distribution {kind!r}")


def _parse_schedule(value: str) -> tuple:
    out = []
    for part in value.split(","):
        h, _, f = part.strip().partition(":")
        height, factor = int(h), float(f)
        if height < 1 or not factor > 0:
            raise ValueError("power_change entries are HEIGHT:FACTOR with HEIGHT >= 1, FACTOR > 0")
        out.append((height, factor))
    return tuple(sorted(out))


def parse_scenario(text: str) -> Scenario:
    top = {}
    miners = {}
    supply = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ScenarioError("expected 'key = value'", lineno)
        if not value:
            raise ScenarioError(f"missing value for {key}", lineno)
        if key in lines:
            raise ScenarioError(f"duplicate key {key} (first on line {lines[key]})", lineno)
        lines[key] = lineno
        try:
            m = _MINER_KEY.match(key)
            if m:
                mid, attr = int(m.group(1)), m.group(2)
                spec = miners.setdefault(mid, {})
                if attr == "power":
                    spec["power"] = float(value)
                elif attr == "strategy":
                    spec["strategy"] = Strategy(value.lower())
                elif attr == "honesty":
                    spec["honesty"] = Honesty(value.lower())
                else:
                    spec["choice"] = int(value)
            elif key.startswith("supply."):
                name = key[len("supply."):]
                if name not in _SUPPLY_KEYS:
                    raise ScenarioError(f"unknown key {key}", lineno)
                if name in ("density", "alpha", "arrival_interval"):
                    supply[name] = float(value)
                elif name == "consume":
                    supply[name] = _parse_bool(value)
                else:
                    supply[name] = int(value)
            elif key in _TOP_KEYS:
                top[key] = _convert_top(key, value)
            else:
                raise ScenarioError(f"unknown key {key}", lineno)
        except ScenarioError:
            raise
        except (ValueError, UnknownClass) as exc:
            raise ScenarioError(f"{key}: {exc}", lineno) from None

    if not miners:
        raise ScenarioError("no miner.N.power entries")
    specs = []
    for mid in sorted(miners):
        spec = miners[mid]
        if "power" not in spec:
            raise ScenarioError(f"miner {mid} has no power", lines.get(f"miner.{mid}.strategy"))
        strategy = spec.get("strategy", Strategy.HONEST_SWITCH)
        default_honesty = Honesty.ADVERSARIAL if strategy is Strategy.STUBBORN else Honesty.HONEST
        try:
            specs.append(MinerSpec(mid, spec["power"], strategy, spec.get("honesty", default_honesty),
                                   spec.get("choice", 0)))
        except ValueError as exc:
            raise ScenarioError(str(exc), lines.get(f"miner.{mid}.power")) from None
    kwargs = {
        "task_class": top.get("task_class", TaskClass.CRYPTOPUZZLE),
        "seed": top.get("seed", 0),
        "mode": top.get("mode"),
        "nonce_bits": top.get("nonce_bits", 16),
        "initial_difficulty": top.get("initial_difficulty", 1.0),
        "min_difficulty": top.get("min_difficulty", 1.0),
        "retarget": top.get("retarget", True),
        "retarget_window": top.get("retarget_window", 2016),
        "target_interblock": top.get("target_interblock", 600.0),
        "duration_blocks": top.get("duration_blocks"),
        "duration_seconds": top.get("duration_seconds"),
        "network": top.get("delay", NetworkSpec()),
        "selection_policy": top.get("policy", Fifo()),
        "normalize_power": top.get("normalize_power", False),
        "power_schedule": top.get("power_change", ()),
        "supply": SupplySpec(**supply),
        "miners": tuple(specs),
    }
    try:
        return Scenario(**kwargs)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def _convert_top(key: str, value: str):
    if key == "task_class":
        return TaskClass.parse(value)
    if key in ("seed", "nonce_bits", "retarget_window", "duration_blocks"):
        return int(value)
    if key in ("initial_difficulty", "min_difficulty", "target_interblock", "duration_seconds"):
        return float(value)
    if key in ("retarget", "normalize_power"):
        return _parse_bool(value)
    if key == "mode":
        return Mode(value.lower())
    if key == "delay":
        return _parse_delay(value)
    if key == "policy":
        return parse_policy(value)
    if key == "power_change":
        return _parse_schedule(value)
    raise KeyError(key)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def format_scenario(s: Scenario) -> str:
    lines = [
        f"task_class = {s.task_class.value}",
        f"seed = {s.seed}",
        f"nonce_bits = {s.nonce_bits}",
        f"initial_difficulty = {s.initial_difficulty!r}",
        f"min_difficulty = {s.min_difficulty!r}",
        f"retarget = {'on' if s.retarget else 'off'}",
        f"retarget_window = {s.retarget_window}",
        f"target_interblock = {s.target_interblock!r}",
        f"delay = {s.network.describe()}",
        f"policy = {getattr(s.selection_policy, 'name', 'fifo')}",
        f"normalize_power = {'true' if s.normalize_power else 'false'}",
    ]
    if s.mode is not None:
        lines.append(f"mode = {s.mode.value}")
    if s.duration_blocks is not None:
        lines.append(f"duration_blocks = {s.duration_blocks}")
    if s.duration_seconds is not None:
        lines.append(f"duration_seconds = {s.duration_seconds!r}")
    if s.power_schedule:
        lines.append("power_change = " + ", ".join(f"{h}:{f!r}" for h, f in s.power_schedule))
    for m in s.miners:
        lines += [
            f"miner.{m.id}.power = {m.power!r}",
            f"miner.{m.id}.strategy = {m.strategy.value}",
            f"miner.{m.id}.honesty = {m.honesty.value}",
        ]
        if m.choice:
            lines.append(f"miner.{m.id}.choice = {m.choice}")
    sup = s.supply
    for name in SupplySpec.__dataclass_fields__:
        value = getattr(sup, name)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"supply.{name} = {value!r}" if isinstance(value, float) else f"supply.{name} = {value}")
    return "\n".join(lines) + "\n"
