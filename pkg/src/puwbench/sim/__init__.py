"""Discrete-event blockchain simulator."""

from .chain import GENESIS_ID, Block, ChainState, apply_block, genesis_block, lca
from .engine import Simulator, run_scenario, simulate
from .retarget import retarget_difficulty
from .scenario import (
    Honesty,
    MinerSpec,
    Mode,
    NetworkSpec,
    Scenario,
    Strategy,
    SupplySpec,
    format_scenario,
    load_scenario,
    parse_scenario,
)
from .trace import COLUMNS, Event, EventTrace, main_chain, proposal_tally, reward_tally

__all__ = [
    "GENESIS_ID", "Block", "ChainState", "apply_block", "genesis_block", "lca",
    "Simulator", "run_scenario", "simulate", "retarget_difficulty",
    "Honesty", "MinerSpec", "Mode", "NetworkSpec", "Scenario", "Strategy", "SupplySpec",
    "format_scenario", "load_scenario", "parse_scenario",
    "COLUMNS", "Event", "EventTrace", "main_chain", "proposal_tally", "reward_tally",
]
