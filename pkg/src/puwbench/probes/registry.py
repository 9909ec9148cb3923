"""Named probes, and the map from each Block Task Property row to the probes measuring it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable

from . import task_probes as tp
from . import trace_probes as trp


@dataclass(frozen=True)
class ProbeEntry:
    name: str
    fn: Callable
    needs_trace: bool
    # keyword the CLI fills from --class for backend micro-probes
    takes_backend: bool = True


def _entries():
    trace = [
        ("interblock", trp.probe_interblock),
        ("fork_rate", trp.probe_fork_rate),
        ("common_prefix", trp.probe_common_prefix),
        ("chain_quality", trp.probe_chain_quality),
        ("chain_growth", trp.probe_chain_growth),
        ("fairness", trp.probe_fairness),
        ("retarget", trp.probe_retarget),
    ]
    task = [
        ("hardness", tp.probe_hardness),
        ("context_sensitivity", tp.probe_context_sensitivity),
        ("amortization", tp.probe_amortization),
        ("variability", tp.probe_variability),
        ("adjustability_lower", partial(tp.probe_adjustability, direction="lower")),
        ("adjustability_upper", partial(tp.probe_adjustability, direction="upper")),
        ("switchability", tp.probe_switchability),
        ("generation_ratio", tp.probe_generation_ratio),
        ("solvability", tp.probe_solvability),
        ("tractability", tp.probe_tractability),
        ("verification_ratio", tp.probe_verification_ratio),
        ("soundness", tp.probe_soundness_completeness),
    ]
    out = {n: ProbeEntry(n, f, True, False) for n, f in trace}
    out.update({n: ProbeEntry(n, f, False) for n, f in task})
    out["spot_check"] = ProbeEntry("spot_check", tp.probe_spot_check, False, False)
    return out


PROBES = _entries()

# Table 1, one key per BTP row (a row with sub-items gets one key each).
BTP_COVERAGE = {
    "rate_a": ("BT hardness", ("hardness", "tractability")),
    "rate_b": ("context sensitivity", ("context_sensitivity",)),
    "rate_c": ("non-amortizability (limited rate)", ("amortization",)),
    "variability": ("non-zero variability across BTs", ("variability", "interblock")),
    "adj": ("adjustable lower threshold", ("adjustability_lower", "retarget")),
    "switch_a": ("no reduction in solvability on switch", ("solvability",)),
    "switch_b": ("negligible BT generation time", ("generation_ratio",)),
    "switch_c": ("no increase in solution time on switch", ("switchability",)),
    "sound": ("verification soundness", ("soundness", "spot_check")),
    "verif_a": ("BT generation efficiency (verification)", ("generation_ratio",)),
    "verif_b": ("BT verification efficiency", ("verification_ratio",)),
    "timeliness_a": ("BT generation efficiency (timeliness)", ("generation_ratio",)),
    "timeliness_b": ("BT solvability", ("solvability",)),
    "timeliness_c": ("BT tractability", ("tractability",)),
    "adj2": ("adjustable upper threshold", ("adjustability_upper", "retarget")),
    "compl": ("verification completeness", ("soundness",)),
    "fairness_a": ("no superlinear dependence on resources", ("fairness",)),
    "fairness_b": ("non-amortizability (fairness)", ("amortization",)),
}

# Rows deliberately left unmeasured, with the reason.
BTP_NON_GOALS: dict = {}

BACKBONE_COVERAGE = {
    "common_prefix": ("common_prefix",),
    "chain_quality": ("chain_quality",),
    "chain_growth": ("chain_growth",),
}


def get_probe(name: str) -> ProbeEntry:
    try:
        return PROBES[name]
    except KeyError:
        raise KeyError(f"unknown probe {name!r}; known: {', '.join(sorted(PROBES))}") from None
