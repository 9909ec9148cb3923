"""Measurement probes over event traces and task backends."""

from .registry import BACKBONE_COVERAGE, BTP_COVERAGE, BTP_NON_GOALS, PROBES, ProbeEntry, get_probe
from .report import (
    REPORT_COLUMNS,
    ProbeReport,
    Verdict,
    read_reports_csv,
    reports_to_csv,
    summary_table,
    write_reports,
)
from .task_probes import (
    probe_adjustability,
    probe_amortization,
    probe_context_sensitivity,
    probe_generation_ratio,
    probe_hardness,
    probe_solvability,
    probe_soundness_completeness,
    probe_spot_check,
    probe_switchability,
    probe_tractability,
    probe_variability,
    probe_verification_ratio,
)
from .trace_probes import (
    probe_chain_growth,
    probe_chain_quality,
    probe_common_prefix,
    probe_fairness,
    probe_fork_rate,
    probe_interblock,
    probe_retarget,
    window_means,
)
