"""Probe results and their CSV / text rendering."""

from __future__ import annotations

import csv
import io
import zlib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

REPORT_COLUMNS = ("property_id", "statistic", "value", "n", "dispersion", "verdict")


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    REPORT_ONLY = "ReportOnly"


@dataclass(frozen=True)
class ProbeReport:
    """One measured statistic.

    ``dispersion`` is a standard error, a test p-value or a bootstrap
    standard error; ``dispersion_kind`` says which.  A verdict other than
    ReportOnly means the probe declared a threshold.
    """

    property_id: str
    statistic: str
    value: float
    n: int
    dispersion: float
    dispersion_kind: str = "stderr"
    verdict: Verdict = Verdict.REPORT_ONLY
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def row(self) -> list:
        return [self.property_id, self.statistic, _fmt(self.value), str(self.n), _fmt(self.dispersion),
                self.verdict.value]


def _fmt(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    return repr(x)


def verdict_if(declared: bool, ok: bool) -> Verdict:
    if not declared:
        return Verdict.REPORT_ONLY
    return Verdict.PASS if ok else Verdict.FAIL


def probe_rng(probe_id: str, seed: int) -> np.random.Generator:
    """Independent stream per (probe, seed)."""
    return np.random.default_rng([zlib.crc32(probe_id.encode()), int(seed)])


def bootstrap_stderr(samples, stat, rng, reps: int = 200) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        return float("nan")
    idx = rng.integers(0, x.size, size=(reps, x.size))
    return float(np.std([stat(x[i]) for i in idx], ddof=1))


def cv(x) -> float:
    x = np.asarray(x, dtype=float)
    m = x.mean()
    return float(x.std(ddof=1) / m) if m else 0.0


def flatten(reports) -> list:
    out = []
    for r in reports:
        if isinstance(r, ProbeReport):
            out.append(r)
        else:
            out.extend(flatten(r))
    return out


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in flatten(reports):
        w.writerow(r.row())
    return buf.getvalue()


def read_reports_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != REPORT_COLUMNS:
        raise ValueError(f"report header must be {','.join(REPORT_COLUMNS)}")
    out = []
    for pid, stat, value, n, disp, verdict in reader:
        out.append(ProbeReport(pid, stat, float(value), int(n), float(disp), "", Verdict(verdict)))
    return out


def summary_table(reports) -> str:
    reports = flatten(reports)
    headers = ("property", "statistic", "value", "n", "dispersion", "verdict")
    rows = [
        (r.property_id, r.statistic, f"{r.value:.6g}", str(r.n),
         f"{r.dispersion:.3g}" + (f" ({r.dispersion_kind})" if r.dispersion_kind else ""), r.verdict.value)
        for r in reports
    ]
    widths = [max([len(h)] + [len(row[i]) for row in rows]) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
    counts = {v: sum(r.verdict is v for r in reports) for v in Verdict}
    out.append("")
    out.append(", ".join(f"{v.value}: {c}" for v, c in counts.items()))
    return "\n".join(out) + "\n"


def write_reports(reports, directory, csv_name: str = "report.csv", summary_name: str = "summary.txt") -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / csv_name).write_text(reports_to_csv(reports))
    (directory / summary_name).write_text(summary_table(reports))
    return directory / csv_name
