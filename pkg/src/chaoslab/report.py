"""Machine-readable experiment reports with explicit pass/fail rows."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class ReportRow:
    label: str
    value: float | None
    bound: float | None = None
    passed: bool | None = None   # None marks an informational row
    stderr: float | None = None


@dataclass
class Report:
    experiment: str
    params: dict
    seed: int | None
    rows: list[ReportRow] = field(default_factory=list)

    def add(
        self,
        label: str,
        value: float | None,
        bound: float | None = None,
        passed: bool | None = None,
        stderr: float | None = None,
    ) -> None:
        if stderr is not None and math.isnan(stderr):
            stderr = None
        self.rows.append(
            ReportRow(
                label,
                None if value is None else float(value),
                None if bound is None else float(bound),
                None if passed is None else bool(passed),
                None if stderr is None else float(stderr),
            )
        )

    def exit_code(self) -> int:
        return 2 if any(r.passed is False for r in self.rows) else 0


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def render_text(report: Report) -> str:
    lines = [f"experiment: {report.experiment}"]
    if report.params:
        lines.append(
            "params: " + " ".join(f"{k}={v}" for k, v in report.params.items())
        )
    if report.seed is not None:
        lines.append(f"seed: {report.seed}")
    lines.append(f"{'label':<52} {'value':>20} {'bound':>20} {'status':>6} {'stderr':>12}")
    for r in report.rows:
        status = "" if r.passed is None else ("PASS" if r.passed else "FAIL")
        lines.append(
            f"{r.label:<52} {_fmt(r.value):>20} {_fmt(r.bound):>20} "
            f"{status:>6} {_fmt(r.stderr):>12}"
        )
    n_checked = sum(r.passed is not None for r in report.rows)
    n_failed = sum(r.passed is False for r in report.rows)
    lines.append(f"checks: {n_checked - n_failed}/{n_checked} passed")
    return "\n".join(lines)


def render_json(report: Report) -> str:
    payload = {
        "experiment": report.experiment,
        "params": report.params,
        "seed": report.seed,
        "rows": [
            {
                "label": r.label,
                "value": r.value,
                "bound": r.bound,
                "pass": r.passed,
                "stderr": r.stderr,
            }
            for r in report.rows
        ],
    }
    return json.dumps(payload, indent=2)
