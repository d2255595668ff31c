"""Report containers and the three emitters (json, csv, text).

Reports are deterministic by construction: no timestamps, canonical scalar
text, sorted JSON keys.  Identical scenario plus seed therefore means
identical bytes in exact mode, which is what the regression checker diffs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    """A replayed set of invariant checks; failures are entries, not errors."""

    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


@dataclass
class Table:
    """A named tabular section; cells are canonical scalar/index strings."""

    name: str
    columns: List[str]
    rows: List[List[str]]

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": self.columns, "rows": self.rows}

    @classmethod
    def from_dict(cls, data: dict) -> "Table":
        return cls(
            name=data["name"],
            columns=list(data["columns"]),
            rows=[list(r) for r in data["rows"]],
        )


@dataclass
class Report:
    """One scenario's outcome: checks, tables, and free-form data."""

    scenario: str
    task: str
    scalar_mode: str
    seed: int
    scenario_hash: str
    version: str
    checks: List[CheckResult] = field(default_factory=list)
    tables: List[Table] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "task": self.task,
            "scalar_mode": self.scalar_mode,
            "seed": self.seed,
            "scenario_hash": self.scenario_hash,
            "version": self.version,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "tables": [t.to_dict() for t in self.tables],
            "data": self.data,
        }


def scenario_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def emit_json(report: Report) -> bytes:
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    return (text + "\n").encode("utf-8")


def emit_csv(report: Report) -> bytes:
    """Tables as sections: a `# table: NAME` marker, a header row, data rows."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for table in report.tables:
        out.write(f"# table: {table.name}\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow(row)
        out.write("\n")
    return out.getvalue().encode("utf-8")


def parse_csv_tables(blob: bytes) -> List[Table]:
    """Inverse of emit_csv on the tabular sections."""
    tables: List[Table] = []
    current: Optional[Table] = None
    for line in blob.decode("utf-8").splitlines():
        if line.startswith("# table: "):
            current = Table(name=line[len("# table: "):], columns=[], rows=[])
            tables.append(current)
        elif not line.strip():
            current = None
        elif current is not None:
            cells = next(csv.reader([line]))
            if not current.columns:
                current.columns = cells
            else:
                current.rows.append(cells)
    return tables


def emit_text(report: Report) -> bytes:
    lines = [
        f"scenario: {report.scenario}",
        f"task: {report.task}",
        f"scalar mode: {report.scalar_mode}   seed: {report.seed}",
        f"scenario hash: {report.scenario_hash}",
        f"version: {report.version}",
        "",
    ]
    for check in report.checks:
        mark = "PASS" if check.passed else "FAIL"
        lines.append(f"[{mark}] {check.name}" + (f": {check.detail}" if check.detail else ""))
    for table in report.tables:
        lines.append("")
        lines.append(f"-- {table.name} --")
        lines.append(" | ".join(table.columns))
        for row in table.rows:
            lines.append(" | ".join(row))
    lines.append("")
    lines.append("result: " + ("PASS" if report.passed else "FAIL"))
    return ("\n".join(lines) + "\n").encode("utf-8")


EMITTERS = {"json": emit_json, "csv": emit_csv, "text": emit_text}


def emit_report(report: Report, fmt: str) -> bytes:
    try:
        emitter = EMITTERS[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}") from None
    return emitter(report)
