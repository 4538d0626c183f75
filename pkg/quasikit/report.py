import csv
import json
import logging
from numbers import Number
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel

from quasikit import __version__
from quasikit.errors import IncompatibleReportsError

log = logging.getLogger(__name__)

REPORT_FILE = "report.json"


def to_jsonable(value: Any) -> Any:
    """Plain JSON types for numpy scalars and arrays; complex numbers become {re, im}."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class ResidualRow(BaseModel):
    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def check(cls, suite: str, name: str, value: float, tolerance: float) -> "ResidualRow":
        value = float(value)
        return cls(suite=suite, name=name, value=value, tolerance=tolerance, passed=bool(value <= tolerance))


class RunReport(BaseModel):
    command: str
    config: Dict[str, Any]
    kappa_D: float
    payload: Dict[str, Any] = {}
    residuals: List[ResidualRow] = []
    tables: Dict[str, List[Dict[str, Any]]] = {}
    wall_clock: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.residuals)

    @property
    def failing_suites(self) -> List[str]:
        return sorted({row.suite for row in self.residuals if not row.passed})

    def payload_json(self) -> str:
        return json.dumps(to_jsonable(self.payload), sort_keys=True)

    def write(self, out: Path) -> Path:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / REPORT_FILE
        path.write_text(json.dumps(to_jsonable(self.dict()), indent=2, sort_keys=True))
        _write_csv(out / "residuals.csv", [row.dict() for row in self.residuals])
        for name, rows in self.tables.items():
            _write_csv(out / f"{name}.csv", rows)
        log.info(f"wrote report of '{self.command}' to '{out}'")
        return path


def _write_csv(path: Path, rows: List[Dict[str, Any]]) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(to_jsonable(row))


def load_report(path: Path) -> RunReport:
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_FILE
    return RunReport.parse_file(path)


def _flatten(data: Any, prefix: str = "") -> Dict[str, Any]:
    if isinstance(data, dict):
        flat = {}
        for key, value in data.items():
            flat.update(_flatten(value, f"{prefix}.{key}" if prefix else str(key)))
        return flat
    if isinstance(data, list):
        flat = {}
        for i, value in enumerate(data):
            flat.update(_flatten(value, f"{prefix}[{i}]"))
        return flat
    return {prefix: data}


def _field_diff(a: Dict[str, Any], b: Dict[str, Any]) -> Dict[str, Dict[str, Any]]:
    flat_a, flat_b = _flatten(a), _flatten(b)
    diff = {}
    for key in sorted(set(flat_a) | set(flat_b)):
        left, right = flat_a.get(key), flat_b.get(key)
        if left == right:
            continue
        entry = {"a": left, "b": right}
        numeric = all(isinstance(v, Number) and not isinstance(v, bool) for v in (left, right))
        if numeric:
            entry["delta"] = right - left
        diff[key] = entry
    return diff


class ReportDiff(BaseModel):
    config: Dict[str, Dict[str, Any]] = {}
    payload: Dict[str, Dict[str, Any]] = {}
    residuals: Dict[str, Dict[str, Any]] = {}

    @property
    def empty(self) -> bool:
        return not (self.config or self.payload or self.residuals)


def diff_reports(a: RunReport, b: RunReport) -> ReportDiff:
    """Per-field differences between two runs of the same command on the same map."""
    if a.command != b.command:
        raise IncompatibleReportsError(f"Cannot diff a '{a.command}' report against a '{b.command}' report")
    if a.config.get("map") != b.config.get("map"):
        raise IncompatibleReportsError("Reports were computed for different maps")

    residuals_a = {f"{r.suite}.{r.name}": r.value for r in a.residuals}
    residuals_b = {f"{r.suite}.{r.name}": r.value for r in b.residuals}
    diff = ReportDiff(
        config=_field_diff(a.config, b.config),
        payload=_field_diff(to_jsonable(a.payload), to_jsonable(b.payload)),
        residuals=_field_diff(residuals_a, residuals_b),
    )
    log.info(
        f"report diff: {len(diff.config)} config, {len(diff.payload)} payload and {len(diff.residuals)} residual fields"
    )
    return diff
