"""Check records, suite execution and the JSON report format."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import jsonschema

from .errors import SchemaViolation

TIMING_FIELDS = ("wall_time_ms",)


@dataclass
class Outcome:
    """What a check returns; ``ok=None`` marks a skipped check."""

    ok: bool | None
    witness: object = None
    lhs: str | None = None
    rhs: str | None = None
    max_abs_error: float | None = 0.0
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[], Outcome]


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    return str(value)


def _execute(check: Check) -> dict:
    start = time.perf_counter()
    try:
        out = check.run()
    except Exception as exc:  # a crashing check is a failing check
        out = Outcome(False, witness=f"{type(exc).__name__}: {exc}", max_abs_error=None)
    rec = {"name": check.name,
           "status": "skip" if out.ok is None else ("pass" if out.ok else "fail"),
           "max_abs_error": out.max_abs_error}
    if out.witness is not None:
        rec["witness"] = _jsonable(out.witness)
    if out.lhs is not None:
        rec["lhs"] = out.lhs
    if out.rhs is not None:
        rec["rhs"] = out.rhs
    if out.details:
        rec["details"] = _jsonable(out.details)
    rec["wall_time_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return rec


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LCQFT_WORKERS", "1")))
    except ValueError:
        return 1


def run_checks(checks: Sequence[Check], workers: int | None = None) -> list[dict]:
    """Run checks (possibly concurrently); records come back sorted by name."""
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute, checks))
    else:
        records = [_execute(c) for c in checks]
    return sorted(records, key=lambda r: r["name"])


def build_report(config: dict, records: list[dict], version: str) -> dict:
    passed = sum(r["status"] == "pass" for r in records)
    failed = sum(r["status"] == "fail" for r in records)
    skipped = sum(r["status"] == "skip" for r in records)
    report = {"tool": "lcqft", "version": version, "config": config, "checks": records,
              "summary": {"passed": passed, "failed": failed, "skipped": skipped},
              "ok": failed == 0}
    validate_report(report)
    return report


def report_schema() -> dict:
    text = resources.files("lcqft").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, report_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaViolation(f"report field {path}: {exc.message}") from None


def strip_timing(report: dict) -> dict:
    """A copy without timing fields, for determinism comparisons."""
    out = dict(report)
    out["checks"] = [{k: v for k, v in r.items() if k not in TIMING_FIELDS}
                     for r in report["checks"]]
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
