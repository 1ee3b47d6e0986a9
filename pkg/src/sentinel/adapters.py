"""Scanner invocation and output parsing for trivy, kubesec, kube-score and
kube-linter, plus a hermetic fixture adapter for tests."""

from __future__ import annotations

import json
import logging
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .model import (
    Finding,
    ReportStatus,
    Severity,
    Tool,
    ToolReport,
    severity_parse,
    severity_rank,
)

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 120.0


def severity_from_points(points: int) -> Severity:
    if points == -30:
        return Severity.CRITICAL
    if points in (-9, -7):
        return Severity.HIGH
    if points in (-3, -1):
        return Severity.MEDIUM
    if points in (1, 3):
        return Severity.LOW
    return Severity.UNKNOWN


def severity_from_grade(grade: int | None) -> Severity:
    # Grades above 10 are out of the documented range and route to UNKNOWN.
    if grade is None:
        return Severity.UNKNOWN
    if grade == 10:
        return Severity.CRITICAL
    if 7 <= grade < 10:
        return Severity.HIGH
    if 5 <= grade < 7:
        return Severity.MEDIUM
    if grade < 5:
        return Severity.LOW
    return Severity.UNKNOWN


@dataclass(frozen=True)
class KubesecRecord:
    id: str
    selector: str
    reason: str
    points: int
    severity: Severity


@dataclass(frozen=True)
class KubescoreRecord:
    name: str
    id: str
    comment: str
    grade: int | None
    severity: Severity


@dataclass(frozen=True)
class KubelinterRecord:
    check: str
    message: str
    remediation: str


@dataclass(frozen=True)
class TrivyRecord:
    type_: str
    id: str
    avdid: str
    title: str
    description: str
    message: str
    resolution: str
    severity: Severity


ToolRecord = KubesecRecord | KubescoreRecord | KubelinterRecord | TrivyRecord


class ScannerError(Exception):
    pass


def build_command(tool: Tool, manifest_path: str, binary_path: str, trivy_output: str = "") -> list[str]:
    if tool is Tool.TRIVY:
        return [
            binary_path,
            "fs",
            "--scanners",
            "vuln,secret,misconfig",
            manifest_path,
            "-f",
            "json",
            "--output",
            trivy_output,
        ]
    if tool is Tool.KUBESEC:
        return [binary_path, "scan", manifest_path, "--output", "json"]
    if tool is Tool.KUBE_SCORE:
        return [binary_path, "score", manifest_path, "--output-format", "json"]
    if tool is Tool.KUBE_LINTER:
        return [binary_path, "lint", manifest_path, "--format", "json"]
    raise ScannerError(f"no command line for tool {tool.value}")


def run_scanner(
    tool: Tool,
    manifest_path: str | Path,
    binary_path: str | Path | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> tuple[str, ReportStatus, float]:
    """Spawn one scanner against one manifest; returns (raw output, status,
    wall-clock seconds). Never raises on tool failure."""
    manifest_path = str(manifest_path)
    binary = str(binary_path) if binary_path else tool.value
    resolved = shutil.which(binary) if os.sep not in binary else (binary if os.path.isfile(binary) else None)
    if resolved is None:
        return "", ReportStatus.TOOL_MISSING, 0.0

    start = time.perf_counter()
    trivy_out = ""
    try:
        if tool is Tool.TRIVY:
            fd, trivy_out = tempfile.mkstemp(suffix=".json")
            os.close(fd)
        cmd = build_command(tool, manifest_path, resolved, trivy_out)
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout_s)
        if tool is Tool.TRIVY:
            raw = Path(trivy_out).read_text() if os.path.getsize(trivy_out) else ""
        else:
            raw = proc.stdout
        elapsed = time.perf_counter() - start
        # Several scanners signal finding counts via exit status; accept any
        # exit code as long as the output parses downstream.
        if not raw.strip() and proc.returncode != 0:
            log.warning("%s exited %d with no output: %s", tool.value, proc.returncode, proc.stderr[:500])
            return "", ReportStatus.EXEC_FAILED, elapsed
        return raw, ReportStatus.OK, elapsed
    except subprocess.TimeoutExpired:
        log.warning("%s timed out after %.0fs on %s", tool.value, timeout_s, manifest_path)
        return "", ReportStatus.EXEC_FAILED, time.perf_counter() - start
    finally:
        if trivy_out and os.path.exists(trivy_out):
            os.unlink(trivy_out)


def read_fixture(fixture_dir: str | Path, pod_name: str, tool: Tool) -> tuple[str, ReportStatus, float]:
    """Fixture adapter: canned output from `<pod>-<tool>.json`."""
    path = Path(fixture_dir) / f"{pod_name}-{tool.value}.json"
    if not path.is_file():
        return "", ReportStatus.TOOL_MISSING, 0.0
    return path.read_text(), ReportStatus.OK, 0.0


def _as_list(value) -> list:
    return value if isinstance(value, list) else []


def _parse_kubesec(doc) -> list[KubesecRecord]:
    records = []
    for scan in _as_list(doc):
        if not isinstance(scan, dict):
            continue
        scoring = scan.get("scoring")
        advise = _as_list(scoring.get("advise")) if isinstance(scoring, dict) else []
        for item in advise:
            if not isinstance(item, dict):
                continue
            points = item.get("points")
            points = points if isinstance(points, int) else 0
            records.append(
                KubesecRecord(
                    id=str(item.get("id", "")),
                    selector=str(item.get("selector", "")),
                    reason=str(item.get("reason", "")),
                    points=points,
                    severity=severity_from_points(points),
                )
            )
    return records


def _parse_kubescore(doc) -> list[KubescoreRecord]:
    records = []
    for obj in _as_list(doc):
        if not isinstance(obj, dict):
            continue
        for item in _as_list(obj.get("checks")):
            if not isinstance(item, dict):
                continue
            check = item.get("check") if isinstance(item.get("check"), dict) else {}
            grade = item.get("grade")
            grade = grade if isinstance(grade, int) else None
            records.append(
                KubescoreRecord(
                    name=str(check.get("name", "")),
                    id=str(check.get("id", "")),
                    comment=str(check.get("comment", "")),
                    grade=grade,
                    severity=severity_from_grade(grade),
                )
            )
    return records


def _parse_kubelinter(doc) -> list[KubelinterRecord]:
    records = []
    reports = doc.get("Reports") if isinstance(doc, dict) else None
    for item in _as_list(reports):
        if not isinstance(item, dict):
            continue
        diagnostic = item.get("Diagnostic") if isinstance(item.get("Diagnostic"), dict) else {}
        records.append(
            KubelinterRecord(
                check=str(item.get("Check", "")),
                message=str(diagnostic.get("Message", "")),
                remediation=str(item.get("Remediation", "")),
            )
        )
    return records


def _parse_trivy(doc) -> list[TrivyRecord]:
    records = []
    results = doc.get("Results") if isinstance(doc, dict) else None
    for result in _as_list(results):
        if not isinstance(result, dict):
            continue
        for item in _as_list(result.get("Misconfigurations")):
            # Only objects that carry a Severity survive.
            if not isinstance(item, dict) or "Severity" not in item:
                continue
            records.append(
                TrivyRecord(
                    type_=str(item.get("Type", "")),
                    id=str(item.get("ID", "")),
                    avdid=str(item.get("AVDID", "")),
                    title=str(item.get("Title", "")),
                    description=str(item.get("Description", "")),
                    message=str(item.get("Message", "")),
                    resolution=str(item.get("Resolution", "")),
                    severity=severity_parse(str(item.get("Severity", ""))),
                )
            )
    records.sort(key=lambda r: severity_rank(r.severity))  # stable: ties keep document order
    return records


def _parse_fixture(doc) -> list[TrivyRecord]:
    # Fixture files hold template-shaped objects; parse them like trivy's
    # already-templated records but without the severity filter or sort.
    records = []
    for item in _as_list(doc):
        if not isinstance(item, dict):
            continue
        records.append(
            TrivyRecord(
                type_=str(item.get("Type", "")),
                id=str(item.get("ID", "")),
                avdid=str(item.get("AVDID", "")),
                title=str(item.get("Title", "")),
                description=str(item.get("Description", "")),
                message=str(item.get("Message", "")),
                resolution=str(item.get("Resolution", "")),
                severity=severity_parse(str(item.get("Severity", ""))),
            )
        )
    return records


_PARSERS = {
    Tool.KUBESEC: _parse_kubesec,
    Tool.KUBE_SCORE: _parse_kubescore,
    Tool.KUBE_LINTER: _parse_kubelinter,
    Tool.TRIVY: _parse_trivy,
    Tool.FIXTURE: _parse_fixture,
}


def parse_output(tool: Tool, raw: str) -> tuple[list[ToolRecord], ReportStatus]:
    """Parse one scanner's raw output; malformed JSON degrades to
    (empty, parse_failed), unexpected-but-valid shapes to (empty, ok)."""
    if not raw.strip():
        return [], ReportStatus.OK
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError:
        return [], ReportStatus.PARSE_FAILED
    return _PARSERS[tool](doc), ReportStatus.OK


def record_to_raw_dict(tool: Tool, record: ToolRecord) -> dict:
    """Tool-record JSON shape matching the per-tool result files."""
    if tool is Tool.KUBESEC:
        return {
            "id": record.id,
            "selector": record.selector,
            "reason": record.reason,
            "points": record.points,
            "severity": record.severity.value,
        }
    if tool is Tool.KUBE_SCORE:
        return {
            "name": record.name,
            "id": record.id,
            "comment": record.comment,
            "grade": record.grade,
            "severity": record.severity.value,
        }
    if tool is Tool.KUBE_LINTER:
        return {
            "Check": record.check,
            "Message": record.message,
            "Remediation": record.remediation,
            "Severity": "Unknown",
        }
    # trivy and fixture records are already template shaped
    return {
        "Type": record.type_,
        "ID": record.id,
        "AVDID": record.avdid,
        "Title": record.title,
        "Description": record.description,
        "Message": record.message,
        "Resolution": record.resolution,
        "Severity": record.severity.value,
    }
