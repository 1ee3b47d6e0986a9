"""Conversion of tool-specific records into the common eight-field template."""

from __future__ import annotations

from .adapters import (
    KubelinterRecord,
    KubescoreRecord,
    KubesecRecord,
    ToolRecord,
    TrivyRecord,
)
from .model import KUBERNETES_SECURITY_CHECK, Finding, Severity, Tool


def normalize(tool: Tool, record: ToolRecord) -> Finding:
    if isinstance(record, KubesecRecord):
        return Finding(
            type_=KUBERNETES_SECURITY_CHECK,
            id="",
            avdid="",
            title=record.id,
            description="",
            message=record.reason,
            resolution=record.selector,
            severity=record.severity,
            source_tool=tool,
        )
    if isinstance(record, KubescoreRecord):
        return Finding(
            type_=KUBERNETES_SECURITY_CHECK,
            id=record.id,
            avdid="",
            title=record.name,
            description="",
            message=record.comment,
            resolution="",
            severity=record.severity,
            source_tool=tool,
        )
    if isinstance(record, KubelinterRecord):
        return Finding(
            type_=KUBERNETES_SECURITY_CHECK,
            id="",
            avdid="",
            title=record.check,
            description="",
            message=record.message,
            resolution=record.remediation,
            severity=Severity.UNKNOWN,
            source_tool=tool,
        )
    if isinstance(record, TrivyRecord):
        return Finding(
            type_=record.type_,
            id=record.id,
            avdid=record.avdid,
            title=record.title,
            description=record.description,
            message=record.message,
            resolution=record.resolution,
            severity=record.severity,
            source_tool=tool,
        )
    raise TypeError(f"unknown record type: {type(record).__name__}")


def normalize_all(tool: Tool, records: list[ToolRecord]) -> list[Finding]:
    return [normalize(tool, r) for r in records]
