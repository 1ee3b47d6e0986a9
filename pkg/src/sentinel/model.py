"""Shared domain types: severities, the common finding template, scan targets,
tool reports and cycle metrics."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

# Serialized key order of the common template. Every merged file and every
# API payload uses exactly these eight keys.
TEMPLATE_KEYS = (
    "Type",
    "ID",
    "AVDID",
    "Title",
    "Description",
    "Message",
    "Resolution",
    "Severity",
)

KUBERNETES_SECURITY_CHECK = "Kubernetes Security Check"


class Severity(enum.Enum):
    CRITICAL = "CRITICAL"
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"
    LOW = "LOW"
    UNKNOWN = "UNKNOWN"


_RANK = {
    Severity.CRITICAL: 0,
    Severity.HIGH: 1,
    Severity.MEDIUM: 2,
    Severity.LOW: 3,
    Severity.UNKNOWN: 4,
}


def severity_rank(s: Severity) -> int:
    """Display order: CRITICAL first, UNKNOWN last."""
    return _RANK[s]


def severity_parse(text: str) -> Severity:
    """Case-insensitive severity lookup; anything unrecognized is UNKNOWN."""
    try:
        return Severity[text.strip().upper()]
    except (KeyError, AttributeError):
        return Severity.UNKNOWN


class Tool(enum.Enum):
    TRIVY = "trivy"
    KUBESEC = "kubesec"
    KUBE_SCORE = "kube-score"
    KUBE_LINTER = "kube-linter"
    FIXTURE = "fixture"


# Fixed merge order; FIXTURE slots in last so fixture-only runs still merge.
MERGE_ORDER = (Tool.TRIVY, Tool.KUBESEC, Tool.KUBE_SCORE, Tool.KUBE_LINTER, Tool.FIXTURE)


def tool_parse(text: str) -> Tool:
    for t in Tool:
        if t.value == text.strip().lower():
            return t
    raise ValueError(f"unknown tool: {text!r}")


@dataclass(frozen=True)
class Finding:
    """One normalized finding in the common eight-field template.

    ``source_tool`` is internal metadata and never serialized.
    """

    type_: str
    id: str
    avdid: str
    title: str
    description: str
    message: str
    resolution: str
    severity: Severity
    source_tool: Tool

    def to_template(self) -> dict:
        return {
            "Type": self.type_,
            "ID": self.id,
            "AVDID": self.avdid,
            "Title": self.title,
            "Description": self.description,
            "Message": self.message,
            "Resolution": self.resolution,
            "Severity": self.severity.value,
        }

    @classmethod
    def from_template(cls, obj: dict, source_tool: Tool = Tool.FIXTURE) -> "Finding":
        return cls(
            type_=str(obj.get("Type", "")),
            id=str(obj.get("ID", "")),
            avdid=str(obj.get("AVDID", "")),
            title=str(obj.get("Title", "")),
            description=str(obj.get("Description", "")),
            message=str(obj.get("Message", "")),
            resolution=str(obj.get("Resolution", "")),
            severity=severity_parse(str(obj.get("Severity", ""))),
            source_tool=source_tool,
        )


def dump_findings(findings: list[Finding]) -> str:
    """Serialize a finding list as a JSON array of template objects."""
    return json.dumps([f.to_template() for f in findings], indent=2) + "\n"


@dataclass(frozen=True)
class PodTarget:
    namespace: str
    pod_name: str
    manifest: str = ""

    def __post_init__(self):
        if not self.pod_name:
            raise ValueError("pod_name must be non-empty")

    @property
    def file_stem(self) -> str:
        # Namespace prefix avoids cross-namespace collisions in cluster mode.
        if self.namespace:
            return f"{self.namespace}__{self.pod_name}"
        return self.pod_name


class ReportStatus(enum.Enum):
    OK = "ok"
    TOOL_MISSING = "tool_missing"
    EXEC_FAILED = "exec_failed"
    PARSE_FAILED = "parse_failed"


@dataclass(frozen=True)
class ToolReport:
    tool: Tool
    pod_name: str
    findings: tuple = ()
    raw: str = ""
    status: ReportStatus = ReportStatus.OK
    duration_s: float = 0.0

    def __post_init__(self):
        if self.status is not ReportStatus.OK and self.findings:
            raise ValueError("non-ok report must carry no findings")


@dataclass
class CycleMetrics:
    scan_s: float = 0.0
    dedupe_s: float = 0.0
    normalize_s: float = 0.0
    merge_s: float = 0.0
    persist_s: float = 0.0
    total_s: float = 0.0
    pods_scanned: int = 0
    per_tool_s: dict = field(default_factory=dict)

    STAGE_FIELDS = ("scan_s", "dedupe_s", "normalize_s", "merge_s", "persist_s")

    def stage_sum(self) -> float:
        return sum(getattr(self, f) for f in self.STAGE_FIELDS)

    def to_dict(self) -> dict:
        return {
            "scan_s": self.scan_s,
            "dedupe_s": self.dedupe_s,
            "normalize_s": self.normalize_s,
            "merge_s": self.merge_s,
            "persist_s": self.persist_s,
            "total_s": self.total_s,
            "pods_scanned": self.pods_scanned,
            "per_tool_s": {t.value if isinstance(t, Tool) else t: v for t, v in self.per_tool_s.items()},
        }
