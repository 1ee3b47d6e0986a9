"""Cycle orchestration: capture, scan, normalize, dedupe, merge, persist,
with per-stage wall-clock instrumentation and an optional fixed-rate loop."""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import adapters
from .dedupe import DedupeConfig, dedupe_pod
from .model import MERGE_ORDER, CycleMetrics, Finding, ReportStatus, Tool, ToolReport, dump_findings
from .normalize import normalize_all
from .source import SourceConfig, TargetNotFound, fetch_manifest, list_targets
from .store import StoreError

log = logging.getLogger(__name__)

DEFAULT_TOOLS = (Tool.TRIVY, Tool.KUBESEC, Tool.KUBE_SCORE, Tool.KUBE_LINTER)


@dataclass(frozen=True)
class PipelineConfig:
    source: SourceConfig
    tools: tuple[Tool, ...] = DEFAULT_TOOLS
    dedupe: DedupeConfig = field(default_factory=DedupeConfig)
    out_dir: str = "./output"
    interval_s: float | None = None
    parallelism: int = 4
    bin_dir: str | None = None
    fixture_dir: str | None = None
    tool_timeout_s: float = adapters.DEFAULT_TIMEOUT_S

    def __post_init__(self):
        if not self.tools:
            raise ValueError("tools must be non-empty")


def merge_pod(reports: dict[Tool, list[Finding]]) -> list[Finding]:
    """Concatenate per-tool lists in fixed tool order, intra-tool order kept."""
    merged: list[Finding] = []
    for tool in MERGE_ORDER:
        merged.extend(reports.get(tool, []))
    return merged


def _binary_for(config: PipelineConfig, tool: Tool) -> str | None:
    if config.bin_dir:
        candidate = Path(config.bin_dir) / tool.value
        if candidate.is_file():
            return str(candidate)
    return None


def _scan_pod(config: PipelineConfig, target, manifest_path: Path) -> dict[Tool, ToolReport]:
    reports: dict[Tool, ToolReport] = {}
    for tool in config.tools:
        if config.fixture_dir:
            raw, status, elapsed = adapters.read_fixture(config.fixture_dir, target.pod_name, tool)
        else:
            raw, status, elapsed = adapters.run_scanner(
                tool, manifest_path, _binary_for(config, tool), timeout_s=config.tool_timeout_s
            )
        records: list = []
        if status is ReportStatus.OK:
            records, status = adapters.parse_output(tool, raw)
            if status is not ReportStatus.OK:
                records = []
        reports[tool] = ToolReport(
            tool=tool,
            pod_name=target.pod_name,
            findings=tuple(records),
            raw=raw if status is ReportStatus.OK else raw,
            status=status,
            duration_s=elapsed,
        )
    return reports


def _write_json(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload)


def run_cycle(config: PipelineConfig, store) -> CycleMetrics:
    """One full pipeline pass. Tool failures degrade to empty reports and are
    summarized; source and store failures abort with a diagnostic."""
    metrics = CycleMetrics()
    t_start = time.perf_counter()
    out = Path(config.out_dir)

    # scan: enumerate, capture manifests, run every tool per pod
    t0 = time.perf_counter()
    targets = list_targets(config.source)
    pod_reports: dict[str, dict[Tool, ToolReport]] = {}
    failures: list[str] = []

    def scan_one(target):
        try:
            fetch_manifest(target, config.source, out)
        except TargetNotFound as exc:
            log.warning("skipping %s: %s", target.pod_name, exc)
            return target, None
        manifest_path = out / "manifest" / f"{target.file_stem}-manifest.yaml"
        return target, _scan_pod(config, target, manifest_path)

    with ThreadPoolExecutor(max_workers=max(1, config.parallelism)) as pool:
        for target, reports in pool.map(scan_one, targets):
            if reports is None:
                continue
            pod_reports[target.file_stem] = reports

    per_tool: dict[Tool, float] = {t: 0.0 for t in config.tools}
    for reports in pod_reports.values():
        for tool, report in reports.items():
            per_tool[tool] += report.duration_s
            if report.status is not ReportStatus.OK:
                failures.append(f"{report.pod_name}/{tool.value}: {report.status.value}")
    # per-tool result files in the tool-record shape, deterministic pod order
    for stem in sorted(pod_reports):
        for tool, report in pod_reports[stem].items():
            rows = [adapters.record_to_raw_dict(tool, r) for r in report.findings]
            _write_json(out / tool.value / f"{stem}-result.json", json.dumps(rows, indent=2) + "\n")
    metrics.scan_s = time.perf_counter() - t0
    metrics.per_tool_s = per_tool
    metrics.pods_scanned = len(pod_reports)
    if failures:
        log.warning("tool failures this cycle: %s", "; ".join(failures))

    # normalize
    t0 = time.perf_counter()
    normalized: dict[str, dict[Tool, list[Finding]]] = {}
    for stem, reports in pod_reports.items():
        normalized[stem] = {
            tool: normalize_all(tool, list(report.findings)) for tool, report in reports.items()
        }
    metrics.normalize_s = time.perf_counter() - t0

    # dedupe
    t0 = time.perf_counter()
    deduped = {stem: dedupe_pod(findings, config.dedupe) for stem, findings in normalized.items()}
    metrics.dedupe_s = time.perf_counter() - t0

    # merge
    t0 = time.perf_counter()
    merged: dict[str, list[Finding]] = {}
    for stem in sorted(deduped):
        merged[stem] = merge_pod(deduped[stem])
        _write_json(out / "merged" / f"{stem}-result.json", dump_findings(merged[stem]))
    metrics.merge_s = time.perf_counter() - t0

    # persist
    t0 = time.perf_counter()
    persisted: list[str] = []
    try:
        for stem in sorted(merged):
            store.replace_collection(f"{stem}-result", merged[stem])
            persisted.append(f"{stem}-result")
    except StoreError as exc:
        raise StoreError(f"persist aborted after updating {persisted}: {exc}") from exc
    metrics.persist_s = time.perf_counter() - t0

    metrics.total_s = time.perf_counter() - t_start
    return metrics


def run_loop(config: PipelineConfig, store, stop_event: threading.Event | None = None) -> None:
    """Fixed-rate loop: each cycle starts interval_s after the previous
    cycle's start, skipping ticks the prior cycle overran."""
    if config.interval_s is None:
        raise ValueError("run_loop requires interval_s")
    stop = stop_event or threading.Event()
    interval = config.interval_s
    next_start = time.monotonic()
    consecutive_failures = 0
    while not stop.is_set():
        now = time.monotonic()
        if now < next_start:
            if stop.wait(next_start - now):
                break
        try:
            metrics = run_cycle(config, store)
            consecutive_failures = 0
            log.info("cycle done: %d pods in %.2fs", metrics.pods_scanned, metrics.total_s)
        except Exception:
            consecutive_failures += 1
            log.exception("cycle failed (%d consecutive)", consecutive_failures)
            if consecutive_failures >= 3:
                raise
        # advance past overrun ticks
        next_start += interval
        now = time.monotonic()
        while next_start <= now:
            next_start += interval
