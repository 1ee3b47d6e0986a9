"""Scan-target enumeration and manifest capture, from a live cluster or from
a local manifest directory."""

from __future__ import annotations

import enum
import logging
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .model import PodTarget

log = logging.getLogger(__name__)


class SourceMode(enum.Enum):
    CLUSTER = "cluster"
    DIRECTORY = "directory"


class SourceError(Exception):
    pass


class DirectoryMissing(SourceError):
    pass


class ClusterUnreachable(SourceError):
    pass


class TargetNotFound(SourceError):
    pass


@dataclass(frozen=True)
class SourceConfig:
    mode: SourceMode
    kubeconfig_path: str | None = None
    directory: str | None = None
    namespace_filter: tuple[str, ...] | None = None


def _kubectl(config: SourceConfig, *args: str) -> str:
    cmd = ["kubectl"]
    if config.kubeconfig_path:
        cmd += ["--kubeconfig", config.kubeconfig_path]
    cmd += list(args)
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=60)
    except (FileNotFoundError, subprocess.TimeoutExpired) as exc:
        raise ClusterUnreachable(str(exc)) from exc
    if proc.returncode != 0:
        raise ClusterUnreachable(proc.stderr.strip() or f"kubectl exited {proc.returncode}")
    return proc.stdout


def list_targets(config: SourceConfig) -> list[PodTarget]:
    """Enumerate scan subjects; manifests are fetched separately."""
    if config.mode is SourceMode.DIRECTORY:
        if not config.directory or not Path(config.directory).is_dir():
            raise DirectoryMissing(f"manifest directory not found: {config.directory}")
        targets = []
        for path in sorted(Path(config.directory).iterdir()):
            if path.suffix not in (".yaml", ".yml"):
                continue
            stem = path.stem
            if stem.endswith("-manifest"):
                stem = stem[: -len("-manifest")]
            targets.append(PodTarget(namespace="", pod_name=stem))
        return targets

    namespaces = _kubectl(config, "get", "namespaces", "-o", "jsonpath={.items[*].metadata.name}").split()
    if config.namespace_filter:
        allowed = set(config.namespace_filter)
        namespaces = [ns for ns in namespaces if ns in allowed]
    targets = []
    for ns in sorted(namespaces):
        pods = _kubectl(config, "get", "pods", "-n", ns, "-o", "jsonpath={.items[*].metadata.name}").split()
        for pod in sorted(pods):
            # Valid pod names cannot contain path separators; assert defensively.
            if "/" in pod or "\\" in pod:
                raise SourceError(f"unsafe pod name: {pod!r}")
            targets.append(PodTarget(namespace=ns, pod_name=pod))
    return targets


def fetch_manifest(target: PodTarget, config: SourceConfig, out_dir: str | Path) -> str:
    """Capture one manifest and persist it under `<out>/manifest/` before
    any scanner runs against it."""
    if config.mode is SourceMode.DIRECTORY:
        base = Path(config.directory or ".")
        for name in (f"{target.pod_name}-manifest.yaml", f"{target.pod_name}.yaml",
                     f"{target.pod_name}-manifest.yml", f"{target.pod_name}.yml"):
            path = base / name
            if path.is_file():
                manifest = path.read_text()
                break
        else:
            raise TargetNotFound(f"manifest file for pod {target.pod_name} disappeared")
    else:
        try:
            manifest = _kubectl(config, "get", "pod", target.pod_name, "-n", target.namespace, "-o", "yaml")
        except ClusterUnreachable as exc:
            if "NotFound" in str(exc) or "not found" in str(exc):
                raise TargetNotFound(f"pod {target.namespace}/{target.pod_name} deleted") from exc
            raise

    manifest_dir = Path(out_dir) / "manifest"
    manifest_dir.mkdir(parents=True, exist_ok=True)
    (manifest_dir / f"{target.file_stem}-manifest.yaml").write_text(manifest)
    return manifest
