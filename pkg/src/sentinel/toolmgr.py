"""Scanner binary management: version probing via release-page redirects,
download URL construction, binary discovery and archive installation."""

from __future__ import annotations

import io
import logging
import os
import shutil
import stat
import subprocess
import tarfile
import tempfile
import zipfile
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

import requests

from .model import Tool

log = logging.getLogger(__name__)

VERSION_TOKEN = "version"


class ToolManagerError(Exception):
    pass


class NetworkError(ToolManagerError):
    pass


class MalformedRedirect(ToolManagerError):
    pass


class UnsupportedFormat(ToolManagerError):
    pass


class MemberNotFound(ToolManagerError):
    pass


@dataclass(frozen=True)
class ToolSpec:
    name: Tool
    releases_url: str
    download_template: str
    binary_name: str

    def __post_init__(self):
        if VERSION_TOKEN not in self.download_template:
            raise ValueError("download_template must contain the version token")


def default_specs(os_name: str = "linux", arch: str = "amd64") -> list[ToolSpec]:
    # Archive name conventions differ per project; os/arch are parameterized.
    trivy_os = {"linux": "Linux"}.get(os_name, os_name)
    trivy_arch = {"amd64": "64bit"}.get(arch, arch)
    return [
        ToolSpec(
            Tool.TRIVY,
            "https://github.com/aquasecurity/trivy/releases/latest",
            f"https://github.com/aquasecurity/trivy/releases/download/vversion/trivy_version_{trivy_os}-{trivy_arch}.tar.gz",
            "trivy",
        ),
        ToolSpec(
            Tool.KUBESEC,
            "https://github.com/controlplaneio/kubesec/releases/latest",
            f"https://github.com/controlplaneio/kubesec/releases/download/vversion/kubesec_{os_name}_{arch}.tar.gz",
            "kubesec",
        ),
        ToolSpec(
            Tool.KUBE_LINTER,
            "https://github.com/stackrox/kube-linter/releases/latest",
            f"https://github.com/stackrox/kube-linter/releases/download/vversion/kube-linter-{os_name}.tar.gz",
            "kube-linter",
        ),
        ToolSpec(
            Tool.KUBE_SCORE,
            "https://github.com/zegl/kube-score/releases/latest",
            f"https://github.com/zegl/kube-score/releases/download/vversion/kube-score_version_{os_name}_{arch}.tar.gz",
            "kube-score",
        ),
    ]


def probe_latest_version(releases_url: str, session: requests.Session | None = None) -> str:
    """Follow the /releases/latest redirect and take the tag from the final
    URL's last path segment, with any leading 'v' stripped."""
    sess = session or requests
    try:
        resp = sess.head(releases_url, allow_redirects=True, timeout=30)
    except requests.RequestException as exc:
        raise NetworkError(f"probe failed for {releases_url}: {exc}") from exc
    final = resp.url
    segment = urlparse(final).path.rstrip("/").rsplit("/", 1)[-1]
    if not segment or segment == "latest":
        raise MalformedRedirect(f"no version tag in redirect target {final!r}")
    return segment.removeprefix("v")


def build_download_url(template: str, version: str) -> str:
    if not version:
        raise ValueError("version must be non-empty")
    return template.replace(VERSION_TOKEN, version)


@dataclass(frozen=True)
class ToolStatus:
    name: Tool
    found: bool
    path: str | None = None
    version: str | None = None


def _probe_binary_version(path: str) -> str | None:
    for flag in ("--version", "version"):
        try:
            proc = subprocess.run([path, flag], capture_output=True, text=True, timeout=10)
        except (OSError, subprocess.TimeoutExpired):
            return None
        out = (proc.stdout or proc.stderr).strip()
        if proc.returncode == 0 and out:
            return out.splitlines()[0]
    return None


def check_tools(specs: list[ToolSpec], bin_dir: str | Path | None = None) -> list[ToolStatus]:
    """Resolve each binary in bin_dir, then on PATH; never raises."""
    statuses = []
    for spec in specs:
        path = None
        if bin_dir:
            candidate = Path(bin_dir) / spec.binary_name
            if candidate.is_file() and os.access(candidate, os.X_OK):
                path = str(candidate)
        if path is None:
            path = shutil.which(spec.binary_name)
        if path is None:
            statuses.append(ToolStatus(spec.name, found=False))
        else:
            statuses.append(ToolStatus(spec.name, found=True, path=path, version=_probe_binary_version(path)))
    return statuses


def _extract_member(data: bytes, url_or_name: str, binary_name: str) -> bytes:
    lower = url_or_name.lower()
    if lower.endswith((".tar.gz", ".tgz")):
        try:
            with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
                for member in tar.getmembers():
                    if member.isfile() and Path(member.name).name == binary_name:
                        extracted = tar.extractfile(member)
                        assert extracted is not None
                        return extracted.read()
        except tarfile.TarError as exc:
            raise UnsupportedFormat(f"bad tar.gz archive: {exc}") from exc
        raise MemberNotFound(f"{binary_name} not in archive")
    if lower.endswith(".zip"):
        try:
            with zipfile.ZipFile(io.BytesIO(data)) as zf:
                for info in zf.infolist():
                    # junk paths: match on basename, extract flat
                    if not info.is_dir() and Path(info.filename).name == binary_name:
                        return zf.read(info)
        except zipfile.BadZipFile as exc:
            raise UnsupportedFormat(f"bad zip archive: {exc}") from exc
        raise MemberNotFound(f"{binary_name} not in archive")
    raise UnsupportedFormat(f"unsupported archive type: {url_or_name}")


def install_archive(archive: str | Path | bytes, binary_name: str, bin_dir: str | Path,
                    archive_name: str | None = None) -> str:
    """Extract only the named binary into bin_dir (write temp + rename),
    mark it executable, and remove a file-based archive afterwards."""
    bin_dir = Path(bin_dir)
    bin_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(archive, (str, Path)):
        archive_path = Path(archive)
        data = archive_path.read_bytes()
        name = archive_name or archive_path.name
    else:
        archive_path = None
        data = archive
        if not archive_name:
            raise ValueError("archive_name required for in-memory archives")
        name = archive_name

    payload = _extract_member(data, name, binary_name)
    fd, tmp = tempfile.mkstemp(dir=bin_dir, prefix=f".{binary_name}.")
    with os.fdopen(fd, "wb") as fh:
        fh.write(payload)
    dest = bin_dir / binary_name
    os.replace(tmp, dest)
    dest.chmod(dest.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    if archive_path is not None and archive_path.exists():
        archive_path.unlink()
    return str(dest)


def install_tool(spec: ToolSpec, bin_dir: str | Path, session: requests.Session | None = None) -> str:
    """Probe the latest version, download the archive and install the binary."""
    version = probe_latest_version(spec.releases_url, session=session)
    url = build_download_url(spec.download_template, version)
    sess = session or requests
    try:
        resp = sess.get(url, timeout=300)
        resp.raise_for_status()
    except requests.RequestException as exc:
        raise NetworkError(f"download failed for {url}: {exc}") from exc
    log.info("downloading %s version %s", spec.binary_name, version)
    return install_archive(resp.content, spec.binary_name, bin_dir, archive_name=url)
