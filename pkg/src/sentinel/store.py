"""Findings persistence: named collections with atomic replace semantics and
the three triage query shapes (summary, by-severity, by-collection).

Default backend is an on-disk directory of JSON array files, one per
collection, byte-compatible with the merged output files so a store can be
seeded by copying `<out>/merged/`. A MongoDB backend is available behind the
same interface for deployments that already run one.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from pathlib import Path

from .model import Finding, Severity, Tool, dump_findings, severity_rank

log = logging.getLogger(__name__)


class StoreError(Exception):
    pass


class SummaryCounts:
    def __init__(self, severity_counts: dict[Severity, int], per_collection: dict[str, dict[Severity, int]]):
        self.severity_counts = severity_counts
        self.per_collection = per_collection


class FileStore:
    """One JSON array file per collection under a root directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _path(self, name: str) -> Path:
        if not name or "/" in name or "\\" in name or name.startswith("."):
            raise StoreError(f"invalid collection name: {name!r}")
        return self.root / f"{name}.json"

    def replace_collection(self, name: str, findings: list[Finding]) -> None:
        """Atomically replace the collection's contents; readers see the old
        set or the new set, never a mixture."""
        path = self._path(name)
        payload = dump_findings(list(findings))
        with self._write_lock:
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(payload)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, path)
            except OSError as exc:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise StoreError(f"failed to write collection {name}: {exc}") from exc

    def list_collections(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json") if not p.name.startswith("."))

    def _load(self, name: str) -> list[Finding]:
        path = self._path(name)
        if not path.is_file():
            return []
        data = json.loads(path.read_text())
        return [Finding.from_template(obj, source_tool=Tool.FIXTURE) for obj in data]

    def get_collection(self, name: str) -> list[Finding]:
        """Findings sorted stably by severity, CRITICAL first; unknown names
        yield an empty list."""
        return sorted(self._load(name), key=lambda f: severity_rank(f.severity))

    def find_by_severity(self, severity: Severity) -> list[tuple[str, Finding]]:
        results = []
        for name in self.list_collections():
            for finding in self._load(name):
                if finding.severity is severity:
                    results.append((name, finding))
        return results

    def summary(self) -> SummaryCounts:
        totals: dict[Severity, int] = {}
        per_collection: dict[str, dict[Severity, int]] = {}
        for name in self.list_collections():
            counts: dict[Severity, int] = {}
            for finding in self._load(name):
                counts[finding.severity] = counts.get(finding.severity, 0) + 1
                totals[finding.severity] = totals.get(finding.severity, 0) + 1
            per_collection[name] = counts
        return SummaryCounts(totals, per_collection)


class MongoStore:
    """Same contract against a MongoDB service."""

    ORDER_KEY = "_order"

    def __init__(self, uri: str, database: str = "json_database"):
        try:
            from pymongo import MongoClient
        except ImportError as exc:
            raise StoreError("pymongo is required for --db-uri stores (pip install sentinel[mongo])") from exc
        self._db = MongoClient(uri)[database]

    def replace_collection(self, name: str, findings: list[Finding]) -> None:
        docs = []
        for i, f in enumerate(findings):
            doc = f.to_template()
            doc[self.ORDER_KEY] = i
            docs.append(doc)
        coll = self._db[name]
        coll.delete_many({})
        if docs:
            coll.insert_many(docs)

    def list_collections(self) -> list[str]:
        return sorted(self._db.list_collection_names())

    def _load(self, name: str) -> list[Finding]:
        docs = list(self._db[name].find().sort(self.ORDER_KEY))
        return [Finding.from_template(d, source_tool=Tool.FIXTURE) for d in docs]

    def get_collection(self, name: str) -> list[Finding]:
        return sorted(self._load(name), key=lambda f: severity_rank(f.severity))

    def find_by_severity(self, severity: Severity) -> list[tuple[str, Finding]]:
        results = []
        for name in self.list_collections():
            for finding in self._load(name):
                if finding.severity is severity:
                    results.append((name, finding))
        return results

    def summary(self) -> SummaryCounts:
        totals: dict[Severity, int] = {}
        per_collection: dict[str, dict[Severity, int]] = {}
        for name in self.list_collections():
            counts: dict[Severity, int] = {}
            for finding in self._load(name):
                counts[finding.severity] = counts.get(finding.severity, 0) + 1
                totals[finding.severity] = totals.get(finding.severity, 0) + 1
            per_collection[name] = counts
        return SummaryCounts(totals, per_collection)


def open_store(store_path: str | None = None, db_uri: str | None = None):
    if db_uri:
        return MongoStore(db_uri)
    return FileStore(store_path or "./store")
