"""Acceptance suite: one test per release criterion, each printing a
PASS line and holding to its runtime budget."""

import json
import random
import threading
import time

import pytest
from fastapi.testclient import TestClient

from sentinel.adapters import parse_output, severity_from_grade, severity_from_points
from sentinel.api import create_app
from sentinel.dedupe import DedupeConfig, dedupe_pod
from sentinel.gestalt import ratio
from sentinel.model import Finding, Severity, Tool
from sentinel.normalize import normalize
from sentinel.pipeline import PipelineConfig, run_cycle
from sentinel.source import SourceConfig, SourceMode
from sentinel.store import FileStore

import golden
from oracles import brute_ratio, reference_dedupe


@pytest.fixture
def budget(capsys, request):
    """Wall-clock budget holder; prints one PASS line on success."""

    class Budget:
        limit_s = None

        def set(self, limit_s):
            self.limit_s = limit_s

    holder = Budget()
    start = time.perf_counter()
    yield holder
    elapsed = time.perf_counter() - start
    assert holder.limit_s is not None
    assert elapsed < holder.limit_s, f"exceeded {holder.limit_s}s budget ({elapsed:.2f}s)"
    with capsys.disabled():
        print(f"PASS {request.node.name} ({elapsed:.2f}s < {holder.limit_s}s)")


def template_finding(resolution: str, tool: Tool, severity=Severity.LOW, title="t") -> Finding:
    return Finding(
        type_="Kubernetes Security Check", id="", avdid="", title=title,
        description="", message="", resolution=resolution, severity=severity,
        source_tool=tool,
    )


def test_severity_mapping_exactness(budget):
    budget.set(1.0)
    points_table = {
        -30: Severity.CRITICAL,
        -9: Severity.HIGH, -7: Severity.HIGH,
        -3: Severity.MEDIUM, -1: Severity.MEDIUM,
        1: Severity.LOW, 3: Severity.LOW,
    }
    for points in range(-40, 11):
        assert severity_from_points(points) is points_table.get(points, Severity.UNKNOWN)
    for grade in range(0, 13):
        if grade == 10:
            expected = Severity.CRITICAL
        elif 7 <= grade < 10:
            expected = Severity.HIGH
        elif 5 <= grade < 7:
            expected = Severity.MEDIUM
        elif grade < 5:
            expected = Severity.LOW
        else:
            expected = Severity.UNKNOWN
        assert severity_from_grade(grade) is expected
    assert severity_from_grade(None) is Severity.UNKNOWN


def test_normalization_goldens_byte_for_byte(budget):
    budget.set(1.0)
    cases = (
        (Tool.TRIVY, golden.TRIVY_RAW, golden.EXPECTED_TRIVY),
        (Tool.KUBE_SCORE, golden.KUBESCORE_RAW, golden.EXPECTED_KUBESCORE),
        (Tool.KUBESEC, golden.KUBESEC_RAW, golden.EXPECTED_KUBESEC),
        (Tool.KUBE_LINTER, golden.KUBELINTER_RAW, golden.EXPECTED_KUBELINTER),
    )
    for tool, raw, expected in cases:
        records, _ = parse_output(tool, json.dumps(raw))
        assert len(records) == 1
        got = json.dumps(normalize(tool, records[0]).to_template(), indent=2).encode()
        assert got == json.dumps(expected, indent=2).encode(), tool


def test_similarity_oracle_equivalence(budget):
    budget.set(5.0)
    assert ratio("abcd", "bcde") == 0.75
    rng = random.Random(0xC0FFEE)
    alphabet = "abcdef ,."
    for _ in range(1000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
        assert ratio(a, b) == brute_ratio(a, b), (a, b)


def test_dedup_transliteration_equivalence(budget):
    budget.set(5.0)
    # pinned pair: oracle ratio decides removal
    pair_ratio = brute_ratio(golden.TRIVY_RESOLUTION, golden.KUBESEC_SELECTOR)
    assert pair_ratio >= 0.65  # -> the kubesec finding is removed
    out = dedupe_pod({
        Tool.TRIVY: [template_finding(golden.TRIVY_RESOLUTION, Tool.TRIVY)],
        Tool.KUBESEC: [template_finding(golden.KUBESEC_SELECTOR, Tool.KUBESEC)],
    })
    assert out[Tool.KUBESEC] == []

    rng = random.Random(0xDED)
    alphabet = "abcde "
    for _ in range(200):
        trivy_res = ["".join(rng.choice(alphabet) for _ in range(rng.randint(1, 10)))
                     for _ in range(rng.randint(0, 5))]
        kubesec_res = ["".join(rng.choice(alphabet) for _ in range(rng.randint(1, 10)))
                       for _ in range(rng.randint(0, 5))]
        got = dedupe_pod(
            {
                Tool.TRIVY: [template_finding(r, Tool.TRIVY) for r in trivy_res],
                Tool.KUBESEC: [template_finding(r, Tool.KUBESEC) for r in kubesec_res],
            },
            DedupeConfig(threshold=0.65),
        )
        assert [f.resolution for f in got[Tool.KUBESEC]] == reference_dedupe(trivy_res, kubesec_res)


def test_end_to_end_fixture_cycle(budget, fixture_env, tmp_path):
    budget.set(10.0)
    store = FileStore(tmp_path / "store")

    def config(out_dir):
        return PipelineConfig(
            source=SourceConfig(mode=SourceMode.DIRECTORY, directory=str(fixture_env["manifests"])),
            tools=(Tool.TRIVY, Tool.KUBESEC, Tool.KUBE_SCORE, Tool.KUBE_LINTER),
            out_dir=str(out_dir),
            fixture_dir=str(fixture_env["fixtures"]),
        )

    run_cycle(config(tmp_path / "out1"), store)

    # exactly 3 collections
    assert store.list_collections() == ["poda-result", "podb-result", "testpod-result"]
    # the engineered kubesec duplicate is gone
    testpod = store.get_collection("testpod-result")
    assert len(testpod) == 3
    assert all(f.title != "ReadOnlyRootFilesystem" for f in testpod)

    # /api/summary equals an independent recount of the merged files
    client = TestClient(create_app(store))
    summary = client.get("/api/summary").json()
    recount: dict = {}
    for pod in fixture_env["pods"]:
        merged = json.loads((tmp_path / "out1" / "merged" / f"{pod}-result.json").read_text())
        for row in merged:
            recount[row["Severity"]] = recount.get(row["Severity"], 0) + 1
    assert summary["severity_counts"] == recount

    # merged files byte-identical across two runs
    run_cycle(config(tmp_path / "out2"), store)
    for pod in fixture_env["pods"]:
        a = (tmp_path / "out1" / "merged" / f"{pod}-result.json").read_bytes()
        b = (tmp_path / "out2" / "merged" / f"{pod}-result.json").read_bytes()
        assert a == b, pod


def test_metrics_consistency(budget, fixture_env, tmp_path):
    budget.set(10.0)
    store = FileStore(tmp_path / "store")
    config = PipelineConfig(
        source=SourceConfig(mode=SourceMode.DIRECTORY, directory=str(fixture_env["manifests"])),
        out_dir=str(tmp_path / "out"),
        fixture_dir=str(fixture_env["fixtures"]),
    )
    for _ in range(3):
        metrics = run_cycle(config, store)
        assert metrics.total_s >= metrics.stage_sum() - 0.1
        for name in ("scan_s", "dedupe_s", "normalize_s", "merge_s", "persist_s", "total_s"):
            value = getattr(metrics, name)
            assert value >= 0.0, name
        assert metrics.pods_scanned == 3
        assert metrics.per_tool_s


def test_store_semantics(budget, tmp_path):
    budget.set(5.0)
    store = FileStore(tmp_path / "store")
    old = [template_finding(f"r{i}", Tool.TRIVY, title=f"old{i}") for i in range(5)]
    new = [template_finding(f"s{i}", Tool.TRIVY, title=f"new{i}") for i in range(3)]

    # idempotence
    store.replace_collection("p-result", old)
    state_one = store.get_collection("p-result")
    store.replace_collection("p-result", old)
    assert store.get_collection("p-result") == state_one

    # atomicity: readers see old XOR new
    store.replace_collection("c-result", old)
    stop = threading.Event()
    violations: list = []

    def reader():
        old_titles = {f.title for f in old}
        new_titles = {f.title for f in new}
        while not stop.is_set():
            got = {f.title for f in store.get_collection("c-result")}
            if got not in (old_titles, new_titles):
                violations.append(got)

    threads = [threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    for _ in range(40):
        store.replace_collection("c-result", new)
        store.replace_collection("c-result", old)
    stop.set()
    for t in threads:
        t.join()
    assert not violations

    # summary / collection consistency
    rng = random.Random(7)
    for name in ("a-result", "b-result", "c-result"):
        store.replace_collection(
            name,
            [template_finding("r", Tool.TRIVY, severity=rng.choice(list(Severity)), title=f"{name}{i}")
             for i in range(rng.randint(0, 6))],
        )
    counts = store.summary()
    recomputed: dict = {}
    for name in store.list_collections():
        for f in store.get_collection(name):
            recomputed[f.severity] = recomputed.get(f.severity, 0) + 1
    assert recomputed == counts.severity_counts
    for sev, total in counts.severity_counts.items():
        assert total == sum(per.get(sev, 0) for per in counts.per_collection.values())


def test_api_contract(budget, tmp_path):
    budget.set(5.0)
    store = FileStore(tmp_path / "store")
    store.replace_collection("poda-result", [
        template_finding("r1", Tool.TRIVY, Severity.LOW, "low-first"),
        template_finding("r2", Tool.TRIVY, Severity.HIGH, "high-second"),
    ])
    store.replace_collection("podb-result", [template_finding("r3", Tool.TRIVY, Severity.HIGH, "other-high")])
    client = TestClient(create_app(store))

    summary = client.get("/api/summary").json()
    assert summary == {
        "severity_counts": {"LOW": 1, "HIGH": 2},
        "collections": {"poda-result": {"LOW": 1, "HIGH": 1}, "podb-result": {"HIGH": 1}},
    }

    rows = client.get("/api/vulnerabilities/high").json()
    assert [(r["collection_name"], r["Title"]) for r in rows] == [
        ("poda-result", "high-second"), ("podb-result", "other-high"),
    ]
    for row in rows:
        assert set(row) == {"Type", "ID", "AVDID", "Title", "Description",
                            "Message", "Resolution", "Severity", "collection_name"}

    body = client.get("/api/collections/poda-result").json()
    assert [r["Severity"] for r in body] == ["HIGH", "LOW"]  # severity ordered
    assert client.get("/api/collections/ghost").json() == []
    assert client.get("/healthz").json() == {"status": "ok"}
