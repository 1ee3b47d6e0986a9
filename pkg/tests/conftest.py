import io
import json
import sys
import tarfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import golden  # noqa: E402


def _simple_trivy(pod: str, severity: str, resolution: str) -> dict:
    return {
        "Results": [
            {
                "Misconfigurations": [
                    {
                        "Type": "Kubernetes Security Check",
                        "ID": f"KSV-{pod}",
                        "AVDID": f"AVD-{pod}",
                        "Title": f"trivy finding for {pod}",
                        "Description": f"description for {pod}",
                        "Message": f"message for {pod}",
                        "Resolution": resolution,
                        "Severity": severity,
                    }
                ]
            }
        ]
    }


def _simple_kubesec(pod: str, selector: str, points: int) -> list:
    return [
        {
            "scoring": {
                "advise": [
                    {
                        "id": f"check-{pod}",
                        "selector": selector,
                        "reason": f"reason for {pod}",
                        "points": points,
                    }
                ]
            }
        }
    ]


def _simple_kubescore(pod: str, grade: int) -> list:
    return [
        {
            "checks": [
                {
                    "check": {
                        "name": f"score check {pod}",
                        "id": f"score-{pod}",
                        "comment": f"comment for {pod}",
                    },
                    "grade": grade,
                }
            ]
        }
    ]


def _simple_kubelinter(pod: str) -> dict:
    return {
        "Reports": [
            {
                "Check": f"lint-{pod}",
                "Diagnostic": {"Message": f"lint message for {pod}"},
                "Remediation": f"lint remediation for {pod}",
            }
        ]
    }


@pytest.fixture
def fixture_env(tmp_path):
    """Three pods with canned outputs for all four tools. testpod carries the
    engineered trivy/kubesec duplicate (gestalt ratio above 0.65)."""
    manifests = tmp_path / "manifests"
    fixtures = tmp_path / "fixtures"
    manifests.mkdir()
    fixtures.mkdir()

    pods = ("poda", "podb", "testpod")
    for pod in pods:
        (manifests / f"{pod}-manifest.yaml").write_text(
            f"apiVersion: v1\nkind: Pod\nmetadata:\n  name: {pod}\n"
        )

    # testpod: the golden sample outputs (trivy resolution vs kubesec selector
    # is the engineered duplicate pair)
    (fixtures / "testpod-trivy.json").write_text(json.dumps(golden.TRIVY_RAW))
    (fixtures / "testpod-kubesec.json").write_text(json.dumps(golden.KUBESEC_RAW))
    (fixtures / "testpod-kube-score.json").write_text(json.dumps(golden.KUBESCORE_RAW))
    (fixtures / "testpod-kube-linter.json").write_text(json.dumps(golden.KUBELINTER_RAW))

    # poda / podb: one finding per tool, resolutions far apart (no dedup hits)
    for pod, sev, points, grade in (("poda", "CRITICAL", -30, 7), ("podb", "MEDIUM", -1, 10)):
        (fixtures / f"{pod}-trivy.json").write_text(
            json.dumps(_simple_trivy(pod, sev, f"trivy resolution text for {pod}"))
        )
        (fixtures / f"{pod}-kubesec.json").write_text(
            json.dumps(_simple_kubesec(pod, f"completely unrelated selector {pod[::-1]}", points))
        )
        (fixtures / f"{pod}-kube-score.json").write_text(json.dumps(_simple_kubescore(pod, grade)))
        (fixtures / f"{pod}-kube-linter.json").write_text(json.dumps(_simple_kubelinter(pod)))

    return {"manifests": manifests, "fixtures": fixtures, "pods": pods, "root": tmp_path}


def make_targz(members: dict) -> bytes:
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w:gz") as tar:
        for name, data in members.items():
            info = tarfile.TarInfo(name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    return buf.getvalue()


@pytest.fixture
def stub_server():
    """Release-host stub: /releases/latest redirects to a tag URL; download
    paths serve a small tar.gz containing the requested binary."""

    class Handler(BaseHTTPRequestHandler):
        latest_tag = "v0.50.1"

        def _route(self):
            if self.path.endswith("/releases/latest"):
                if "/noredirect/" in self.path:
                    self.send_response(200)
                    self.end_headers()
                    return None
                tag = "1.2.3" if "/plain/" in self.path else self.latest_tag
                target = self.path.rsplit("/latest", 1)[0] + f"/tag/{tag}"
                self.send_response(302)
                self.send_header("Location", target)
                self.end_headers()
                return None
            if "/releases/download/" in self.path:
                binary = self.path.rsplit("/", 1)[-1].split("_")[0].split("-linux")[0]
                if binary.endswith(".tar.gz"):
                    binary = binary[: -len(".tar.gz")]
                return make_targz({binary: b"#!/bin/sh\necho stub\n"})
            self.send_response(404)
            self.end_headers()
            return None

        def do_HEAD(self):
            body = self._route()
            if body is not None:
                self.send_response(200)
                self.end_headers()

        def do_GET(self):
            body = self._route()
            if body is not None:
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
