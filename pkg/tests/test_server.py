import json
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import pytest

from bioquake import api
from bioquake.server import create_server


@pytest.fixture(scope="module")
def server_url():
    server = create_server("127.0.0.1", 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}"
    server.shutdown()
    server.server_close()


def post(url, path, payload):
    request = urllib.request.Request(
        url + path,
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def get(url, path):
    try:
        with urllib.request.urlopen(url + path) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


class TestEndpoints:
    def test_healthz(self, server_url):
        status, body = get(server_url, "/healthz")
        assert status == 200
        assert body == {"status": "ok"}

    def test_uncertainty_matches_cli_builder(self, server_url):
        status, body = post(
            server_url,
            "/api/uncertainty",
            {"comparisons": 45000, "error_rate": 0.02, "confidence": 0.95},
        )
        assert status == 200
        assert body == api.uncertainty_result(45000, 0.02, 0.95)
        assert body["class"]["code"] == "B"

    def test_uncertainty_undefined_delta(self, server_url):
        status, body = post(
            server_url,
            "/api/uncertainty",
            {"comparisons": 100, "error_rate": 0.0},
        )
        assert status == 200
        assert body["delta_rel"] == {"value": None, "display": "inf"}

    def test_plan(self, server_url):
        status, body = post(
            server_url,
            "/api/plan",
            {
                "error_rate": 0.001,
                "target_delta": 0.061,
                "confidence": 0.95,
                "mode": "approx",
            },
        )
        assert status == 200
        assert body["required_comparisons"] == pytest.approx(1e6, rel=0.04)
        assert body["rule"] == "6% rule"

    def test_min_error(self, server_url):
        status, body = post(
            server_url, "/api/min-error", {"comparisons": 3000, "delta": 0.061}
        )
        assert status == 200
        assert body["min_error"] == pytest.approx(1 / 3)
        assert body["display"] == "3×10⁻¹"

    def test_curve(self, server_url):
        status, body = get(
            server_url,
            "/api/curve?deltas=0.061,0.1&confidence=0.95&lo=0.001&hi=0.1&points=3",
        )
        assert status == 200
        assert len(body) == 6
        assert body[0]["required_comparisons"] == pytest.approx(1e6, rel=0.05)

    def test_validation_failure_names_field(self, server_url):
        status, body = post(
            server_url,
            "/api/uncertainty",
            {"comparisons": 0, "error_rate": 0.02},
        )
        assert status == 400
        assert body["field"] == "comparisons"
        assert "error" in body

    def test_missing_field(self, server_url):
        status, body = post(server_url, "/api/plan", {"error_rate": 0.01})
        assert status == 400
        assert body["field"] == "target_delta"

    def test_wrong_type(self, server_url):
        status, body = post(
            server_url,
            "/api/uncertainty",
            {"comparisons": "many", "error_rate": 0.02},
        )
        assert status == 400
        assert body["field"] == "comparisons"

    def test_invalid_json_body(self, server_url):
        request = urllib.request.Request(
            server_url + "/api/uncertainty",
            data=b"{nope",
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with pytest.raises(urllib.error.HTTPError) as excinfo:
            urllib.request.urlopen(request)
        assert excinfo.value.code == 400

    def test_unknown_api_path(self, server_url):
        status, _ = get(server_url, "/api/nothing")
        assert status == 404

    def test_no_static_dir_404(self, server_url):
        status, _ = get(server_url, "/index.html")
        assert status == 404

    def test_cors_header_present(self, server_url):
        with urllib.request.urlopen(server_url + "/healthz") as response:
            assert response.headers["Access-Control-Allow-Origin"] == "*"

    def test_concurrent_requests(self, server_url):
        def one(i):
            return post(
                server_url,
                "/api/uncertainty",
                {"comparisons": 1000 + i, "error_rate": 0.05},
            )[0]

        with ThreadPoolExecutor(max_workers=8) as pool:
            statuses = list(pool.map(one, range(32)))
        assert statuses == [200] * 32


class TestStatic:
    def test_serves_files_and_index(self, tmp_path):
        (tmp_path / "index.html").write_text("<html>calculator</html>")
        (tmp_path / "app.js").write_text("console.log('hi')")
        server = create_server("127.0.0.1", 0, str(tmp_path))
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        host, port = server.server_address[:2]
        base = f"http://{host}:{port}"
        try:
            with urllib.request.urlopen(base + "/") as response:
                assert b"calculator" in response.read()
                assert "text/html" in response.headers["Content-Type"]
            with urllib.request.urlopen(base + "/app.js") as response:
                assert b"hi" in response.read()
            with pytest.raises(urllib.error.HTTPError) as excinfo:
                urllib.request.urlopen(base + "/missing.css")
            assert excinfo.value.code == 404
            # path traversal is refused
            with pytest.raises(urllib.error.HTTPError) as excinfo:
                urllib.request.urlopen(base + "/../secret")
            assert excinfo.value.code in (400, 404)
        finally:
            server.shutdown()
            server.server_close()
