#!/usr/bin/env python3
"""Regenerate src/fixtures/*.json from a live backend.

The fixtures are real API responses; the parity tests compare the UI's
rendering against them.  Run from the repository root with the Python
package installed:  python3 frontend/scripts/record-fixtures.py
"""

import json
import pathlib
import threading
import urllib.request

from bioquake import api
from bioquake.server import create_server


def main():
    server = create_server("127.0.0.1", 0)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    host, port = server.server_address[:2]
    base = f"http://{host}:{port}"

    def post(path, payload):
        request = urllib.request.Request(
            base + path,
            data=json.dumps(payload).encode(),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with urllib.request.urlopen(request) as response:
            return json.loads(response.read())

    def get(path):
        with urllib.request.urlopen(base + path) as response:
            return json.loads(response.read())

    fixtures = {
        "uncertainty_ecgid.json": post(
            "/api/uncertainty",
            {"comparisons": 45000, "error_rate": 0.02, "confidence": 0.95},
        ),
        "plan_6pct_rule.json": post(
            "/api/plan",
            {
                "error_rate": 0.001,
                "target_delta": 0.061,
                "confidence": 0.95,
                "mode": "approx",
            },
        ),
        "min_error_lfw.json": post(
            "/api/min-error", {"comparisons": 3000, "delta": 0.061, "confidence": 0.95}
        ),
        "curve_presets.json": get(
            "/api/curve?deltas=0.01,0.061,0.1&confidence=0.95&lo=0.0001&hi=0.5&points=12"
        ),
        "boundary_classes.json": [
            {"delta": d, **api.classify_result(d)}
            for d in (0.01, 0.05, 0.10, 0.30, 0.50, 1.00)
        ],
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "src" / "fixtures"
    for name, doc in fixtures.items():
        (out / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print("wrote", out / name)
    server.shutdown()
    server.server_close()


if __name__ == "__main__":
    main()
