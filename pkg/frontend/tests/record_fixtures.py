"""Record API fixtures for the UI tests from a real in-process server.

Run from the frontend directory (the deskhammer package must be
installed): python3 tests/record_fixtures.py
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi.testclient import TestClient

from deskhammer import demo
from deskhammer.api import create_app
from deskhammer.service import HammerService

OUT = Path(__file__).parent / "fixtures"


def wait(client: TestClient, job_id: str) -> dict:
    for _ in range(600):
        payload = client.get(f"/jobs/{job_id}").json()
        if payload["state"] in ("done", "cancelled"):
            return payload
        time.sleep(0.02)
    raise RuntimeError("job did not finish")


def dump(name: str, payload: dict) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    print(f"wrote {name}.json")


def main() -> None:
    service = HammerService(demo.load_demo_corpus("fixed"))
    client = TestClient(create_app(service))

    for article in ("background", "sets", "graphs"):
        dump(f"article_{article}", client.get(f"/articles/{article}").json())

    # a provable step: the explanation-box happy path
    job = client.post(
        "/solve", json={"article": "graphs", "label": "g_sub3", "mode": "by"}
    ).json()
    dump("solve_g_sub3_done", wait(client, job["job_id"]))

    # a step with implicit typing facts in the raw reference list
    job = client.post(
        "/solve", json={"article": "graphs", "label": "g_empty_in_induced", "mode": "by"}
    ).json()
    dump("solve_g_empty_in_induced_done", wait(client, job["job_id"]))

    # an unsolvable draft: the Unsolved path (empty reference list)
    job = client.post(
        "/solve",
        json={"article": "graphs", "label": "g_sub3", "refs": [], "timeout_ms": 400},
    ).json()
    dump("solve_unsolved_done", wait(client, job["job_id"]))

    # hints after training on the corpus proofs
    for article in service.snapshot.articles:
        service.verify_article(article)
    service.train()
    dump(
        "hints_g_sub3_k10",
        client.post(
            "/hints", json={"article": "graphs", "label": "g_sub3", "k": 10}
        ).json(),
    )

    # probe results: clean and buggy
    job = client.post("/probe/graphs?timeout_ms=600").json()
    dump("probe_graphs_clean", wait(client, job["job_id"]))

    buggy = TestClient(create_app(HammerService(demo.load_demo_corpus("buggy"))))
    job = buggy.post("/probe/graphs?timeout_ms=3000").json()
    dump("probe_graphs_buggy", wait(buggy, job["job_id"]))


if __name__ == "__main__":
    main()
