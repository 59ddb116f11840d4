"""Record real API responses into tests/fixtures/recorded.json.

The UI tests replay these exact payloads through a stubbed fetch, so the
contract they assert is the service's actual behavior, not a hand-written
imitation. Re-run after any API change:

    python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from fcmkit import load_fcm
from fcmkit.service import create_app

ROOT = Path(__file__).resolve().parents[2]
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "recorded.json"

INIT = [1.0, 1.0, 0.0, 1.0, 0.0]
EDIT = {"source": "misinformation-on-the-internet", "target": "ai-hallucinations",
        "weight": 0.0}


def main():
    fixture = ROOT / "fixtures" / "fcms" / "hallucination-5node.json"
    client = TestClient(create_app(preload=[load_fcm(fixture)]))

    five_node_id = client.get("/api/fcm").json()["fcms"][0]["id"]
    five_node = client.get(f"/api/fcm/{five_node_id}").json()

    before = client.post("/api/trajectory", json={"fcm_id": five_node_id, "init": INIT})
    assert before.status_code == 200, before.text

    patch = client.patch(f"/api/fcm/{five_node_id}/edge", json=EDIT)
    assert patch.status_code == 201, patch.text
    edited_id = patch.json()["id"]
    assert edited_id != five_node_id

    edited = client.get(f"/api/fcm/{edited_id}").json()
    after = client.post("/api/trajectory", json={"fcm_id": edited_id, "init": INIT})
    assert after.status_code == 200, after.text
    assert after.json()["states"] != before.json()["states"]

    conflict = client.patch(f"/api/fcm/{five_node_id}/edge", json=dict(EDIT, weight=1.5))
    assert conflict.status_code == 409

    missing = client.get("/api/fcm/no-such-snapshot")
    assert missing.status_code == 404

    recorded = {
        "five_node_id": five_node_id,
        "edited_id": edited_id,
        "init": INIT,
        "edit": EDIT,
        "five_node": five_node,
        "edited": edited,
        "trajectory_before": before.json(),
        "trajectory_after": after.json(),
        "patch_reply": patch.json(),
        "error_409": conflict.json(),
        "error_404": missing.json(),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recorded, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT.relative_to(ROOT)}")
    print(f"  before: {before.json()['classification']['describe']}")
    print(f"  after:  {after.json()['classification']['describe']}")


if __name__ == "__main__":
    main()
