import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from sexitlab import analytic as A
from sexitlab import channels as C
from sexitlab import profiles as P
from sexitlab import sexit as S
from sexitlab.service.app import create_app
from sexitlab.service.workspace import Workspace


@pytest.fixture()
def client(tmp_path):
    app = create_app(Workspace(str(tmp_path / "ws")), pool_size=2)
    with TestClient(app) as c:
        yield c


def profile_body(name="reg_3_6"):
    return P.profile_to_dict(P.fixture_profile(name))


def wait_for(client, job_id, states=("done", "failed", "cancelled"), timeout=60.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        body = client.get(f"/jobs/{job_id}").json()
        if body["status"] in states:
            return body
        time.sleep(0.05)
    raise AssertionError(f"job {job_id} did not settle: {body}")


def test_health(client):
    assert client.get("/health").json()["status"] == "ok"


def test_profile_crud_and_rate_field(client):
    r = client.post("/profiles/reg36", json=profile_body())
    assert r.status_code == 201
    assert r.json()["design_rate"] == pytest.approx(0.5)

    r = client.get("/profiles/reg36")
    assert r.status_code == 200
    assert r.json()["profile"]["lambda"] == [{"degree": 3, "weight": 1.0}]

    r = client.post("/profiles/reg36", json=profile_body())
    assert r.status_code == 409

    names = [p["name"] for p in client.get("/profiles").json()["profiles"]]
    assert names == ["reg36"]

    assert client.delete("/profiles/reg36").status_code == 204
    assert client.delete("/profiles/reg36").status_code == 404
    assert client.get("/profiles/reg36").status_code == 404


def test_invalid_profile_rejected_with_violations(client):
    bad = {"perspective": "edge",
           "lambda": [{"degree": 2, "weight": 0.5}, {"degree": 3, "weight": 0.4}],
           "rho": [{"degree": 6, "weight": 1.0}]}
    r = client.post("/profiles/bad", json=bad)
    assert r.status_code == 400
    assert any("sum" in v for v in r.json()["detail"])


def test_analytic_exit_passthrough(client):
    prof = P.fixture_profile("code_a_orig")
    r = client.post("/analytic/exit", json={
        "profile": profile_body("code_a_orig"),
        "channel": {"kind": "bec", "param": 0.25},
        "n_points": 33,
    })
    assert r.status_code == 200
    data = r.json()
    vnd, cnd = A.sample_curves(prof, C.bec(0.25), 33)
    assert np.allclose(data["i_e_vnd"], vnd.i_e, atol=1e-12)
    assert np.allclose(data["i_e_cnd"], cnd.i_e, atol=1e-12)
    assert data["design_rate"] == pytest.approx(P.design_rate(prof), abs=1e-12)


def test_analytic_exit_by_stored_name(client):
    client.post("/profiles/codea", json=profile_body("code_a_orig"))
    r = client.post("/analytic/exit", json={
        "profile_name": "codea",
        "channel": {"kind": "bec", "param": 0.25},
    })
    assert r.status_code == 200
    r = client.post("/analytic/exit", json={
        "profile_name": "missing",
        "channel": {"kind": "bec", "param": 0.25},
    })
    assert r.status_code == 404


def test_job_lifecycle_sexit(client, tmp_path):
    params = {"profile": profile_body("reg_3_5"), "n": 155,
              "channel": {"kind": "bec", "param": 0.25},
              "m": 6, "n_grid": 40, "seed": 9}
    r = client.post("/jobs", json={"kind": "sexit", "params": params})
    assert r.status_code == 201
    job = r.json()
    assert job["status"] in ("queued", "running")

    done = wait_for(client, job["id"])
    assert done["status"] == "done"
    assert done["progress"] == 1.0
    assert done["result_ref"] == "bundle.json"

    r = client.get(f"/results/{job['id']}")
    assert r.status_code == 200
    bundle = r.json()
    assert bundle["n_grid"] == 40

    # byte-identical to a direct engine run with the same parameters
    cfg = S.SExitConfig(channel=C.bec(0.25), n=155,
                        profile=P.fixture_profile("reg_3_5"), m=6, n_grid=40,
                        seed=9)
    direct = S.bundle_json(S.run_sexit(cfg))
    served = client.get(f"/results/{job['id']}/files/bundle.json")
    assert served.content.decode() == direct

    pgm = client.get(f"/results/{job['id']}/files/vnd.pgm")
    assert pgm.status_code == 200
    assert pgm.content.startswith(b"P5\n")


def test_job_validation_errors(client):
    r = client.post("/jobs", json={"kind": "sexit", "params": {"n": 155}})
    assert r.status_code in (400, 422)
    r = client.post("/jobs", json={"kind": "sexit", "params": {
        "profile_name": "ghost", "n": 155,
        "channel": {"kind": "bec", "param": 0.25}}})
    assert r.status_code == 404
    r = client.post("/jobs", json={"kind": "ber", "params": {
        "profile": profile_body(), "n": 60, "channel_kind": "bec",
        "points": []}})
    assert r.status_code == 400


def test_job_threshold_and_analytic_kinds(client):
    r = client.post("/jobs", json={"kind": "threshold", "params": {
        "profile": profile_body("reg_3_6"), "channel_kind": "bec"}})
    job = wait_for(client, r.json()["id"])
    assert job["status"] == "done"
    data = client.get(f"/results/{job['id']}").json()
    assert abs(data["threshold"] - 0.4294) < 1e-3

    r = client.post("/jobs", json={"kind": "analytic", "params": {
        "profile": profile_body("reg_3_6"),
        "channel": {"kind": "bec", "param": 0.25}, "n_points": 11}})
    job = wait_for(client, r.json()["id"])
    assert job["status"] == "done"
    data = client.get(f"/results/{job['id']}").json()
    assert len(data["i_a"]) == 11


def test_ber_job_returns_csv(client):
    params = {"profile": profile_body("reg_3_6"), "n": 60, "channel_kind": "bec",
              "points": [0.4], "min_bit_errors": 10, "max_frames": 60, "seed": 4}
    r = client.post("/jobs", json={"kind": "ber", "params": params})
    job = wait_for(client, r.json()["id"])
    assert job["status"] == "done"
    r = client.get(f"/results/{job['id']}")
    assert r.headers["content-type"].startswith("text/csv")
    assert r.text.startswith("channel_param,frames,bit_errors")


def test_cancel_running_job(client):
    # effectively unbounded run: cancel must land between frame batches
    params = {"profile": profile_body("reg_3_6"), "n": 60, "channel_kind": "bec",
              "points": [0.05, 0.05001], "min_bit_errors": 10_000_000,
              "max_frames": 2_000_000, "seed": 4}
    r = client.post("/jobs", json={"kind": "ber", "params": params})
    job_id = r.json()["id"]
    time.sleep(0.3)
    r = client.delete(f"/jobs/{job_id}")
    assert r.status_code == 200
    done = wait_for(client, job_id, states=("cancelled", "done", "failed"))
    assert done["status"] == "cancelled"
    # no partial artifacts
    assert client.get(f"/results/{job_id}").status_code == 404


def test_unknown_job_routes(client):
    assert client.get("/jobs/none").status_code == 404
    assert client.delete("/jobs/none").status_code == 404
    assert client.get("/results/none").status_code == 404


def test_ber_gain_endpoint(client):
    def run_ber_job(name, seed):
        params = {"profile": profile_body(name), "n": 120, "channel_kind": "bec",
                  "points": [0.3, 0.4, 0.5], "min_bit_errors": 40,
                  "max_frames": 300, "seed": seed}
        r = client.post("/jobs", json={"kind": "ber", "params": params})
        return wait_for(client, r.json()["id"])

    ja = run_ber_job("reg_3_6", 21)
    jb = run_ber_job("reg_3_5", 22)
    assert ja["status"] == "done" and jb["status"] == "done"

    r = client.post("/analytic/ber_gain", json={
        "job_a": ja["id"], "job_b": jb["id"], "target": 0.05})
    assert r.status_code == 200
    body = r.json()
    assert body["unit"] == "delta_epsilon"
    assert isinstance(body["gain"], float)

    r = client.post("/analytic/ber_gain", json={
        "job_a": ja["id"], "job_b": "nope", "target": 0.05})
    assert r.status_code == 404

    r = client.post("/analytic/ber_gain", json={
        "job_a": ja["id"], "job_b": jb["id"], "target": 1e-9})
    assert r.status_code == 400
