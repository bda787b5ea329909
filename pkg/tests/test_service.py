"""HTTP service: session lifecycle, wire formats, isolation, persistence."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from rtb.cli import main as cli_main
from rtb.example_models import CONFLICT_EVIDENCE, bundled_model_dir
from rtb.inference import query_association, query_intervention
from rtb.model import network_to_dict
from rtb.example_models import load_bundled
from rtb.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def open_session(client, model="id-credibility") -> str:
    response = client.post("/sessions", json={"model": model})
    assert response.status_code == 200
    return response.json()["session_id"]


TRUST_QUERY = {
    "order": 1,
    "kind": "Trust",
    "level": "association",
    "target": {"variable": "Valid", "state": "yes"},
}


class TestModelsEndpoint:
    def test_lists_bundled_models(self, client):
        names = client.get("/models").json()
        assert names == sorted(names)
        assert "id-credibility" in names and "face-bias" in names

    def test_detail_returns_model_document(self, client):
        doc = client.get("/models/id-credibility").json()
        assert doc == network_to_dict(load_bundled("id-credibility"))

    def test_unknown_model_detail(self, client):
        response = client.get("/models/nope")
        assert response.status_code == 400
        assert response.json() == {"error": "unknown-model"}


class TestSessions:
    def test_create_returns_unique_ids(self, client):
        ids = {open_session(client) for _ in range(5)}
        assert len(ids) == 5

    def test_unknown_model_rejected(self, client):
        response = client.post("/sessions", json={"model": "nope"})
        assert response.status_code == 400
        assert response.json() == {"error": "unknown-model"}

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/zzz/log").status_code == 404
        assert client.post("/sessions/zzz/evidence", json={"variable": "Valid", "state": "yes"}).status_code == 404

    def test_posterior_without_evidence_is_prior(self, client):
        sid = open_session(client)
        states = client.get(f"/sessions/{sid}/posterior", params={"target": "Valid"}).json()["states"]
        prior = query_association(load_bundled("id-credibility"), "Valid", {})
        assert states == pytest.approx(prior.probabilities)


class TestEvidence:
    def test_post_then_posterior_matches_cli(self, client):
        sid = open_session(client)
        for var, state in CONFLICT_EVIDENCE.items():
            response = client.post(f"/sessions/{sid}/evidence", json={"variable": var, "state": state})
            assert response.status_code == 200
        assert response.json() == CONFLICT_EVIDENCE
        states = client.get(f"/sessions/{sid}/posterior", params={"target": "Valid"}).json()["states"]

        cli = CliRunner().invoke(
            cli_main,
            ["query", "--model", str(bundled_model_dir() / "id-credibility.json"),
             "--target", "Valid", "--evidence", "Reliability=low,Credibility=high"],
        )
        service_lines = "".join(f"{s}\t{p:.9f}\n" for s, p in states.items())
        assert service_lines == cli.stdout

    def test_evidence_readable_without_mutation(self, client):
        sid = open_session(client)
        assert client.get(f"/sessions/{sid}/evidence").json() == {}
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Reliability", "state": "low"})
        assert client.get(f"/sessions/{sid}/evidence").json() == {"Reliability": "low"}
        # a do-level read must not touch the stored evidence
        client.get(f"/sessions/{sid}/posterior", params={"target": "Valid", "level": "do", "do": "Validation:pass"})
        assert client.get(f"/sessions/{sid}/evidence").json() == {"Reliability": "low"}

    def test_retraction_restores_prior(self, client):
        sid = open_session(client)
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Reliability", "state": "low"})
        response = client.delete(f"/sessions/{sid}/evidence/Reliability")
        assert response.status_code == 200
        assert response.json() == {}
        states = client.get(f"/sessions/{sid}/posterior", params={"target": "Valid"}).json()["states"]
        prior = query_association(load_bundled("id-credibility"), "Valid", {})
        assert states == pytest.approx(prior.probabilities)

    def test_bad_evidence_named(self, client):
        sid = open_session(client)
        response = client.post(f"/sessions/{sid}/evidence", json={"variable": "Nope", "state": "yes"})
        assert response.status_code == 400
        assert response.json() == {"error": "unknown-variable"}
        response = client.post(f"/sessions/{sid}/evidence", json={"variable": "Valid", "state": "nope"})
        assert response.json() == {"error": "unknown-state"}

    def test_impossible_evidence_surfaces_at_query_time(self, client):
        sid = open_session(client, model="face-bias")
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Correctness", "state": "correct"})
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Match", "state": "mismatch"})
        response = client.get(f"/sessions/{sid}/posterior", params={"target": "YOB"})
        assert response.status_code == 400
        assert response.json() == {"error": "zero-probability-evidence"}

    def test_session_isolation(self, client):
        a = open_session(client)
        b = open_session(client)
        client.post(f"/sessions/{a}/evidence", json={"variable": "Reliability", "state": "low"})
        client.post(f"/sessions/{b}/evidence", json={"variable": "Reliability", "state": "high"})
        client.post(f"/sessions/{a}/evidence", json={"variable": "Credibility", "state": "high"})
        a_states = client.get(f"/sessions/{a}/posterior", params={"target": "Valid"}).json()["states"]
        b_states = client.get(f"/sessions/{b}/posterior", params={"target": "Valid"}).json()["states"]
        net = load_bundled("id-credibility")
        assert a_states == pytest.approx(
            query_association(net, "Valid", {"Reliability": "low", "Credibility": "high"}).probabilities
        )
        assert b_states == pytest.approx(
            query_association(net, "Valid", {"Reliability": "high"}).probabilities
        )


class TestPosteriorLevels:
    def test_do_level_matches_library(self, client):
        sid = open_session(client)
        states = client.get(
            f"/sessions/{sid}/posterior",
            params={"target": "Credibility", "level": "do", "do": "Reliability:high"},
        ).json()["states"]
        expected = query_intervention(load_bundled("id-credibility"), "Credibility", {"Reliability": "high"}, {})
        assert states == pytest.approx(expected.probabilities)

    def test_do_conflicting_with_evidence_is_400(self, client):
        sid = open_session(client)
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Reliability", "state": "low"})
        response = client.get(
            f"/sessions/{sid}/posterior",
            params={"target": "Valid", "level": "do", "do": "Reliability:high"},
        )
        assert response.status_code == 400
        assert response.json() == {"error": "overlapping-do-and-evidence"}

    def test_cf_level_uses_session_evidence_as_factual(self, client):
        sid = open_session(client)
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Reliability", "state": "low"})
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Validation", "state": "fail"})
        states = client.get(
            f"/sessions/{sid}/posterior",
            params={"target": "Validation", "level": "cf", "do": "Reliability:high"},
        ).json()["states"]
        from rtb.inference import query_counterfactual

        expected = query_counterfactual(
            load_bundled("id-credibility"), "Validation", {"Reliability": "high"},
            {"Reliability": "low", "Validation": "fail"},
        )
        assert states == pytest.approx(expected.probabilities)

    def test_bad_level_named(self, client):
        sid = open_session(client)
        response = client.get(f"/sessions/{sid}/posterior", params={"target": "Valid", "level": "zzz"})
        assert response.status_code == 400
        assert response.json() == {"error": "invalid-query"}


class TestRtbAndDecisions:
    def test_rtb_merges_session_evidence(self, client):
        sid = open_session(client)
        for var, state in CONFLICT_EVIDENCE.items():
            client.post(f"/sessions/{sid}/evidence", json={"variable": var, "state": state})
        report = client.post(f"/sessions/{sid}/rtb", json={"query": TRUST_QUERY}).json()
        expected = query_association(load_bundled("id-credibility"), "Valid", CONFLICT_EVIDENCE)["yes"]
        assert report["trust"] == pytest.approx(expected, abs=1e-12)
        assert report["query_echo"]["given"] == CONFLICT_EVIDENCE
        assert report["recommendation"] == "Accept"  # 0.955 > default threshold 0.9

    def test_risk_query_requires_impact(self, client):
        sid = open_session(client)
        bad = dict(TRUST_QUERY, kind="Risk")
        response = client.post(f"/sessions/{sid}/rtb", json={"query": bad})
        assert response.status_code == 400
        assert response.json() == {"error": "missing-impact-model"}

    def test_decision_uses_latest_report(self, client):
        sid = open_session(client)
        for var, state in CONFLICT_EVIDENCE.items():
            client.post(f"/sessions/{sid}/evidence", json={"variable": var, "state": state})
        client.post(f"/sessions/{sid}/rtb", json={"query": TRUST_QUERY})
        entry = client.post(
            f"/sessions/{sid}/decision",
            json={"costs": {"verify": 1, "wrong_accept": 10}, "action": "accept"},
        ).json()
        assert entry["recommendation"] == "Accept"
        assert entry["override"] is False
        assert entry["threshold"] == pytest.approx(0.9)

    def test_override_flagged(self, client):
        sid = open_session(client)
        for var, state in CONFLICT_EVIDENCE.items():
            client.post(f"/sessions/{sid}/evidence", json={"variable": var, "state": state})
        client.post(f"/sessions/{sid}/rtb", json={"query": TRUST_QUERY})
        entry = client.post(
            f"/sessions/{sid}/decision",
            json={"costs": {"verify": 1, "wrong_accept": 10}, "action": "verify"},
        ).json()
        assert entry["recommendation"] == "Accept"
        assert entry["override"] is True

    def test_decision_without_report_rejected(self, client):
        sid = open_session(client)
        response = client.post(
            f"/sessions/{sid}/decision",
            json={"costs": {"verify": 1, "wrong_accept": 10}, "action": "accept"},
        )
        assert response.status_code == 400
        assert response.json() == {"error": "no-rtb-report"}

    def test_log_grows_and_entries_are_stable(self, client):
        sid = open_session(client)
        client.post(f"/sessions/{sid}/rtb", json={"query": TRUST_QUERY})
        lengths = []
        snapshots = []
        for action in ("accept", "verify", "accept"):
            client.post(
                f"/sessions/{sid}/decision",
                json={"costs": {"verify": 1, "wrong_accept": 10}, "action": action},
            )
            log = client.get(f"/sessions/{sid}/log").json()
            lengths.append(len(log))
            snapshots.append(json.dumps(log[0], sort_keys=True))
        assert lengths == [1, 2, 3]
        assert len(set(snapshots)) == 1  # first entry never re-renders differently

    def test_malformed_body_is_400(self, client):
        sid = open_session(client)
        response = client.post(f"/sessions/{sid}/decision", json={"action": "accept"})
        assert response.status_code == 400
        assert response.json() == {"error": "invalid-request"}


class TestSnapshots:
    def test_session_state_mirrored_to_disk(self, tmp_path):
        client = TestClient(create_app(snapshot_dir=tmp_path))
        sid = open_session(client)
        client.post(f"/sessions/{sid}/evidence", json={"variable": "Reliability", "state": "low"})
        client.post(f"/sessions/{sid}/rtb", json={"query": TRUST_QUERY})
        client.post(
            f"/sessions/{sid}/decision",
            json={"costs": {"verify": 1, "wrong_accept": 10}, "action": "accept"},
        )
        doc = json.loads((tmp_path / f"{sid}.json").read_text(encoding="utf-8"))
        assert doc["session_id"] == sid
        assert doc["evidence"] == {"Reliability": "low"}
        assert doc["model"] == network_to_dict(load_bundled("id-credibility"))
        assert len(doc["log"]) == 1
