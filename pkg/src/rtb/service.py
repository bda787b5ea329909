"""Session-based HTTP service over the assessment engine.

Each session binds one model and accumulates evidence as observations
arrive; queries and decisions run against that state. Mutations within a
session are serialized with a per-session lock; reads run concurrently.
Switching models means opening a new session, which keeps every decision
log coherent with exactly one model.

Error bodies are ``{"error": <name>}`` with the library's stable error
names; unknown sessions are the only 404.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .assessment import (
    DecisionCosts,
    Recommendation,
    RtbReport,
    evaluate_rtb_query,
    report_to_dict,
    rtb_query_from_dict,
    verification_decision,
)
from .errors import (
    InvalidQueryError,
    NoReportError,
    RtbError,
    UnknownModelError,
    UnknownSessionError,
)
from .example_models import bundled_model_dir
from .inference import (
    query_association,
    query_counterfactual,
    query_intervention,
)
from .model import CausalNetwork, load_network, network_to_dict


class CreateSessionBody(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: str


class EvidenceBody(BaseModel):
    variable: str
    state: str


class RtbBody(BaseModel):
    query: dict


class CostsBody(BaseModel):
    verify: float
    wrong_accept: float


class DecisionBody(BaseModel):
    costs: CostsBody
    action: Literal["accept", "verify"]


@dataclass
class Session:
    id: str
    model_name: str
    network: CausalNetwork
    evidence: dict[str, str] = field(default_factory=dict)
    log: list[dict] = field(default_factory=list)
    last_report: RtbReport | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _load_model_dir(model_dir: Path) -> dict[str, CausalNetwork]:
    models: dict[str, CausalNetwork] = {}
    for path in sorted(model_dir.glob("*.json")):
        net = load_network(path)
        models[net.name] = net
    return models


def _parse_do_param(raw: str | None) -> dict[str, str]:
    if not raw:
        return {}
    out: dict[str, str] = {}
    for part in raw.split(","):
        if ":" not in part:
            raise InvalidQueryError(f"do assignment {part!r} is not VARIABLE:state")
        var, state = part.split(":", 1)
        out[var.strip()] = state.strip()
    return out


def create_app(model_dir: str | Path | None = None, snapshot_dir: str | Path | None = None) -> FastAPI:
    """Build the service around the models found in `model_dir` (bundled
    models by default). With `snapshot_dir` set, session state is mirrored
    to one JSON file per session after every mutation."""
    models = _load_model_dir(Path(model_dir) if model_dir is not None else bundled_model_dir())
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    snapshots = Path(snapshot_dir) if snapshot_dir is not None else None
    if snapshots is not None:
        snapshots.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="rtb-dss", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RtbError)
    def _rtb_error(_: Request, exc: RtbError):
        status = 404 if isinstance(exc, UnknownSessionError) else 400
        return JSONResponse(status_code=status, content={"error": exc.name})

    @app.exception_handler(RequestValidationError)
    def _validation_error(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "invalid-request"})

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no session {session_id!r}")
        return session

    def snapshot(session: Session) -> None:
        if snapshots is None:
            return
        doc = {
            "session_id": session.id,
            "model": network_to_dict(session.network),
            "evidence": dict(session.evidence),
            "log": list(session.log),
        }
        path = snapshots / f"{session.id}.json"
        path.write_text(json.dumps(doc, indent=2), encoding="utf-8")

    @app.get("/models")
    def list_models() -> list[str]:
        return sorted(models)

    @app.get("/models/{name}")
    def model_detail(name: str):
        if name not in models:
            raise UnknownModelError(f"no model named {name!r}")
        return network_to_dict(models[name])

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.model not in models:
            raise UnknownModelError(f"no model named {body.model!r}")
        session = Session(id=uuid.uuid4().hex, model_name=body.model, network=models[body.model])
        with registry_lock:
            sessions[session.id] = session
        snapshot(session)
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}/evidence")
    def get_evidence(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return dict(session.evidence)

    @app.post("/sessions/{session_id}/evidence")
    def post_evidence(session_id: str, body: EvidenceBody):
        session = get_session(session_id)
        with session.lock:
            session.network.variable(body.variable).index_of(body.state)
            session.evidence[body.variable] = body.state
            snapshot(session)
            return dict(session.evidence)

    @app.delete("/sessions/{session_id}/evidence/{variable}")
    def delete_evidence(session_id: str, variable: str):
        session = get_session(session_id)
        with session.lock:
            session.network.variable(variable)
            session.evidence.pop(variable, None)
            snapshot(session)
            return dict(session.evidence)

    @app.get("/sessions/{session_id}/posterior")
    def posterior(session_id: str, target: str, level: str = "assoc", do: str | None = None):
        session = get_session(session_id)
        do_map = _parse_do_param(do)
        evidence = dict(session.evidence)
        if level == "assoc":
            post = query_association(session.network, target, evidence)
        elif level == "do":
            post = query_intervention(session.network, target, do_map, evidence)
        elif level == "cf":
            post = query_counterfactual(session.network, target, do_map, evidence)
        else:
            raise InvalidQueryError(f"level must be assoc, do, or cf, got {level!r}")
        return {"states": post.probabilities}

    @app.post("/sessions/{session_id}/rtb")
    def rtb(session_id: str, body: RtbBody):
        session = get_session(session_id)
        q = rtb_query_from_dict(body.query)
        with session.lock:
            report = evaluate_rtb_query(session.network, q, ambient_evidence=session.evidence)
            session.last_report = report
            snapshot(session)
        return report_to_dict(report)

    @app.post("/sessions/{session_id}/decision")
    def decision(session_id: str, body: DecisionBody):
        session = get_session(session_id)
        with session.lock:
            if session.last_report is None:
                raise NoReportError("post an rtb query before recording a decision")
            costs = DecisionCosts(cost_verify=body.costs.verify, cost_wrong_accept=body.costs.wrong_accept)
            rec, threshold = verification_decision(session.last_report.trust, costs)
            entry = {
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "query_echo": report_to_dict(session.last_report)["query_echo"],
                "report": report_to_dict(session.last_report),
                "operator_action": body.action,
                "recommendation": Recommendation(rec).value,
                "threshold": threshold,
                "override": body.action != Recommendation(rec).value.lower(),
                "costs": {"verify": body.costs.verify, "wrong_accept": body.costs.wrong_accept},
            }
            session.log.append(entry)
            snapshot(session)
            return entry

    @app.get("/sessions/{session_id}/log")
    def log(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return [dict(e) for e in session.log]

    return app


app = create_app()
