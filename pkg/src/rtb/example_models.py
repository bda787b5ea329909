"""Bundled demonstration models, their fixture tables, and canonical scenarios.

The network structures follow the published figures; the CPT numbers are
authored here (none are published) and live in the bundled JSON files so a
reviewer can audit them without reading code. The face-recognition error
rates are a synthetic fixture: only the 1930s year-of-birth row carries
published numbers, the rest are plausible stand-ins.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

from .admiralty import AdmiraltyRating
from .assessment import (
    BiasAttributeRates,
    DecisionCosts,
    DEFAULT_DECISION_COSTS,
    EventTarget,
    ImpactModel,
    QueryKind,
    QueryLevel,
    Recommendation,
    RtbQuery,
    risk_expected_cost,
    verification_decision,
)
from .errors import UnknownAttributeGroupError, UnknownModelError
from .inference import query_association
from .model import (
    CausalNetwork,
    Cpt,
    ExogenousNoise,
    Mechanism,
    Variable,
    load_network,
)

# ---------------------------------------------------------------------------
# ID-credibility network (e-passport validation)


def _threshold_mechanism(child: Variable, parents: tuple[str, ...], exo_name: str,
                         row_probs: list[tuple[float, ...]]) -> Mechanism:
    """Monotone threshold coupling: one shared uniform-like noise source whose
    cumulative bins reproduce every row of the target CPT exactly."""
    breaks = sorted({round(c, 12) for row in row_probs for c in _cumulative(row)[:-1]} | {1.0})
    prior = []
    prev = 0.0
    for b in breaks:
        prior.append(b - prev)
        prev = b
    states = tuple(f"u{i + 1}" for i in range(len(prior)))
    mapping = []
    for row in row_probs:
        cum = _cumulative(row)
        upto = 0.0
        for width in prior:
            upto = round(upto + width, 12)
            for idx, c in enumerate(cum):
                if upto <= round(c, 12) + 1e-12:
                    mapping.append(idx)
                    break
    return Mechanism(
        child=child.name,
        parents=parents,
        exogenous=ExogenousNoise(name=exo_name, states=states, prior=tuple(prior)),
        map=tuple(mapping),
    )


def _cumulative(row) -> list[float]:
    out = []
    total = 0.0
    for p in row:
        total += p
        out.append(round(total, 12))
    return out


def id_credibility_model() -> CausalNetwork:
    """Four-node e-passport network: source reliability and document validity
    drive the validation outcome, which drives the credibility level.

    Mechanisms (threshold couplings) are attached to the two non-root nodes
    so counterfactual queries work out of the box.
    """
    reliability = Variable("Reliability", ("low", "medium", "high"))
    valid = Variable("Valid", ("yes", "no"))
    validation = Variable("Validation", ("pass", "fail"))
    credibility = Variable("Credibility", ("low", "medium", "high"))

    validation_rows = [
        (0.70, 0.30),  # low, yes
        (0.25, 0.75),  # low, no
        (0.85, 0.15),  # medium, yes
        (0.10, 0.90),  # medium, no
        (0.95, 0.05),  # high, yes
        (0.02, 0.98),  # high, no
    ]
    credibility_rows = [
        (0.05, 0.25, 0.70),  # pass
        (0.70, 0.25, 0.05),  # fail
    ]

    return CausalNetwork(
        name="id-credibility",
        variables=(reliability, valid, validation, credibility),
        edges=(
            ("Reliability", "Validation"),
            ("Valid", "Validation"),
            ("Validation", "Credibility"),
        ),
        cpts={
            "Reliability": Cpt("Reliability", (), ((0.2, 0.5, 0.3),)),
            "Valid": Cpt("Valid", (), ((0.9, 0.1),)),
            "Validation": Cpt("Validation", ("Reliability", "Valid"), tuple(validation_rows)),
            "Credibility": Cpt("Credibility", ("Validation",), tuple(credibility_rows)),
        },
        mechanisms={
            "Validation": _threshold_mechanism(
                validation, ("Reliability", "Valid"), "U_Validation", validation_rows
            ),
            "Credibility": _threshold_mechanism(
                credibility, ("Validation",), "U_Credibility", credibility_rows
            ),
        },
    )


# ---------------------------------------------------------------------------
# Face-recognition bias ensemble


FACE_ATTRIBUTES: dict[str, tuple[tuple[str, ...], tuple[float, ...]]] = {
    "YOB": (("1930s", "1950s", "1970s", "1990s"), (0.1, 0.2, 0.3, 0.4)),
    "Gender": (("female", "male"), (0.5, 0.5)),
    "Ethnicity": (("group-a", "group-b", "group-c"), (0.3, 0.4, 0.3)),
    "Mustache": (("no", "yes"), (0.8, 0.2)),
    "Beard": (("no", "yes"), (0.75, 0.25)),
    "Glasses": (("no", "yes"), (0.6, 0.4)),
}


def rates_fixture_path() -> Path:
    return Path(__file__).parent / "models" / "face_bias_rates.csv"


def load_rates(path=None) -> list[BiasAttributeRates]:
    """Read an `attribute,group,fmr,fnmr,p_genuine` CSV fixture."""
    path = rates_fixture_path() if path is None else path
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                BiasAttributeRates(
                    attribute=row["attribute"],
                    group=row["group"],
                    fmr=float(row["fmr"]),
                    fnmr=float(row["fnmr"]),
                    p_genuine=float(row["p_genuine"]),
                )
            )
    return out


def rates_for(rates: list[BiasAttributeRates], attribute: str, group: str) -> BiasAttributeRates:
    for r in rates:
        if r.attribute == attribute and r.group == group:
            return r
    raise UnknownAttributeGroupError(f"no rates for {attribute}={group}")


def face_bias_model(rates: list[BiasAttributeRates] | None = None) -> CausalNetwork:
    """Eight-node bias network: six demographic/appearance attributes feed the
    recognizer's correctness, which determines whether the match is right.

    P(correct | attribute groups) is authored as one minus the mean
    cost-free error rate of the groups involved, where each group's error
    rate blends FMR and FNMR by the genuine-user probability.
    """
    rates = load_rates() if rates is None else rates
    attr_names = tuple(FACE_ATTRIBUTES)
    variables = [Variable(a, FACE_ATTRIBUTES[a][0]) for a in attr_names]
    correctness = Variable("Correctness", ("correct", "incorrect"))
    match = Variable("Match", ("match", "mismatch"))

    def group_error(attribute: str, group: str) -> float:
        r = rates_for(rates, attribute, group)
        return r.fmr * (1.0 - r.p_genuine) + r.fnmr * r.p_genuine

    rows = []
    for combo in itertools.product(*(FACE_ATTRIBUTES[a][0] for a in attr_names)):
        err = sum(group_error(a, g) for a, g in zip(attr_names, combo)) / len(attr_names)
        rows.append((1.0 - err, err))

    cpts = {
        a: Cpt(a, (), (FACE_ATTRIBUTES[a][1],)) for a in attr_names
    }
    cpts["Correctness"] = Cpt("Correctness", attr_names, tuple(rows))
    cpts["Match"] = Cpt("Match", ("Correctness",), ((1.0, 0.0), (0.0, 1.0)))

    return CausalNetwork(
        name="face-bias",
        variables=tuple(variables) + (correctness, match),
        edges=tuple((a, "Correctness") for a in attr_names) + (("Correctness", "Match"),),
        cpts=cpts,
    )


# ---------------------------------------------------------------------------
# Multi-state checkpoint scenario


@dataclass(frozen=True)
class CheckpointState:
    """One screening state: its network, rating, accept event, and impact."""

    state_id: str
    network: CausalNetwork
    rating: AdmiraltyRating
    accept_event: EventTarget
    impact: ImpactModel


@dataclass(frozen=True)
class CheckpointStateReport:
    state_id: str
    trust: float
    risk: float
    recommendation: Recommendation
    threshold: float


@dataclass(frozen=True)
class CheckpointAssessment:
    per_state: list[CheckpointStateReport]
    combined_risk: float
    combined_trust: float


def _authentication_model() -> CausalNetwork:
    genuine = Variable("Genuine", ("yes", "no"))
    face_match = Variable("FaceMatch", ("match", "nomatch"))
    return CausalNetwork(
        name="checkpoint-authentication",
        variables=(genuine, face_match),
        edges=(("Genuine", "FaceMatch"),),
        cpts={
            "Genuine": Cpt("Genuine", (), ((0.95, 0.05),)),
            "FaceMatch": Cpt("FaceMatch", ("Genuine",), ((0.98, 0.02), (0.02, 0.98))),
        },
    )


def _object_detection_model() -> CausalNetwork:
    obj = Variable("Object", ("none", "present"))
    alarm = Variable("Alarm", ("quiet", "alarm"))
    return CausalNetwork(
        name="checkpoint-object-detection",
        variables=(obj, alarm),
        edges=(("Object", "Alarm"),),
        cpts={
            "Object": Cpt("Object", (), ((0.95, 0.05),)),
            "Alarm": Cpt("Alarm", ("Object",), ((0.92, 0.08), (0.10, 0.90))),
        },
    )


def checkpoint_scenario() -> list[CheckpointState]:
    """The three-state identity management pipeline: ID validation, traveler
    authentication, concealed object detection."""
    return [
        CheckpointState(
            state_id="S1",
            network=id_credibility_model(),
            rating=AdmiraltyRating("B", 2),
            accept_event=EventTarget("Valid", "yes"),
            impact=ImpactModel({"yes": 0.0, "no": 10.0}),
        ),
        CheckpointState(
            state_id="S2",
            network=_authentication_model(),
            rating=AdmiraltyRating("A", 2),
            accept_event=EventTarget("Genuine", "yes"),
            impact=ImpactModel({"yes": 0.0, "no": 50.0}),
        ),
        CheckpointState(
            state_id="S3",
            network=_object_detection_model(),
            rating=AdmiraltyRating("C", 3),
            accept_event=EventTarget("Object", "none"),
            impact=ImpactModel({"none": 0.0, "present": 100.0}),
        ),
    ]


def assess_checkpoint(
    states: list[CheckpointState],
    evidence: dict[str, dict[str, str]] | None = None,
    costs: DecisionCosts = DEFAULT_DECISION_COSTS,
    risk_aggregator=sum,
    trust_aggregator=min,
) -> CheckpointAssessment:
    """Per-state trust/risk plus conservative cross-state aggregation
    (risks add up, trust is only as good as the weakest state)."""
    evidence = evidence or {}
    reports = []
    for st in states:
        ev = evidence.get(st.state_id, {})
        posterior = query_association(st.network, st.accept_event.variable, ev)
        trust = posterior[st.accept_event.state]
        risk = risk_expected_cost(st.impact, posterior)
        rec, threshold = verification_decision(trust, costs)
        reports.append(
            CheckpointStateReport(
                state_id=st.state_id, trust=trust, risk=risk,
                recommendation=rec, threshold=threshold,
            )
        )
    return CheckpointAssessment(
        per_state=reports,
        combined_risk=risk_aggregator(r.risk for r in reports),
        combined_trust=trust_aggregator(r.trust for r in reports),
    )


# ---------------------------------------------------------------------------
# Canonical scenario fixtures


@dataclass(frozen=True)
class ScenarioFixture:
    """A model query with its expected outcome and where that expectation
    comes from: `published` numbers, `authored` trivial arithmetic, or values
    `computed` once with the brute-force oracle and frozen."""

    name: str
    model: str
    query: RtbQuery
    source: str
    expected_direction: str | None = None
    expected_value: float | None = None
    tolerance: float | None = None


CONFLICT_EVIDENCE = {"Reliability": "low", "Credibility": "high"}


def canonical_scenarios() -> list[ScenarioFixture]:
    return [
        ScenarioFixture(
            name="conflict-unreliable-source-credible-outcome",
            model="id-credibility",
            query=RtbQuery(
                order=3,
                kind=QueryKind.TRUST,
                level=QueryLevel.ASSOCIATION,
                target=EventTarget("Valid", "yes"),
                given=dict(CONFLICT_EVIDENCE),
            ),
            source="published",
            expected_direction="greater-than-baseline",
        ),
        ScenarioFixture(
            name="id-validity-prior",
            model="id-credibility",
            query=RtbQuery(
                order=1,
                kind=QueryKind.TRUST,
                level=QueryLevel.ASSOCIATION,
                target=EventTarget("Valid", "yes"),
            ),
            source="authored",
            expected_value=0.9,
            tolerance=1e-12,
        ),
        ScenarioFixture(
            name="validation-risk-given-low-credibility",
            model="id-credibility",
            query=RtbQuery(
                order=2,
                kind=QueryKind.RISK,
                level=QueryLevel.ASSOCIATION,
                target=EventTarget("Valid", "yes"),
                given={"Credibility": "low"},
                impact=ImpactModel({"yes": 0.0, "no": 10.0}),
            ),
            source="computed",
            expected_value=3.2221995302767277,
            tolerance=1e-9,
        ),
    ]


# ---------------------------------------------------------------------------
# Bundled model files


def bundled_model_dir() -> Path:
    return Path(__file__).parent / "models"


def bundled_model_names() -> list[str]:
    return sorted(p.stem for p in bundled_model_dir().glob("*.json"))


def load_bundled(name: str) -> CausalNetwork:
    path = bundled_model_dir() / f"{name}.json"
    if not path.exists():
        raise UnknownModelError(f"no bundled model named {name!r}")
    return load_network(path)


def builders() -> dict[str, CausalNetwork]:
    """Networks exactly as shipped in the bundled files."""
    return {
        "id-credibility": id_credibility_model(),
        "face-bias": face_bias_model(),
        "checkpoint-authentication": _authentication_model(),
        "checkpoint-object-detection": _object_detection_model(),
    }
