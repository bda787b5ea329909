"""Risk, trust, and bias measures plus the query compiler for the R-T-B taxonomy.

Risk is expected cost (impact times probability), trust is the probability
that accepting is correct, and trust bias is the baseline-minus-conditioned
trust difference (positive means conditioning decreased trust). Queries of
order 1/2/3 at any of the three causal levels compile down to the inference
engine and come back as a report with an accept/verify recommendation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import (
    EmptyEnsembleError,
    InvalidQueryError,
    InvalidThresholdsError,
    MissingCostEntryError,
    MissingImpactModelError,
)
from .inference import (
    PosteriorDistribution,
    query_association,
    query_counterfactual,
    query_intervention,
)
from .model import CausalNetwork


class QueryKind(str, Enum):
    RISK = "Risk"
    TRUST = "Trust"
    BIAS = "Bias"


class QueryLevel(str, Enum):
    ASSOCIATION = "association"
    INTERVENTION = "intervention"
    COUNTERFACTUAL = "counterfactual"


class Recommendation(str, Enum):
    ACCEPT = "Accept"
    VERIFY = "Verify"


class TrustClass(str, Enum):
    UNTRUSTWORTHY = "Untrustworthy"
    NEUTRALLY_TRUSTED = "NeutrallyTrusted"
    TRUSTWORTHY = "Trustworthy"


@dataclass(frozen=True)
class ImpactModel:
    """Nonnegative cost per outcome label."""

    costs: dict[str, float]

    def cost_of(self, outcome: str) -> float:
        if outcome not in self.costs:
            raise MissingCostEntryError(f"no cost for outcome {outcome!r}")
        return self.costs[outcome]


@dataclass(frozen=True)
class DecisionCosts:
    """Cost of verifying a decision vs. cost of wrongly accepting it."""

    cost_verify: float
    cost_wrong_accept: float

    def __post_init__(self):
        if self.cost_verify < 0:
            raise InvalidThresholdsError("cost_verify must be >= 0")
        if self.cost_wrong_accept <= 0:
            raise InvalidThresholdsError("cost_wrong_accept must be > 0")


@dataclass(frozen=True)
class BiasAttributeRates:
    """Biometric error rates for one demographic group of one attribute."""

    attribute: str
    group: str
    fmr: float
    fnmr: float
    p_genuine: float


@dataclass(frozen=True)
class EventTarget:
    """A variable pinned to one of its states."""

    variable: str
    state: str


@dataclass(frozen=True)
class RtbQuery:
    """One cell of the R-T-B taxonomy.

    `given` holds observations (factual ones for counterfactual queries) and
    `do` the intervened assignments. The order is validated structurally:
    association-level queries condition on ``order - 1`` observed variables,
    while intervention and counterfactual queries place their ``order - 1``
    conditioners in the do-set (any further `given` entries are ordinary
    post-intervention or factual evidence).
    """

    order: int
    kind: QueryKind
    level: QueryLevel
    target: EventTarget
    given: dict[str, str] = field(default_factory=dict)
    do: dict[str, str] = field(default_factory=dict)
    impact: ImpactModel | None = None


@dataclass(frozen=True)
class RtbReport:
    """Assessment outcome: values, threshold, and the accept/verify call."""

    trust: float
    threshold: float
    recommendation: Recommendation
    risk: float | None
    trust_bias: float | None
    query_echo: RtbQuery


#: Used when a caller does not supply decision costs: verification at a tenth
#: of the cost of a wrong acceptance, i.e. accept only above trust 0.9.
DEFAULT_DECISION_COSTS = DecisionCosts(cost_verify=1.0, cost_wrong_accept=10.0)


def risk_expected_cost(impact: ImpactModel, outcome_dist: PosteriorDistribution) -> float:
    """Expected cost of the outcome distribution under the impact model."""
    total = 0.0
    for outcome, p in outcome_dist.probabilities.items():
        if p == 0.0:
            continue
        total += impact.cost_of(outcome) * p
    return total


def risk_of_bias(impact_fmr: float, impact_fnmr: float, rates: BiasAttributeRates) -> float:
    """Cost-weighted error risk for one attribute group.

    False matches matter only for imposters and false non-matches only for
    genuine users, so each term is gated by the genuine-user probability.
    """
    return (
        impact_fmr * rates.fmr * (1.0 - rates.p_genuine)
        + impact_fnmr * rates.fnmr * rates.p_genuine
    )


def ensemble_risk(per_attribute: list[float]) -> float:
    """Total risk across a subject's attributes (plain sum)."""
    if not per_attribute:
        raise EmptyEnsembleError("no attribute risks to combine")
    return sum(per_attribute)


def trust_of_decision(net: CausalNetwork, accept_event: EventTarget, evidence: dict[str, str]) -> float:
    """Probability that the accept event holds given the evidence."""
    post = query_association(net, accept_event.variable, evidence)
    return post[accept_event.state]


def verification_decision(trust: float, costs: DecisionCosts) -> tuple[Recommendation, float]:
    """Accept without verification only when trust strictly exceeds 1 - Cv/Ca.

    A tie goes to Verify: at the break-even point verification is free in
    expectation and a security DSS takes the cautious branch.
    """
    threshold = 1.0 - costs.cost_verify / costs.cost_wrong_accept
    threshold = min(1.0, max(0.0, threshold))
    rec = Recommendation.ACCEPT if trust > threshold else Recommendation.VERIFY
    return rec, threshold


def bias_of_trust(trust_baseline: float, trust_conditioned: float) -> float:
    """Baseline minus conditioned trust; negative means conditioning increased trust."""
    return trust_baseline - trust_conditioned


def trust_class(trust: float, thresholds: tuple[float, float] = (0.4, 0.7)) -> TrustClass:
    """Three-way trust banding; the middle band includes both boundaries."""
    low, high = thresholds
    if not (0.0 <= low < high <= 1.0):
        raise InvalidThresholdsError(f"need 0 <= low < high <= 1, got {thresholds}")
    if trust < low:
        return TrustClass.UNTRUSTWORTHY
    if trust > high:
        return TrustClass.TRUSTWORTHY
    return TrustClass.NEUTRALLY_TRUSTED


def validate_rtb_query(q: RtbQuery) -> None:
    """Enforce the structural invariants of the taxonomy; raises on violation."""
    if q.order not in (1, 2, 3):
        raise InvalidQueryError(f"order must be 1, 2, or 3, got {q.order}")
    try:
        QueryKind(q.kind)
        level = QueryLevel(q.level)
    except ValueError as exc:
        raise InvalidQueryError(str(exc)) from None
    if level is QueryLevel.COUNTERFACTUAL and not q.do:
        raise InvalidQueryError("counterfactual queries need a nonempty do-set")
    if q.target.variable in q.do:
        raise InvalidQueryError(f"target {q.target.variable!r} cannot be in the do-set")
    if level is not QueryLevel.COUNTERFACTUAL and q.target.variable in q.given:
        raise InvalidQueryError(f"target {q.target.variable!r} cannot be observed")
    conditioners = len(q.given) if level is QueryLevel.ASSOCIATION else len(q.do)
    if conditioners != q.order - 1:
        raise InvalidQueryError(
            f"order-{q.order} {level.value} query must have {q.order - 1} "
            f"conditioning variable(s), got {conditioners}"
        )


def _dispatch(net: CausalNetwork, q: RtbQuery) -> PosteriorDistribution:
    level = QueryLevel(q.level)
    if level is QueryLevel.ASSOCIATION:
        return query_association(net, q.target.variable, q.given)
    if level is QueryLevel.INTERVENTION:
        return query_intervention(net, q.target.variable, q.do, q.given)
    return query_counterfactual(net, q.target.variable, q.do, q.given)


def evaluate_rtb_query(
    net: CausalNetwork,
    q: RtbQuery,
    costs: DecisionCosts = DEFAULT_DECISION_COSTS,
    ambient_evidence: dict[str, str] | None = None,
) -> RtbReport:
    """Run one taxonomy cell and assemble the report.

    Trust is always the posterior probability of the target event. Risk
    additionally needs an impact model (mandatory when kind is Risk), and
    Bias compares against the evidence-free baseline marginal.

    `ambient_evidence` is session-style background evidence: merged into the
    query's `given` (the query wins on conflicts) after structural
    validation, so it does not count toward the query's order.
    """
    validate_rtb_query(q)
    if ambient_evidence:
        q = replace(q, given={**ambient_evidence, **q.given})
    kind = QueryKind(q.kind)
    posterior = _dispatch(net, q)
    trust = posterior[q.target.state]

    risk = None
    if q.impact is not None:
        risk = risk_expected_cost(q.impact, posterior)
    elif kind is QueryKind.RISK:
        raise MissingImpactModelError("Risk queries require an impact model")

    trust_bias = None
    if kind is QueryKind.BIAS:
        baseline = query_association(net, q.target.variable, {})
        trust_bias = bias_of_trust(baseline[q.target.state], trust)

    rec, threshold = verification_decision(trust, costs)
    return RtbReport(
        trust=trust,
        threshold=threshold,
        recommendation=rec,
        risk=risk,
        trust_bias=trust_bias,
        query_echo=q,
    )


# ---------------------------------------------------------------------------
# JSON wire form (used by the HTTP service and its clients)


def rtb_query_to_dict(q: RtbQuery) -> dict:
    doc: dict = {
        "order": q.order,
        "kind": QueryKind(q.kind).value,
        "level": QueryLevel(q.level).value,
        "target": {"variable": q.target.variable, "state": q.target.state},
        "given": dict(q.given),
        "do": dict(q.do),
    }
    if q.impact is not None:
        doc["impact"] = {"costs": dict(q.impact.costs)}
    return doc


def rtb_query_from_dict(doc: dict) -> RtbQuery:
    try:
        impact = None
        if doc.get("impact") is not None:
            impact = ImpactModel(costs={str(k): float(v) for k, v in doc["impact"]["costs"].items()})
        return RtbQuery(
            order=int(doc["order"]),
            kind=QueryKind(doc["kind"]),
            level=QueryLevel(doc["level"]),
            target=EventTarget(str(doc["target"]["variable"]), str(doc["target"]["state"])),
            given={str(k): str(v) for k, v in doc.get("given", {}).items()},
            do={str(k): str(v) for k, v in doc.get("do", {}).items()},
            impact=impact,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidQueryError(f"malformed query document: {exc}") from exc


def report_to_dict(r: RtbReport) -> dict:
    return {
        "risk": r.risk,
        "trust": r.trust,
        "trust_bias": r.trust_bias,
        "recommendation": Recommendation(r.recommendation).value,
        "threshold": r.threshold,
        "query_echo": rtb_query_to_dict(r.query_echo),
    }
