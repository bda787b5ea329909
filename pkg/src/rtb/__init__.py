"""Risk/Trust/Bias decision support over discrete causal networks."""

from .admiralty import (
    AdmiraltyRating,
    DecisionCategory,
    RatedState,
    decision_category,
    parse_rating,
    rate_state_set,
)
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
    RtbReport,
    TrustClass,
    bias_of_trust,
    ensemble_risk,
    evaluate_rtb_query,
    risk_expected_cost,
    risk_of_bias,
    trust_class,
    trust_of_decision,
    validate_rtb_query,
    verification_decision,
)
from .errors import RtbError
from .inference import (
    Factor,
    PosteriorDistribution,
    eliminate,
    enumerate_joint,
    query_association,
    query_counterfactual,
    query_intervention,
)
from .model import (
    CausalNetwork,
    Collider,
    Cpt,
    ExogenousNoise,
    Mechanism,
    Variable,
    Violation,
    detect_colliders,
    load_network,
    mutilate,
    network_from_dict,
    network_to_dict,
    save_network,
    topological_order,
    twin_network,
    validate_network,
)

__all__ = [
    "AdmiraltyRating",
    "BiasAttributeRates",
    "CausalNetwork",
    "Collider",
    "Cpt",
    "DecisionCategory",
    "DecisionCosts",
    "DEFAULT_DECISION_COSTS",
    "EventTarget",
    "ExogenousNoise",
    "Factor",
    "ImpactModel",
    "Mechanism",
    "PosteriorDistribution",
    "QueryKind",
    "QueryLevel",
    "RatedState",
    "Recommendation",
    "RtbError",
    "RtbQuery",
    "RtbReport",
    "TrustClass",
    "Variable",
    "Violation",
    "bias_of_trust",
    "decision_category",
    "detect_colliders",
    "eliminate",
    "ensemble_risk",
    "enumerate_joint",
    "evaluate_rtb_query",
    "load_network",
    "mutilate",
    "network_from_dict",
    "network_to_dict",
    "parse_rating",
    "query_association",
    "query_counterfactual",
    "query_intervention",
    "rate_state_set",
    "risk_expected_cost",
    "risk_of_bias",
    "save_network",
    "topological_order",
    "trust_class",
    "trust_of_decision",
    "twin_network",
    "validate_network",
    "validate_rtb_query",
    "verification_decision",
]

__version__ = "0.1.0"
