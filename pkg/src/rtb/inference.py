"""Exact inference over discrete causal networks.

Three query levels — seeing, doing, imagining — all reduce to sum-product
variable elimination: interventions run on the mutilated graph and
counterfactuals on the twin graph. `enumerate_joint` is the deliberately
naive full-joint construction kept as an independent oracle.

Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    ScopeMismatchError,
    StateSpaceTooLargeError,
    TargetInDoError,
    TargetInEvidenceError,
    OverlappingDoAndEvidenceError,
    UnknownStateError,
    UnknownVariableError,
    ZeroProbabilityEvidenceError,
)
from .model import CausalNetwork, descendants, mutilate, twin_network, TWIN_SUFFIX

DEFAULT_JOINT_CAP = 2**20

# Evidence is a plain mapping variable -> observed state.
Evidence = dict


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table over a variable scope.

    `values` is shaped one axis per scope variable; its C-order flattening
    is the canonical flat form (last scope variable varying fastest).
    """

    scope: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != len(self.scope):
            raise ScopeMismatchError(
                f"factor over {self.scope} has {vals.ndim} axes"
            )
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("factor values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1)

    def cardinalities(self) -> dict[str, int]:
        return dict(zip(self.scope, self.values.shape))


@dataclass(frozen=True)
class PosteriorDistribution:
    """Distribution of one target variable; states in declared order."""

    target: str
    probabilities: dict[str, float]

    def __getitem__(self, state: str) -> float:
        if state not in self.probabilities:
            raise UnknownStateError(f"{self.target!r} has no state {state!r}")
        return self.probabilities[state]

    def point_mass_state(self) -> str | None:
        for state, p in self.probabilities.items():
            if p == 1.0:
                return state
        return None


def _merged_cards(factors) -> dict[str, int]:
    cards: dict[str, int] = {}
    for f in factors:
        for v, c in zip(f.scope, f.values.shape):
            if cards.setdefault(v, c) != c:
                raise ScopeMismatchError(f"variable {v!r} has conflicting cardinalities {cards[v]} and {c}")
    return cards


def factor_product(a: Factor, b: Factor) -> Factor:
    """Pointwise product over the union scope (broadcasting alignment)."""
    cards = _merged_cards([a, b])
    union = a.scope + tuple(v for v in b.scope if v not in a.scope)

    def aligned(f: Factor) -> np.ndarray:
        present = [v for v in union if v in f.scope]
        perm = [f.scope.index(v) for v in present]
        vals = np.transpose(f.values, perm)
        shape = [cards[v] if v in f.scope else 1 for v in union]
        return vals.reshape(shape)

    return Factor(scope=union, values=aligned(a) * aligned(b))


def sum_out(f: Factor, variable: str) -> Factor:
    if variable not in f.scope:
        raise ScopeMismatchError(f"{variable!r} not in factor scope {f.scope}")
    axis = f.scope.index(variable)
    scope = tuple(v for v in f.scope if v != variable)
    return Factor(scope=scope, values=f.values.sum(axis=axis))


def reduce_factor(f: Factor, evidence: dict[str, int]) -> Factor:
    """Slice out observed states; evidence variables leave the scope."""
    vals = f.values
    scope = list(f.scope)
    for var, idx in evidence.items():
        if var not in scope:
            continue
        axis = scope.index(var)
        vals = np.take(vals, idx, axis=axis)
        scope.pop(axis)
    return Factor(scope=tuple(scope), values=vals)


def eliminate(factors: list[Factor], order: list[str]) -> Factor:
    """Sum-product elimination of `order` from the product of `factors`.

    Equal (within float tolerance) to multiplying everything and summing the
    removed variables out of the full table, regardless of the order given.
    """
    if not factors:
        raise ScopeMismatchError("no factors to eliminate from")
    _merged_cards(factors)
    work = list(factors)
    for var in order:
        bucket = [f for f in work if var in f.scope]
        if not bucket:
            raise ScopeMismatchError(f"{var!r} does not appear in any factor")
        rest = [f for f in work if var not in f.scope]
        prod = bucket[0]
        for f in bucket[1:]:
            prod = factor_product(prod, f)
        work = rest + [sum_out(prod, var)]
    result = work[0]
    for f in work[1:]:
        result = factor_product(result, f)
    return result


def min_degree_order(scopes: list[tuple[str, ...]], to_eliminate: set[str]) -> list[str]:
    """Greedy min-degree ordering on the interaction graph; name-ordered ties."""
    neighbors: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            neighbors.setdefault(v, set()).update(u for u in scope if u != v)
    remaining = set(to_eliminate)
    order = []
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors.get(v, set())), v))
        around = neighbors.pop(var, set())
        for u in around:
            neighbors[u].discard(var)
        for u, w in itertools.combinations(sorted(around), 2):
            neighbors[u].add(w)
            neighbors[w].add(u)
        remaining.discard(var)
        order.append(var)
    return order


# ---------------------------------------------------------------------------
# Full-joint oracle


def enumerate_joint(net: CausalNetwork, cap: int = DEFAULT_JOINT_CAP) -> Factor:
    """Full joint by direct CPT products over every complete assignment.

    Intentionally does not share code with the elimination path so the two
    can cross-check each other. Scope follows declaration order.
    """
    cards = [v.cardinality for v in net.variables]
    cells = 1
    for c in cards:
        cells *= c
    if cells > cap:
        raise StateSpaceTooLargeError(f"{cells} cells exceeds cap {cap}")
    names = [v.name for v in net.variables]
    position = {n: i for i, n in enumerate(names)}
    lookups = []  # (own position, parent positions, parent cardinalities, table)
    for i, v in enumerate(net.variables):
        cpt = net.cpts[v.name]
        parent_pos = [position[p] for p in cpt.parents]
        parent_cards = [cards[j] for j in parent_pos]
        lookups.append((i, parent_pos, parent_cards, cpt.table))
    values = np.empty(cards, dtype=float)
    flat = values.reshape(-1)
    for k, combo in enumerate(itertools.product(*(range(c) for c in cards))):
        p = 1.0
        for own, parent_pos, parent_cards, table in lookups:
            row = 0
            for j, c in zip(parent_pos, parent_cards):
                row = row * c + combo[j]
            p *= table[row][combo[own]]
        flat[k] = p
    return Factor(scope=tuple(names), values=values)


# ---------------------------------------------------------------------------
# The three query levels


def _check_evidence(net: CausalNetwork, evidence: dict[str, str]) -> dict[str, int]:
    return {name: net.variable(name).index_of(state) for name, state in evidence.items()}


def query_association(net: CausalNetwork, target: str, evidence: dict[str, str]) -> PosteriorDistribution:
    """P(target | evidence) by variable elimination, renormalized."""
    target_var = net.variable(target)
    ev_idx = _check_evidence(net, evidence)
    if target in evidence:
        raise TargetInEvidenceError(f"target {target!r} is observed")

    factors = []
    for v in net.variables:
        cpt = net.cpts[v.name]
        shape = tuple(net.cardinality(p) for p in cpt.parents) + (v.cardinality,)
        table = np.asarray(cpt.table, dtype=float).reshape(shape)
        f = Factor(scope=cpt.parents + (v.name,), values=table)
        factors.append(reduce_factor(f, ev_idx))

    to_remove = {v.name for v in net.variables} - set(evidence) - {target}
    order = min_degree_order([f.scope for f in factors], to_remove)
    result = eliminate(factors, order)
    if result.scope != (target,):
        raise ScopeMismatchError(f"elimination left scope {result.scope}, expected ({target!r},)")
    vals = result.values.reshape(-1)
    total = float(vals.sum())
    if total <= 0.0:
        raise ZeroProbabilityEvidenceError(f"evidence {evidence} has probability zero")
    probs = vals / total
    return PosteriorDistribution(
        target=target,
        probabilities={s: float(p) for s, p in zip(target_var.states, probs)},
    )


def query_intervention(
    net: CausalNetwork, target: str, do: dict[str, str], evidence: dict[str, str]
) -> PosteriorDistribution:
    """P(target | do(...), evidence): surgery first, then ordinary conditioning."""
    if target in do:
        raise TargetInDoError(f"target {target!r} is intervened on")
    overlap = set(do) & set(evidence)
    if overlap:
        raise OverlappingDoAndEvidenceError(f"variables {sorted(overlap)} in both do and evidence")
    return query_association(mutilate(net, do), target, evidence)


def query_counterfactual(
    net: CausalNetwork, target: str, do: dict[str, str], observed: dict[str, str]
) -> PosteriorDistribution:
    """P(target had we done `do` | factually observed) via the twin graph.

    `observed` attaches to the factual copy; the target is read from the
    counterfactual copy (which is the factual node itself whenever the
    intervention cannot reach it).
    """
    net.variable(target)
    if target in do:
        raise TargetInDoError(f"target {target!r} is intervened on")
    _check_evidence(net, observed)
    twin = twin_network(net, do)
    affected = set(do) | descendants(net, do.keys())
    resolved = target + TWIN_SUFFIX if target in affected else target

    if resolved in observed:
        # Shared node conditioned on itself: point mass, provided the full
        # evidence set is actually possible.
        rest = {k: v for k, v in observed.items() if k != resolved}
        post = query_association(twin, resolved, rest)
        seen = observed[resolved]
        if post[seen] <= 0.0:
            raise ZeroProbabilityEvidenceError(f"evidence {observed} has probability zero")
        probs = {s: (1.0 if s == seen else 0.0) for s in net.variable(target).states}
        return PosteriorDistribution(target=target, probabilities=probs)

    post = query_association(twin, resolved, observed)
    return PosteriorDistribution(target=target, probabilities=post.probabilities)
