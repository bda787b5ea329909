"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's factor machinery: they
work by direct enumeration over assignments and raw CPT lookups, so they
can catch errors in the elimination path rather than mirror them.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict

import numpy as np
import pytest

from rtb.model import (
    CausalNetwork,
    Cpt,
    ExogenousNoise,
    Mechanism,
    Variable,
    topological_order,
)


def normalized_row(rng: random.Random, k: int) -> tuple[float, ...]:
    """Random distribution bounded away from zero; last entry complements."""
    weights = [rng.uniform(0.05, 1.0) for _ in range(k)]
    total = sum(weights)
    row = [w / total for w in weights[:-1]]
    row.append(1.0 - sum(row))
    return tuple(row)


def random_dag_network(
    rng: random.Random,
    n_nodes: int,
    max_parents: int = 3,
    cardinality: int = 2,
    name: str = "random",
) -> CausalNetwork:
    """Random DAG over X0..Xn-1 with parents drawn from earlier nodes."""
    variables = [
        Variable(f"X{i}", tuple(f"s{j}" for j in range(cardinality))) for i in range(n_nodes)
    ]
    edges: list[tuple[str, str]] = []
    cpts: dict[str, Cpt] = {}
    for i, var in enumerate(variables):
        pool = [variables[j].name for j in range(i)]
        k = rng.randint(0, min(len(pool), max_parents))
        parents = tuple(sorted(rng.sample(pool, k), key=lambda nm: int(nm[1:])))
        edges.extend((p, var.name) for p in parents)
        n_rows = 1
        for p in parents:
            n_rows *= cardinality
        table = tuple(normalized_row(rng, cardinality) for _ in range(n_rows))
        cpts[var.name] = Cpt(var.name, parents, table)
    return CausalNetwork(name, tuple(variables), tuple(edges), cpts)


def random_scm(
    rng: random.Random,
    n_nodes: int = 4,
    max_parents: int = 2,
    max_cardinality: int = 3,
    max_exo: int = 3,
    name: str = "scm",
) -> CausalNetwork:
    """Random structural model: root priors plus a mechanism on every inner node.

    CPTs of mechanism nodes are derived by marginalizing the exogenous
    prior, so the network satisfies the mechanism/CPT agreement invariant
    by construction.
    """
    cards = [rng.randint(2, max_cardinality) for _ in range(n_nodes)]
    variables = [
        Variable(f"X{i}", tuple(f"s{j}" for j in range(cards[i]))) for i in range(n_nodes)
    ]
    edges: list[tuple[str, str]] = []
    cpts: dict[str, Cpt] = {}
    mechanisms: dict[str, Mechanism] = {}
    for i, var in enumerate(variables):
        pool = [variables[j].name for j in range(i)]
        k = rng.randint(1, min(len(pool), max_parents)) if pool else 0
        parents = tuple(sorted(rng.sample(pool, k), key=lambda nm: int(nm[1:])))
        edges.extend((p, var.name) for p in parents)
        if not parents:
            cpts[var.name] = Cpt(var.name, (), (normalized_row(rng, cards[i]),))
            continue
        n_rows = 1
        for p in parents:
            n_rows *= cards[int(p[1:])]
        n_exo = rng.randint(2, max_exo)
        exo = ExogenousNoise(
            name=f"U_{var.name}",
            states=tuple(f"u{j}" for j in range(n_exo)),
            prior=normalized_row(rng, n_exo),
        )
        mapping = tuple(rng.randrange(cards[i]) for _ in range(n_rows * n_exo))
        mech = Mechanism(child=var.name, parents=parents, exogenous=exo, map=mapping)
        mechanisms[var.name] = mech
        rows = []
        for row in range(n_rows):
            probs = [0.0] * cards[i]
            for u in range(n_exo):
                probs[mapping[row * n_exo + u]] += exo.prior[u]
            rows.append(tuple(probs))
        cpts[var.name] = Cpt(var.name, parents, tuple(rows))
    return CausalNetwork(name, tuple(variables), tuple(edges), cpts, mechanisms)


def random_evidence(
    rng: random.Random, net: CausalNetwork, max_vars: int, exclude: set[str] = frozenset()
) -> dict[str, str]:
    pool = [v for v in net.variables if v.name not in exclude]
    k = rng.randint(0, min(max_vars, len(pool)))
    chosen = rng.sample(pool, k)
    return {v.name: rng.choice(v.states) for v in chosen}


# ---------------------------------------------------------------------------
# Oracles


def joint_oracle_posterior(net: CausalNetwork, joint_values: np.ndarray, scope: tuple[str, ...],
                           target: str, evidence: dict[str, str]) -> np.ndarray:
    """Marginal of a full joint restricted to evidence, renormalized.

    Works on the raw joint array with axis selection and summation only.
    """
    names = list(scope)
    vals = joint_values
    for var, state in sorted(evidence.items(), key=lambda kv: names.index(kv[0]), reverse=True):
        axis = names.index(var)
        vals = np.take(vals, net.variable(var).index_of(state), axis=axis)
        names.pop(axis)
    t_axis = names.index(target)
    other = tuple(i for i in range(vals.ndim) if i != t_axis)
    marg = vals.sum(axis=other) if other else vals
    total = marg.sum()
    if total <= 0:
        raise ZeroDivisionError("evidence impossible under oracle")
    return marg / total


def nested_loop_joint(net: CausalNetwork) -> dict[tuple[int, ...], float]:
    """Second, fully naive joint: pure-python loops and table indexing."""
    names = [v.name for v in net.variables]
    cards = [v.cardinality for v in net.variables]
    out = {}
    for combo in itertools.product(*(range(c) for c in cards)):
        assignment = dict(zip(names, combo))
        p = 1.0
        for name in names:
            cpt = net.cpts[name]
            row = 0
            for parent in cpt.parents:
                row = row * net.cardinality(parent) + assignment[parent]
            p *= cpt.table[row][assignment[name]]
        out[combo] = p
    return out


def backdoor_adjustment(net: CausalNetwork, y: str, x: str, x_state: str, z: str) -> list[float]:
    """P(y | do(x)) = sum_z P(z) P(y | x, z) for the confounded triple,
    straight from the CPT tables."""
    zvar, yvar = net.variable(z), net.variable(y)
    x_idx = net.variable(x).index_of(x_state)
    z_prior = net.cpts[z].table[0]
    out = []
    for yi in range(yvar.cardinality):
        total = 0.0
        for zi in range(zvar.cardinality):
            y_cpt = net.cpts[y]
            row = 0
            for parent in y_cpt.parents:
                row = row * net.cardinality(parent) + (x_idx if parent == x else zi)
            total += z_prior[zi] * y_cpt.table[row][yi]
        out.append(total)
    return out


def counterfactual_oracle(
    net: CausalNetwork, target: str, do: dict[str, str], observed: dict[str, str]
) -> dict[str, float]:
    """Abduction-action-prediction by enumeration over roots and noise.

    Requires a mechanism on every non-root node (the shape `random_scm`
    produces). Roots keep their priors; every inner node is deterministic
    given parents and its exogenous state.
    """
    topo = topological_order(net)
    roots = [n for n in topo if not net.parents_of(n)]
    inner = [n for n in topo if net.parents_of(n)]
    assert all(n in net.mechanisms for n in inner)

    def propagate(root_vals: dict[str, int], exo_vals: dict[str, int], do_idx: dict[str, int]) -> dict[str, int]:
        world = {}
        for node in topo:
            if node in do_idx:
                world[node] = do_idx[node]
            elif node in root_vals and node in roots:
                world[node] = root_vals[node]
            else:
                mech = net.mechanisms[node]
                row = 0
                for parent in mech.parents:
                    row = row * net.cardinality(parent) + world[parent]
                world[node] = mech.map[row * len(mech.exogenous.states) + exo_vals[node]]
        return world

    obs_idx = {k: net.variable(k).index_of(v) for k, v in observed.items()}
    do_idx = {k: net.variable(k).index_of(v) for k, v in do.items()}
    weights: dict[int, float] = defaultdict(float)
    root_spaces = [range(net.cardinality(r)) for r in roots]
    exo_spaces = [range(len(net.mechanisms[n].exogenous.states)) for n in inner]
    for root_combo in itertools.product(*root_spaces):
        root_vals = dict(zip(roots, root_combo))
        p_roots = 1.0
        for r, idx in root_vals.items():
            p_roots *= net.cpts[r].table[0][idx]
        for exo_combo in itertools.product(*exo_spaces):
            exo_vals = dict(zip(inner, exo_combo))
            p = p_roots
            for n, u in exo_vals.items():
                p *= net.mechanisms[n].exogenous.prior[u]
            factual = propagate(root_vals, exo_vals, {})
            if any(factual[k] != v for k, v in obs_idx.items()):
                continue
            cf = propagate(root_vals, exo_vals, do_idx)
            weights[cf[target]] += p
    total = sum(weights.values())
    if total <= 0:
        raise ZeroDivisionError("observed evidence impossible under oracle")
    states = net.variable(target).states
    return {s: weights.get(i, 0.0) / total for i, s in enumerate(states)}


def sample_factual_world(rng: random.Random, net: CausalNetwork) -> dict[str, str]:
    """Forward-sample one complete assignment (positive probability by
    construction) from an SCM built by `random_scm`."""
    topo = topological_order(net)
    world_idx: dict[str, int] = {}
    for node in topo:
        parents = net.parents_of(node)
        if not parents:
            probs = net.cpts[node].table[0]
            world_idx[node] = rng.choices(range(len(probs)), weights=probs)[0]
            continue
        mech = net.mechanisms[node]
        u = rng.choices(range(len(mech.exogenous.prior)), weights=mech.exogenous.prior)[0]
        row = 0
        for parent in mech.parents:
            row = row * net.cardinality(parent) + world_idx[parent]
        world_idx[node] = mech.map[row * len(mech.exogenous.states) + u]
    return {n: net.variable(n).states[i] for n, i in world_idx.items()}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
