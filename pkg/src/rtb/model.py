"""Discrete causal networks: variables, CPTs, structural mechanisms, graph surgery.

Networks are immutable after construction. Every transforming operation
(`mutilate`, `twin_network`) returns a new value and leaves its input intact,
so models can be shared freely between concurrent readers.

Conventions fixed here so model files are portable:

* CPT rows are indexed lexicographically over parent states in declared
  parent order, with the **last parent varying fastest**.
* A mechanism's `map` is that same row order extended by the exogenous
  state varying fastest: ``flat_index = row * n_exo + exo_index``.
* Counterfactual copies in a twin network carry a ``*`` suffix.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field

from .errors import (
    CycleDetectedError,
    InvalidModelError,
    MissingMechanismError,
    ParseError,
    UnknownStateError,
    UnknownVariableError,
)

ROW_SUM_TOL = 1e-9
MECHANISM_CPT_TOL = 1e-6
TWIN_SUFFIX = "*"


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered list of state labels."""

    name: str
    states: tuple[str, ...]

    def index_of(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownStateError(f"variable {self.name!r} has no state {state!r}") from None

    @property
    def cardinality(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table: one row per parent-state combination."""

    child: str
    parents: tuple[str, ...]
    table: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class ExogenousNoise:
    """Exogenous variable of a structural mechanism: states plus prior."""

    name: str
    states: tuple[str, ...]
    prior: tuple[float, ...]


@dataclass(frozen=True)
class Mechanism:
    """Deterministic structural equation child := f(parents, exogenous).

    `map` assigns a child-state index to every (parent combination,
    exogenous state) pair; it must be total.
    """

    child: str
    parents: tuple[str, ...]
    exogenous: ExogenousNoise
    map: tuple[int, ...]


@dataclass(frozen=True)
class Violation:
    """One broken model invariant: the node, the rule, and the offending index."""

    node: str
    rule: str
    detail: str

    def as_line(self) -> str:
        return f"{self.node}\t{self.rule}\t{self.detail}"


@dataclass(frozen=True)
class Collider:
    """A node with two or more parents, listed with all unordered parent pairs."""

    variable: str
    parent_pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class CausalNetwork:
    """Directed acyclic graph of discrete variables with per-node CPTs.

    `mechanisms` is optional per node and is only required to answer
    counterfactual queries about that node.
    """

    name: str
    variables: tuple[Variable, ...]
    edges: tuple[tuple[str, str], ...]
    cpts: dict[str, Cpt]
    mechanisms: dict[str, Mechanism] = field(default_factory=dict)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise UnknownVariableError(f"no variable named {name!r}")

    def has_variable(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    def parents_of(self, name: str) -> tuple[str, ...]:
        """Parents in canonical (CPT-declared) order."""
        cpt = self.cpts.get(name)
        if cpt is not None:
            return cpt.parents
        return tuple(p for p, c in self.edges if c == name)

    def children_of(self, name: str) -> tuple[str, ...]:
        return tuple(c for p, c in self.edges if p == name)

    def cardinality(self, name: str) -> int:
        return self.variable(name).cardinality


def row_index(parent_vars: list[Variable], state_indices: list[int]) -> int:
    """CPT row for a parent assignment; last parent varies fastest."""
    row = 0
    for var, idx in zip(parent_vars, state_indices):
        row = row * var.cardinality + idx
    return row


def cpt_entry(net: CausalNetwork, child: str, child_idx: int, assignment: dict[str, int]) -> float:
    """P(child = states[child_idx] | parent assignment), straight from the table."""
    cpt = net.cpts[child]
    parent_vars = [net.variable(p) for p in cpt.parents]
    row = row_index(parent_vars, [assignment[p] for p in cpt.parents])
    return cpt.table[row][child_idx]


def mechanism_to_cpt(net: CausalNetwork, mech: Mechanism) -> Cpt:
    """Marginalize the exogenous prior through the map to get the implied CPT."""
    parent_vars = [net.variable(p) for p in mech.parents]
    child = net.variable(mech.child)
    n_exo = len(mech.exogenous.states)
    rows = []
    n_rows = 1
    for v in parent_vars:
        n_rows *= v.cardinality
    for row in range(n_rows):
        probs = [0.0] * child.cardinality
        for u in range(n_exo):
            probs[mech.map[row * n_exo + u]] += mech.exogenous.prior[u]
        rows.append(tuple(probs))
    return Cpt(child=mech.child, parents=mech.parents, table=tuple(rows))


# ---------------------------------------------------------------------------
# Validation


def validate_network(net: CausalNetwork) -> list[Violation]:
    """Check every model invariant; violations are returned as data, not raised.

    Empty result iff the network is well formed. Checks that depend on
    earlier ones (e.g. CPT shape needs known cardinalities) are skipped for
    nodes already reported, so one modelling mistake yields one violation.
    """
    out: list[Violation] = []
    seen: dict[str, Variable] = {}
    for v in net.variables:
        if not v.name:
            out.append(Violation("", "empty-name", "variable with empty name"))
            continue
        if v.name in seen:
            out.append(Violation(v.name, "duplicate-variable", "name declared twice"))
            continue
        seen[v.name] = v
        if len(v.states) < 2:
            out.append(Violation(v.name, "too-few-states", f"{len(v.states)} state(s), need >= 2"))
        dupes = {s for s in v.states if v.states.count(s) > 1}
        for s in sorted(dupes):
            out.append(Violation(v.name, "duplicate-state", f"state {s!r} repeated"))

    graph_parents: dict[str, list[str]] = {n: [] for n in seen}
    edges_ok = True
    for p, c in net.edges:
        if p not in seen or c not in seen:
            out.append(Violation(c if p in seen else p, "unknown-edge-endpoint", f"edge {p!r}->{c!r}"))
            edges_ok = False
            continue
        graph_parents[c].append(p)

    if edges_ok:
        try:
            topological_order(net)
        except CycleDetectedError as exc:
            out.append(Violation("", "cycle", exc.detail or "graph contains a directed cycle"))

    for name, var in seen.items():
        cpt = net.cpts.get(name)
        if cpt is None:
            out.append(Violation(name, "missing-cpt", "no CPT declared"))
            continue
        if set(cpt.parents) != set(graph_parents.get(name, [])):
            out.append(
                Violation(
                    name,
                    "parent-mismatch",
                    f"cpt parents {list(cpt.parents)} != graph parents {sorted(graph_parents.get(name, []))}",
                )
            )
            continue
        if any(p not in seen for p in cpt.parents):
            continue  # already reported via unknown-edge-endpoint
        expected_rows = 1
        for p in cpt.parents:
            expected_rows *= seen[p].cardinality
        if len(cpt.table) != expected_rows:
            out.append(Violation(name, "bad-row-count", f"{len(cpt.table)} rows, expected {expected_rows}"))
            continue
        for r, row in enumerate(cpt.table):
            if len(row) != var.cardinality:
                out.append(Violation(name, "bad-column-count", f"row {r}: {len(row)} columns, expected {var.cardinality}"))
                continue
            bad = [x for x in row if not (0.0 <= x <= 1.0) or x != x]
            if bad:
                out.append(Violation(name, "entry-out-of-range", f"row {r}: {bad[0]!r}"))
                continue
            total = sum(row)
            if abs(total - 1.0) > ROW_SUM_TOL:
                out.append(Violation(name, "row-not-normalized", f"row {r} sums to {total!r}"))

    for name, mech in net.mechanisms.items():
        if name not in seen:
            out.append(Violation(name, "mechanism-unknown-child", "mechanism for undeclared variable"))
            continue
        cpt = net.cpts.get(name)
        if cpt is not None and mech.parents != cpt.parents:
            out.append(
                Violation(name, "mechanism-parent-mismatch", f"{list(mech.parents)} != {list(cpt.parents)}")
            )
            continue
        exo = mech.exogenous
        if len(exo.prior) != len(exo.states) or not exo.states:
            out.append(Violation(name, "bad-exogenous", f"{len(exo.prior)} prior entries for {len(exo.states)} states"))
            continue
        if abs(sum(exo.prior) - 1.0) > ROW_SUM_TOL:
            out.append(Violation(name, "exogenous-prior-not-normalized", f"prior sums to {sum(exo.prior)!r}"))
            continue
        n_rows = 1
        for p in mech.parents:
            if p not in seen:
                break
            n_rows *= seen[p].cardinality
        else:
            expected = n_rows * len(exo.states)
            if len(mech.map) != expected:
                out.append(Violation(name, "bad-map-length", f"{len(mech.map)} entries, expected {expected}"))
                continue
            card = seen[name].cardinality
            bad_idx = [i for i, m in enumerate(mech.map) if not (0 <= m < card)]
            if bad_idx:
                out.append(Violation(name, "bad-map-entry", f"index {bad_idx[0]}: child state {mech.map[bad_idx[0]]}"))
                continue
            if cpt is not None and len(cpt.table) == n_rows:
                implied = mechanism_to_cpt(net, mech)
                for r, (got, want) in enumerate(zip(implied.table, cpt.table)):
                    if len(got) != len(want):
                        continue
                    err = max(abs(g - w) for g, w in zip(got, want))
                    if err > MECHANISM_CPT_TOL:
                        out.append(
                            Violation(name, "mechanism-cpt-mismatch", f"row {r} differs by {err:.3g}")
                        )
                        break
    return out


# ---------------------------------------------------------------------------
# Graph operations


def topological_order(net: CausalNetwork) -> list[str]:
    """Parents before children; ties broken by declaration order."""
    pos = {v.name: i for i, v in enumerate(net.variables)}
    indegree = {n: 0 for n in pos}
    children: dict[str, list[str]] = {n: [] for n in pos}
    for p, c in net.edges:
        if p not in pos or c not in pos:
            raise UnknownVariableError(f"edge {p!r}->{c!r} references undeclared variable")
        indegree[c] += 1
        children[p].append(c)
    ready = [pos[n] for n, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        name = net.variables[heapq.heappop(ready)].name
        order.append(name)
        for c in children[name]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, pos[c])
    if len(order) != len(pos):
        stuck = sorted(n for n, d in indegree.items() if d > 0)
        raise CycleDetectedError(f"cycle through {stuck}")
    return order


def descendants(net: CausalNetwork, sources) -> set[str]:
    """All strict descendants of the given source variables."""
    out: set[str] = set()
    frontier = list(sources)
    while frontier:
        node = frontier.pop()
        for c in net.children_of(node):
            if c not in out:
                out.add(c)
                frontier.append(c)
    return out


def point_mass_cpt(var: Variable, state: str) -> Cpt:
    idx = var.index_of(state)
    row = tuple(1.0 if i == idx else 0.0 for i in range(var.cardinality))
    return Cpt(child=var.name, parents=(), table=(row,))


def mutilate(net: CausalNetwork, do_assignments: dict[str, str]) -> CausalNetwork:
    """Graph surgery: cut incoming edges of each do-variable and pin its state.

    The input network is not modified; repeated application with the same
    assignment is a no-op on the result.
    """
    for name, state in do_assignments.items():
        net.variable(name).index_of(state)
    edges = tuple(e for e in net.edges if e[1] not in do_assignments)
    cpts = dict(net.cpts)
    for name, state in do_assignments.items():
        cpts[name] = point_mass_cpt(net.variable(name), state)
    mechanisms = {k: m for k, m in net.mechanisms.items() if k not in do_assignments}
    return CausalNetwork(net.name, net.variables, edges, cpts, mechanisms)


def _deterministic_cpt(child: Variable, parents: tuple[str, ...], mech: Mechanism) -> Cpt:
    """One-hot CPT over (mechanism parents..., exogenous) realizing the map."""
    rows = []
    for m in mech.map:
        rows.append(tuple(1.0 if i == m else 0.0 for i in range(child.cardinality)))
    return Cpt(child=child.name, parents=parents, table=tuple(rows))


def twin_network(net: CausalNetwork, do_assignments: dict[str, str]) -> CausalNetwork:
    """Build the twin graph: factual copy plus a counterfactual copy under surgery.

    The two copies share exogenous nodes (and share outright every variable
    the intervention cannot reach), so conditioning the factual side and
    reading the starred side performs abduction-action-prediction by ordinary
    inference. Every strict descendant of a do-variable must carry a
    mechanism; the do-variables themselves do not, since surgery discards
    their equation.
    """
    for name, state in do_assignments.items():
        net.variable(name).index_of(state)
    desc = descendants(net, do_assignments.keys())
    affected = set(do_assignments) | desc
    existing = {v.name for v in net.variables}

    for v in net.variables:
        if v.name in desc and v.name not in do_assignments and v.name not in net.mechanisms:
            raise MissingMechanismError(f"counterfactual requires a mechanism for {v.name!r}")

    def star(name: str) -> str:
        return name + TWIN_SUFFIX

    variables: list[Variable] = list(net.variables)
    edges: list[tuple[str, str]] = list(net.edges)
    cpts: dict[str, Cpt] = dict(net.cpts)

    # Shared exogenous roots, one per mechanism-bearing affected node.
    for v in net.variables:
        if v.name not in affected or v.name in do_assignments:
            continue
        mech = net.mechanisms[v.name]
        exo = mech.exogenous
        if exo.name in existing:
            raise InvalidModelError(f"exogenous name {exo.name!r} collides with a variable")
        existing.add(exo.name)
        variables.append(Variable(exo.name, exo.states))
        cpts[exo.name] = Cpt(child=exo.name, parents=(), table=(tuple(exo.prior),))
        # Rewrite the factual copy in structural form so both copies draw
        # from the same noise.
        factual_parents = mech.parents + (exo.name,)
        cpts[v.name] = _deterministic_cpt(v, factual_parents, mech)
        edges.append((exo.name, v.name))

    # Counterfactual copies, in declaration order.
    for v in net.variables:
        if v.name not in affected:
            continue
        starred = Variable(star(v.name), v.states)
        variables.append(starred)
        if v.name in do_assignments:
            cpts[starred.name] = point_mass_cpt(starred, do_assignments[v.name])
            continue
        mech = net.mechanisms[v.name]
        exo_name = mech.exogenous.name
        cf_parents = tuple(star(p) if p in affected else p for p in mech.parents) + (exo_name,)
        cpts[starred.name] = _deterministic_cpt(starred, cf_parents, mech)
        for p in cf_parents:
            edges.append((p, starred.name))

    mechanisms = {k: m for k, m in net.mechanisms.items() if k not in affected}
    return CausalNetwork(
        name=f"{net.name}-twin",
        variables=tuple(variables),
        edges=tuple(edges),
        cpts=cpts,
        mechanisms=mechanisms,
    )


def detect_colliders(net: CausalNetwork) -> list[Collider]:
    """Every node with in-degree >= 2, with all unordered parent pairs."""
    out = []
    for v in net.variables:
        parents = net.parents_of(v.name)
        if len(parents) >= 2:
            pairs = tuple(itertools.combinations(parents, 2))
            out.append(Collider(variable=v.name, parent_pairs=pairs))
    return out


# ---------------------------------------------------------------------------
# Model file format (JSON, UTF-8)


def network_to_dict(net: CausalNetwork) -> dict:
    doc: dict = {
        "name": net.name,
        "variables": [{"name": v.name, "states": list(v.states)} for v in net.variables],
        "edges": [[p, c] for p, c in net.edges],
        "cpts": {
            name: {"parents": list(cpt.parents), "table": [list(row) for row in cpt.table]}
            for name, cpt in net.cpts.items()
        },
    }
    if net.mechanisms:
        doc["mechanisms"] = {
            name: {
                "parents": list(m.parents),
                "exogenous": {
                    "name": m.exogenous.name,
                    "states": list(m.exogenous.states),
                    "prior": list(m.exogenous.prior),
                },
                "map": list(m.map),
            }
            for name, m in net.mechanisms.items()
        }
    return doc


def network_from_dict(doc: dict) -> CausalNetwork:
    try:
        variables = tuple(
            Variable(str(v["name"]), tuple(str(s) for s in v["states"])) for v in doc["variables"]
        )
        edges = tuple((str(p), str(c)) for p, c in doc["edges"])
        cpts = {
            str(name): Cpt(
                child=str(name),
                parents=tuple(str(p) for p in entry["parents"]),
                table=tuple(tuple(float(x) for x in row) for row in entry["table"]),
            )
            for name, entry in doc["cpts"].items()
        }
        mechanisms = {}
        for name, entry in doc.get("mechanisms", {}).items():
            exo = entry["exogenous"]
            mechanisms[str(name)] = Mechanism(
                child=str(name),
                parents=tuple(str(p) for p in entry["parents"]),
                exogenous=ExogenousNoise(
                    name=str(exo["name"]),
                    states=tuple(str(s) for s in exo["states"]),
                    prior=tuple(float(x) for x in exo["prior"]),
                ),
                map=tuple(int(m) for m in entry["map"]),
            )
        return CausalNetwork(
            name=str(doc["name"]),
            variables=variables,
            edges=edges,
            cpts=cpts,
            mechanisms=mechanisms,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model document: {exc}") from exc


def load_network(path) -> CausalNetwork:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"model document in {path} is not a JSON object")
    return network_from_dict(doc)


def save_network(net: CausalNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
