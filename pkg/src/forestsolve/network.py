"""Weighted multigraph model: networks, boundary conditions, contraction.

Node identifiers are strings externally; internally every node has a dense
integer index given by declaration order, and that order is the canonical
order for all vectors and matrices produced elsewhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    Disconnected,
    DuplicateNode,
    EmptyFuseSet,
    InvalidInjection,
    NonPositiveConductance,
    UnknownEndpoint,
    UnknownNode,
)


@dataclass(frozen=True)
class Branch:
    """One conductance between two node indices. Parallel branches and
    self-loops (u == v) are distinct objects keyed by branch_id."""
    u: int
    v: int
    g: float
    branch_id: int

    @property
    def is_self_loop(self) -> bool:
        return self.u == self.v


class Network:
    """Immutable validated conductive network.

    Construct through :func:`build_network`; the constructor assumes its
    arguments have already been validated.
    """

    def __init__(self, nodes: Sequence[str], branches: Sequence[Branch]):
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.branches: tuple[Branch, ...] = tuple(branches)
        self._index: dict[str, int] = {name: i for i, name in enumerate(self.nodes)}
        # incident[k] lists (branch_id, other_endpoint, g); self-loops once
        incident: list[list[tuple[int, int, float]]] = [[] for _ in self.nodes]
        for b in self.branches:
            incident[b.u].append((b.branch_id, b.v, b.g))
            if not b.is_self_loop:
                incident[b.v].append((b.branch_id, b.u, b.g))
        self._incident = [tuple(lst) for lst in incident]

    # -- basic accessors ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    def index(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNode(f"unknown node {node!r}") from None

    def indices(self, nodes: Iterable[str]) -> list[int]:
        return [self.index(x) for x in nodes]

    def incident(self, k: int) -> tuple[tuple[int, int, float], ...]:
        """Branches incident to node index k as (branch_id, other, g);
        a self-loop appears once with other == k."""
        return self._incident[k]

    def degree_conductance(self, k: int) -> float:
        """Row sum g_k; a self-loop contributes its conductance once."""
        return sum(g for _, _, g in self._incident[k])

    def total_conductance(self) -> float:
        """Sum of all branch conductances, self-loops included."""
        return sum(b.g for b in self.branches)

    def laplacian(self) -> np.ndarray:
        """Weighted Laplacian over non-self-loop branches (self-loops are
        electrically inert)."""
        L = np.zeros((self.n, self.n))
        for b in self.branches:
            if b.is_self_loop:
                continue
            L[b.u, b.u] += b.g
            L[b.v, b.v] += b.g
            L[b.u, b.v] -= b.g
            L[b.v, b.u] -= b.g
        return L

    def to_json_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "branches": [
                {"u": self.nodes[b.u], "v": self.nodes[b.v], "g": b.g}
                for b in self.branches
            ],
        }

    def __repr__(self) -> str:
        return f"Network(n={self.n}, branches={self.branch_count})"


@dataclass(frozen=True)
class FixedVoltages:
    """Dirichlet boundary data: node name -> volts."""
    assignments: dict[str, float]

    def validate(self, net: Network) -> None:
        if not self.assignments:
            raise InvalidInjection("at least one fixed voltage is required")
        for name in self.assignments:
            net.index(name)


@dataclass(frozen=True)
class InjectedCurrents:
    """Neumann boundary data: one current per node, canonical order.
    Components must sum to zero."""
    values: tuple[float, ...]

    @classmethod
    def from_map(cls, net: Network, entries: Mapping[str, float]) -> "InjectedCurrents":
        J = [0.0] * net.n
        for name, amps in entries.items():
            J[net.index(name)] = float(amps)
        return cls(tuple(J))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def validate(self, net: Network) -> None:
        if len(self.values) != net.n:
            raise InvalidInjection(
                f"expected {net.n} current components, got {len(self.values)}"
            )
        J = self.as_array()
        scale = max(np.max(np.abs(J)), 1.0)
        if abs(float(J.sum())) > 1e-12 * scale:
            raise InvalidInjection(f"injected currents sum to {J.sum()!r}, not 0")


@dataclass(frozen=True)
class ContractionMap:
    """Result of fusing a node set into a single supernode.

    Every parent branch lands in exactly one of branch_map (surviving, with
    conductance unchanged) or dropped (internal to the fused set).
    """
    parent: Network
    child: Network
    node_map: dict[str, str]
    branch_map: dict[int, int]
    dropped: frozenset[int] = field(default_factory=frozenset)

    @property
    def supernode(self) -> str:
        return self.child.nodes[0]


def build_network(nodes: Sequence[str], branches: Sequence[tuple[str, str, float]]) -> Network:
    """Validate and build a Network from node names and (u, v, g) triples.

    Branch order defines branch_id order. The graph restricted to
    non-self-loop branches must be connected.
    """
    seen: set[str] = set()
    for name in nodes:
        if name in seen:
            raise DuplicateNode(f"duplicate node {name!r}")
        seen.add(name)
    index = {name: i for i, name in enumerate(nodes)}

    built: list[Branch] = []
    for bid, (u, v, g) in enumerate(branches):
        if u not in index:
            raise UnknownEndpoint(f"branch {bid}: unknown endpoint {u!r}")
        if v not in index:
            raise UnknownEndpoint(f"branch {bid}: unknown endpoint {v!r}")
        g = float(g)
        if not g > 0:
            raise NonPositiveConductance(f"branch {bid}: conductance {g} is not > 0")
        built.append(Branch(index[u], index[v], g, bid))

    _check_connected(len(nodes), built)
    return Network(nodes, built)


def _check_connected(n: int, branches: Sequence[Branch]) -> None:
    if n == 0:
        raise Disconnected("network has no nodes")
    adj: list[list[int]] = [[] for _ in range(n)]
    for b in branches:
        if not b.is_self_loop:
            adj[b.u].append(b.v)
            adj[b.v].append(b.u)
    seen = {0}
    stack = [0]
    while stack:
        k = stack.pop()
        for m in adj[k]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    if len(seen) != n:
        raise Disconnected(
            f"network is disconnected over non-self-loop branches "
            f"({len(seen)} of {n} nodes reachable)"
        )


def network_from_json(text: str) -> Network:
    """Parse the interchange schema:
    {"nodes": ["a", ...], "branches": [{"u": "a", "v": "b", "g": 1.0}, ...]}.
    """
    doc = json.loads(text)
    return build_network(
        doc["nodes"], [(b["u"], b["v"], float(b["g"])) for b in doc["branches"]]
    )


def load_network(path: str) -> Network:
    with open(path) as fh:
        return network_from_json(fh.read())


def total_conductance_at(net: Network, node: str) -> float:
    """Sum of conductances of branches incident to the node, a self-loop
    counted once with full weight."""
    return net.degree_conductance(net.index(node))


def contract(net: Network, fuse_set: Iterable[str]) -> ContractionMap:
    """Fuse a node set into one supernode.

    Branches internal to the fused set are dropped; branches with one
    endpoint inside are re-terminated at the supernode; parallel branches
    stay distinct. Self-loops outside the set survive as self-loops.
    """
    fuse = set(fuse_set)
    if not fuse:
        raise EmptyFuseSet("contract requires a nonempty fuse set")
    fuse_idx = {net.index(name) for name in fuse}

    super_name = "(" + "+".join(sorted(fuse)) + ")"
    survivors = [name for name in net.nodes if name not in fuse]
    while super_name in survivors:
        super_name += "'"
    child_nodes = [super_name] + survivors

    node_map: dict[str, str] = {}
    for name in net.nodes:
        node_map[name] = super_name if name in fuse else name
    child_index = {name: i for i, name in enumerate(child_nodes)}

    child_branches: list[Branch] = []
    branch_map: dict[int, int] = {}
    dropped: set[int] = set()
    for b in net.branches:
        u_in, v_in = b.u in fuse_idx, b.v in fuse_idx
        if u_in and v_in:
            dropped.add(b.branch_id)
            continue
        cu = 0 if u_in else child_index[net.nodes[b.u]]
        cv = 0 if v_in else child_index[net.nodes[b.v]]
        cid = len(child_branches)
        child_branches.append(Branch(cu, cv, b.g, cid))
        branch_map[b.branch_id] = cid

    child = Network(child_nodes, child_branches)
    return ContractionMap(
        parent=net,
        child=child,
        node_map=node_map,
        branch_map=branch_map,
        dropped=frozenset(dropped),
    )
