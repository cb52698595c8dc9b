"""Network <-> reversible-chain conversion and the walk applications:
hitting times via orchards, absorption probabilities via forests, and
equilibrium flow via arborescences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .enumeration import (
    DEFAULT_CAP,
    Orchard,
    _finish_forest,
    enumerate_separating_forests,
    enumerate_orchards,
    orchard_weight,
    orient_forest,
)
from .errors import (
    BadDistribution,
    EmptyRootSet,
    NotArborescence,
    StartInR,
    UnknownNode,
)
from .network import Branch, InjectedCurrents, Network
from .oracle import expected_visits, solve_mixed
from .sampler import ForestSampler, make_rng
from .theorems import (
    EstimateReport,
    _forest_tables,
    _moments,
    _sample_counts,
    ji_exact,
)


@dataclass(frozen=True)
class Chain:
    """Reversible Markov chain derived from a network.

    Conductances are globally rescaled so the per-node sums g (self-loops
    counted once) total 1; pi then equals g. The source network is kept
    unmodified.
    """
    network: Network
    P: np.ndarray
    pi: np.ndarray
    g: np.ndarray
    scale: float

    @property
    def states(self) -> tuple[str, ...]:
        return self.network.nodes

    @property
    def n(self) -> int:
        return self.network.n

    def scaled_network(self) -> Network:
        """The network with conductances multiplied by the chain's scale,
        so total conductance mass is 1."""
        branches = [
            Branch(b.u, b.v, b.g * self.scale, b.branch_id)
            for b in self.network.branches
        ]
        return Network(self.network.nodes, branches)


@dataclass(frozen=True)
class FlowMatrix:
    """Antisymmetric expected net-transition-count matrix."""
    nodes: tuple[str, ...]
    u: np.ndarray

    def value(self, a: str, b: str) -> float:
        return float(self.u[self.nodes.index(a), self.nodes.index(b)])


def to_markov_chain(net: Network) -> Chain:
    """Scale so the conductance mass is 1 and read off P and pi; a self-loop
    contributes once to its node's row sum and yields a self-transition."""
    g = np.array([net.degree_conductance(k) for k in range(net.n)])
    mass = float(g.sum())
    P = np.zeros((net.n, net.n))
    for b in net.branches:
        if b.is_self_loop:
            P[b.u, b.u] += b.g / g[b.u]
        else:
            P[b.u, b.v] += b.g / g[b.u]
            P[b.v, b.u] += b.g / g[b.v]
    g_scaled = g / mass
    return Chain(network=net, P=P, pi=g_scaled.copy(), g=g_scaled,
                 scale=1.0 / mass)


def _check_walk_args(chain: Chain, start: str, R: Iterable[str]) -> list[str]:
    roots = sorted(set(R), key=chain.network.index)
    if not roots:
        raise EmptyRootSet("root set must be nonempty")
    chain.network.index(start)
    if start in roots:
        raise StartInR(f"start state {start!r} is in the stopping set")
    return roots


def expected_hitting_time(chain: Chain, start: str, R: Iterable[str],
                          cap: int = DEFAULT_CAP) -> float:
    """Expected steps for the walk from start to first reach R, as a ratio
    of orchard-weight sums (transition probabilities only)."""
    roots = _check_walk_args(chain, start, R)
    net = chain.network
    den = 0.0
    for orchard, o in enumerate_orchards(chain, roots, cap=cap):
        den += o

    q_roots = sorted(set(roots) | {start}, key=net.index)
    num = 0.0
    for f, _w in enumerate_separating_forests(net, q_roots, cap=cap):
        block_members = [name for name in net.nodes
                         if f.block_of[name] == start]
        for k in block_members:
            rerooted = _finish_forest(
                net, f.branch_ids, sorted(set(roots) | {k}, key=net.index)
            )
            num += orchard_weight(chain, orient_forest(rerooted))
    return num / den


def hitting_time_via_conductances(chain: Chain, start: str, R: Iterable[str],
                                  cap: int = DEFAULT_CAP) -> float:
    """Same quantity before the division by the product of node
    conductances: forest conductance products weighted by the start-block's
    node conductances."""
    roots = _check_walk_args(chain, start, R)
    net = chain.network
    den = sum(w for _, w in enumerate_separating_forests(net, roots, cap=cap))
    q_roots = sorted(set(roots) | {start}, key=net.index)
    num = 0.0
    for f, w in enumerate_separating_forests(net, q_roots, cap=cap):
        gsum = sum(net.degree_conductance(k) for k in range(net.n)
                   if f.block_of[net.nodes[k]] == start)
        num += w * gsum
    return num / den


def absorption_probability(chain: Chain, start: str, R: Iterable[str],
                           target: str, cap: int = DEFAULT_CAP) -> float:
    """Probability the walk stops at the target: the orchard-weighted
    fraction of separating forests whose start block is rooted there."""
    roots = _check_walk_args(chain, start, R)
    if target not in roots:
        raise UnknownNode(f"target {target!r} is not in the stopping set")
    num = 0.0
    den = 0.0
    for orchard, o in enumerate_orchards(chain, roots, cap=cap):
        den += o
        if orchard.forest.block_of[start] == target:
            num += o
    return num / den


def absorption_estimate(chain: Chain, start: str, R: Iterable[str],
                        target: str, n_samples: int, seed: int = 0,
                        workers: int = 1) -> EstimateReport:
    """Empirical fraction of sampled separating forests whose start block
    is rooted at the target (conductance and orchard weights agree)."""
    roots = _check_walk_args(chain, start, R)
    if target not in roots:
        raise UnknownNode(f"target {target!r} is not in the stopping set")
    net = chain.network
    s_idx = net.index(start)

    def factory(rng: np.random.Generator):
        return ForestSampler(net, roots, rng).sample_ids

    counts = _sample_counts(factory, n_samples, seed, workers)
    tables = _forest_tables(net, roots)

    def value_of(ids) -> float:
        blocks, _ = tables(ids)
        return 1.0 if blocks[s_idx] == target else 0.0

    mean, se = _moments(counts, value_of, n_samples)
    return EstimateReport(float(mean), float(se), n_samples, seed)


def flow_matrix(chain: Chain, a: Orchard, p: Sequence[float]) -> FlowMatrix:
    """Flow through an arborescence: each directed edge carries the total
    probability mass of the states whose root path crosses it."""
    if not a.is_arborescence:
        raise NotArborescence("flow matrices are defined for single-root orchards")
    net = a.forest.network
    p = np.asarray(p, dtype=float)
    if p.shape != (net.n,):
        raise BadDistribution(f"expected {net.n} probabilities")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise BadDistribution(f"probabilities sum to {p.sum()!r}, not 1")

    parent = {k: l for _bid, k, l in a.directed_edges}
    depth = {name: len(a.forest.path_to_root[name]) for name in net.nodes}
    mass = p.astype(float).tolist()
    u = np.zeros((net.n, net.n))
    for name in sorted(net.nodes, key=lambda x: -depth[x]):
        k = net.index(name)
        if k not in parent:
            continue
        l = parent[k]
        u[k, l] += mass[k]
        u[l, k] -= mass[k]
        mass[l] += mass[k]
    return FlowMatrix(nodes=net.nodes, u=u)


def equilibrium_flow(chain: Chain, p0: Sequence[float],
                     cap: int = DEFAULT_CAP) -> FlowMatrix:
    """Limiting net transition counts while the chain relaxes from p0 to
    pi: the orchard-weighted average of arborescence flows."""
    net = chain.network
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (net.n,):
        raise BadDistribution(f"expected {net.n} probabilities")
    if abs(float(p0.sum()) - 1.0) > 1e-9:
        raise BadDistribution(f"initial distribution sums to {p0.sum()!r}")

    acc = np.zeros((net.n, net.n))
    total = 0.0
    for root in net.nodes:
        for orchard, o in enumerate_orchards(chain, [root], cap=cap):
            acc += o * flow_matrix(chain, orchard, p0).u
            total += o
    return FlowMatrix(nodes=net.nodes, u=acc / total)


def equilibrium_flow_electrical(chain: Chain, p0: Sequence[float],
                                cap: int = DEFAULT_CAP) -> FlowMatrix:
    """Cross-check route: the tree-averaged current distribution on the
    scaled network with injection p0 - pi."""
    J = InjectedCurrents(tuple(np.asarray(p0, dtype=float) - chain.pi))
    mat = ji_exact(chain.scaled_network(), J, cap=cap)
    return FlowMatrix(nodes=chain.states, u=mat.matrix)


@dataclass(frozen=True)
class VisitCountReport:
    """Both sides of the visit-count identity e_k = v_k * g_k."""
    nodes: tuple[str, ...]
    visits: tuple[float, ...]
    voltages: tuple[float, ...]
    products: tuple[float, ...]
    max_abs_err: float


def visit_count_identity_check(net: Network, start: str,
                               R: Iterable[str]) -> VisitCountReport:
    """Expected visit counts from the fundamental matrix against voltage
    times node conductance from the mixed electrical problem (roots pinned
    to 0 V, unit current injected at the start)."""
    chain = to_markov_chain(net)
    roots = _check_walk_args(chain, start, R)
    e = expected_visits(chain, start, roots)
    scaled = chain.scaled_network()
    v = solve_mixed(scaled, roots, {start: 1.0})
    va = v.as_array()
    products = va * chain.g
    ev = np.array([e[name] for name in net.nodes])
    return VisitCountReport(
        nodes=net.nodes,
        visits=tuple(ev),
        voltages=tuple(va),
        products=tuple(products),
        max_abs_err=float(np.max(np.abs(ev - products))),
    )
