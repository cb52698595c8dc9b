"""The four tree/forest theorems as executable operations.

Each theorem comes in two routes: an exact engine that averages over the
full enumeration, and an unbiased Monte Carlo engine that averages draws
from the conductance-weighted tree/forest samplers. Estimators key their
per-draw values on the sampled object, so repeated draws of the same tree
or forest cost a dictionary increment; the reported mean and standard
error are identical to plain per-sample accumulation.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Union

import numpy as np

from .enumeration import (
    DEFAULT_CAP,
    Tree,
    _finish_forest,
    enumerate_separating_forests,
    enumerate_spanning_trees,
    forest_weight_sum,
    tree_weight_sum,
)
from .errors import (
    InconsistentCurrentMatrix,
    QTooSmall,
    SameNode,
    TargetIsRoot,
    UnknownNode,
)
from .network import InjectedCurrents, Network
from .oracle import CurrentMatrix, VoltageVector, current_matrix_from_branches
from .sampler import BranchSampler, ForestSampler, TreeSampler, make_rng


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo estimate with per-component standard errors computed
    from the same sample stream."""
    value: Union[float, np.ndarray]
    std_error: Union[float, np.ndarray]
    samples: int
    seed: int


# -- Monte Carlo plumbing -----------------------------------------------------

def _sample_counts(
    factory: Callable[[np.random.Generator], Callable[[], Hashable]],
    n_samples: int,
    seed: int,
    workers: int,
) -> Counter:
    """Draw n_samples keys, splitting the work over per-worker RNG streams
    with a static schedule."""
    if n_samples < 1:
        raise ValueError("sample count must be >= 1")
    counts: Counter = Counter()
    base, extra = divmod(n_samples, workers)
    for w in range(workers):
        cnt = base + (1 if w < extra else 0)
        if cnt == 0:
            continue
        draw = factory(make_rng(seed, w))
        for _ in range(cnt):
            counts[draw()] += 1
    return counts


def _moments(counts: Counter, value_of: Callable[[Hashable], np.ndarray],
             n: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over the counted draws."""
    total = None
    totsq = None
    for key, c in counts.items():
        v = np.asarray(value_of(key), dtype=float)
        if total is None:
            total = np.zeros_like(v)
            totsq = np.zeros_like(v)
        total += c * v
        totsq += c * v * v
    mean = total / n
    if n > 1 and len(counts) > 1:
        var = np.maximum(totsq - n * mean * mean, 0.0) / (n - 1)
        se = np.sqrt(var / n)
    else:
        se = np.zeros_like(mean)
    return mean, se


# -- VJ: injected currents from fixed voltages --------------------------------

def _check_vj_args(net: Network, Q: Iterable[str], v_Q: dict[str, float],
                   target: str) -> list[str]:
    q_list = sorted(set(Q), key=net.index)
    if len(q_list) < 2:
        raise QTooSmall("VJ needs at least two externally fixed nodes")
    if target not in q_list:
        raise UnknownNode(f"target {target!r} is not in the fixed set")
    for name in q_list:
        if name not in v_Q:
            raise UnknownNode(f"no voltage given for fixed node {name!r}")
    return q_list


def vj_exact(net: Network, Q: Iterable[str], v_Q: dict[str, float],
             target: str, cap: int = DEFAULT_CAP) -> float:
    """Current injected at one fixed node, as a ratio of forest sums: the
    numerator runs over forests separating Q minus the target, weighting
    each by the voltage drop from the target to its block root."""
    q_list = _check_vj_args(net, Q, v_Q, target)
    R = [name for name in q_list if name != target]
    num = 0.0
    for h, w in enumerate_separating_forests(net, R, cap=cap):
        num += (v_Q[target] - v_Q[h.block_of[target]]) * w
    return num / forest_weight_sum(net, q_list, cap=cap)


def _forest_tables(net: Network, roots: list[str]):
    """Memoized per-forest lookup: node index -> (block root name, depth)."""
    cache: dict[tuple[int, ...], tuple[list[str], list[int]]] = {}

    def get(ids: tuple[int, ...]) -> tuple[list[str], list[int]]:
        hit = cache.get(ids)
        if hit is None:
            f = _finish_forest(net, frozenset(ids), roots)
            blocks = [f.block_of[name] for name in net.nodes]
            depths = [len(f.path_to_root[name]) for name in net.nodes]
            hit = (blocks, depths)
            cache[ids] = hit
        return hit

    return get


def vj_estimate(net: Network, Q: Iterable[str], v_Q: dict[str, float],
                target: str, n_samples: int, seed: int = 0,
                workers: int = 1) -> EstimateReport:
    """Unbiased VJ estimator: draw a forest separating Q and a random
    branch, and score the target's component of the three-case current
    vector (zero unless the target roots one of the branch endpoints)."""
    _check_vj_args(net, Q, v_Q, target)
    q_list = sorted(set(Q), key=net.index)
    g_total = net.total_conductance()

    def factory(rng: np.random.Generator) -> Callable[[], Hashable]:
        forests = ForestSampler(net, q_list, rng)
        branches = BranchSampler(net, rng)
        return lambda: (forests.sample_ids(), branches.sample_id())

    counts = _sample_counts(factory, n_samples, seed, workers)

    tables = _forest_tables(net, q_list)

    def value_of(key) -> float:
        ids, bid = key
        blocks, depths = tables(ids)
        b = net.branches[bid]
        sk, sl = blocks[b.u], blocks[b.v]
        if target != sk and target != sl:
            return 0.0
        denom = 1 + depths[b.u] + depths[b.v]
        drop = v_Q[sk] - v_Q[sl]
        signed = drop if target == sk else -drop
        return g_total * signed / denom

    mean, se = _moments(counts, value_of, n_samples)
    return EstimateReport(float(mean), float(se), n_samples, seed)


# -- VV: voltages from fixed voltages ------------------------------------------

def _check_vv_args(net: Network, R: Iterable[str], v_R: dict[str, float],
                   target: str) -> list[str]:
    r_list = sorted(set(R), key=net.index)
    if target in r_list:
        raise TargetIsRoot(f"target {target!r} is a root")
    net.index(target)
    for name in r_list:
        if name not in v_R:
            raise UnknownNode(f"no voltage given for root {name!r}")
    return r_list


def vv_exact(net: Network, R: Iterable[str], v_R: dict[str, float],
             target: str, cap: int = DEFAULT_CAP) -> float:
    """Voltage at an unfixed node: forest-weighted average of the voltage
    of the root its block connects to."""
    r_list = _check_vv_args(net, R, v_R, target)
    num = 0.0
    den = 0.0
    for h, w in enumerate_separating_forests(net, r_list, cap=cap):
        num += v_R[h.block_of[target]] * w
        den += w
    return num / den


def vv_estimate(net: Network, R: Iterable[str], v_R: dict[str, float],
                target: str, n_samples: int, seed: int = 0,
                workers: int = 1) -> EstimateReport:
    """Mean over sampled forests of the root voltage of the target's block."""
    r_list = _check_vv_args(net, R, v_R, target)
    t_idx = net.index(target)

    def factory(rng: np.random.Generator) -> Callable[[], Hashable]:
        forests = ForestSampler(net, r_list, rng)
        return forests.sample_ids

    counts = _sample_counts(factory, n_samples, seed, workers)
    tables = _forest_tables(net, r_list)

    def value_of(ids) -> float:
        blocks, _ = tables(ids)
        return v_R[blocks[t_idx]]

    mean, se = _moments(counts, value_of, n_samples)
    return EstimateReport(float(mean), float(se), n_samples, seed)


# -- JI: branch currents from injected currents --------------------------------

def _tree_adjacency(net: Network, ids: Iterable[int]) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {k: [] for k in range(net.n)}
    for bid in ids:
        b = net.branches[bid]
        adj[b.u].append((bid, b.v))
        adj[b.v].append((bid, b.u))
    return adj


def _tree_flow_per_branch(net: Network, ids: tuple[int, ...],
                          J: np.ndarray) -> dict[int, float]:
    """Unique flow routing J on the tree: the current through a tree branch
    equals the net injection on the side it cuts off, signed toward the
    other side."""
    adj = _tree_adjacency(net, ids)
    # iterative post-order from node 0
    parent: dict[int, tuple[int, int]] = {}
    order: list[int] = []
    seen = {0}
    stack = [0]
    while stack:
        k = stack.pop()
        order.append(k)
        for bid, m in adj[k]:
            if m not in seen:
                seen.add(m)
                parent[m] = (bid, k)
                stack.append(m)
    subtree = J.tolist()
    per_branch = {bid: 0.0 for bid in ids}
    for k in reversed(order):
        if k == 0:
            continue
        bid, p = parent[k]
        b = net.branches[bid]
        flow = subtree[k]  # current from k toward p
        per_branch[bid] = flow if b.u == k else -flow
        subtree[p] += flow
    return per_branch


def tree_current_distribution(net: Network, t: Tree,
                              J: InjectedCurrents) -> CurrentMatrix:
    """Current distribution when every off-tree conductance is set to 0."""
    J.validate(net)
    per_branch = _tree_flow_per_branch(net, tuple(t.branch_ids), J.as_array())
    for b in net.branches:
        per_branch.setdefault(b.branch_id, 0.0)
    return current_matrix_from_branches(net, per_branch)


def ji_exact(net: Network, J: InjectedCurrents,
             cap: int = DEFAULT_CAP) -> CurrentMatrix:
    """Tree-weighted average of the per-tree routed flows."""
    J.validate(net)
    Ja = J.as_array()
    acc = {b.branch_id: 0.0 for b in net.branches}
    total_w = 0.0
    for t, w in enumerate_spanning_trees(net, cap=cap):
        per = _tree_flow_per_branch(net, tuple(t.branch_ids), Ja)
        for bid, amps in per.items():
            acc[bid] += w * amps
        total_w += w
    return current_matrix_from_branches(
        net, {bid: amps / total_w for bid, amps in acc.items()}
    )


def ji_estimate(net: Network, J: InjectedCurrents, n_samples: int,
                seed: int = 0, workers: int = 1) -> EstimateReport:
    """Sampled-tree mean of the routed flow matrix, with per-entry standard
    errors."""
    J.validate(net)
    Ja = J.as_array()

    def factory(rng: np.random.Generator) -> Callable[[], Hashable]:
        return TreeSampler(net, rng).sample_ids

    counts = _sample_counts(factory, n_samples, seed, workers)
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def value_of(ids) -> np.ndarray:
        mat = cache.get(ids)
        if mat is None:
            per = _tree_flow_per_branch(net, ids, Ja)
            mat = current_matrix_from_branches(net, per).matrix
            cache[ids] = mat
        return mat

    mean, se = _moments(counts, value_of, n_samples)
    return EstimateReport(mean, se, n_samples, seed)


# -- IV: voltages from a consistent current matrix -----------------------------

def _pair_conductance(net: Network) -> dict[tuple[int, int], float]:
    agg: dict[tuple[int, int], float] = {}
    for b in net.branches:
        if b.is_self_loop:
            continue
        key = (min(b.u, b.v), max(b.u, b.v))
        agg[key] = agg.get(key, 0.0) + b.g
    return agg


def tree_voltage_vector(net: Network, t: Tree, I: CurrentMatrix,
                        ground: str) -> VoltageVector:
    """Potentials from summing i/g along the unique tree path from the
    ground; for parallel branches g is the aggregated pair conductance."""
    ids = tuple(t.branch_ids)
    return VoltageVector(
        nodes=net.nodes,
        values=tuple(_tree_voltages(net, ids, I.matrix, net.index(ground),
                                    _pair_conductance(net))),
        ground=ground,
    )


def _tree_voltages(net: Network, ids: tuple[int, ...], imat: np.ndarray,
                   ground: int, pair_g: dict[tuple[int, int], float]) -> list[float]:
    adj = _tree_adjacency(net, ids)
    v = [0.0] * net.n
    seen = {ground}
    stack = [ground]
    while stack:
        l = stack.pop()
        for _bid, m in adj[l]:
            if m not in seen:
                seen.add(m)
                g_lm = pair_g[(min(l, m), max(l, m))]
                # stepping l -> m raises the potential by i_{ml}/g_{lm}
                v[m] = v[l] + imat[m, l] / g_lm
                stack.append(m)
    return v


def _check_consistent(I: CurrentMatrix) -> np.ndarray:
    J = I.row_sums()
    scale = max(float(np.max(np.abs(J))), 1.0)
    if abs(float(J.sum())) > 1e-9 * scale:
        raise InconsistentCurrentMatrix(
            f"row sums of the current matrix total {J.sum()!r}, not 0"
        )
    return J


def iv_exact(net: Network, I: CurrentMatrix, ground: str,
             cap: int = DEFAULT_CAP) -> VoltageVector:
    """Tree-weighted average of the path-sum potentials; invariant to which
    consistent current matrix realizes the same injection."""
    _check_consistent(I)
    pair_g = _pair_conductance(net)
    g_idx = net.index(ground)
    acc = np.zeros(net.n)
    total_w = 0.0
    for t, w in enumerate_spanning_trees(net, cap=cap):
        vt = _tree_voltages(net, tuple(t.branch_ids), I.matrix, g_idx, pair_g)
        acc += w * np.asarray(vt)
        total_w += w
    return VoltageVector(nodes=net.nodes, values=tuple(acc / total_w),
                         ground=ground)


def iv_estimate(net: Network, I: CurrentMatrix, ground: str, n_samples: int,
                seed: int = 0, workers: int = 1) -> EstimateReport:
    _check_consistent(I)
    pair_g = _pair_conductance(net)
    g_idx = net.index(ground)

    def factory(rng: np.random.Generator) -> Callable[[], Hashable]:
        return TreeSampler(net, rng).sample_ids

    counts = _sample_counts(factory, n_samples, seed, workers)
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def value_of(ids) -> np.ndarray:
        vt = cache.get(ids)
        if vt is None:
            vt = np.asarray(_tree_voltages(net, ids, I.matrix, g_idx, pair_g))
            cache[ids] = vt
        return vt

    mean, se = _moments(counts, value_of, n_samples)
    return EstimateReport(mean, se, n_samples, seed)


def consistent_current_matrix(net: Network, J: InjectedCurrents) -> CurrentMatrix:
    """A current matrix realizing J by routing it along one (deterministic,
    BFS-built) spanning tree; handy input for the IV engines."""
    J.validate(net)
    seen = {0}
    queue = [0]
    ids: list[int] = []
    while queue:
        k = queue.pop(0)
        for bid, m, _g in net.incident(k):
            if m not in seen:
                seen.add(m)
                ids.append(bid)
                queue.append(m)
    per = _tree_flow_per_branch(net, tuple(ids), J.as_array())
    return current_matrix_from_branches(net, per)


# -- Kirchhoff special case -----------------------------------------------------

def equivalent_conductance(net: Network, a: str, b: str,
                           cap: int = DEFAULT_CAP) -> float:
    """Tree sum over the sum of forests separating the two nodes."""
    if a == b:
        raise SameNode(f"nodes must differ, got {a!r} twice")
    net.index(a)
    net.index(b)
    return tree_weight_sum(net, cap=cap) / forest_weight_sum(net, [a, b], cap=cap)
