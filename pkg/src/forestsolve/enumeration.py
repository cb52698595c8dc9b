"""Exhaustive enumeration of spanning trees, separating forests and orchards.

These are the exact combinatorial engines: desk-scale by design, guarded by
a configurable cap on the number of enumerated objects. All results come
back in a deterministic order (sorted by the sorted tuple of branch ids).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import EmptyRootSet, TooLarge
from .network import Branch, Network

if TYPE_CHECKING:  # pragma: no cover - import cycle guard
    from .markov import Chain

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Tree:
    """A spanning tree: n-1 branch ids forming a connected acyclic spanning
    subgraph; never contains self-loops."""
    branch_ids: frozenset[int]
    network: Network

    def weight(self) -> float:
        return math.prod(self.network.branches[b].g for b in self.branch_ids)


@dataclass(frozen=True)
class Forest:
    """A maximal forest separating the root set: every node reaches exactly
    one root by a unique path inside the forest."""
    branch_ids: frozenset[int]
    root_set: frozenset[str]
    network: Network
    block_of: dict[str, str]
    path_to_root: dict[str, tuple[int, ...]]

    def weight(self) -> float:
        return math.prod(self.network.branches[b].g for b in self.branch_ids)

    def depth(self, node: str) -> int:
        """Number of branches on the unique path from node to its root."""
        return len(self.path_to_root[node])


@dataclass(frozen=True)
class Orchard:
    """A forest with every component's branches directed toward its root.

    directed_edges holds (branch_id, from_node_index, to_node_index); the
    weight is the product of per-branch transition probabilities along
    those directed edges.
    """
    forest: Forest
    root_set: frozenset[str]
    directed_edges: tuple[tuple[int, int, int], ...]

    @property
    def is_arborescence(self) -> bool:
        return len(self.root_set) == 1


def _subtract_selfloops(branches: Iterable[Branch]) -> list[Branch]:
    return [b for b in branches if not b.is_self_loop]


def _connected(labels: list[int], edges: list[tuple[int, int, int]]) -> bool:
    verts = set(labels)
    if not verts:
        return True
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        k = stack.pop()
        for m in adj[k]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return len(seen) == len(verts)


def _enumerate_tree_branch_sets(net: Network, cap: int) -> list[frozenset[int]]:
    """Recursive deletion/contraction over branch ids.

    Edges carry component labels so contraction is a relabeling; self-loops
    created along the way are discarded (they can never enter a tree).
    """
    out: list[frozenset[int]] = []
    edges0 = [(b.u, b.v, b.branch_id) for b in _subtract_selfloops(net.branches)]
    labels0 = list(range(net.n))

    def rec(labels: list[int], edges: list[tuple[int, int, int]], chosen: list[int]) -> None:
        if len(labels) == 1:
            if len(out) >= cap:
                raise TooLarge(f"more than {cap} spanning trees")
            out.append(frozenset(chosen))
            return
        u, v, bid = edges[0]
        # include: contract v into u, drop edges that become self-loops
        contracted = []
        for a, b, eid in edges[1:]:
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                contracted.append((a2, b2, eid))
        chosen.append(bid)
        rec([x for x in labels if x != v], contracted, chosen)
        chosen.pop()
        # exclude: only if what remains still spans
        rest = edges[1:]
        if _connected(labels, rest):
            rec(labels, rest, chosen)

    if net.n == 1:
        out.append(frozenset())
    else:
        if not _connected(labels0, edges0):
            return []
        rec(labels0, edges0, [])
    return out


def _finish_forest(net: Network, branch_ids: frozenset[int], roots: list[str]) -> Forest:
    """Populate block_of and path_to_root by BFS from the roots inside the
    forest's branches."""
    adj: dict[int, list[tuple[int, int]]] = {k: [] for k in range(net.n)}
    for bid in branch_ids:
        b = net.branches[bid]
        adj[b.u].append((bid, b.v))
        adj[b.v].append((bid, b.u))

    block_of: dict[str, str] = {}
    parent_edge: dict[int, tuple[int, int]] = {}  # node -> (branch_id, next node)
    for root in roots:
        r = net.index(root)
        block_of[root] = root
        frontier = [r]
        seen = {r}
        while frontier:
            k = frontier.pop()
            for bid, m in adj[k]:
                if m not in seen:
                    seen.add(m)
                    parent_edge[m] = (bid, k)
                    block_of[net.nodes[m]] = root
                    frontier.append(m)

    path_to_root: dict[str, tuple[int, ...]] = {}
    for k, name in enumerate(net.nodes):
        path: list[int] = []
        cur = k
        while cur in parent_edge:
            bid, nxt = parent_edge[cur]
            path.append(bid)
            cur = nxt
        path_to_root[name] = tuple(path)

    return Forest(
        branch_ids=branch_ids,
        root_set=frozenset(roots),
        network=net,
        block_of=block_of,
        path_to_root=path_to_root,
    )


def enumerate_spanning_trees(net: Network, cap: int = DEFAULT_CAP) -> list[tuple[Tree, float]]:
    """All spanning trees with their conductance-product weights."""
    sets = _enumerate_tree_branch_sets(net, cap)
    sets.sort(key=lambda s: tuple(sorted(s)))
    return [(Tree(s, net), math.prod(net.branches[b].g for b in s)) for s in sets]


def enumerate_separating_forests(
    net: Network, roots: Iterable[str], cap: int = DEFAULT_CAP
) -> list[tuple[Forest, float]]:
    """All maximal forests in which each component holds exactly one root.

    Implemented as a direct include/exclude recursion over the parent's
    branches (independent of the contraction bijection, which tests verify
    separately).
    """
    root_list = sorted(set(roots), key=net.index)
    if not root_list:
        raise EmptyRootSet("root set must be nonempty")
    root_idx = set(net.indices(root_list))

    candidates = _subtract_selfloops(net.branches)
    need = net.n - len(root_idx)
    results: list[frozenset[int]] = []

    # union-find over node indices; has_root tracked per component root
    def find(parent: list[int], x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def rec(i: int, taken: list[int], parent: list[int], has_root: list[bool]) -> None:
        if len(taken) == need:
            if len(results) >= cap:
                raise TooLarge(f"more than {cap} separating forests")
            results.append(frozenset(taken))
            return
        if i == len(candidates) or len(taken) + (len(candidates) - i) < need:
            return
        b = candidates[i]
        ru, rv = find(parent, b.u), find(parent, b.v)
        if ru != rv and not (has_root[ru] and has_root[rv]):
            p2 = parent.copy()
            h2 = has_root.copy()
            p2[rv] = ru
            h2[ru] = h2[ru] or h2[rv]
            taken.append(b.branch_id)
            rec(i + 1, taken, p2, h2)
            taken.pop()
        rec(i + 1, taken, parent, has_root)

    parent0 = list(range(net.n))
    has_root0 = [k in root_idx for k in range(net.n)]
    rec(0, [], parent0, has_root0)

    # a size-(n-|R|) acyclic set not joining two roots might still strand a
    # rootless component; filter those out by checking coverage
    out: list[tuple[Forest, float]] = []
    for s in sorted(results, key=lambda s: tuple(sorted(s))):
        forest = _finish_forest(net, s, root_list)
        if len(forest.block_of) == net.n:
            out.append((forest, math.prod(net.branches[b].g for b in s)))
    return out


def enumerate_orchards(
    chain: "Chain", roots: Iterable[str], cap: int = DEFAULT_CAP
) -> list[tuple[Orchard, float]]:
    """One orchard per separating forest, directed toward the roots; the
    weight is the product of per-branch transition probabilities."""
    net = chain.network
    out: list[tuple[Orchard, float]] = []
    for forest, _w in enumerate_separating_forests(net, roots, cap=cap):
        orchard = orient_forest(forest)
        out.append((orchard, orchard_weight(chain, orchard)))
    return out


def orient_forest(forest: Forest) -> Orchard:
    """Direct every forest branch toward the root of its block."""
    net = forest.network
    directed: list[tuple[int, int, int]] = []
    for name in net.nodes:
        path = forest.path_to_root[name]
        if not path:
            continue
        bid = path[0]
        b = net.branches[bid]
        k = net.index(name)
        other = b.v if b.u == k else b.u
        directed.append((bid, k, other))
    directed.sort()
    return Orchard(
        forest=forest, root_set=forest.root_set, directed_edges=tuple(directed)
    )


def orchard_weight(chain: "Chain", orchard: Orchard) -> float:
    """Product over directed edges k->l of the per-branch step probability
    g_branch / g_k (scale-free)."""
    net = orchard.forest.network
    w = 1.0
    for bid, k, _l in orchard.directed_edges:
        w *= net.branches[bid].g / net.degree_conductance(k)
    return w


def tree_weight_sum(net: Network, cap: int = DEFAULT_CAP) -> float:
    return sum(w for _, w in enumerate_spanning_trees(net, cap=cap))


def forest_weight_sum(net: Network, roots: Iterable[str], cap: int = DEFAULT_CAP) -> float:
    return sum(w for _, w in enumerate_separating_forests(net, roots, cap=cap))
