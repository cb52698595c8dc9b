"""Random spanning-tree and separating-forest sampling.

Trees are drawn with probability proportional to their conductance product
by a loop-erased random walk (Wilson-style) whose steps pick an incident
branch with probability proportional to its conductance, so parallel
branches and self-loops are native. Forests in F_R come from sampling a
spanning tree of the contraction and mapping branch ids back.

The hot loops consume uniforms from a buffered PCG64 stream; a single seed
fully determines the sample sequence, and per-worker streams derive from
(seed, worker index).
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .enumeration import Forest, Tree, _finish_forest
from .errors import EmptyRootSet, WalkBudgetExceeded
from .network import ContractionMap, Network, contract

_BLOCK = 16384


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    max_walk_steps: int = 10**8
    worker: int = 0


def make_rng(seed: int, worker: int = 0) -> np.random.Generator:
    """Worker 0 is the plain seed stream; workers > 0 get derived streams."""
    if worker == 0:
        return np.random.default_rng(seed)
    return np.random.default_rng([seed, worker])


class _UniformStream:
    """Buffered uniforms; much cheaper than per-call Generator draws."""

    __slots__ = ("_rng", "_buf", "_i")

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._buf: list[float] = []
        self._i = 0

    def next(self) -> float:
        i = self._i
        buf = self._buf
        if i >= len(buf):
            self._buf = buf = self._rng.random(_BLOCK).tolist()
            self._i = i = 0
        self._i = i + 1
        return buf[i]


class TreeSampler:
    """Repeated spanning-tree draws from one network with one RNG stream."""

    def __init__(self, net: Network, rng: np.random.Generator,
                 max_walk_steps: int = 10**8):
        self.net = net
        self.max_walk_steps = max_walk_steps
        self._stream = _UniformStream(rng)
        # per node: cumulative weights, step targets, branch ids
        self._cum: list[list[float]] = []
        self._targets: list[list[int]] = []
        self._bids: list[list[int]] = []
        for k in range(net.n):
            cum: list[float] = []
            targets: list[int] = []
            bids: list[int] = []
            acc = 0.0
            for bid, other, g in net.incident(k):
                acc += g
                cum.append(acc)
                targets.append(other)
                bids.append(bid)
            self._cum.append(cum)
            self._targets.append(targets)
            self._bids.append(bids)

    def sample_ids(self) -> tuple[int, ...]:
        """One spanning tree as a sorted tuple of branch ids."""
        net = self.net
        n = net.n
        if n == 1:
            return ()
        stream = self._stream
        cum = self._cum
        targets = self._targets
        bids = self._bids
        in_tree = [False] * n
        in_tree[0] = True  # walk root: first node in canonical order
        next_bid = [0] * n
        next_node = [0] * n
        tree: list[int] = []
        steps = 0
        budget = self.max_walk_steps
        for start in range(1, n):
            u = start
            while not in_tree[u]:
                c = cum[u]
                j = bisect_right(c, stream.next() * c[-1])
                if j == len(c):  # guard against fp round-up at the edge
                    j -= 1
                next_bid[u] = bids[u][j]
                next_node[u] = targets[u][j]
                u = next_node[u]
                steps += 1
                if steps > budget:
                    raise WalkBudgetExceeded(
                        f"random walk exceeded {budget} steps"
                    )
            u = start
            while not in_tree[u]:
                in_tree[u] = True
                tree.append(next_bid[u])
                u = next_node[u]
        tree.sort()
        return tuple(tree)

    def sample(self) -> Tree:
        return Tree(frozenset(self.sample_ids()), self.net)


class ForestSampler:
    """Separating-forest draws: tree draws on the contraction, branch ids
    mapped back to the parent."""

    def __init__(self, net: Network, roots: Iterable[str],
                 rng: np.random.Generator, max_walk_steps: int = 10**8):
        root_list = sorted(set(roots), key=net.index)
        if not root_list:
            raise EmptyRootSet("root set must be nonempty")
        self.net = net
        self.roots = root_list
        self.cmap: ContractionMap = contract(net, root_list)
        self._inverse = {cid: pid for pid, cid in self.cmap.branch_map.items()}
        self._tree_sampler = TreeSampler(self.cmap.child, rng, max_walk_steps)

    def sample_ids(self) -> tuple[int, ...]:
        """One forest as a sorted tuple of parent branch ids."""
        child_ids = self._tree_sampler.sample_ids()
        return tuple(sorted(self._inverse[cid] for cid in child_ids))

    def sample(self) -> Forest:
        ids = frozenset(self.sample_ids())
        return _finish_forest(self.net, ids, self.roots)


class BranchSampler:
    """Branch draws with probability proportional to conductance,
    self-loops included."""

    def __init__(self, net: Network, rng: np.random.Generator):
        self.net = net
        self._stream = _UniformStream(rng)
        cum: list[float] = []
        acc = 0.0
        for b in net.branches:
            acc += b.g
            cum.append(acc)
        self._cum = cum

    def sample_id(self) -> int:
        c = self._cum
        j = bisect_right(c, self._stream.next() * c[-1])
        return min(j, len(c) - 1)


def sample_spanning_tree(net: Network, cfg: Optional[SamplerConfig] = None,
                         rng: Optional[np.random.Generator] = None) -> Tree:
    cfg = cfg or SamplerConfig()
    rng = rng or make_rng(cfg.seed, cfg.worker)
    return TreeSampler(net, rng, cfg.max_walk_steps).sample()


def sample_separating_forest(net: Network, roots: Iterable[str],
                             cfg: Optional[SamplerConfig] = None,
                             rng: Optional[np.random.Generator] = None) -> Forest:
    cfg = cfg or SamplerConfig()
    rng = rng or make_rng(cfg.seed, cfg.worker)
    return ForestSampler(net, roots, rng, cfg.max_walk_steps).sample()


def sample_branch(net: Network, rng: np.random.Generator) -> int:
    return BranchSampler(net, rng).sample_id()
