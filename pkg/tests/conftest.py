import itertools

import numpy as np
import pytest

from forestsolve import Network, build_network


@pytest.fixture
def g2() -> Network:
    return build_network(["1", "2"], [("1", "2", 2.0)])


@pytest.fixture
def g3() -> Network:
    return build_network(
        ["1", "2", "3"],
        [("1", "2", 1.0), ("2", "3", 2.0), ("1", "3", 3.0)],
    )


@pytest.fixture
def p3() -> Network:
    return build_network(["1", "2", "3"], [("1", "2", 1.0), ("2", "3", 1.0)])


# -- independent brute-force oracles -----------------------------------------

def brute_force_trees(net: Network) -> dict[frozenset, float]:
    """Subset scan over all (n-1)-subsets of non-self-loop branches."""
    candidates = [b for b in net.branches if not b.is_self_loop]
    out: dict[frozenset, float] = {}
    for combo in itertools.combinations(candidates, net.n - 1):
        parent = list(range(net.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for b in combo:
            ru, rv = find(b.u), find(b.v)
            if ru == rv:
                ok = False
                break
            parent[rv] = ru
        if ok:
            w = 1.0
            for b in combo:
                w *= b.g
            out[frozenset(b.branch_id for b in combo)] = w
    return out


def brute_force_forests(net: Network, roots: list[str]) -> dict[frozenset, float]:
    """Subset scan for acyclic (n-|R|)-subsets where each component holds
    exactly one root."""
    root_idx = set(net.indices(roots))
    candidates = [b for b in net.branches if not b.is_self_loop]
    out: dict[frozenset, float] = {}
    for combo in itertools.combinations(candidates, net.n - len(root_idx)):
        parent = list(range(net.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for b in combo:
            ru, rv = find(b.u), find(b.v)
            if ru == rv:
                ok = False
                break
            parent[rv] = ru
        if not ok:
            continue
        comp_roots: dict[int, int] = {}
        for r in root_idx:
            comp_roots[find(r)] = comp_roots.get(find(r), 0) + 1
        if len(comp_roots) != len(root_idx):
            continue  # two roots in one component
        # every component must contain a root
        comps = {find(k) for k in range(net.n)}
        if comps != set(comp_roots):
            continue
        w = 1.0
        for b in combo:
            w *= b.g
        out[frozenset(b.branch_id for b in combo)] = w
    return out


def random_connected_network(rng: np.random.Generator, n: int,
                             extra_edge_prob: float = 0.3,
                             self_loop_prob: float = 0.0) -> Network:
    """Random spanning tree plus Bernoulli extra edges, conductances
    uniform in (0.1, 10)."""
    nodes = [f"n{k}" for k in range(n)]
    branches: list[tuple[str, str, float]] = []
    for k in range(1, n):
        j = int(rng.integers(0, k))
        branches.append((nodes[j], nodes[k], float(rng.uniform(0.1, 10.0))))
    for j in range(n):
        for k in range(j + 1, n):
            if rng.random() < extra_edge_prob:
                branches.append((nodes[j], nodes[k], float(rng.uniform(0.1, 10.0))))
        if self_loop_prob and rng.random() < self_loop_prob:
            branches.append((nodes[j], nodes[j], float(rng.uniform(0.1, 10.0))))
    return build_network(nodes, branches)
