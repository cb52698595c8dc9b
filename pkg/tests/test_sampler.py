from collections import Counter

import numpy as np
import pytest
from scipy import stats

from forestsolve import (
    BranchSampler,
    ForestSampler,
    SamplerConfig,
    TreeSampler,
    build_network,
    enumerate_separating_forests,
    enumerate_spanning_trees,
    make_rng,
    sample_branch,
    sample_separating_forest,
    sample_spanning_tree,
)
from forestsolve.errors import EmptyRootSet, WalkBudgetExceeded
from conftest import random_connected_network


def chi_square_pvalue(counts: Counter, probs: dict, n: int) -> float:
    observed = [counts.get(k, 0) for k in probs]
    expected = [p * n for p in probs.values()]
    return float(stats.chisquare(observed, expected).pvalue)


class TestTreeSampling:
    def test_g3_distribution(self, g3):
        probs = {
            tuple(sorted(t.branch_ids)): w / 11.0
            for t, w in enumerate_spanning_trees(g3)
        }
        n = 50000
        sampler = TreeSampler(g3, make_rng(42))
        counts = Counter(sampler.sample_ids() for _ in range(n))
        assert chi_square_pvalue(counts, probs, n) > 0.001

    def test_p3_unique_tree(self, p3):
        sampler = TreeSampler(p3, make_rng(0))
        for _ in range(50):
            assert sampler.sample_ids() == (0, 1)

    def test_g2(self, g2):
        t = sample_spanning_tree(g2, SamplerConfig(seed=3))
        assert t.branch_ids == {0}

    def test_deterministic_stream(self, g3):
        a = TreeSampler(g3, make_rng(123))
        b = TreeSampler(g3, make_rng(123))
        assert [a.sample_ids() for _ in range(200)] == \
               [b.sample_ids() for _ in range(200)]

    def test_worker_streams_differ(self, g3):
        a = TreeSampler(g3, make_rng(123, worker=1))
        b = TreeSampler(g3, make_rng(123, worker=2))
        assert [a.sample_ids() for _ in range(50)] != \
               [b.sample_ids() for _ in range(50)]

    def test_walk_budget(self, g3):
        with pytest.raises(WalkBudgetExceeded):
            TreeSampler(g3, make_rng(0), max_walk_steps=0).sample_ids()

    def test_samples_are_spanning_trees(self):
        rng = np.random.default_rng(31)
        net = random_connected_network(rng, 6, self_loop_prob=0.3)
        valid = {frozenset(t.branch_ids) for t, _ in enumerate_spanning_trees(net)}
        sampler = TreeSampler(net, make_rng(7))
        for _ in range(200):
            assert frozenset(sampler.sample_ids()) in valid


class TestForestSampling:
    def test_g3_distribution(self, g3):
        probs = {(1,): 0.4, (2,): 0.6}
        n = 50000
        sampler = ForestSampler(g3, ["1", "2"], make_rng(9))
        counts = Counter(sampler.sample_ids() for _ in range(n))
        assert chi_square_pvalue(counts, probs, n) > 0.001

    def test_all_roots_empty_forest(self, g3):
        f = sample_separating_forest(g3, ["1", "2", "3"], SamplerConfig(seed=1))
        assert f.branch_ids == frozenset()

    def test_single_root_is_tree_sampling(self, g3):
        f = sample_separating_forest(g3, ["1"], SamplerConfig(seed=5))
        assert len(f.branch_ids) == g3.n - 1

    def test_empty_roots(self, g3):
        with pytest.raises(EmptyRootSet):
            ForestSampler(g3, [], make_rng(0))

    def test_block_structure(self):
        rng = np.random.default_rng(33)
        net = random_connected_network(rng, 6)
        roots = [net.nodes[0], net.nodes[2]]
        valid = {frozenset(f.branch_ids): f.block_of
                 for f, _ in enumerate_separating_forests(net, roots)}
        sampler = ForestSampler(net, roots, make_rng(11))
        for _ in range(100):
            f = sampler.sample()
            assert f.block_of == valid[f.branch_ids]


class TestBranchSampling:
    def test_g3_frequencies(self, g3):
        n = 60000
        sampler = BranchSampler(g3, make_rng(13))
        counts = Counter(sampler.sample_id() for _ in range(n))
        probs = {0: 1 / 6, 1: 2 / 6, 2: 3 / 6}
        assert chi_square_pvalue(counts, probs, n) > 0.001

    def test_g2_certain(self, g2):
        assert sample_branch(g2, make_rng(1)) == 0

    def test_self_loop_samplable(self, g3):
        net = build_network(
            ["1", "2", "3"],
            [("1", "2", 1.0), ("2", "3", 2.0), ("1", "3", 3.0), ("1", "1", 6.0)],
        )
        n = 60000
        sampler = BranchSampler(net, make_rng(17))
        counts = Counter(sampler.sample_id() for _ in range(n))
        assert counts[3] / n == pytest.approx(0.5, abs=0.02)
