"""Variation operator guarantees: admissibility, complexity cap, repair."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srmpc.sr import BinOp, Const, Feature, complexity, crossover, is_admissible, mutate, repair
from srmpc.sr.expr import _raw_binop, collect_constants, expr_str, is_constant
from srmpc.sr.ops import (
    grow_leaf,
    perturb_constant,
    point_mutate_operator,
    prune_subtree,
    random_affine_tree,
    random_tree,
    swap_leaf_feature,
)


class TestPrimitives:
    def test_constant_perturbation_is_local(self):
        rng = np.random.default_rng(0)
        tree = BinOp("add", Const(1.0), BinOp("mul", Const(2.0), Feature(0)))
        out = perturb_constant(tree, rng)
        before = collect_constants(tree)
        after = collect_constants(out)
        changed = [i for i, (a, b) in enumerate(zip(before, after)) if a != b]
        assert len(changed) == 1
        assert expr_str(out).count("x0") == 1

    def test_prune_on_single_node_returns_input(self):
        rng = np.random.default_rng(0)
        leaf = Feature(0)
        assert prune_subtree(leaf, rng, 1.0) is leaf

    def test_swap_feature_changes_index(self):
        rng = np.random.default_rng(1)
        out = swap_leaf_feature(Feature(0), rng, 4)
        assert isinstance(out, Feature) and out.index != 0

    def test_point_mutation_respects_mul_rule(self):
        rng = np.random.default_rng(2)
        tree = BinOp("add", Feature(0), Feature(1))
        for _ in range(50):
            out = point_mutate_operator(tree, rng)
            # mul would couple two features, so only sub is reachable
            assert isinstance(out, BinOp) and out.op in ("add", "sub")

    def test_grow_avoids_constant_side_of_mul(self):
        rng = np.random.default_rng(3)
        tree = BinOp("mul", Const(2.0), Feature(0))
        for _ in range(100):
            out = grow_leaf(tree, rng, 3, 25, 1.0)
            assert is_admissible(out)


class TestMutate:
    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_mutation_preserves_guarantees(self, seed):
        rng = np.random.default_rng(seed)
        tree = random_tree(rng, 5, 3, 1.0)
        for _ in range(100):
            tree = mutate(tree, rng, 5, max_complexity=25, const_scale=1.0)
            assert is_admissible(tree)
            assert complexity(tree) <= 25

    def test_bulk_admissibility_statistic(self):
        # long-run check used as the mutation safety gate
        rng = np.random.default_rng(7)
        ok = 0
        total = 10_000
        tree = random_tree(rng, 4, 3, 1.0)
        for _ in range(total):
            tree = mutate(tree, rng, 4, max_complexity=25, const_scale=1.0)
            ok += is_admissible(tree) and complexity(tree) <= 25
        assert ok == total


class TestCrossover:
    def test_identical_single_node_parents(self):
        rng = np.random.default_rng(0)
        x = Feature(0)
        a, b = crossover(x, x, rng)
        assert a == x and b == x

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_offspring_bounded_and_admissible(self, seed):
        rng = np.random.default_rng(seed)
        a = random_tree(rng, 4, 2, 1.0)
        b = random_tree(rng, 4, 3, 1.0)
        c, d = crossover(a, b, rng, max_complexity=25)
        for child in (c, d):
            assert is_admissible(child)
            assert complexity(child) <= 25


class TestRepair:
    def test_feature_product_repaired_with_constant(self):
        rng = np.random.default_rng(0)
        bad = _raw_binop("mul", Feature(0), Feature(1))
        fixed = repair(bad, rng, max_complexity=25)
        assert is_admissible(fixed)
        assert isinstance(fixed, BinOp) and fixed.op == "mul"
        assert is_constant(fixed.right) and fixed.left == Feature(0)

    def test_oversized_tree_shrunk(self):
        rng = np.random.default_rng(1)
        tree = random_affine_tree(rng, 6, 6, 1.0)
        assert complexity(tree) > 9
        fixed = repair(tree, rng, max_complexity=9)
        assert complexity(fixed) <= 9
        assert is_admissible(fixed)
