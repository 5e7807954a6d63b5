"""Tree generation and variation operators.

Every operator preserves the two structural guarantees the scheduler relies
on: affine admissibility and the complexity cap. Offspring that would break
either are repaired by swapping the offending subtree for a constant leaf.
Inapplicable operators return their input unchanged (same object), so
callers can detect no-ops with ``is``.
"""

from __future__ import annotations

import numpy as np

from .expr import (
    OPS,
    BinOp,
    Const,
    Expr,
    Feature,
    Path,
    _raw_binop,
    complexity,
    get_subtree,
    is_admissible,
    is_constant,
    replace_subtree,
    subtree_paths,
    validate,
)


def random_leaf(rng: np.random.Generator, n_features: int, const_scale: float,
                feature_prob: float = 0.6) -> Expr:
    if rng.random() < feature_prob:
        return Feature(int(rng.integers(n_features)))
    return Const(float(rng.normal(0.0, const_scale)))


def random_tree(rng: np.random.Generator, n_features: int, depth: int, const_scale: float) -> Expr:
    """Grow-style random admissible tree of at most the given depth."""
    if depth <= 0 or rng.random() < 0.3:
        return random_leaf(rng, n_features, const_scale)
    op = OPS[int(rng.integers(len(OPS)))]
    if op == "mul":
        scale = Const(float(rng.normal(0.0, const_scale)))
        body = random_tree(rng, n_features, depth - 1, const_scale)
        return BinOp("mul", scale, body) if rng.random() < 0.5 else BinOp("mul", body, scale)
    return BinOp(op, random_tree(rng, n_features, depth - 1, const_scale),
                 random_tree(rng, n_features, depth - 1, const_scale))


def random_affine_tree(rng: np.random.Generator, n_features: int, n_terms: int,
                       const_scale: float) -> Expr:
    """Random ``c0 + sum(c_k * x_jk)`` seed individual."""
    out: Expr = Const(float(rng.normal(0.0, const_scale)))
    picks = rng.choice(n_features, size=min(n_terms, n_features), replace=False)
    for j in picks:
        term = BinOp("mul", Const(float(rng.normal(0.0, const_scale))), Feature(int(j)))
        out = BinOp("add", out, term)
    return out


def _protected_paths(expr: Expr) -> set[Path]:
    """Paths inside the constant-only side of any mul node.

    Growing a feature there would break admissibility, so mutation avoids
    those sites instead of repairing after the fact.
    """
    out: set[Path] = set()

    def mark(node: Expr, path: Path):
        out.add(path)
        if isinstance(node, BinOp):
            mark(node.left, path + (0,))
            mark(node.right, path + (1,))

    def walk(node: Expr, path: Path):
        if not isinstance(node, BinOp):
            return
        if node.op == "mul":
            if is_constant(node.right):
                mark(node.right, path + (1,))
                walk(node.left, path + (0,))
                return
            mark(node.left, path + (0,))
            walk(node.right, path + (1,))
            return
        walk(node.left, path + (0,))
        walk(node.right, path + (1,))

    walk(expr, ())
    return out


def point_mutate_operator(expr: Expr, rng: np.random.Generator) -> Expr:
    """Swap the operator at one internal node, keeping admissibility."""
    candidates: list[tuple[Path, str]] = []
    for path in subtree_paths(expr):
        node = get_subtree(expr, path)
        if not isinstance(node, BinOp):
            continue
        for op in OPS:
            if op == node.op:
                continue
            if op == "mul" and not (is_constant(node.left) or is_constant(node.right)):
                continue
            candidates.append((path, op))
    if not candidates:
        return expr
    path, op = candidates[int(rng.integers(len(candidates)))]
    node = get_subtree(expr, path)
    return validate(replace_subtree(expr, path, _raw_binop(op, node.left, node.right)))


def perturb_constant(expr: Expr, rng: np.random.Generator) -> Expr:
    sites = [p for p in subtree_paths(expr) if isinstance(get_subtree(expr, p), Const)]
    if not sites:
        return expr
    path = sites[int(rng.integers(len(sites)))]
    node = get_subtree(expr, path)
    value = node.value + rng.normal(0.0, 0.1 * (1.0 + abs(node.value)))
    return validate(replace_subtree(expr, path, Const(float(value))))


def swap_leaf_feature(expr: Expr, rng: np.random.Generator, n_features: int) -> Expr:
    sites = [p for p in subtree_paths(expr) if isinstance(get_subtree(expr, p), Feature)]
    if not sites or n_features < 2:
        return expr
    path = sites[int(rng.integers(len(sites)))]
    old = get_subtree(expr, path).index
    new = int(rng.integers(n_features - 1))
    if new >= old:
        new += 1
    return validate(replace_subtree(expr, path, Feature(new)))


def grow_leaf(expr: Expr, rng: np.random.Generator, n_features: int,
              max_complexity: int, const_scale: float) -> Expr:
    protected = _protected_paths(expr)
    sites = [
        p for p in subtree_paths(expr)
        if p not in protected and not isinstance(get_subtree(expr, p), BinOp)
    ]
    if not sites:
        return expr
    path = sites[int(rng.integers(len(sites)))]
    sub = random_tree(rng, n_features, 2, const_scale)
    grown = replace_subtree(expr, path, sub)
    if complexity(grown) > max_complexity:
        return expr
    return validate(grown)


def prune_subtree(expr: Expr, rng: np.random.Generator, const_scale: float) -> Expr:
    sites = [p for p in subtree_paths(expr) if isinstance(get_subtree(expr, p), BinOp)]
    if not sites:
        return expr
    path = sites[int(rng.integers(len(sites)))]
    return validate(replace_subtree(expr, path, Const(float(rng.normal(0.0, const_scale)))))


def mutate(expr: Expr, rng: np.random.Generator, n_features: int,
           max_complexity: int = 25, const_scale: float = 1.0) -> Expr:
    """Apply one randomly chosen mutation kind; falls back through the
    remaining kinds and finally returns the input if none applies."""
    kinds = [
        lambda e: perturb_constant(e, rng),
        lambda e: point_mutate_operator(e, rng),
        lambda e: swap_leaf_feature(e, rng, n_features),
        lambda e: grow_leaf(e, rng, n_features, max_complexity, const_scale),
        lambda e: prune_subtree(e, rng, const_scale),
    ]
    order = rng.permutation(len(kinds))
    for idx in order:
        out = kinds[int(idx)](expr)
        if out is not expr:
            return out
    return expr


def repair(expr: Expr, rng: np.random.Generator, max_complexity: int,
           const_scale: float = 1.0) -> Expr:
    """Restore admissibility and the complexity cap.

    Each mul coupling two feature-bearing sides gets its right operand
    replaced by a constant; oversized trees then lose their largest
    feature-bearing branch to a constant until they fit.
    """

    def fix(node: Expr) -> Expr:
        if not isinstance(node, BinOp):
            return node
        left = fix(node.left)
        right = fix(node.right)
        if node.op == "mul" and not (is_constant(left) or is_constant(right)):
            right = Const(float(rng.normal(0.0, const_scale)))
        return _raw_binop(node.op, left, right)

    out = fix(expr)
    while complexity(out) > max_complexity:
        paths = sorted(
            (p for p in subtree_paths(out) if isinstance(get_subtree(out, p), BinOp) and p != ()),
            key=lambda p: -complexity(get_subtree(out, p)),
        )
        if not paths:
            break
        out = replace_subtree(out, paths[0], Const(float(rng.normal(0.0, const_scale))))
    return validate(out)


def crossover(a: Expr, b: Expr, rng: np.random.Generator,
              max_complexity: int = 25, const_scale: float = 1.0) -> tuple[Expr, Expr]:
    """Exchange random subtrees; invalid offspring get the swapped-in
    subtree replaced by a constant, which always restores both guarantees."""
    path_a = subtree_paths(a)[int(rng.integers(complexity(a)))]
    path_b = subtree_paths(b)[int(rng.integers(complexity(b)))]
    sub_a = get_subtree(a, path_a)
    sub_b = get_subtree(b, path_b)

    def child(parent: Expr, path: Path, incoming: Expr) -> Expr:
        out = replace_subtree(parent, path, incoming)
        if is_admissible(out) and complexity(out) <= max_complexity:
            return validate(out)
        out = replace_subtree(parent, path, Const(float(rng.normal(0.0, const_scale))))
        return validate(out)

    return child(a, path_a, sub_b), child(b, path_b, sub_a)
