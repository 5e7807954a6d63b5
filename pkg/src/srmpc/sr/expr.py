"""Expression trees restricted to an affine-representable operator set.

Only add, sub and mul exist, and every mul node must have at least one
side free of feature references. That structural rule makes each tree an
affine function of its features, so any candidate the search produces can
be handed to the convex scheduling layer unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError

OPS = ("add", "sub", "mul")

Path = tuple[int, ...]  # 0 = left child, 1 = right child


class Expr:
    """Base node type; concrete nodes are Const, Feature and BinOp."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Feature(Expr):
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise DataError(f"feature index must be >= 0, got {self.index}")


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in OPS:
            raise DataError(f"operator must be one of {OPS}, got {self.op!r}")
        if self.op == "mul" and not (is_constant(self.left) or is_constant(self.right)):
            raise DataError("mul requires a constant-only operand to stay affine")


def _raw_binop(op: str, left: Expr, right: Expr) -> BinOp:
    """Build a BinOp without admissibility checks; callers must repair."""
    node = object.__new__(BinOp)
    object.__setattr__(node, "op", op)
    object.__setattr__(node, "left", left)
    object.__setattr__(node, "right", right)
    return node


def is_constant(expr: Expr) -> bool:
    """True when the subtree references no features."""
    if isinstance(expr, Const):
        return True
    if isinstance(expr, Feature):
        return False
    return is_constant(expr.left) and is_constant(expr.right)


def is_admissible(expr: Expr) -> bool:
    """True when every mul node has a constant-only side."""
    if isinstance(expr, (Const, Feature)):
        return True
    if expr.op == "mul" and not (is_constant(expr.left) or is_constant(expr.right)):
        return False
    return is_admissible(expr.left) and is_admissible(expr.right)


def validate(expr: Expr) -> Expr:
    if not is_admissible(expr):
        raise DataError("expression is not affine-admissible")
    return expr


def complexity(expr: Expr) -> int:
    """Total node count."""
    if isinstance(expr, (Const, Feature)):
        return 1
    return 1 + complexity(expr.left) + complexity(expr.right)


def features_used(expr: Expr) -> set[int]:
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Feature):
        return {expr.index}
    return features_used(expr.left) | features_used(expr.right)


def evaluate(expr: Expr, row) -> float:
    """Evaluate on a single feature vector."""
    row = np.asarray(row, dtype=float)
    return float(_eval(expr, row.reshape(1, -1))[0])


def evaluate_matrix(expr: Expr, X: np.ndarray) -> np.ndarray:
    """Evaluate on every row of a 2-D sample matrix."""
    return _eval(expr, np.asarray(X, dtype=float))


def _eval(expr: Expr, X: np.ndarray) -> np.ndarray:
    if isinstance(expr, Const):
        return np.full(X.shape[0], expr.value)
    if isinstance(expr, Feature):
        if expr.index >= X.shape[1]:
            raise DataError(f"feature index {expr.index} out of range for {X.shape[1]} columns")
        return X[:, expr.index].astype(float)
    a = _eval(expr.left, X)
    b = _eval(expr.right, X)
    if expr.op == "add":
        return a + b
    if expr.op == "sub":
        return a - b
    return a * b


def affine_parts(expr: Expr) -> tuple[float, dict[int, float]]:
    """Expand to ``intercept + sum(coeff[i] * feature_i)``.

    Rejects trees where a mul couples two feature-bearing operands. Exact
    zero coefficients arising from cancellation are kept here; pruning is
    the model constructor's job.
    """
    if isinstance(expr, Const):
        return expr.value, {}
    if isinstance(expr, Feature):
        return 0.0, {expr.index: 1.0}
    ib, ic = affine_parts(expr.left)
    jb, jc = affine_parts(expr.right)
    if expr.op == "add":
        out = dict(ic)
        for k, v in jc.items():
            out[k] = out.get(k, 0.0) + v
        return ib + jb, out
    if expr.op == "sub":
        out = dict(ic)
        for k, v in jc.items():
            out[k] = out.get(k, 0.0) - v
        return ib - jb, out
    # mul: scale the feature-bearing side by the constant side's value
    if is_constant(expr.right):
        return ib * jb, {k: v * jb for k, v in ic.items()}
    if is_constant(expr.left):
        return ib * jb, {k: v * ib for k, v in jc.items()}
    raise DataError("cannot expand: mul of two feature-bearing subtrees")


def subtree_paths(expr: Expr) -> list[Path]:
    """Pre-order paths of every node."""
    out: list[Path] = []

    def walk(node: Expr, path: Path):
        out.append(path)
        if isinstance(node, BinOp):
            walk(node.left, path + (0,))
            walk(node.right, path + (1,))

    walk(expr, ())
    return out


def get_subtree(expr: Expr, path: Path) -> Expr:
    node = expr
    for branch in path:
        node = node.left if branch == 0 else node.right
    return node


def replace_subtree(expr: Expr, path: Path, replacement: Expr) -> Expr:
    """Rebuild with ``replacement`` at ``path``; no admissibility check."""
    if not path:
        return replacement
    assert isinstance(expr, BinOp)
    if path[0] == 0:
        return _raw_binop(expr.op, replace_subtree(expr.left, path[1:], replacement), expr.right)
    return _raw_binop(expr.op, expr.left, replace_subtree(expr.right, path[1:], replacement))


def collect_constants(expr: Expr) -> list[float]:
    """Constant leaf values in pre-order."""
    if isinstance(expr, Const):
        return [expr.value]
    if isinstance(expr, Feature):
        return []
    return collect_constants(expr.left) + collect_constants(expr.right)


def replace_constants(expr: Expr, values) -> Expr:
    """Rebuild with constant leaves set to ``values`` in pre-order."""
    values = list(values)

    def build(node: Expr) -> Expr:
        if isinstance(node, Const):
            return Const(values.pop(0))
        if isinstance(node, Feature):
            return node
        return _raw_binop(node.op, build(node.left), build(node.right))

    out = build(expr)
    if values:
        raise DataError(f"{len(values)} constant values left over")
    return out


def expr_str(expr: Expr, names=None) -> str:
    """Parenthesized rendering, used for reports and deterministic ordering."""
    if isinstance(expr, Const):
        return format(expr.value, ".6g")
    if isinstance(expr, Feature):
        return names[expr.index] if names is not None else f"x{expr.index}"
    sym = {"add": "+", "sub": "-", "mul": "*"}[expr.op]
    return f"({expr_str(expr.left, names)} {sym} {expr_str(expr.right, names)})"
