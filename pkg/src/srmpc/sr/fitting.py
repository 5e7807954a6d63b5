"""Constant refinement for candidate expressions.

Because admissible trees are affine in every individual constant leaf,
constants can be optimized exactly: in one linear least-squares solve when
no two constants multiply each other, otherwise by cyclic per-constant
line minimization, which is monotone in training error by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from .expr import (
    BinOp,
    Const,
    Expr,
    collect_constants,
    evaluate_matrix,
    is_constant,
    replace_constants,
)


@dataclass(frozen=True)
class ConstantFit:
    expr: Expr
    mse: float
    rank_deficient: bool = False


def _count_consts(expr: Expr) -> int:
    return len(collect_constants(expr))


def _jointly_linear(expr: Expr) -> bool:
    """True when no mul node has constants on both sides."""
    if isinstance(expr, BinOp):
        if expr.op == "mul" and _count_consts(expr.left) > 0 and _count_consts(expr.right) > 0:
            return False
        return _jointly_linear(expr.left) and _jointly_linear(expr.right)
    return True


def _mse(expr: Expr, X: np.ndarray, y: np.ndarray) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        pred = evaluate_matrix(expr, X)
        err = pred - y
        val = float(np.mean(err * err))
    return val if np.isfinite(val) else float("inf")


def fit_constants(structure: Expr, data) -> ConstantFit:
    """Replace constant leaves with mse-minimizing values.

    ``data`` needs ``X`` and ``y`` attributes (a FeatureMatrix qualifies).
    The refit never increases training mse; if numerics would, the original
    constants are kept.
    """
    X = np.asarray(data.X, dtype=float)
    y = np.asarray(data.y, dtype=float)
    if X.shape[0] == 0:
        raise DataError("cannot fit constants on empty data")
    current = collect_constants(structure)
    k = len(current)
    base_mse = _mse(structure, X, y)
    if k == 0:
        return ConstantFit(structure, base_mse, False)
    if X.shape[0] < k:
        raise DataError(f"{X.shape[0]} rows cannot determine {k} constants")

    if _jointly_linear(structure):
        fitted, mse, deficient = _linear_solve(structure, X, y, k)
    else:
        fitted, mse, deficient = _coordinate_descent(structure, X, y, current)

    if mse > base_mse:
        return ConstantFit(structure, base_mse, deficient)
    return ConstantFit(fitted, mse, deficient)


def _linear_solve(structure: Expr, X, y, k):
    zeros = [0.0] * k
    base = evaluate_matrix(replace_constants(structure, zeros), X)
    A = np.empty((X.shape[0], k))
    for j in range(k):
        unit = zeros.copy()
        unit[j] = 1.0
        A[:, j] = evaluate_matrix(replace_constants(structure, unit), X) - base
    sol, _, rank, _ = np.linalg.lstsq(A, y - base, rcond=None)
    fitted = replace_constants(structure, sol.tolist())
    return fitted, _mse(fitted, X, y), rank < k


def _coordinate_descent(structure: Expr, X, y, values, sweeps: int = 8):
    values = list(values)
    deficient = False
    prev = _mse(replace_constants(structure, values), X, y)
    for _ in range(sweeps):
        for j in range(len(values)):
            lo = values.copy()
            lo[j] = 0.0
            hi = values.copy()
            hi[j] = 1.0
            h = evaluate_matrix(replace_constants(structure, lo), X)
            g = evaluate_matrix(replace_constants(structure, hi), X) - h
            gg = float(g @ g)
            if gg <= 1e-30 or not np.isfinite(gg):
                deficient = True
                continue
            values[j] = float(g @ (y - h)) / gg
        cur = _mse(replace_constants(structure, values), X, y)
        if prev - cur <= 1e-14 * max(1.0, prev):
            prev = cur
            break
        prev = cur
    fitted = replace_constants(structure, values)
    return fitted, prev, deficient
