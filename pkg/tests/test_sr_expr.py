"""Expression tree, affine reduction and constant-fitting tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srmpc.errors import DataError
from srmpc.sr import (
    AffineModel,
    BinOp,
    Const,
    Feature,
    complexity,
    evaluate,
    evaluate_matrix,
    fit_constants,
    is_admissible,
    to_affine,
)
from srmpc.sr.expr import _raw_binop, affine_parts, collect_constants, replace_constants
from srmpc.sr.ops import random_tree


def linear_tree(terms, intercept):
    """Build c0 + sum(c*x_i) as an explicit tree."""
    out = Const(intercept)
    for coeff, idx in terms:
        out = BinOp("add", out, BinOp("mul", Const(coeff), Feature(idx)))
    return out


class SampleData:
    def __init__(self, X, y):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=float)


class TestExprBasics:
    def test_only_three_operators_constructible(self):
        with pytest.raises(DataError):
            BinOp("div", Const(1.0), Feature(0))

    def test_mul_of_two_feature_subtrees_rejected(self):
        with pytest.raises(DataError):
            BinOp("mul", Feature(0), Feature(1))

    def test_constant_evaluation(self):
        assert evaluate(Const(5.0), [1.0, 2.0]) == 5.0

    def test_addition(self):
        assert evaluate(BinOp("add", Feature(0), Feature(1)), [2.0, 3.0]) == 5.0

    def test_morning_model_evaluation(self):
        # 0.754*22.0 - 0.162*21.0 - 0.5 + 10.445 = 23.131
        tree = linear_tree([(0.754, 0), (-0.162, 1), (-1.0, 2)], 10.445)
        assert evaluate(tree, [22.0, 21.0, 0.5]) == pytest.approx(23.131, abs=1e-12)

    def test_invalid_feature_index(self):
        with pytest.raises(DataError):
            evaluate(Feature(3), [1.0])

    def test_complexity_counts_nodes(self):
        assert complexity(linear_tree([(1.0, 0)], 0.0)) == 5


COLUMNS = (("T_in", 0), ("D", 0), ("T_out", 24))


class TestToAffine:
    def test_distributive_expansion(self):
        expr = BinOp("mul", Const(2.0), BinOp("sub", Feature(0), Const(3.0)))
        model = to_affine(expr, COLUMNS)
        assert model.intercept == pytest.approx(-6.0)
        assert model.coefficients == {("T_in", 0): 2.0}

    def test_cancellation_prunes_zero_coefficients(self):
        expr = BinOp("sub", Feature(0), Feature(0))
        model = to_affine(expr, COLUMNS)
        assert model.intercept == 0.0
        assert model.coefficients == {}

    def test_evening_model_tree(self):
        expr = linear_tree([(0.792, 0), (-0.718, 1), (-0.103, 2)], 6.290)
        model = to_affine(expr, COLUMNS)
        assert model.intercept == pytest.approx(6.290)
        assert model.coefficients[("T_in", 0)] == pytest.approx(0.792)
        assert model.coefficients[("D", 0)] == pytest.approx(-0.718)
        assert model.coefficients[("T_out", 24)] == pytest.approx(-0.103)

    def test_non_affine_rejected_defensively(self):
        bad = _raw_binop("mul", Feature(0), Feature(1))
        with pytest.raises(DataError):
            affine_parts(bad)

    @given(st.integers(0, 10_000))
    @settings(max_examples=200, deadline=None)
    def test_affine_equivalence_on_random_trees(self, seed):
        rng = np.random.default_rng(seed)
        expr = random_tree(rng, 4, 3, 1.0)
        columns = (("a", 0), ("b", 0), ("c", 1), ("d", 2))
        model = to_affine(expr, columns)
        rows = rng.normal(0.0, 3.0, size=(5, 4))
        for row in rows:
            direct = evaluate(expr, row)
            via_model = model.intercept + sum(
                coeff * row[columns.index(key)] for key, coeff in model.coefficients.items()
            )
            assert via_model == pytest.approx(direct, abs=1e-9 * (1 + abs(direct)))

    def test_equation_rendering(self):
        model = AffineModel(
            intercept=10.445,
            coefficients={("T_in", 0): 0.754, ("T_in", 60): -0.162, ("D", 0): -1.0},
        )
        assert model.equation() == (
            "T_in[t+1] = 0.754*T_in[t] - 0.162*T_in[t-60] - 1.000*D[t] + 10.445"
        )

    def test_json_round_trip(self):
        model = AffineModel(
            intercept=6.29,
            coefficients={("T_in", 0): 0.792, ("D", 0): -0.718, ("T_out", 24): -0.103},
            units={"T_in": "degC", "D": "kW", "T_out": "degC"},
        )
        back = AffineModel.from_json_dict(model.to_json_dict())
        assert back == model


class TestFitConstants:
    def test_exact_recovery_on_noiseless_line(self):
        rng = np.random.default_rng(1)
        X = rng.normal(0, 1, size=(50, 1))
        y = 1.0 + 2.0 * X[:, 0]
        structure = BinOp("add", Const(0.1), BinOp("mul", Const(0.1), Feature(0)))
        fit = fit_constants(structure, SampleData(X, y))
        consts = collect_constants(fit.expr)
        assert consts == pytest.approx([1.0, 2.0], abs=1e-9)
        assert fit.mse < 1e-18

    def test_constant_structure_fits_mean(self):
        X = np.zeros((10, 1))
        y = np.full(10, 7.0)
        fit = fit_constants(Const(0.0), SampleData(X, y))
        assert collect_constants(fit.expr) == pytest.approx([7.0])

    def test_planted_morning_model_recovery(self):
        # columns: T_in[t], T_in[t-60], D[t]; oracle is least squares on the
        # true support, run on the same noisy sample
        rng = np.random.default_rng(42)
        n = 600
        X = np.column_stack([
            rng.normal(20, 2, n),
            rng.normal(20, 2, n),
            rng.uniform(0, 2, n),
        ])
        truth = np.array([0.754, -0.162, -1.0])
        y = X @ truth + 10.445 + rng.normal(0, 0.05, n)
        basis = np.column_stack([X, np.ones(n)])
        oracle, *_ = np.linalg.lstsq(basis, y, rcond=None)

        structure = linear_tree([(0.1, 0), (0.1, 1), (0.1, 2)], 0.0)
        fit = fit_constants(structure, SampleData(X, y))
        fitted = collect_constants(fit.expr)
        # pre-order constants: intercept first, then term coefficients
        assert fitted[0] == pytest.approx(oracle[3], rel=1e-9)
        assert fitted[1:] == pytest.approx(list(oracle[:3]), rel=1e-9)
        for value, target in zip(fitted, [10.445, 0.754, -0.162, -1.0]):
            assert value == pytest.approx(target, rel=0.05)

    def test_nonlinear_constant_coupling_still_improves(self):
        # c0 * (x0 + c1) couples the constants multiplicatively
        rng = np.random.default_rng(3)
        X = rng.normal(0, 1, size=(80, 1))
        y = 3.0 * (X[:, 0] + 0.5)
        structure = BinOp("mul", Const(1.0), BinOp("add", Feature(0), Const(0.0)))
        fit = fit_constants(structure, SampleData(X, y))
        assert fit.mse < 1e-12

    def test_rank_deficiency_flagged(self):
        X = np.zeros((10, 1))
        y = np.zeros(10)
        # two constants multiplying the same all-zero feature are undetermined
        structure = BinOp("add",
                          BinOp("mul", Const(1.0), Feature(0)),
                          BinOp("mul", Const(2.0), Feature(0)))
        fit = fit_constants(structure, SampleData(X, y))
        assert fit.rank_deficient

    def test_too_few_rows(self):
        structure = linear_tree([(1.0, 0)], 0.0)
        with pytest.raises(DataError):
            fit_constants(structure, SampleData(np.ones((1, 1)), np.ones(1)))

    @given(st.integers(0, 5_000))
    @settings(max_examples=150, deadline=None)
    def test_never_increases_mse(self, seed):
        rng = np.random.default_rng(seed)
        expr = random_tree(rng, 3, 3, 1.0)
        X = rng.normal(0, 2, size=(30, 3))
        y = rng.normal(0, 2, size=30)
        data = SampleData(X, y)
        before = float(np.mean((evaluate_matrix(expr, X) - y) ** 2))
        fit = fit_constants(expr, data)
        assert fit.mse <= before + 1e-9 * (1 + before)

    def test_replace_constants_length_checked(self):
        with pytest.raises(DataError):
            replace_constants(Const(1.0), [1.0, 2.0])
