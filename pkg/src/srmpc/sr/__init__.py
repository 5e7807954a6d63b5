from .expr import BinOp, Const, Expr, Feature, complexity, evaluate, evaluate_matrix, is_admissible, is_constant
from .affine import AffineModel, to_affine
from .fitting import ConstantFit, fit_constants
from .ops import crossover, mutate, random_affine_tree, random_tree, repair
from .gp import GPConfig, ParetoFront, FrontEntry, run_gp, select_best, select_best_entry

__all__ = [
    "AffineModel", "BinOp", "Const", "ConstantFit", "Expr", "Feature", "FrontEntry",
    "GPConfig", "ParetoFront", "complexity", "crossover", "evaluate", "evaluate_matrix",
    "fit_constants", "is_admissible", "is_constant", "mutate", "random_affine_tree",
    "random_tree", "repair", "run_gp", "select_best", "select_best_entry", "to_affine",
]
