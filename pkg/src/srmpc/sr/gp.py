"""Genetic-programming search over admissible expression trees.

Every individual gets its constants refit by exact least squares before
scoring, so the search is effectively over structures (feature support and
coupling patterns) rather than coefficient values. The archive keeps the
full complexity/error Pareto front seen across all generations.

Reproducibility contract: each bred individual draws from a private stream
seeded by (run seed, generation, slot index), and the front is rebuilt by a
global sort, so results are bit-identical for any evaluation worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DataError
from ..features import ColumnKey, FeatureMatrix
from .affine import AffineModel, to_affine
from .expr import Const, Expr, complexity, expr_str
from .fitting import fit_constants
from .ops import crossover, mutate, random_affine_tree, random_tree


@dataclass(frozen=True)
class GPConfig:
    population_size: int = 500
    generations: int = 60
    tournament_size: int = 5
    crossover_prob: float = 0.7
    mutation_prob: float = 0.3
    max_complexity: int = 25
    parsimony: float = 1.05
    restarts: int = 5
    rng_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0 or not 0.0 <= self.mutation_prob <= 1.0:
            raise DataError("crossover_prob and mutation_prob must lie in [0, 1]")
        if self.parsimony <= 1.0:
            raise DataError(f"parsimony must be > 1, got {self.parsimony}")
        if self.restarts < 1:
            raise DataError(f"restarts must be >= 1, got {self.restarts}")
        if min(self.population_size, self.generations, self.tournament_size,
               self.max_complexity, self.workers) < 1:
            raise DataError("population, generations, tournament, max_complexity, workers must be >= 1")


@dataclass(frozen=True)
class FrontEntry:
    complexity: int
    mse: float
    expr: Expr


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated (complexity, mse) archive, complexity strictly
    increasing and mse strictly decreasing."""

    entries: tuple[FrontEntry, ...]
    columns: tuple[ColumnKey, ...]
    units: dict[str, str] = field(default_factory=dict)
    target_channel: str = "T_in"

    @classmethod
    def from_candidates(cls, candidates, columns, units=None, target_channel="T_in") -> "ParetoFront":
        """Order-independent rebuild: global sort, then a dominance scan."""
        ranked = sorted(
            ((c, m, e) for c, m, e in candidates if np.isfinite(m)),
            key=lambda t: (t[0], t[1], expr_str(t[2])),
        )
        kept: list[FrontEntry] = []
        best = float("inf")
        for comp, mse, expr in ranked:
            if kept and comp == kept[-1].complexity:
                continue
            if mse < best:
                kept.append(FrontEntry(comp, mse, expr))
                best = mse
        return cls(tuple(kept), tuple(columns), dict(units or {}), target_channel)

    def candidate_tuples(self):
        return [(e.complexity, e.mse, e.expr) for e in self.entries]


def _stream(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), generation, index]))


def _score(args):
    expr, data, parsimony = args
    fit = fit_constants(expr, data)
    comp = complexity(fit.expr)
    mse = fit.mse if np.isfinite(fit.mse) else float("inf")
    fitness = mse * parsimony ** comp if np.isfinite(mse) else float("inf")
    return fit.expr, comp, mse, fitness


def run_gp(data: FeatureMatrix, config: GPConfig) -> ParetoFront:
    """Evolve one population and return its Pareto front archive."""
    if data.n_rows == 0 or data.n_columns == 0:
        raise DataError("cannot run symbolic regression on empty data")
    y = data.y
    n_features = data.n_columns
    y_std = float(np.std(y))

    if y_std == 0.0:
        model = Const(float(y[0]))
        return ParetoFront.from_candidates(
            [(1, 0.0, model)], data.columns, data.units, data.target_channel)

    const_scale = y_std
    seed = config.rng_seed
    pop_n = config.population_size

    population: list[Expr] = []
    for i in range(pop_n):
        rng = _stream(seed, 0, i)
        if rng.random() < 0.4:
            population.append(random_affine_tree(rng, n_features, int(rng.integers(1, 4)), const_scale))
        else:
            population.append(random_tree(rng, n_features, int(rng.integers(2, 4)), const_scale))

    archive: list[tuple[int, float, Expr]] = []
    # fitted constant baseline keeps the front non-empty and anchors the
    # degenerate end of the complexity axis
    mean_model = Const(float(np.mean(y)))
    archive.append((1, float(np.mean((y - np.mean(y)) ** 2)), mean_model))

    scored: list[tuple[Expr, int, float, float]] = []
    for gen in range(config.generations):
        if gen > 0:
            population = _breed(scored, config, seed, gen, n_features, const_scale)
        scored = _evaluate(population, data, config)
        archive.extend((comp, mse, expr) for expr, comp, mse, _ in scored)

    return ParetoFront.from_candidates(archive, data.columns, data.units, data.target_channel)


def _evaluate(population, data, config):
    tasks = [(expr, data, config.parsimony) for expr in population]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_score, tasks))
    return [_score(t) for t in tasks]


def _sort_key(entry):
    expr, comp, mse, fitness = entry
    return (fitness, comp, expr_str(expr))


def _tournament(scored, rng, k):
    picks = rng.integers(0, len(scored), size=k)
    return min((scored[int(i)] for i in picks), key=_sort_key)[0]


def _breed(scored, config, seed, gen, n_features, const_scale):
    elite = min(scored, key=_sort_key)[0]
    out = [elite]
    for i in range(1, config.population_size):
        rng = _stream(seed, gen, i)
        r = rng.random()
        if r < config.crossover_prob:
            p1 = _tournament(scored, rng, config.tournament_size)
            p2 = _tournament(scored, rng, config.tournament_size)
            child, _ = crossover(p1, p2, rng, config.max_complexity, const_scale)
        elif r < config.crossover_prob + config.mutation_prob:
            p = _tournament(scored, rng, config.tournament_size)
            child = mutate(p, rng, n_features, config.max_complexity, const_scale)
        else:
            child = _tournament(scored, rng, config.tournament_size)
        out.append(child)
    return out


def run_restarts(data: FeatureMatrix, config: GPConfig) -> list[ParetoFront]:
    """Independent runs with seeds spawned from the configured seed."""
    children = np.random.SeedSequence(config.rng_seed).spawn(config.restarts)
    fronts = []
    for child in children:
        sub_seed = int(child.generate_state(1)[0])
        fronts.append(run_gp(data, replace(config, rng_seed=sub_seed)))
    return fronts


def select_best_entry(fronts: list[ParetoFront], parsimony: float = 1.05):
    """Lowest ``mse * parsimony**complexity`` entry across all fronts.

    Ties fall to lower complexity, then to the lexicographically smallest
    coefficient-name tuple of the affine form.
    """
    if not fronts or all(len(f.entries) == 0 for f in fronts):
        raise DataError("no Pareto front entries to select from")
    best = None
    best_key = None
    for front in fronts:
        for entry in front.entries:
            model = to_affine(entry.expr, front.columns, front.units, front.target_channel)
            names = tuple(sorted(f"{ch}[{lag}]" for ch, lag in model.coefficients))
            key = (entry.mse * parsimony ** entry.complexity, entry.complexity, names)
            if best_key is None or key < best_key:
                best_key = key
                best = (front, entry, model)
    return best


def select_best(fronts: list[ParetoFront], parsimony: float = 1.05) -> AffineModel:
    return select_best_entry(fronts, parsimony)[2]
