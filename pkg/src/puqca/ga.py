"""Evolutionary search over gate angles: roulette selection plus Gaussian mutation.

There is no crossover.  Random streams for initialisation, selection and
mutation are derived from one seed and are consumed in a fixed order, so a
search is reproducible however the fitness evaluations are scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import dct, fermion
from .model import TWO_PI, FermionRule, PUQCARule

log = logging.getLogger(__name__)

PERFECT_TOL = 1e-12

Objective = Callable[[np.ndarray], float]


@dataclass
class Individual:
    genes: np.ndarray
    fitness: float | None = None

    def rule(self) -> PUQCARule | FermionRule:
        return genes_to_rule(self.genes)


def genes_to_rule(genes) -> PUQCARule | FermionRule:
    if len(genes) == 8:
        return PUQCARule.from_genes(genes)
    if len(genes) == 6:
        return FermionRule.from_genes(genes)
    raise ValueError(f"chromosome must have 6 or 8 genes, got {len(genes)}")


class FitnessObjective:
    """Exact fitness of one ``(n, t, p, delta)`` task as a function of the genes."""

    def __init__(self, spec: dct.ClassifierSpec, fermionic: bool = False,
                 boundary: str = "periodic"):
        self.spec = spec
        self.fermionic = fermionic
        self.boundary = boundary
        self.n_genes = 6 if fermionic else 8
        self._configs = dct.enumerate_valid(spec.n)

    def __call__(self, genes) -> float:
        rule = genes_to_rule(genes)
        if self.fermionic:
            return fermion.fermion_fitness(rule, self.spec, self._configs,
                                           boundary=self.boundary, cap=0).fitness
        return dct.fitness(rule, self.spec, self._configs, cap=0, workers=1).fitness


class MultiSizeObjective:
    """Aggregate (mean or min) of exact fitness over several ``(n, t)`` pairs."""

    def __init__(self, sizes: Sequence[tuple[int, int]], p: int = 1, delta: float = 0.0,
                 fermionic: bool = False, aggregate: str = "mean",
                 boundary: str = "periodic"):
        if not sizes:
            raise ValueError("sizes must be non-empty")
        if aggregate not in ("mean", "min"):
            raise ValueError("aggregate must be 'mean' or 'min'")
        self.parts = [FitnessObjective(dct.ClassifierSpec(n, t, p, delta), fermionic, boundary)
                      for n, t in sizes]
        self.aggregate = aggregate
        self.n_genes = self.parts[0].n_genes

    def __call__(self, genes) -> float:
        vals = [obj(genes) for obj in self.parts]
        return float(np.mean(vals)) if self.aggregate == "mean" else float(min(vals))


def multi_size_objective(sizes, p=1, delta=0.0, **kw) -> MultiSizeObjective:
    return MultiSizeObjective(sizes, p, delta, **kw)


@dataclass
class GAConfig:
    objective: Objective
    n_genes: int = 8
    population_size: int = 100
    max_generations: int = 100
    p_m: float = 0.36
    sigma: float = 0.45
    seed: int = 0
    elitism: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError("p_m must lie in [0, 1]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")


@dataclass
class SearchResult:
    best: Individual
    history: list[float]
    generations: int
    population: list[Individual] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.best.fitness is not None and self.best.fitness >= 1.0 - PERFECT_TOL


def rng_streams(seed: int) -> tuple[np.random.Generator, ...]:
    """Independent generators for (init, selection, mutation)."""
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))


def init_population(size: int, n_genes: int, rng: np.random.Generator) -> list[Individual]:
    genes = rng.uniform(0.0, TWO_PI, size=(size, n_genes))
    return [Individual(np.mod(g, TWO_PI)) for g in genes]


def roulette_select(pop: Sequence[Individual], rng: np.random.Generator) -> list[Individual]:
    """Fitness-proportional sampling with replacement; uniform if every fitness is 0."""
    f = np.array([ind.fitness for ind in pop], dtype=np.float64)
    if np.any(np.isnan(f)) or np.any(f < 0):
        raise ValueError("fitness values must be computed and non-negative")
    total = f.sum()
    probs = f / total if total > 0 else None
    picks = rng.choice(len(pop), size=len(pop), replace=True, p=probs)
    return [Individual(pop[i].genes.copy(), pop[i].fitness) for i in picks]


def mutate(pop: Sequence[Individual], p_m: float, sigma: float,
           rng: np.random.Generator) -> list[Individual]:
    """Each gene, with probability ``p_m``, becomes ``wrap(g + N(0, sigma^2))``."""
    if not pop:
        return []
    genes = np.array([ind.genes for ind in pop])
    # draws are made for every gene so the stream position never depends on outcomes
    hit = rng.random(genes.shape) < p_m
    noise = rng.normal(0.0, sigma, genes.shape)
    new = np.where(hit, np.mod(genes + noise, TWO_PI), genes)
    out = []
    for ind, g, changed in zip(pop, new, hit.any(axis=1)):
        out.append(Individual(g, None if changed else ind.fitness))
    return out


def _evaluate(pop: list[Individual], objective: Objective, workers: int) -> None:
    todo = [ind for ind in pop if ind.fitness is None]
    if workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(workers) as ex:
            vals = list(ex.map(objective, [ind.genes for ind in todo]))
    else:
        vals = [objective(ind.genes) for ind in todo]
    for ind, v in zip(todo, vals):
        ind.fitness = float(v)


def _best(pop: Sequence[Individual]) -> Individual:
    # first maximum, so ties resolve by population order
    return pop[int(np.argmax([ind.fitness for ind in pop]))]


def evolve_search(cfg: GAConfig, callback: Callable[[int, float], None] | None = None) -> SearchResult:
    """Select, mutate and re-evaluate until a perfect individual appears or generations run out."""
    init_rng, sel_rng, mut_rng = rng_streams(cfg.seed)
    pop = init_population(cfg.population_size, cfg.n_genes, init_rng)
    _evaluate(pop, cfg.objective, cfg.workers)
    best = _best(pop)
    history = [best.fitness]
    if callback:
        callback(0, best.fitness)
    gen = 0
    while best.fitness < 1.0 - PERFECT_TOL and gen < cfg.max_generations:
        gen += 1
        elite = Individual(best.genes.copy(), best.fitness)
        pop = mutate(roulette_select(pop, sel_rng), cfg.p_m, cfg.sigma, mut_rng)
        _evaluate(pop, cfg.objective, cfg.workers)
        if cfg.elitism:
            worst = int(np.argmin([ind.fitness for ind in pop]))
            pop[worst] = elite
        best = _best(pop)
        history.append(best.fitness)
        log.debug("generation %d best %.6f", gen, best.fitness)
        if callback:
            callback(gen, best.fitness)
    return SearchResult(Individual(best.genes.copy(), best.fitness), history, gen, pop)
