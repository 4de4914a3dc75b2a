"""Genetic algorithm over 230-bit chromosomes.

Proportional (roulette) selection, single-point crossover, per-bit mutation,
and elitism: the best organism of a generation is copied unchanged into the
next one, taking the slot of the worst.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .genome import CHROMOSOME_BITS, Chromosome

FITNESS_EPSILON = 1.0


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 1000
    crossover_rate: float = 0.75
    mutation_rate: float = 0.002
    generations: int = 300
    positions_per_generation: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be an even number >= 2")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("rates must lie in [0, 1]")
        if self.positions_per_generation < 1:
            raise ValueError("positions_per_generation must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")


@dataclass(frozen=True)
class Organism:
    chromosome: Chromosome
    error_cp: float | None = None

    @property
    def fitness(self) -> float | None:
        return None if self.error_cp is None else -self.error_cp


@dataclass(frozen=True)
class GenerationReport:
    generation: int
    best_error_cp: float
    mean_error_cp: float
    best_chromosome: Chromosome = field(repr=False)
    wall_time: float = 0.0

    def csv_row(self) -> str:
        return f"{self.generation},{self.best_error_cp:.6f},{self.mean_error_cp:.6f}"


def compute_fitness(errors) -> np.ndarray:
    """Selection weights: (max error - error) + 1, so the lowest error weighs most."""
    e = np.asarray(errors, dtype=np.float64)
    if e.size == 0:
        raise ValueError("cannot compute fitness of an empty population")
    if (e < 0).any():
        raise ValueError("errors must be non-negative")
    return (e.max() - e) + FITNESS_EPSILON


def select_parent(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Roulette-wheel draw: index i with probability weights[i] / sum(weights)."""
    return _spin(np.cumsum(weights), rng)


def _spin(cum: np.ndarray, rng: np.random.Generator) -> int:
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(i, len(cum) - 1)


def crossover(a: Chromosome, b: Chromosome, rate: float,
              rng: np.random.Generator) -> tuple[Chromosome, Chromosome]:
    if rng.random() >= rate:
        return a, b
    k = int(rng.integers(1, CHROMOSOME_BITS))
    return Chromosome(a.bits[:k] + b.bits[k:]), Chromosome(b.bits[:k] + a.bits[k:])


def mutate(c: Chromosome, rate: float, rng: np.random.Generator) -> Chromosome:
    flips = rng.random(CHROMOSOME_BITS) < rate
    if not flips.any():
        return c
    return Chromosome.from_array(c.array() ^ flips.astype(np.uint8))


def evolve_generation(population: list[Chromosome], weights: np.ndarray, cfg: GAConfig,
                      rng: np.random.Generator) -> list[Chromosome]:
    """Breed the next generation; the current best replaces the child in the worst slot."""
    if len(population) != len(weights):
        raise ValueError("one weight per organism required")
    cum = np.cumsum(weights)
    children: list[Chromosome] = []
    size = len(population)
    while len(children) < size:
        i, j = _spin(cum, rng), _spin(cum, rng)
        c1, c2 = crossover(population[i], population[j], cfg.crossover_rate, rng)
        children.append(mutate(c1, cfg.mutation_rate, rng))
        children.append(mutate(c2, cfg.mutation_rate, rng))
    children = children[:size]
    best = int(np.argmax(weights))
    worst = int(np.argmin(weights))
    children[worst] = population[best]
    return children
