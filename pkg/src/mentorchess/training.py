"""Mentor-assisted learning: datasets, organism error, and the evolution driver."""

from __future__ import annotations

import hashlib
import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chesscore import Move, Position, parse_fen, position_id, replay
from .evalfn import SIGNS, EvalParams, feature_matrix
from .ga import GAConfig, GenerationReport, Organism, compute_fitness, evolve_generation
from .genome import Chromosome, decode, decode_many, random_chromosome
from .mentor import SCORE_CLAMP, MentorConfig, MentorScore, ScoreCache, score_positions

log = logging.getLogger(__name__)

BOOK_PLIES = 8


@dataclass(frozen=True)
class Profile:
    population_size: int
    generations: int
    positions_per_generation: int
    train_size: int
    test_size: int


PROFILES = {
    "desk": Profile(50, 100, 500, 1000, 1000),
    "paper": Profile(1000, 300, 1000, 5000, 5000),
}


@dataclass(frozen=True)
class Dataset:
    train: list[tuple[Position, MentorScore]]
    test: list[tuple[Position, MentorScore]]
    source_digest: str = ""

    def __post_init__(self):
        overlap = {s.position_id for _, s in self.train} & {s.position_id for _, s in self.test}
        if overlap:
            raise ValueError(f"{len(overlap)} positions appear in both train and test splits")

    def digest(self) -> str:
        h = hashlib.sha256()
        for split in (self.train, self.test):
            for _, s in split:
                h.update(f"{s.position_id}\t{s.score_cp}\n".encode())
            h.update(b"--\n")
        return h.hexdigest()


@dataclass
class EvolutionResult:
    best: Organism
    reports: list[GenerationReport]
    test_error: float | None

    @property
    def best_params(self) -> EvalParams:
        return decode(self.best.chromosome)


class SamplingError(ValueError):
    pass


def eligible_positions(headers: dict, moves: Sequence[Move]) -> list[Position]:
    """White-to-move positions past the book plies from which the game continued, not in check."""
    positions = replay(headers, list(moves))
    return [p for ply, p in enumerate(positions[:-1])
            if ply >= BOOK_PLIES and p.side_to_move == 1 and not p.in_check()]


def sample_positions(games: Sequence[tuple[dict, Sequence[Move]]], count: int,
                     rng: np.random.Generator | int | None) -> list[Position]:
    """At most one random eligible position per game, deduplicated, in game-visit order."""
    rng = np.random.default_rng(rng)
    order = rng.permutation(len(games))
    chosen: list[Position] = []
    seen: set[str] = set()
    for gi in order:
        if len(chosen) == count:
            break
        headers, moves = games[gi]
        candidates = eligible_positions(headers, moves)
        if not candidates:
            continue
        p = candidates[int(rng.integers(len(candidates)))]
        pid = position_id(p)
        if pid in seen:
            continue
        seen.add(pid)
        chosen.append(p)
    if len(chosen) < count:
        raise SamplingError(f"requested {count} positions but only {len(chosen)} usable games")
    return chosen


def build_dataset(games, train_size: int, test_size: int, mentor: MentorConfig,
                  rng: np.random.Generator | int | None, cache: ScoreCache | None = None) -> Dataset:
    rng = np.random.default_rng(rng)
    positions = sample_positions(games, train_size + test_size, rng)
    scores = score_positions(positions, mentor, cache)
    pairs = list(zip(positions, scores))
    return Dataset(pairs[:train_size], pairs[train_size:])


def write_dataset(directory: str | Path, ds: Dataset) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name, split in (("train.tsv", ds.train), ("test.tsv", ds.test)):
        (d / name).write_text("".join(f"{s.position_id}\t{s.score_cp}\n" for _, s in split))


def read_dataset(directory: str | Path) -> Dataset:
    d = Path(directory)
    splits = []
    for name in ("train.tsv", "test.tsv"):
        split = []
        path = d / name
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            if not line.strip():
                continue
            try:
                fen, score = line.split("\t")
                split.append((parse_fen(fen), MentorScore(fen, int(score))))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
        splits.append(split)
    digest = hashlib.sha256((d / "train.tsv").read_bytes() + (d / "test.tsv").read_bytes()).hexdigest()
    return Dataset(splits[0], splits[1], digest)


def population_errors(params: np.ndarray, features: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Mean absolute error per organism.

    params: (organisms, 35) raw values; features: (positions, 35); targets: (positions,).
    Organism scores are clamped like mentor scores, so every error is at most
    2 * SCORE_CLAMP. Integer arithmetic is exact up to the final division.
    """
    weights = np.asarray(params, dtype=np.int64) * SIGNS
    scores = np.clip(features @ weights.T, -SCORE_CLAMP, SCORE_CLAMP)
    total = np.abs(targets[:, None] - scores).sum(axis=0)
    return total / len(targets)


def organism_error(c: Chromosome, batch: Sequence[tuple[Position, MentorScore]]) -> float:
    if not batch:
        raise ValueError("empty batch")
    feats = feature_matrix([p for p, _ in batch])
    targets = np.array([s.score_cp for _, s in batch], dtype=np.int64)
    params = np.array([decode(c).values], dtype=np.int64)
    return float(population_errors(params, feats, targets)[0])


def _searched_errors(population, positions, targets, depth):
    from .arena.search import negamax_value

    errors = np.empty(len(population))
    for i, c in enumerate(population):
        params = decode(c)
        scores = np.array([p.side_to_move * negamax_value(p, params, depth) for p in positions])
        errors[i] = np.abs(targets - np.clip(scores, -SCORE_CLAMP, SCORE_CLAMP)).mean()
    return errors


def run_evolution(dataset: Dataset, cfg: GAConfig, mentor: MentorConfig | None = None, *,
                  resample: bool = True, individual_depth: int = 0,
                  on_generation: Callable[[GenerationReport], None] | None = None) -> EvolutionResult:
    """Evolve organisms toward the mentor's scores.

    Each generation draws ``cfg.positions_per_generation`` training pairs without
    replacement (a single fixed draw when ``resample`` is False), scores every
    organism, reports, and breeds. The best organism of the last evaluated
    generation is finally scored on the whole test split.
    """
    n = cfg.positions_per_generation
    if len(dataset.train) < n:
        raise ValueError(f"training split has {len(dataset.train)} positions, need {n}")
    rng = np.random.default_rng(cfg.seed)
    population = [random_chromosome(rng) for _ in range(cfg.population_size)]

    train_pos = [p for p, _ in dataset.train]
    train_feats = feature_matrix(train_pos)
    train_targets = np.array([s.score_cp for _, s in dataset.train], dtype=np.int64)
    fixed = np.sort(rng.choice(len(dataset.train), n, replace=False))

    def errors_on(pop, idx):
        if individual_depth > 0:
            return _searched_errors(pop, [train_pos[i] for i in idx], train_targets[idx], individual_depth)
        bits = np.stack([c.array() for c in pop])
        return population_errors(decode_many(bits), train_feats[idx], train_targets[idx])

    reports: list[GenerationReport] = []
    errors = None
    for gen in range(cfg.generations):
        t0 = time.perf_counter()
        idx = np.sort(rng.choice(len(dataset.train), n, replace=False)) if resample else fixed
        errors = errors_on(population, idx)
        best = int(np.argmin(errors))
        report = GenerationReport(gen, float(errors[best]), float(errors.mean()), population[best])
        weights = compute_fitness(errors)
        population = evolve_generation(population, weights, cfg, rng)
        report = GenerationReport(report.generation, report.best_error_cp, report.mean_error_cp,
                                  report.best_chromosome, time.perf_counter() - t0)
        reports.append(report)
        if on_generation:
            on_generation(report)
        log.debug("generation %d best %.2f mean %.2f", gen, report.best_error_cp, report.mean_error_cp)

    if reports:
        best = Organism(reports[-1].best_chromosome, reports[-1].best_error_cp)
    else:
        errors = errors_on(population, fixed)
        i = int(np.argmin(errors))
        best = Organism(population[i], float(errors[i]))

    test_error = None
    if dataset.test:
        if individual_depth > 0:
            targets = np.array([s.score_cp for _, s in dataset.test], dtype=np.int64)
            test_error = float(_searched_errors([best.chromosome], [p for p, _ in dataset.test],
                                                targets, individual_depth)[0])
        else:
            test_error = organism_error(best.chromosome, dataset.test)
    return EvolutionResult(best, reports, test_error)


class ReportWriter:
    """Streams generation reports to disk.

    ``generations.csv`` holds the deterministic columns, ``timing.csv`` the wall
    time per generation, and ``best_chromosomes.txt`` the best genotype of each
    generation.
    """

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._gen = open(self.dir / "generations.csv", "w")
        self._timing = open(self.dir / "timing.csv", "w")
        self._best = open(self.dir / "best_chromosomes.txt", "w")
        self._gen.write("generation,best_error_cp,mean_error_cp\n")
        self._timing.write("generation,seconds\n")

    def __call__(self, r: GenerationReport) -> None:
        self._gen.write(r.csv_row() + "\n")
        self._timing.write(f"{r.generation},{r.wall_time:.6f}\n")
        self._best.write(f"{r.generation}\t{r.best_chromosome.to_text()}\n")

    def close(self):
        for fh in (self._gen, self._timing, self._best):
            fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
