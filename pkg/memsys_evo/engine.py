from memsys_evo.errors import ArityMismatch, PreconditionViolation
from memsys_evo.estimator import batch_evaluate
from memsys_evo.genome import build_layout, init_population, repair
from memsys_evo.pareto import nsga2_select, skyline_dc

from dataclasses import dataclass, field
import logging
import time
from typing import List, Tuple

import numpy as np


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeConfig:
    """
    Differential evolution settings. The defaults are 20 individuals,
    50 generations, CR = 0.9 and F = 0.8.
    """
    pop_size: int = 20
    generations: int = 50
    f: float = 0.8
    cr: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 4:
            raise PreconditionViolation(
                    'Population size must be at least 4, got {}'.format(
                        self.pop_size))
        if self.generations < 1:
            raise PreconditionViolation(
                    'Number of generations must be at least 1, got {}'.format(
                        self.generations))
        if not self.f > 0.0:
            raise PreconditionViolation(
                    'Differential weight F must be positive, got {}'.format(
                        self.f))
        if not 0.0 <= self.cr <= 1.0:
            raise PreconditionViolation(
                    'Crossover probability CR must be in [0, 1], got {}'
                    .format(self.cr))

    def to_dict(self):
        return {'pop_size': self.pop_size, 'generations': self.generations,
                'f': self.f, 'cr': self.cr, 'seed': self.seed}


@dataclass
class Population:
    """Genomes as evolved, and the objectives of their repaired forms."""
    genomes: np.ndarray
    objectives: np.ndarray


@dataclass
class RunResult:
    final_front: List[Tuple[tuple, np.ndarray]]
    history: List[np.ndarray]
    evaluations_used: int
    wall_time: float
    config: DeConfig = None
    objectives: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def pool_evaluations(self):
        """
        Objective vectors compared across the run when parents are
        counted again in every selection pool of 2N.
        """
        n = self.config.pop_size
        return n + 2 * n * self.config.generations


def mutate_rand1(population, target_index, f, rng):
    """
    DE/rand/1 mutation.

    Args:
        population (np.ndarray): Genomes, shape (N, L), N at least 4.
        target_index (int): The parent the mutant is made for.
        f (float): Differential weight.
        rng (np.random.Generator): Source of randomness.

    Returns:
        np.ndarray: x[r1] + f * (x[r2] - x[r3]) for three distinct
            random individuals other than the target.

    Raises:
        PreconditionViolation: Fewer than 4 individuals.
    """
    n = population.shape[0]
    if n < 4:
        raise PreconditionViolation(
                'DE/rand/1 needs at least 4 individuals, got {}'.format(n))
    others = np.delete(np.arange(n), target_index)
    r1, r2, r3 = rng.choice(others, size=3, replace=False)
    return population[r1] + f * (population[r2] - population[r3])


def crossover_bin(parent, mutant, cr, rng):
    """
    Binomial crossover.

    Each gene comes from the mutant with probability cr, and one
    randomly chosen gene always does.

    Raises:
        ArityMismatch: parent and mutant differ in length.
    """
    if parent.shape != mutant.shape:
        raise ArityMismatch('Parent has {} genes, mutant {}'.format(
            parent.size, mutant.size))
    length = parent.size
    j_rand = rng.integers(length)
    take = rng.random(length) < cr
    take[j_rand] = True
    return np.where(take, mutant, parent)


def evaluate_genomes(layout, catalog, system, genomes, backend, workers=None):
    """Repairs genomes and evaluates their system objectives in one batch
    per compiler. The genomes themselves are left unchanged."""
    parameterizations = [repair(layout, g) for g in genomes]
    return batch_evaluate(catalog, system, parameterizations, backend,
                          workers=workers)


def evolve_generation(state, cfg, layout, catalog, system, backend, rng,
                      workers=None):
    """
    Runs one generation: one offspring per parent, then NSGA-II
    selection over parents and offspring.

    Only the offspring are evaluated; parents keep their cached
    objectives. Survivors keep their unrepaired genomes.

    Args:
        state (Population): Current parents with objectives.
        cfg (DeConfig): Settings.
        layout (GenomeLayout): Genome layout of the system.
        catalog (Catalog): The design space.
        system (SystemSpec): The memories.
        backend: PPA estimator.
        rng (np.random.Generator): Run's random stream.

    Returns:
        Population: The selected survivors.
    """
    n = state.genomes.shape[0]
    offspring = np.empty_like(state.genomes)
    for i in range(n):
        mutant = mutate_rand1(state.genomes, i, cfg.f, rng)
        offspring[i] = crossover_bin(state.genomes[i], mutant, cfg.cr, rng)
    offspring_obj = evaluate_genomes(layout, catalog, system, offspring,
                                     backend, workers)

    pool_genomes = np.concatenate([state.genomes, offspring])
    pool_obj = np.concatenate([state.objectives, offspring_obj])
    chosen = nsga2_select(pool_obj, n)
    return Population(genomes=pool_genomes[chosen],
                      objectives=pool_obj[chosen])


def run_optimization(catalog, system, cfg, backend, workers=None):
    """
    Optimizes the parameterization of every memory of a system.

    Args:
        catalog (Catalog): The design space.
        system (SystemSpec): The memories to optimize jointly.
        cfg (DeConfig): Settings, including the seed.
        backend: PPA estimator.
        workers (int): Compiler batches evaluated concurrently.

    Returns:
        RunResult: The final Pareto front with repaired
            parameterizations, and the objectives of every generation's
            population.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    layout = build_layout(catalog, system)
    genomes = init_population(layout, cfg.pop_size, rng)
    state = Population(genomes=genomes,
                       objectives=evaluate_genomes(layout, catalog, system,
                                                   genomes, backend, workers))
    history = [state.objectives.copy()]
    evaluations = cfg.pop_size

    for gen in range(1, cfg.generations + 1):
        state = evolve_generation(state, cfg, layout, catalog, system,
                                  backend, rng, workers)
        evaluations += cfg.pop_size
        history.append(state.objectives.copy())
        if gen % 10 == 0:
            logger.info('Seed %d generation %d/%d: best %s', cfg.seed, gen,
                        cfg.generations,
                        np.array2string(state.objectives.min(axis=0)))

    front_idx = skyline_dc(state.objectives)
    final_front = [(repair(layout, state.genomes[i]),
                    state.objectives[i].copy()) for i in front_idx]
    wall = time.perf_counter() - start
    logger.info('Seed %d finished: %d front members, %d evaluations in'
                ' %.1f s', cfg.seed, len(final_front), evaluations, wall)
    return RunResult(final_front=final_front, history=history,
                     evaluations_used=evaluations, wall_time=wall,
                     config=cfg, objectives=tuple(catalog.objectives))
