"""
Real-valued encoding of a full system parameterization.

A genome is the concatenation of one fixed-width block per memory. Gene
0 of a block chooses the compiler; the remaining genes hold the
architectural parameters of the chosen compiler in its declaration
order. Genomes are never constrained: repair() maps any finite vector
to the nearest feasible parameterization, and the result is only used
to evaluate objectives.
"""
from memsys_evo.catalog import (eligible_compilers, feasible_codes,
                                feasible_combinations)
from memsys_evo.errors import ArityMismatch, PreconditionViolation
from memsys_evo.estimator import MemoryParameterization

from dataclasses import dataclass
import logging
from typing import Tuple

import numpy as np


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompilerPlan:
    """
    How one compiler reads a memory's block.

    free: (parameter name, gene position, feasible codes) for every
        parameter not in an applicable combo rule.
    groups: (parameter names, gene positions, allowed tuples sorted
        lexicographically as an array) per applicable combo rule.
    """
    compiler: str
    free: Tuple[Tuple[str, int, np.ndarray], ...]
    groups: Tuple[Tuple[Tuple[str, ...], Tuple[int, ...], np.ndarray], ...]


@dataclass(frozen=True)
class MemoryBlock:
    memory_id: str
    offset: int
    width: int
    eligible: Tuple[str, ...]
    plans: Tuple[CompilerPlan, ...]
    gene_codes: Tuple[int, ...]


@dataclass(frozen=True)
class GenomeLayout:
    blocks: Tuple[MemoryBlock, ...]
    total_len: int


def build_layout(catalog, system):
    """
    Lays out the genome for a system.

    Args:
        catalog (Catalog): The design space.
        system (SystemSpec): The memories, in genome order.

    Returns:
        GenomeLayout: One block per memory, each one gene wider than
            the largest parameter count among its eligible compilers.

    Raises:
        NoEligibleCompiler: Some memory cannot be built.
    """
    blocks = []
    offset = 0
    for mem in system.memories:
        eligible = eligible_compilers(catalog, mem)
        width = 1 + max(len(comp.params) for comp in eligible)
        gene_codes = [len(eligible)] + [1] * (width - 1)
        plans = []
        for comp in eligible:
            plans.append(_plan(comp, mem))
            for k, param in enumerate(comp.params):
                gene_codes[k + 1] = max(gene_codes[k + 1], len(param.labels))
        blocks.append(MemoryBlock(memory_id=mem.id, offset=offset,
                                  width=width,
                                  eligible=tuple(c.name for c in eligible),
                                  plans=tuple(plans),
                                  gene_codes=tuple(gene_codes)))
        offset += width
    logger.debug('Genome layout: %d memories, %d genes', len(blocks), offset)
    return GenomeLayout(blocks=tuple(blocks), total_len=offset)


def _plan(comp, mem):
    groups = []
    governed = set()
    for rule in comp.combo_rules_at(mem.words, mem.bits):
        allowed = np.array(feasible_combinations(comp, mem, rule), dtype=float)
        positions = tuple(1 + comp.param_index[name] for name in rule.params)
        groups.append((rule.params, positions, allowed))
        governed.update(rule.params)
    free = tuple((param.name, 1 + k,
                  np.array(feasible_codes(comp, mem, param.name), dtype=int))
                 for k, param in enumerate(comp.params)
                 if param.name not in governed)
    return CompilerPlan(compiler=comp.name, free=free, groups=tuple(groups))


def init_population(layout, pop_size, rng):
    """
    Draws a random initial population.

    Every gene is uniform on [-0.5, K - 0.5), where K is the largest
    number of codes that gene can address, so that each code is equally
    likely after rounding.

    Args:
        layout (GenomeLayout): The genome layout.
        pop_size (int): Number of individuals, at least 4.
        rng (np.random.Generator): Source of randomness.

    Returns:
        np.ndarray: Genomes, shape (pop_size, total_len).

    Raises:
        PreconditionViolation: pop_size is less than 4.
    """
    if pop_size < 4:
        raise PreconditionViolation(
                'Population size must be at least 4, got {}'.format(pop_size))
    upper = np.concatenate([np.array(block.gene_codes, dtype=float)
                            for block in layout.blocks]) - 0.5
    return rng.uniform(-0.5, upper, size=(pop_size, layout.total_len))


def _nearest(values, target):
    # argmin returns the first minimum, so ties go to the lower value.
    return values[int(np.argmin(np.abs(values - target)))]


def repair(layout, genome):
    """
    Maps a real-valued genome to the nearest feasible parameterization.

    Per memory, the compiler gene is rounded to the nearest eligible
    compiler, each free parameter gene to its nearest feasible code,
    and each combo group to the allowed tuple at the smallest Euclidean
    distance. Ties go to the lower compiler, code or tuple.

    Args:
        layout (GenomeLayout): The genome layout.
        genome (np.ndarray): A finite vector of length total_len.

    Returns:
        Tuple[MemoryParameterization]: One per memory, in system order.

    Raises:
        ArityMismatch: The genome has the wrong length.
    """
    genome = np.asarray(genome, dtype=float)
    if genome.shape != (layout.total_len,):
        raise ArityMismatch('Genome has {} genes, layout needs {}'.format(
            genome.size, layout.total_len))
    return tuple(_repair_block(block, genome[block.offset:block.offset +
                                             block.width])
                 for block in layout.blocks)


def _repair_block(block, genes):
    choice = int(_nearest(np.arange(len(block.eligible)), genes[0]))
    plan = block.plans[choice]
    codes = {}
    for name, pos, feasible in plan.free:
        codes[name] = int(_nearest(feasible, genes[pos]))
    for names, positions, allowed in plan.groups:
        target = genes[list(positions)]
        dist = np.sum((allowed - target) ** 2, axis=1)
        best = allowed[int(np.argmin(dist))]
        for name, code in zip(names, best):
            codes[name] = int(code)
    return MemoryParameterization(memory_id=block.memory_id,
                                  compiler=plan.compiler, codes=codes)


def encode(layout, catalog, parameterization):
    """
    Writes a feasible parameterization into a genome: the compiler's
    index at gene 0 of each block, codes at their parameter positions,
    zeros elsewhere. Repairing the result gives the parameterization
    back.

    Returns:
        np.ndarray: A genome of length total_len.
    """
    genome = np.zeros(layout.total_len)
    for block, mp in zip(layout.blocks, parameterization):
        comp = catalog.compiler(mp.compiler)
        genome[block.offset] = block.eligible.index(mp.compiler)
        for name, code in mp.codes.items():
            genome[block.offset + 1 + comp.param_index[name]] = code
    return genome
