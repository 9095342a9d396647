"""
Exhaustive ground truth: every candidate of every memory, every system
combination, and the global Pareto front.
"""
from memsys_evo.catalog import (eligible_compilers, feasible_codes,
                                feasible_combinations)
from memsys_evo.errors import CapacityExceeded, EmptyInput
from memsys_evo.estimator import MemoryParameterization
from memsys_evo.pareto import domination_matrix, skyline_dc

from collections import OrderedDict
from dataclasses import dataclass
import itertools
import logging
from typing import List

import numpy as np


logger = logging.getLogger(__name__)

DEFAULT_CANDIDATE_CAP = 100000
DEFAULT_COMBO_CAP = 10 ** 9
BLOCK_SIZE = 2 ** 16


@dataclass
class CandidateTable:
    """
    Every feasible candidate of every memory, with its objectives.

    candidates[j] lists the parameterizations of memory j, and
    objectives[j] is the matching array of shape (candidates, M).
    """
    candidates: List[List[MemoryParameterization]]
    objectives: List[np.ndarray]

    @property
    def sizes(self):
        return [len(c) for c in self.candidates]


def _compiler_candidates(comp, mem):
    slots = []
    governed = {}
    for rule in comp.combo_rules_at(mem.words, mem.bits):
        for name in rule.params:
            governed[name] = rule
    seen = set()
    for param in comp.params:
        rule = governed.get(param.name)
        if rule is None:
            slots.append(((param.name,),
                          [(c,) for c in feasible_codes(comp, mem,
                                                        param.name)]))
        elif id(rule) not in seen:
            seen.add(id(rule))
            slots.append((rule.params,
                          feasible_combinations(comp, mem, rule)))
    for choice in itertools.product(*(options for _, options in slots)):
        codes = {}
        for (names, _), combo in zip(slots, choice):
            codes.update(zip(names, combo))
        yield codes


def enumerate_candidates(catalog, system, backend,
                         candidate_cap=DEFAULT_CANDIDATE_CAP):
    """
    Lists and evaluates every feasible candidate of every memory.

    Candidates of the same compiler are evaluated in one batch across
    all memories.

    Args:
        catalog (Catalog): The design space.
        system (SystemSpec): The memories.
        backend: PPA estimator.
        candidate_cap (int): Most candidates allowed for one memory.

    Returns:
        CandidateTable: All candidates with their objectives.

    Raises:
        CapacityExceeded: A memory has more candidates than the cap.
        NoEligibleCompiler: A memory cannot be built.
    """
    candidates = []
    groups = OrderedDict()
    for j, mem in enumerate(system.memories):
        mem_candidates = []
        for comp in eligible_compilers(catalog, mem):
            for codes in _compiler_candidates(comp, mem):
                if len(mem_candidates) >= candidate_cap:
                    raise CapacityExceeded(
                            '>{}'.format(candidate_cap), candidate_cap,
                            'candidates for memory {!r}'.format(mem.id))
                groups.setdefault(comp.name, []).append(
                    (j, len(mem_candidates)))
                mem_candidates.append(MemoryParameterization(
                    memory_id=mem.id, compiler=comp.name, codes=codes))
        logger.info('Memory %s: %d candidates', mem.id, len(mem_candidates))
        candidates.append(mem_candidates)

    n_obj = len(catalog.objectives)
    objectives = [np.zeros((len(c), n_obj)) for c in candidates]
    for name, slots in groups.items():
        items = [(system.memories[j], candidates[j][k].codes)
                 for j, k in slots]
        values = backend.estimate(catalog.compiler(name), items)
        for (j, k), row in zip(slots, values):
            objectives[j][k] = row
    return CandidateTable(candidates=candidates, objectives=objectives)


def combination_count(table):
    """Number of system-level combinations of a candidate table."""
    count = 1
    for size in table.sizes:
        count *= size
    return count


def exhaustive_front(table, combo_cap=DEFAULT_COMBO_CAP, prune=True,
                     block_size=BLOCK_SIZE):
    """
    Finds the global Pareto front of a system by summing the objectives
    of every combination of candidates.

    Combinations are enumerated in blocks, last memory fastest, and each
    block's skyline is merged into a running skyline, so memory use does
    not grow with the number of combinations. With prune set, candidates
    dominated within their own memory are dropped first: any combination
    using one is dominated by the same combination using its dominator.
    Dominated candidates that differ from a dominator by no more than
    the rounding error of a sum are kept, since their combinations can
    tie with the dominator's once summed.

    Args:
        table (CandidateTable): Candidates of every memory.
        combo_cap (int): Most combinations the design space may have.
        prune (bool): Drop per-memory dominated candidates first.
        block_size (int): Combinations per block.

    Returns:
        [Tuple[Tuple[int], np.ndarray]]: Per front member, the candidate
            index of each memory and the summed objectives, ordered by
            candidate indices.

    Raises:
        CapacityExceeded: More combinations than combo_cap.
    """
    total = combination_count(table)
    if total > combo_cap:
        raise CapacityExceeded(total, combo_cap)
    if prune:
        keep = pruned_candidates(table.objectives)
    else:
        keep = [np.arange(len(obj)) for obj in table.objectives]
    shape = tuple(len(k) for k in keep)
    count = 1
    for size in shape:
        count *= size
    logger.info('Exhaustive search over %d of %d combinations', count, total)
    objectives = [obj[k] for obj, k in zip(table.objectives, keep)]

    sky_flat = np.empty(0, dtype=np.int64)
    sky_obj = np.empty((0, table.objectives[0].shape[1]))
    for start in range(0, count, block_size):
        flat = np.arange(start, min(start + block_size, count),
                         dtype=np.int64)
        digits = np.unravel_index(flat, shape)
        sums = np.zeros((flat.size, sky_obj.shape[1]))
        for obj, idx in zip(objectives, digits):
            sums = sums + obj[idx]
        block = skyline_dc(sums)
        merged_flat = np.concatenate([sky_flat, flat[block]])
        merged_obj = np.concatenate([sky_obj, sums[block]])
        survivors = skyline_dc(merged_obj)
        sky_flat = merged_flat[survivors]
        sky_obj = merged_obj[survivors]

    digits = np.unravel_index(sky_flat, shape)
    members = []
    for pos in range(sky_flat.size):
        indices = tuple(int(k[d[pos]]) for k, d in zip(keep, digits))
        members.append((indices, sky_obj[pos]))
    members.sort(key=lambda member: member[0])
    return members


def pruned_candidates(objectives):
    """
    Per memory, the candidates a system front member can use: the
    memory's own skyline, plus dominated candidates within summation
    rounding of a dominator.

    Args:
        objectives ([np.ndarray]): Candidate objectives per memory.

    Returns:
        [np.ndarray]: Ascending candidate indices per memory.
    """
    # A floating-point sum of n terms is off by at most n * eps times
    # the sum of their magnitudes.
    scale = sum(np.abs(obj).max(axis=0) for obj in objectives)
    tol = 4 * len(objectives) * np.finfo(float).eps * scale
    keep = []
    for obj in objectives:
        sky = skyline_dc(obj)
        dom = domination_matrix(obj[sky], obj)
        near = np.all(obj[None, :, :] - obj[sky][:, None, :] <= tol, axis=2)
        tied = np.flatnonzero(np.any(dom & near, axis=0))
        keep.append(np.union1d(sky, tied))
    return keep


def front_parameterizations(table, front):
    """Front members as (parameterization, objectives) pairs."""
    return [(tuple(table.candidates[j][k] for j, k in enumerate(indices)),
             values) for indices, values in front]


def instance_fronts(table):
    """
    Each memory's own Pareto front.

    Returns:
        [np.ndarray]: Per memory, ascending candidate indices.
    """
    return [skyline_dc(obj) for obj in table.objectives]


def instance_choice(table):
    """
    The balanced choice made when every memory is optimized alone.

    For each memory, its candidates' objectives are scaled to [0, 1]
    by their minima and maxima, and the Pareto-optimal candidate with
    the smallest worst scaled objective is chosen, ties to the lower
    candidate index.

    Returns:
        Tuple[Tuple[int], np.ndarray]: The chosen candidate index per
            memory and the summed system objectives.

    Raises:
        EmptyInput: A memory has no candidates.
    """
    chosen = []
    total = np.zeros(table.objectives[0].shape[1])
    for obj, front in zip(table.objectives, instance_fronts(table)):
        if obj.shape[0] == 0:
            raise EmptyInput('A memory has no candidates')
        lo = obj.min(axis=0)
        span = obj.max(axis=0) - lo
        span[span == 0.0] = 1.0
        worst = ((obj[front] - lo) / span).max(axis=1)
        k = int(front[int(np.argmin(worst))])
        chosen.append(k)
        total = total + obj[k]
    return tuple(chosen), total
