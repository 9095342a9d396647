"""
Synthetic design spaces for testing and benchmarking.

The generated catalogs mimic real compiler ranges: small and large
memories get different combinations of column multiplexing and banking,
large memories lose their fastest periphery option, and every parameter
trades objective 0 against objective 1. Column multiplexing and banking
dominate both objectives; the other options move them by a couple of
percent at most.
"""
from memsys_evo.catalog import (MEMORY_KINDS, Catalog, ChoiceRule, ComboRule,
                                CompilerSpec, MemoryRequirement,
                                ParameterSpec, Region, SurrogateModel,
                                SystemSpec, validate_catalog, validate_system)
from memsys_evo.errors import PreconditionViolation

import logging
import math

import numpy as np


logger = logging.getLogger(__name__)

OBJECTIVES = ('area', 'power')

# Each (kind, ports) pair is one class of compilers; a memory is built
# by the compilers of its class only.
_CLASSES = (('SRAM', 1), ('SRAM', 2), ('RF', 1), ('RF', 2), ('ROM', 1),
            ('RF', 3))

_WORDS_RANGE = (16, 16384)
_BITS_RANGE = (4, 256)
_LARGE_WORDS = 1024
_MAX_PARAMS = 10

# Log-scale strength of a parameter's effect on each objective, for the
# column-mux and banking pair and for the other options.
_STRONG = (0.2, 0.8)
_WEAK = (0.005, 0.02)


def generate_synthetic_system(seed, n_memories, n_compilers,
                              candidates_per_memory_target):
    """
    Generates a random but reproducible catalog and system.

    Each memory ends up with between a third of and twice the target
    number of feasible candidates, summed over its eligible compilers.
    A class of compilers never holds more than twice the target's worth
    of compilers; if there are more compilers than that, they are spread
    over more (kind, ports) classes.

    Args:
        seed (int): Seed for the random generator.
        n_memories (int): Number of memories in the system.
        n_compilers (int): Number of compilers in the catalog.
        candidates_per_memory_target (int): Desired number of candidate
            parameterizations per memory.

    Returns:
        Tuple[Catalog, SystemSpec]: The design space and the system.

    Raises:
        PreconditionViolation: A count is less than 1.
    """
    for name, value in (('n_memories', n_memories),
                        ('n_compilers', n_compilers),
                        ('candidates_per_memory_target',
                         candidates_per_memory_target)):
        if value < 1:
            raise PreconditionViolation('{} must be at least 1'.format(name))

    rng = np.random.default_rng(seed)
    per_class = max(1, int(2 * candidates_per_memory_target))
    n_classes = min(n_compilers, max(len(_CLASSES),
                                     -(-n_compilers // per_class)))
    classes = memory_classes(n_classes)
    class_sizes = [len(range(c, n_compilers, n_classes))
                   for c in range(n_classes)]

    compilers = []
    for i in range(n_compilers):
        cls = i % n_classes
        target = candidates_per_memory_target / class_sizes[cls]
        compilers.append(_make_compiler(rng, 'c{}'.format(i), classes[cls],
                                        target))

    memories = []
    for i in range(n_memories):
        kind, ports = classes[int(rng.integers(n_classes))]
        memories.append(MemoryRequirement(
            id='m{}'.format(i),
            words=int(2 ** rng.integers(6, 14)),
            bits=int(rng.choice([8, 16, 24, 32, 39, 64, 72, 128])),
            ports=ports, kind=kind))

    catalog = Catalog(objectives=OBJECTIVES, compilers=tuple(compilers))
    system = SystemSpec(memories=tuple(memories))
    validate_catalog(catalog)
    validate_system(system)
    logger.debug('Generated %d compilers in %d classes and %d memories from'
                 ' seed %d', n_compilers, n_classes, n_memories, seed)
    return catalog, system


def memory_classes(n):
    """
    The first n (kind, ports) classes: the common ones, then every kind
    with more and more ports.
    """
    classes = list(_CLASSES)
    ports = 2
    while len(classes) < n:
        for kind in MEMORY_KINDS:
            if (kind, ports) not in classes:
                classes.append((kind, ports))
        ports += 1
    return classes[:n]


def _make_compiler(rng, name, cls, target):
    kind, ports = cls
    small = Region(words=(_WORDS_RANGE[0], _LARGE_WORDS - 1),
                   bits=_BITS_RANGE)
    large = Region(words=(_LARGE_WORDS, _WORDS_RANGE[1]), bits=_BITS_RANGE)

    # The first two parameters form a combo group whose allowed set has
    # the same size for small and large memories.
    k0, k1 = (int(k) for k in rng.integers(2, 5, size=2))
    full = [(a, b) for a in range(k0) for b in range(k1)]
    n_allowed = int(rng.integers(math.ceil(len(full) / 2), len(full) + 1))
    n_allowed = max(1, min(n_allowed, int(2 * target)))
    combo_rules = []
    for region in (small, large):
        picks = sorted(rng.choice(len(full), size=n_allowed, replace=False))
        combo_rules.append(ComboRule(
            when=region, params=('colmux', 'banks'),
            allowed=tuple(full[p] for p in picks)))

    counts = [k0, k1]
    effective = n_allowed
    while len(counts) < _MAX_PARAMS and effective * 2 <= target:
        k = int(rng.integers(2, 5))
        counts.append(k)
        effective *= k

    names = ['colmux', 'banks'] + ['p{}'.format(j) for j in
                                   range(2, len(counts))]
    params = tuple(ParameterSpec(pname, tuple('{}{}'.format(pname, c)
                                              for c in range(k)))
                   for pname, k in zip(names, counts))

    choice_rules = []
    for pname, k in zip(names[2:], counts[2:]):
        if k >= 3:
            choice_rules.append(ChoiceRule(when=large, param=pname,
                                           allowed=tuple(range(1, k))))
            break

    return CompilerSpec(
            name=name, kind=kind, ports=ports, words_range=_WORDS_RANGE,
            bits_range=_BITS_RANGE, params=params,
            choice_rules=tuple(choice_rules), combo_rules=tuple(combo_rules),
            surrogate=_make_surrogate(rng, params))


def _make_surrogate(rng, params):
    # Compilers differ in PPA focus: a dense one is small but leaky.
    focus = float(rng.uniform(-0.5, 0.5))
    base = {
        'area': (float(rng.uniform(0.5, 2.0)),
                 float(rng.uniform(0.5, 1.5) * 1e-3 * math.exp(-focus)),
                 float(rng.uniform(0.0, 1e-3)),
                 float(rng.uniform(0.0, 1e-2))),
        'power': (float(rng.uniform(0.05, 0.2)),
                  float(rng.uniform(0.5, 1.5) * 1e-5 * math.exp(focus)),
                  float(rng.uniform(0.0, 1e-5)),
                  float(rng.uniform(0.0, 1e-4))),
        }
    multipliers = {'area': {}, 'power': {}}
    for j, param in enumerate(params):
        k = len(param.labels)
        # Strictly increasing positions so that no two codes of a
        # parameter tie; moving up helps one objective and hurts the
        # other.
        steps = np.cumsum(rng.uniform(0.2, 1.0, size=k))
        pos = (steps - steps.mean()) / steps[-1]
        if rng.random() < 0.5:
            pos = pos[::-1]
        lo, hi = _STRONG if j < 2 else _WEAK
        s_area, s_power = rng.uniform(lo, hi, size=2)
        multipliers['area'][param.name] = tuple(
            float(v) for v in np.exp(s_area * pos))
        multipliers['power'][param.name] = tuple(
            float(v) for v in np.exp(-s_power * pos))
    return SurrogateModel(base=base, multipliers=multipliers)
