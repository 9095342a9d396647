import numpy as np
import pytest

from memsys_evo import (ArityMismatch, NoEligibleCompiler,
                        PreconditionViolation)
from memsys_evo.baseline import enumerate_candidates
from memsys_evo.catalog import (MemoryRequirement, SystemSpec,
                                catalog_from_dict)
from memsys_evo.estimator import SurrogateBackend, check_feasible
from memsys_evo.genome import build_layout, encode, init_population, repair


def _surrogate(params):
    return {obj: {'base': [1.0, 0.0, 0.0, 0.0],
                  'multipliers': {name: [1.0] * k for name, k in params}}
            for obj in ('area', 'power')}


@pytest.fixture()
def ruled():
    """Two compilers for the same memories; the first has a choice rule
    and a combo rule, the second a single parameter."""
    params = [('vt', 3), ('colmux', 2), ('banks', 3)]
    catalog = catalog_from_dict({
        'objectives': ['area', 'power'],
        'compilers': [{
            'name': 'ruled', 'kind': 'SRAM', 'ports': 1,
            'words_range': [16, 4096], 'bits_range': [4, 128],
            'params': [{'name': n, 'codes': [str(c) for c in range(k)]}
                       for n, k in params],
            'choice_rules': [
                {'when': {'words': [1024, 4096], 'bits': [4, 128]},
                 'param': 'vt', 'allowed': [1, 2]}],
            'combo_rules': [
                {'when': {'words': [16, 4096], 'bits': [4, 128]},
                 'params': ['colmux', 'banks'],
                 'allowed': [[1, 0], [0, 2], [0, 1]]}],
            'surrogate': _surrogate(params)}, {
            'name': 'simple', 'kind': 'SRAM', 'ports': 1,
            'words_range': [16, 4096], 'bits_range': [4, 128],
            'params': [{'name': 'opt', 'codes': ['a', 'b', 'c', 'd']}],
            'surrogate': _surrogate([('opt', 4)])}]})
    system = SystemSpec(memories=(
        MemoryRequirement(id='small', words=256, bits=32, ports=1,
                          kind='SRAM'),
        MemoryRequirement(id='large', words=2048, bits=32, ports=1,
                          kind='SRAM')))
    return catalog, system


def test_layout_toy(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    assert layout.total_len == 4
    assert [b.offset for b in layout.blocks] == [0, 2]
    assert [b.width for b in layout.blocks] == [2, 2]
    assert layout.blocks[0].eligible == ('toy_1p',)
    assert layout.blocks[1].gene_codes == (1, 3)


def test_layout_width_is_widest_compiler(ruled):
    layout = build_layout(*ruled)
    assert [b.width for b in layout.blocks] == [4, 4]
    assert layout.total_len == 8
    assert layout.blocks[0].eligible == ('ruled', 'simple')
    assert layout.blocks[0].gene_codes == (2, 4, 2, 3)


def test_layout_no_eligible_compiler(toy_catalog):
    system = SystemSpec(memories=(MemoryRequirement(
        id='rom', words=256, bits=32, ports=1, kind='ROM'),))
    with pytest.raises(NoEligibleCompiler):
        build_layout(toy_catalog, system)


def test_init_population(ruled):
    layout = build_layout(*ruled)
    pop = init_population(layout, 500, np.random.default_rng(0))
    assert pop.shape == (500, 8)
    upper = np.array([2, 4, 2, 3, 2, 4, 2, 3]) - 0.5
    assert np.all(pop >= -0.5)
    assert np.all(pop < upper)
    # every compiler gets picked
    assert set(np.rint(pop[:, 0]).astype(int)) == {0, 1}


def test_init_population_too_small(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    with pytest.raises(PreconditionViolation):
        init_population(layout, 3, np.random.default_rng(0))


def test_repair_toy(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    mem1, mem2 = repair(layout, np.array([0.2, 1.4, -3.0, 2.6]))
    assert (mem1.memory_id, mem1.compiler, mem1.codes) == (
            'mem1', 'toy_1p', {'option': 1})
    assert (mem2.memory_id, mem2.compiler, mem2.codes) == (
            'mem2', 'toy_2p', {'option': 2})


def test_repair_clamps_far_values(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    mem1, mem2 = repair(layout, np.array([40.0, 10.0, -7.0, -7.0]))
    assert mem1.codes == {'option': 2}
    assert mem2.codes == {'option': 0}


def test_repair_ties_go_low(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    mem1, mem2 = repair(layout, np.array([0.0, 0.5, 0.0, 1.5]))
    assert mem1.codes == {'option': 0}
    assert mem2.codes == {'option': 1}


def test_repair_rules(ruled):
    layout = build_layout(*ruled)
    genome = np.array([0.4, 0.0, 0.5, 0.5,
                       0.2, -1.0, 0.9, 0.1])
    small, large = repair(layout, genome)
    assert small.compiler == 'ruled'
    # (0, 1) and (1, 0) are equally near; the lower tuple wins
    assert small.codes == {'vt': 0, 'colmux': 0, 'banks': 1}
    # code 0 of vt is not allowed for large memories
    assert large.codes == {'vt': 1, 'colmux': 1, 'banks': 0}


def test_repair_compiler_gene(ruled):
    layout = build_layout(*ruled)
    small, large = repair(layout, np.array([1.6, 2.2, 9.0, 9.0,
                                            -5.0, 0.0, 0.0, 0.0]))
    assert small.compiler == 'simple'
    assert small.codes == {'opt': 2}
    assert large.compiler == 'ruled'


def test_repair_leaves_genome_alone(ruled):
    layout = build_layout(*ruled)
    genome = np.array([0.4, 0.7, 0.5, 0.5, 0.2, -1.0, 0.9, 0.1])
    before = genome.copy()
    repair(layout, genome)
    assert np.array_equal(genome, before)


def test_repair_wrong_length(toy_catalog, toy_system):
    layout = build_layout(toy_catalog, toy_system)
    with pytest.raises(ArityMismatch):
        repair(layout, np.zeros(5))


def test_encode_repairs_to_itself(ruled):
    catalog, system = ruled
    layout = build_layout(catalog, system)
    genome = np.array([0.0, 2.0, 1.0, 0.0, 1.0, 3.0, 0.0, 0.0])
    parameterization = repair(layout, genome)
    assert repair(layout, encode(layout, catalog,
                                 parameterization)) == parameterization


def test_repair_fuzz(multi_compiler):
    catalog, system = multi_compiler
    layout = build_layout(catalog, system)
    rng = np.random.default_rng(23)
    scales = np.repeat([0.5, 3.0, 50.0, 1e6], 2500)
    genomes = rng.normal(0.0, 1.0, size=(scales.size, layout.total_len))
    genomes *= scales[:, None]
    assert genomes.shape[0] == 10000
    used = set()
    for genome in genomes:
        parameterization = repair(layout, genome)
        for block, mem, mp in zip(layout.blocks, system.memories,
                                  parameterization):
            assert mp.memory_id == mem.id
            assert mp.compiler in block.eligible
            check_feasible(catalog.compiler(mp.compiler), mem, mp.codes)
            used.add(mp.compiler)
    assert all(set(block.eligible) <= used for block in layout.blocks)


def test_encode_repair_fixed_point(multi_compiler):
    catalog, system = multi_compiler
    layout = build_layout(catalog, system)
    table = enumerate_candidates(catalog, system, SurrogateBackend(catalog))
    rng = np.random.default_rng(29)
    for _ in range(1000):
        parameterization = tuple(
                candidates[int(rng.integers(len(candidates)))]
                for candidates in table.candidates)
        genome = encode(layout, catalog, parameterization)
        assert repair(layout, genome) == parameterization


def test_repair_is_local(multi_compiler):
    catalog, system = multi_compiler
    layout = build_layout(catalog, system)
    rng = np.random.default_rng(31)
    genomes = init_population(layout, 200, rng)
    for genome in genomes:
        before = repair(layout, genome)
        block = layout.blocks[int(rng.integers(len(layout.blocks)))]
        changed = genome.copy()
        changed[block.offset:block.offset + block.width] += rng.normal(
                0.0, 2.0, size=block.width)
        after = repair(layout, changed)
        for other, old, new in zip(layout.blocks, before, after):
            if other is not block:
                assert old == new
