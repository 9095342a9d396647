import numpy as np
import pytest
import sys

from memsys_evo import (ArityMismatchResponse, BackendExited,
                        EstimatorTimeout, InfeasibleParameterization,
                        ProtocolError)
from memsys_evo.catalog import (MemoryRequirement, SystemSpec,
                                catalog_from_dict, catalog_to_dict,
                                dump_json)
from memsys_evo.estimator import (ExecBackend, MemoryParameterization,
                                  SurrogateBackend, batch_evaluate,
                                  make_request, parse_response,
                                  surrogate_eval, worker_count)
from memsys_evo.genome import build_layout, init_population, repair


def _mp(mem, comp, code):
    return MemoryParameterization(memory_id=mem, compiler=comp,
                                  codes={'option': code})


def test_surrogate_eval_toy(toy_catalog, toy_system):
    mem1, mem2 = toy_system.memories
    comp1 = toy_catalog.compiler('toy_1p')
    comp2 = toy_catalog.compiler('toy_2p')
    assert surrogate_eval(toy_catalog, comp1, mem1,
                          {'option': 1}) == pytest.approx([1.9, 0.01])
    assert surrogate_eval(toy_catalog, comp2, mem2,
                          {'option': 2}) == pytest.approx([2.5, 1.5])


def test_surrogate_eval_formula():
    catalog = catalog_from_dict({
        'objectives': ['area'],
        'compilers': [{
            'name': 'c', 'kind': 'RF', 'ports': 1,
            'words_range': [1, 100], 'bits_range': [1, 100],
            'params': [{'name': 'a', 'codes': ['x', 'y']},
                       {'name': 'b', 'codes': ['x', 'y']}],
            'surrogate': {'area': {'base': [2.0, 0.5, 0.25, 1.0],
                                   'multipliers': {'a': [1.0, 2.0],
                                                   'b': [3.0, 0.5]}}}}]})
    mem = MemoryRequirement(id='m', words=4, bits=8, ports=1, kind='RF')
    values = surrogate_eval(catalog, catalog.compilers[0], mem,
                            {'a': 1, 'b': 0})
    assert values == pytest.approx([162.0])


def test_surrogate_eval_infeasible(toy_catalog, toy_system):
    mem1, mem2 = toy_system.memories
    comp1 = toy_catalog.compiler('toy_1p')
    with pytest.raises(InfeasibleParameterization):
        surrogate_eval(toy_catalog, comp1, mem1, {'option': 3})
    with pytest.raises(InfeasibleParameterization):
        surrogate_eval(toy_catalog, comp1, mem1, {})
    with pytest.raises(InfeasibleParameterization):
        surrogate_eval(toy_catalog, comp1, mem2, {'option': 0})


def test_batch_evaluate_one_call_per_compiler(toy_catalog, toy_system, spy):
    parameterizations = [
            (_mp('mem1', 'toy_1p', a), _mp('mem2', 'toy_2p', b))
            for a, b in [(0, 0), (0, 1), (1, 1), (2, 0), (1, 2)]]
    values = batch_evaluate(toy_catalog, toy_system, parameterizations, spy)
    assert spy.calls == [('toy_1p', 5), ('toy_2p', 5)]
    assert values.shape == (5, 2)
    assert values[0] == pytest.approx([3.0, 3.0])
    assert values[2] == pytest.approx([2.9, 2.51])
    assert values[4] == pytest.approx([4.4, 1.51])


def test_batch_evaluate_matches_itemwise(synthetic):
    catalog, system = synthetic
    layout = build_layout(catalog, system)
    genomes = init_population(layout, 12, np.random.default_rng(1))
    parameterizations = [repair(layout, g) for g in genomes]
    backend = SurrogateBackend(catalog)

    batched = batch_evaluate(catalog, system, parameterizations, backend)
    for row, parameterization in zip(batched, parameterizations):
        total = np.zeros(len(catalog.objectives))
        for mem, mp in zip(system.memories, parameterization):
            total = total + surrogate_eval(
                    catalog, catalog.compiler(mp.compiler), mem, mp.codes)
        assert np.array_equal(row, total)


def test_batch_evaluate_groups_across_memories(toy_catalog, toy_system, spy):
    mem3 = MemoryRequirement(id='mem3', words=128, bits=16, ports=1,
                             kind='SRAM')
    system = SystemSpec(memories=toy_system.memories + (mem3,))
    parameterizations = [
            (_mp('mem1', 'toy_1p', a), _mp('mem2', 'toy_2p', b),
             _mp('mem3', 'toy_1p', c))
            for a, b, c in [(0, 0, 0), (1, 2, 0), (2, 1, 1), (0, 0, 2)]]
    values = batch_evaluate(toy_catalog, system, parameterizations, spy)
    assert spy.calls == [('toy_1p', 8), ('toy_2p', 4)]
    assert values[0] == pytest.approx([4.0, 4.0])
    assert values[3] == pytest.approx([3.1, 4.9])


def test_batch_evaluate_permutation(multi_compiler):
    catalog, system = multi_compiler
    layout = build_layout(catalog, system)
    genomes = init_population(layout, 30, np.random.default_rng(4))
    parameterizations = [repair(layout, g) for g in genomes]
    backend = SurrogateBackend(catalog)
    values = batch_evaluate(catalog, system, parameterizations, backend)
    rng = np.random.default_rng(5)
    for _ in range(5):
        order = rng.permutation(len(parameterizations))
        shuffled = batch_evaluate(catalog, system,
                                  [parameterizations[k] for k in order],
                                  backend)
        assert np.array_equal(shuffled, values[order])


def test_batch_evaluate_threads(synthetic):
    catalog, system = synthetic
    layout = build_layout(catalog, system)
    genomes = init_population(layout, 8, np.random.default_rng(2))
    parameterizations = [repair(layout, g) for g in genomes]
    backend = SurrogateBackend(catalog)
    serial = batch_evaluate(catalog, system, parameterizations, backend,
                            workers=1)
    threaded = batch_evaluate(catalog, system, parameterizations, backend,
                              workers=4)
    assert np.array_equal(serial, threaded)


def test_worker_count(monkeypatch):
    monkeypatch.delenv('MEMSYS_EVO_THREADS', raising=False)
    assert worker_count() == 1
    monkeypatch.setenv('MEMSYS_EVO_THREADS', '6')
    assert worker_count() == 6
    monkeypatch.setenv('MEMSYS_EVO_THREADS', 'many')
    assert worker_count() == 1


def test_make_request(toy_catalog, toy_system):
    comp = toy_catalog.compiler('toy_1p')
    request = make_request(7, comp, toy_catalog.objectives,
                           [(toy_system.memories[0], {'option': 2})])
    assert request == {
            'batch_id': 7, 'compiler': 'toy_1p',
            'objectives': ['area', 'leakage'],
            'items': [{'words': 256, 'bits': 32, 'codes': {'option': 2}}]}


def test_parse_response():
    values = parse_response(3, 2, 2, {'batch_id': 3,
                                      'ppa': [[1.0, 2.0], [3.0, 4.0]]})
    assert values.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    with pytest.raises(ArityMismatchResponse) as e:
        parse_response(3, 2, 2, {'batch_id': 3, 'ppa': [[1.0, 2.0]]})
    assert e.value.batch_id == 3
    with pytest.raises(ArityMismatchResponse):
        parse_response(3, 1, 2, {'batch_id': 3, 'ppa': [[1.0]]})
    with pytest.raises(ProtocolError):
        parse_response(3, 1, 2, {'batch_id': 4, 'ppa': [[1.0, 2.0]]})
    with pytest.raises(ProtocolError):
        parse_response(3, 1, 2, {'batch_id': 3})
    with pytest.raises(ProtocolError):
        parse_response(3, 1, 2, {'batch_id': 3, 'ppa': [[1.0, 'x']]})


def test_exec_backend(toy_catalog, toy_system, echo_command):
    backend = ExecBackend(toy_catalog, echo_command, timeout=30)
    try:
        comp = toy_catalog.compiler('toy_1p')
        items = [(toy_system.memories[0], {'option': c}) for c in range(3)]
        values = backend.estimate(comp, items)
        assert values.tolist() == [[1.0, 1.0]] * 3
        # batch ids keep counting
        values = backend.estimate(comp, items[:1])
        assert values.tolist() == [[1.0, 1.0]]
    finally:
        backend.close()


def test_exec_backend_wrong_arity(toy_catalog, toy_system, echo_command):
    backend = ExecBackend(toy_catalog, echo_command + ' --drop-one',
                          timeout=30)
    try:
        items = [(toy_system.memories[0], {'option': 0})] * 2
        with pytest.raises(ArityMismatchResponse):
            backend.estimate(toy_catalog.compiler('toy_1p'), items)
    finally:
        backend.close()


def test_exec_backend_exits(toy_catalog, toy_system, echo_command):
    backend = ExecBackend(toy_catalog, echo_command + ' --exit', timeout=30)
    try:
        items = [(toy_system.memories[0], {'option': 0})]
        with pytest.raises(BackendExited):
            backend.estimate(toy_catalog.compiler('toy_1p'), items)
    finally:
        backend.close()


def test_exec_backend_stays_exited(toy_catalog, toy_system, echo_command):
    backend = ExecBackend(toy_catalog, echo_command + ' --exit', timeout=10)
    try:
        items = [(toy_system.memories[0], {'option': 0})]
        for _ in range(3):
            with pytest.raises(BackendExited):
                backend.estimate(toy_catalog.compiler('toy_1p'), items)
    finally:
        backend.close()


def test_exec_backend_no_such_program(toy_catalog):
    with pytest.raises(BackendExited):
        ExecBackend(toy_catalog, '/nonexistent/estimator')


def test_exec_backend_timeout(toy_catalog, toy_system):
    command = '"{}" -c "import time; time.sleep(30)"'.format(sys.executable)
    backend = ExecBackend(toy_catalog, command, timeout=0.5)
    try:
        items = [(toy_system.memories[0], {'option': 0})]
        with pytest.raises(EstimatorTimeout):
            backend.estimate(toy_catalog.compiler('toy_1p'), items)
    finally:
        backend.close()


def test_exec_backend_matches_surrogate(synthetic, tmp_path):
    catalog, system = synthetic
    path = tmp_path / 'catalog.json'
    path.write_text(dump_json(catalog_to_dict(catalog)))
    layout = build_layout(catalog, system)
    genomes = init_population(layout, 6, np.random.default_rng(3))
    parameterizations = [repair(layout, g) for g in genomes]

    command = '"{}" -m memsys_evo serve --catalog "{}"'.format(
            sys.executable, path)
    backend = ExecBackend(catalog, command, timeout=60)
    try:
        external = batch_evaluate(catalog, system, parameterizations,
                                  backend)
    finally:
        backend.close()
    internal = batch_evaluate(catalog, system, parameterizations,
                              SurrogateBackend(catalog))
    assert np.array_equal(external, internal)
