import numpy as np
import pytest

from memsys_evo import (DeConfig, deviation_report, dominates,
                        enumerate_candidates, exhaustive_front,
                        generate_synthetic_system, run_optimization)
from memsys_evo.estimator import SurrogateBackend


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(5))
def test_close_to_global_front(seed):
    catalog, system = generate_synthetic_system(seed, 4, 6, 200)
    backend = SurrogateBackend(catalog)
    table = enumerate_candidates(catalog, system, backend)
    base = np.array([v for _, v in exhaustive_front(table, 10 ** 12)])

    fronts = []
    for k in range(3):
        result = run_optimization(catalog, system, DeConfig(seed=k), backend)
        found = np.array([v for _, v in result.final_front])
        for a in found:
            assert not any(dominates(b, a) for b in found)
        fronts.append(found)

    report = deviation_report(fronts, base, catalog.objectives)
    assert np.all(report.mean['min'] <= 0.03)

    base_extent = base.max(axis=0) - base.min(axis=0)
    for found in fronts:
        extent = found.max(axis=0) - found.min(axis=0)
        assert np.all(extent >= 0.6 * base_extent)
