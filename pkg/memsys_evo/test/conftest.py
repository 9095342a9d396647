from pathlib import Path
import pytest
import sys

from memsys_evo import SurrogateBackend, generate_synthetic_system
from memsys_evo.catalog import load_catalog, load_system


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='Also run the slow end-to-end quality tests.')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: slow end-to-end test')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


class SpyBackend:
    """Surrogate backend that records every batch it is given."""
    def __init__(self, catalog):
        self._inner = SurrogateBackend(catalog)
        self.calls = []

    def estimate(self, comp, items):
        self.calls.append((comp.name, len(items)))
        return self._inner.estimate(comp, items)

    @property
    def items(self):
        return sum(n for _, n in self.calls)

    def close(self):
        pass


@pytest.fixture()
def this_dir():
    return Path(__file__).parent


@pytest.fixture()
def toy_catalog_path(this_dir):
    return str(this_dir / 'toy_catalog.json')


@pytest.fixture()
def toy_system_path(this_dir):
    return str(this_dir / 'toy_system.json')


@pytest.fixture()
def toy_catalog(toy_catalog_path):
    return load_catalog(toy_catalog_path)


@pytest.fixture()
def toy_system(toy_system_path):
    return load_system(toy_system_path)


@pytest.fixture()
def spy(toy_catalog):
    return SpyBackend(toy_catalog)


@pytest.fixture()
def synthetic():
    return generate_synthetic_system(seed=7, n_memories=3, n_compilers=4,
                                     candidates_per_memory_target=40)


@pytest.fixture()
def multi_compiler():
    """Four memories, each buildable by two compilers."""
    return generate_synthetic_system(seed=5, n_memories=4, n_compilers=12,
                                     candidates_per_memory_target=30)


@pytest.fixture()
def echo_command(this_dir):
    return '"{}" "{}"'.format(sys.executable,
                              this_dir / 'echo_estimator.py')


# The global front of the toy system: (area, leakage) of every
# combination that is not dominated.
TOY_FRONT = [(1.1, 4.4), (2.0, 3.5), (2.6, 3.4), (2.9, 2.51), (3.5, 2.5),
             (3.9, 2.01), (4.4, 1.51)]
