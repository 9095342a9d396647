from memsys_evo.catalog import (feasible_codes, feasible_combinations,
                                surrogate_tables)
from memsys_evo.errors import (ArityMismatchResponse, BackendExited,
                               EstimatorTimeout, InfeasibleParameterization,
                               ProtocolError)

from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import json
import logging
import os
import queue
import shlex
import subprocess
import threading
from typing import Dict

import numpy as np


logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0


@dataclass(frozen=True)
class MemoryParameterization:
    memory_id: str
    compiler: str
    codes: Dict[str, int]

    def to_dict(self):
        return {'id': self.memory_id, 'compiler': self.compiler,
                'codes': dict(self.codes)}


def parameterization_to_dict(parameterization):
    """JSON form of a full-system parameterization."""
    return {'memories': [mp.to_dict() for mp in parameterization]}


def check_feasible(comp, mem, codes):
    """
    Checks that codes are a feasible parameterization of a compiler for
    a memory.

    Raises:
        InfeasibleParameterization: They are not.
    """
    def fail(why):
        raise InfeasibleParameterization(
                'Codes {} for memory {!r} on compiler {!r}: {}'.format(
                    dict(codes), mem.id, comp.name, why))

    if not comp.builds(mem):
        fail('compiler cannot build this memory')
    if set(codes) != set(comp.param_index):
        fail('codes do not cover exactly the compiler\'s parameters')
    governed = set()
    for rule in comp.combo_rules_at(mem.words, mem.bits):
        combo = tuple(codes[name] for name in rule.params)
        if combo not in feasible_combinations(comp, mem, rule):
            fail('combination {} of {} not allowed'.format(
                list(combo), list(rule.params)))
        governed.update(rule.params)
    for param in comp.params:
        if param.name not in governed and codes[param.name] not in \
                feasible_codes(comp, mem, param.name):
            fail('code {} of {!r} not allowed'.format(codes[param.name],
                                                      param.name))


def surrogate_matrix(catalog, comp, mems, codes_list):
    """
    Evaluates the surrogate model for a batch of parameterizations of
    one compiler.

    Args:
        catalog (Catalog): Supplies the objective order.
        comp (CompilerSpec): The compiler all items use.
        mems ([MemoryRequirement]): Memory of each item.
        codes_list ([dict]): Parameter codes of each item.

    Returns:
        np.ndarray: Objective values, shape (items, objectives).
    """
    base, mults = surrogate_tables(catalog, comp)
    words = np.array([m.words for m in mems], dtype=float)
    bits = np.array([m.bits for m in mems], dtype=float)
    values = (base[:, 0][None, :] +
              base[:, 1][None, :] * (words * bits)[:, None] +
              base[:, 2][None, :] * words[:, None] +
              base[:, 3][None, :] * bits[:, None])
    for param, table in zip(comp.params, mults):
        idx = np.array([codes[param.name] for codes in codes_list], dtype=int)
        values = values * table[:, idx].T
    return values


def surrogate_eval(catalog, comp, mem, codes):
    """
    Evaluates the surrogate model for one memory.

    Args:
        catalog (Catalog): Supplies the objective order.
        comp (CompilerSpec): The chosen compiler.
        mem (MemoryRequirement): The memory.
        codes (dict): Parameter name to code.

    Returns:
        np.ndarray: One value per catalog objective.

    Raises:
        InfeasibleParameterization: The codes are not feasible.
    """
    check_feasible(comp, mem, codes)
    return surrogate_matrix(catalog, comp, [mem], [codes])[0]


class SurrogateBackend:
    """
    Estimates PPA in-process with the catalog's analytic surrogate.
    """
    def __init__(self, catalog):
        self.catalog = catalog

    def estimate(self, comp, items):
        """
        Estimates a batch of items of one compiler.

        Args:
            comp (CompilerSpec): The compiler of every item.
            items ([Tuple[MemoryRequirement, dict]]): Memories and codes.

        Returns:
            np.ndarray: Objective values, shape (items, objectives).
        """
        mems = [mem for mem, _ in items]
        codes = [codes for _, codes in items]
        return surrogate_matrix(self.catalog, comp, mems, codes)

    def close(self):
        pass


def make_request(batch_id, comp, objectives, items):
    """Builds a wire-protocol request object."""
    return {'batch_id': batch_id, 'compiler': comp.name,
            'objectives': list(objectives),
            'items': [{'words': mem.words, 'bits': mem.bits,
                       'codes': dict(codes)} for mem, codes in items]}


def parse_response(batch_id, n_items, n_objectives, response):
    """
    Checks a wire-protocol response and extracts its values.

    Returns:
        np.ndarray: Shape (n_items, n_objectives).

    Raises:
        ProtocolError: The response is not an object for this batch.
        ArityMismatchResponse: Wrong number of items or objectives.
    """
    if not isinstance(response, dict) or 'ppa' not in response:
        raise ProtocolError('Batch {}: response has no "ppa"'.format(
            batch_id))
    if response.get('batch_id') != batch_id:
        raise ProtocolError('Batch {}: response is for batch {!r}'.format(
            batch_id, response.get('batch_id')))
    ppa = response['ppa']
    if not isinstance(ppa, list) or len(ppa) != n_items:
        raise ArityMismatchResponse(
                batch_id, 'expected {} objective vectors, got {}'.format(
                    n_items, len(ppa) if isinstance(ppa, list) else ppa))
    try:
        values = np.array(ppa, dtype=float)
    except (TypeError, ValueError) as e:
        raise ProtocolError('Batch {}: {}'.format(batch_id, e))
    if values.shape != (n_items, n_objectives):
        raise ArityMismatchResponse(
                batch_id, 'expected vectors of {} objectives'.format(
                    n_objectives))
    if not np.all(np.isfinite(values)):
        raise ProtocolError('Batch {}: non-finite objective value'.format(
            batch_id))
    return values


class ExecBackend:
    """
    Estimates PPA by talking to an external process.

    The process gets one JSON request per line on its standard input
    and must answer each with one JSON response line on its standard
    output. It is started once and runs until close() is called.
    """
    def __init__(self, catalog, command, timeout=DEFAULT_TIMEOUT):
        """
        Starts the estimator process.

        Args:
            catalog (Catalog): Supplies the objective names.
            command (str): Shell-style command line to run.
            timeout (float): Seconds to wait for each response.
        """
        self.catalog = catalog
        self.timeout = timeout
        self._lock = threading.Lock()
        self._next_batch = 0
        self._exit_code = None
        try:
            self._proc = subprocess.Popen(
                    shlex.split(command), stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE, universal_newlines=True,
                    bufsize=1)
        except OSError as e:
            raise BackendExited('Could not start estimator {!r}: {}'.format(
                command, e))
        self._lines = queue.Queue()
        self._reader = threading.Thread(target=self._read_lines, daemon=True)
        self._reader.start()
        logger.info('Started estimator process %s (pid %d)', command,
                    self._proc.pid)

    def _read_lines(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def estimate(self, comp, items):
        """
        Sends one batch and waits for its answer.

        Raises:
            BackendExited: The process is gone.
            EstimatorTimeout: No answer within the timeout.
            ProtocolError: The answer is malformed.
        """
        with self._lock:
            batch_id = self._next_batch
            self._next_batch += 1
            if self._exit_code is not None:
                raise BackendExited('Batch {}: estimator process exited'
                                    ' with code {}'.format(batch_id,
                                                            self._exit_code))
            request = make_request(batch_id, comp, self.catalog.objectives,
                                   items)
            try:
                self._proc.stdin.write(json.dumps(request) + '\n')
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as e:
                raise BackendExited('Batch {}: estimator process is not'
                                    ' accepting input: {}'.format(batch_id, e))
            try:
                line = self._lines.get(timeout=self.timeout)
            except queue.Empty:
                raise EstimatorTimeout('Batch {}: no response within {} s'
                                       .format(batch_id, self.timeout))
            if line is None:
                self._exit_code = self._proc.wait()
                raise BackendExited('Batch {}: estimator process exited with'
                                    ' code {}'.format(batch_id,
                                                      self._exit_code))
            try:
                response = json.loads(line)
            except json.JSONDecodeError as e:
                raise ProtocolError('Batch {}: malformed response: {}'.format(
                    batch_id, e))
        logger.debug('Batch %d: %d items for %s', batch_id, len(items),
                     comp.name)
        return parse_response(batch_id, len(items),
                              len(self.catalog.objectives), response)

    def close(self):
        """Closes the process's input and waits for it to exit."""
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()


def worker_count():
    """Number of evaluation workers, from MEMSYS_EVO_THREADS."""
    try:
        return max(1, int(os.environ.get('MEMSYS_EVO_THREADS', '1')))
    except ValueError:
        return 1


def batch_evaluate(catalog, system, parameterizations, backend, workers=None):
    """
    Evaluates full-system parameterizations with one backend batch per
    compiler.

    All (individual, memory) pairs are grouped by compiler, each group
    is estimated in a single batch, and the results are scattered back
    and summed per individual.

    Args:
        catalog (Catalog): The design space.
        system (SystemSpec): The memories; parameterizations list their
            memories in the same order.
        parameterizations ([[MemoryParameterization]]): What to evaluate.
        backend: Has an estimate(compiler, items) method.
        workers (int): Compiler batches evaluated concurrently; defaults
            to MEMSYS_EVO_THREADS.

    Returns:
        np.ndarray: System objectives, shape (individuals, objectives),
            in input order.
    """
    n_ind = len(parameterizations)
    n_mem = len(system.memories)
    n_obj = len(catalog.objectives)

    groups = OrderedDict()
    for i, parameterization in enumerate(parameterizations):
        for j, mp in enumerate(parameterization):
            groups.setdefault(mp.compiler, []).append((i, j, mp.codes))

    def run(name):
        slots = groups[name]
        items = [(system.memories[j], codes) for _, j, codes in slots]
        return backend.estimate(catalog.compiler(name), items)

    names = list(groups)
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]

    per_memory = np.zeros((n_ind, n_mem, n_obj))
    for name, values in zip(names, results):
        for (i, j, _), row in zip(groups[name], values):
            per_memory[i, j] = row

    totals = np.zeros((n_ind, n_obj))
    for j in range(n_mem):
        totals = totals + per_memory[:, j, :]
    return totals
