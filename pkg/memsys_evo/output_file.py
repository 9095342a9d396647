from memsys_evo.errors import CatalogParseError
from memsys_evo.estimator import parameterization_to_dict

import csv
import io
import json
import logging
import os
import tempfile

import numpy as np


logger = logging.getLogger(__name__)

MEMORY_COLUMN_PREFIX = 'mem:'


def write_atomic(path, text):
    """
    Writes text to a file so that readers see either the old or the
    complete new content.

    Args:
        path (str): The file to write.
        text (str): Its new content.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        os.unlink(tmp_path)
        raise


def _number(value):
    return repr(float(value))


def front_to_dict(objectives, front):
    """
    JSON form of a front.

    Args:
        objectives ([str]): Objective names.
        front ([Tuple[parameterization, np.ndarray]]): The members.
    """
    return {'objectives': list(objectives),
            'front': [{'objectives': [float(v) for v in values],
                       'parameterization':
                           parameterization_to_dict(parameterization)}
                      for parameterization, values in front]}


def front_to_json(objectives, front):
    return json.dumps(front_to_dict(objectives, front), indent=2) + '\n'


def front_to_csv(objectives, front):
    """
    CSV form of a front: one row per member, objective values first,
    then compiler and codes of each memory.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    memory_ids = [mp.memory_id for mp in front[0][0]] if front else []
    header = list(objectives)
    for mem_id in memory_ids:
        header += ['{}{}:compiler'.format(MEMORY_COLUMN_PREFIX, mem_id),
                   '{}{}:codes'.format(MEMORY_COLUMN_PREFIX, mem_id)]
    writer.writerow(header)
    for parameterization, values in front:
        row = [_number(v) for v in values]
        for mp in parameterization:
            row += [mp.compiler, ';'.join('{}={}'.format(name, code)
                                          for name, code in mp.codes.items())]
        writer.writerow(row)
    return out.getvalue()


def history_to_csv(objectives, history):
    """
    CSV with one row per member of every generation's population.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(['generation', 'member'] + list(objectives))
    for gen, matrix in enumerate(history):
        for member, values in enumerate(matrix):
            writer.writerow([gen, member] + [_number(v) for v in values])
    return out.getvalue()


def write_front(directory, objectives, front, name='front'):
    """Writes a front as JSON and CSV into a directory."""
    write_atomic(os.path.join(directory, name + '.json'),
                 front_to_json(objectives, front))
    write_atomic(os.path.join(directory, name + '.csv'),
                 front_to_csv(objectives, front))


def write_run(directory, result):
    """Writes the front and history of an optimization run."""
    write_front(directory, result.objectives, result.final_front)
    write_atomic(os.path.join(directory, 'history.csv'),
                 history_to_csv(result.objectives, result.history))


def read_front(path):
    """
    Reads a front written by write_front, in JSON or CSV form.

    Args:
        path (str): The .json or .csv file.

    Returns:
        Tuple[Tuple[str], np.ndarray]: Objective names and the
            objective matrix, shape (members, objectives).

    Raises:
        FileNotFoundError: The file does not exist.
        CatalogParseError: The file is not a front.
    """
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    try:
        if path.endswith('.csv'):
            rows = list(csv.reader(io.StringIO(text)))
            header = rows[0]
            columns = [c for c, name in enumerate(header)
                       if not name.startswith(MEMORY_COLUMN_PREFIX)]
            objectives = tuple(header[c] for c in columns)
            values = np.array([[float(row[c]) for c in columns]
                               for row in rows[1:]],
                              dtype=float).reshape(-1, len(columns))
        else:
            data = json.loads(text)
            objectives = tuple(data['objectives'])
            values = np.array([member['objectives']
                               for member in data['front']],
                              dtype=float).reshape(-1, len(objectives))
    except (IndexError, KeyError, TypeError, ValueError) as e:
        raise CatalogParseError('{} is not a front file: {}'.format(path, e))
    return objectives, values


def write_manifest(directory, manifest):
    """Writes manifest.json describing how the outputs were made."""
    write_atomic(os.path.join(directory, 'manifest.json'),
                 json.dumps(manifest, indent=2, sort_keys=True) + '\n')
