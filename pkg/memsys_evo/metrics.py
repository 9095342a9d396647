"""
Distribution statistics of Pareto fronts, and how far a found front's
statistics deviate from those of the global front.
"""
from memsys_evo.errors import EmptyInput

from dataclasses import dataclass
import logging
from typing import Dict, Tuple

import numpy as np


logger = logging.getLogger(__name__)

STATISTICS = ('count', 'mean', 'sd', 'min', 'q1', 'q2', 'q3', 'max')
STATISTIC_LABELS = {'count': 'count', 'mean': 'mean', 'sd': 'SD',
                    'min': 'min', 'q1': 'Q1', 'q2': 'Q2', 'q3': 'Q3',
                    'max': 'max'}


@dataclass
class FrontStats:
    """
    values[statistic] is an array with one entry per objective.
    """
    values: Dict[str, np.ndarray]

    def __getitem__(self, statistic):
        return self.values[statistic]


@dataclass
class DeviationReport:
    """
    Relative deviations (found - base) / base, as fractions.

    mean[statistic] and sd[statistic] hold one entry per objective,
    NaN where the base statistic is zero and no deviation exists.
    """
    objectives: Tuple[str, ...]
    mean: Dict[str, np.ndarray]
    sd: Dict[str, np.ndarray]
    repetitions: int

    def not_computable(self):
        """(statistic, objective) pairs whose base statistic was 0."""
        return [(stat, obj) for stat in STATISTICS
                for m, obj in enumerate(self.objectives)
                if np.isnan(self.mean[stat][m])]


def _sd(values, axis=0):
    n = values.shape[axis]
    if n < 2:
        return np.zeros(np.delete(values.shape, axis))
    return np.std(values, axis=axis, ddof=1)


def front_stats(front):
    """
    Count, mean, standard deviation, extremes and quartiles of each
    objective over a front.

    Quartiles interpolate linearly between order statistics at
    p * (n - 1); the standard deviation divides by n - 1 and is 0 for a
    single point.

    Args:
        front (array-like): Objective vectors, shape (n, M).

    Returns:
        FrontStats: The statistics.

    Raises:
        EmptyInput: The front is empty.
    """
    front = np.asarray(front, dtype=float)
    if front.ndim != 2 or front.shape[0] == 0:
        raise EmptyInput('Cannot describe an empty front')
    q1, q2, q3 = np.quantile(front, [0.25, 0.5, 0.75], axis=0,
                             method='linear')
    return FrontStats(values={
        'count': np.full(front.shape[1], float(front.shape[0])),
        'mean': front.mean(axis=0),
        'sd': _sd(front),
        'min': front.min(axis=0),
        'q1': q1, 'q2': q2, 'q3': q3,
        'max': front.max(axis=0),
        })


def deviation_report(found_fronts, base_front, objectives=None):
    """
    Deviation of found fronts' statistics from the global front's.

    Args:
        found_fronts ([array-like]): One front per repetition.
        base_front (array-like): The global Pareto front.
        objectives ([str]): Objective names, for reporting.

    Returns:
        DeviationReport: Mean and SD across repetitions of
            (found - base) / base per statistic and objective.

    Raises:
        EmptyInput: No repetitions, or an empty front.
    """
    if not found_fronts:
        raise EmptyInput('No repetitions to compare')
    base = front_stats(base_front)
    n_obj = base['count'].size
    if objectives is None:
        objectives = tuple('f{}'.format(m) for m in range(n_obj))
    found = [front_stats(front) for front in found_fronts]

    mean = {}
    sd = {}
    for stat in STATISTICS:
        ref = base[stat]
        rows = np.array([f[stat] for f in found])
        with np.errstate(divide='ignore', invalid='ignore'):
            dev = np.where(ref != 0.0, (rows - ref) / np.where(ref != 0.0,
                                                               ref, 1.0),
                           np.nan)
        mean[stat] = dev.mean(axis=0)
        sd[stat] = _sd(dev)
        for m in np.flatnonzero(ref == 0.0):
            logger.warning('Base %s of %s is 0; deviation not computable',
                           stat, objectives[m])
    return DeviationReport(objectives=tuple(objectives), mean=mean, sd=sd,
                           repetitions=len(found))


def report_rows(report):
    """
    Rows of the report: statistic label, then deviation mean and SD per
    objective, in percent.
    """
    rows = []
    for stat in STATISTICS:
        row = [STATISTIC_LABELS[stat]]
        for m in range(len(report.objectives)):
            row.append(_percent(report.mean[stat][m]))
            row.append(_percent(report.sd[stat][m]))
        rows.append(row)
    return rows


def report_header(report):
    header = ['statistic']
    for obj in report.objectives:
        header += ['{} deviation mean'.format(obj),
                   '{} deviation SD'.format(obj)]
    return header


def _percent(value):
    if np.isnan(value):
        return 'n/a'
    return '{:.2f}%'.format(100.0 * value + 0.0)


def report_markdown(report):
    """The report as an aligned markdown table."""
    table = [report_header(report)] + report_rows(report)
    widths = [max(len(row[c]) for row in table)
              for c in range(len(table[0]))]

    def line(row):
        cells = [cell.ljust(w) if c == 0 else cell.rjust(w)
                 for c, (cell, w) in enumerate(zip(row, widths))]
        return '| ' + ' | '.join(cells) + ' |'

    rule = '|' + '|'.join('-' * (w + 2) if c == 0 else
                          '-' * (w + 1) + ':'
                          for c, w in enumerate(widths)) + '|'
    lines = [line(table[0]), rule] + [line(row) for row in table[1:]]
    lines.append('')
    lines.append('Mean and SD across {} repetitions.'.format(
        report.repetitions))
    return '\n'.join(lines) + '\n'
