from memsys_evo.output_file import write_atomic

import io
import logging
import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np


logger = logging.getLogger(__name__)

MARKERS = ('o', 's', '^', 'D', 'v', 'P', 'X', '*', '<', '>')


def normalization(baseline):
    """
    Offsets and scales that map the baseline's minima to 0 and maxima
    to 1 on the first two objectives. Objectives on which the baseline
    does not vary are only shifted.
    """
    lo = baseline[:, :2].min(axis=0)
    span = baseline[:, :2].max(axis=0) - lo
    span[span == 0.0] = 1.0
    return lo, span


def plot_fronts(fronts, objectives, out_path, baseline=None):
    """
    Draws fronts as an SVG scatter plot of their first two objectives.

    Args:
        fronts ([Tuple[str, np.ndarray]]): Legend label and objective
            matrix of each front.
        objectives ([str]): Objective names.
        out_path (str): Where to write the SVG.
        baseline (Tuple[str, np.ndarray]): Optional global front; if
            given it is drawn too, and both axes are scaled so that it
            spans [0, 1].

    Returns:
        [Tuple[str, np.ndarray]]: The plotted (label, coordinates).
    """
    if len(objectives) > 2:
        logger.warning('Fronts have %d objectives; plotting %s and %s only',
                       len(objectives), objectives[0], objectives[1])
    series = list(fronts)
    lo = np.zeros(2)
    span = np.ones(2)
    if baseline is not None:
        lo, span = normalization(baseline[1])
        series = [baseline] + series

    plotted = [(label, (values[:, :2] - lo) / span)
               for label, values in series]

    fig = plt.figure(figsize=(6.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    for k, (label, points) in enumerate(plotted):
        ax.scatter(points[:, 0], points[:, 1], label=label,
                   marker=MARKERS[k % len(MARKERS)], s=28, alpha=0.8)
    suffix = ' (normalized)' if baseline is not None else ''
    ax.set_xlabel(objectives[0] + suffix)
    ax.set_ylabel(objectives[1] + suffix)
    ax.spines['right'].set_visible(False)
    ax.spines['top'].set_visible(False)
    ax.legend(frameon=False)

    buf = io.StringIO()
    with plt.rc_context({'svg.hashsalt': 'memsys-evo'}):
        fig.savefig(buf, format='svg', bbox_inches='tight',
                    metadata={'Date': None})
    plt.close(fig)
    write_atomic(out_path, buf.getvalue())
    return plotted


def label_for(path):
    """Legend label for a front file: its directory and file name."""
    parent = os.path.basename(os.path.dirname(os.path.abspath(path)))
    return os.path.join(parent, os.path.basename(path))
