"""
Pareto dominance, NSGA-II ranking and selection, and skyline extraction.

All objectives are minimized. Objective vectors are rows of a 2-D
numpy array; functions return indices into that array.
"""
from memsys_evo.errors import ArityMismatch, EmptyInput, PreconditionViolation

import logging

import numpy as np


logger = logging.getLogger(__name__)

# Below this many points the skyline is computed by pairwise comparison.
SKYLINE_CUTOFF = 64


def dominates(a, b):
    """
    Whether a dominates b: no worse in every objective and strictly
    better in at least one.

    Raises:
        ArityMismatch: a and b have different lengths.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArityMismatch('Cannot compare vectors of {} and {}'
                            ' objectives'.format(a.size, b.size))
    return bool(np.all(a <= b) and np.any(a < b))


def _as_matrix(points):
    try:
        points = np.asarray(points, dtype=float)
    except ValueError:
        # numpy refuses ragged nested sequences outright.
        raise ArityMismatch('Objective vectors must all have the same length')
    if points.ndim != 2:
        raise ArityMismatch('Objective vectors must all have the same length')
    if points.shape[0] == 0:
        raise EmptyInput('No objective vectors given')
    return points


def domination_matrix(left, right):
    """
    Boolean matrix D with D[i, j] true iff left[i] dominates right[j].
    """
    le = np.all(left[:, None, :] <= right[None, :, :], axis=2)
    lt = np.any(left[:, None, :] < right[None, :, :], axis=2)
    return le & lt


def naive_skyline(points):
    """
    Indices of the non-dominated points, by comparing every pair.

    Returns:
        np.ndarray: Ascending indices.
    """
    points = _as_matrix(points)
    dominated = domination_matrix(points, points).any(axis=0)
    return np.flatnonzero(~dominated)


def fast_nondominated_sort(points):
    """
    Sorts points into fronts of equal non-domination rank.

    Args:
        points (array-like): Objective vectors, shape (n, M).

    Returns:
        [[int]]: Fronts in rank order, each a list of ascending indices.
            Front 0 is the Pareto front.

    Raises:
        EmptyInput: No points were given.
    """
    points = _as_matrix(points)
    dom = domination_matrix(points, points)
    counts = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append([int(i) for i in current])
        counts = counts - dom[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def crowding_distance(front):
    """
    NSGA-II crowding distance of each member of a front.

    Boundary members of every objective get infinity; others add the
    gap between their neighbours, normalized by the objective's range
    over the front. Objectives with zero range add nothing.

    Args:
        front (array-like): Objective vectors, shape (n, M).

    Returns:
        np.ndarray: Distances, shape (n,).
    """
    front = _as_matrix(front)
    n, n_obj = front.shape
    distance = np.zeros(n)
    for m in range(n_obj):
        order = np.argsort(front[:, m], kind='stable')
        values = front[order, m]
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        span = values[-1] - values[0]
        if span == 0.0 or n < 3:
            continue
        distance[order[1:-1]] += (values[2:] - values[:-2]) / span
    return distance


def nsga2_select(points, n, payload_index=None):
    """
    NSGA-II environmental selection.

    Fronts are admitted whole in rank order while they fit; the first
    front that does not fit is ordered by crowding distance, largest
    first with ties to the lower payload index, and truncated.

    Args:
        points (array-like): Objective vectors of the pool.
        n (int): Number of members to select.
        payload_index (array-like): Tie-break key per member; defaults
            to the member's position.

    Returns:
        [int]: Selected positions into points, in admission order.

    Raises:
        PreconditionViolation: n is larger than the pool.
    """
    points = _as_matrix(points)
    if n > points.shape[0]:
        raise PreconditionViolation('Cannot select {} of {} members'.format(
            n, points.shape[0]))
    if payload_index is None:
        payload_index = np.arange(points.shape[0])
    selected = []
    for front in fast_nondominated_sort(points):
        room = n - len(selected)
        if room <= 0:
            break
        if len(front) <= room:
            selected.extend(front)
            continue
        crowd = crowding_distance(points[front])
        order = sorted(range(len(front)),
                       key=lambda k: (-crowd[k], payload_index[front[k]]))
        selected.extend(front[k] for k in order[:room])
    return selected


def skyline_dc(points):
    """
    Indices of the non-dominated points, by divide and conquer.

    Points are sorted lexicographically by objectives, so no point can
    be dominated by one that comes after it. Each half is reduced to its
    skyline, and the right half's survivors are then filtered against
    the left half's. Duplicates of non-dominated points are all kept.

    Args:
        points (array-like): Objective vectors, shape (n, M).

    Returns:
        np.ndarray: Ascending indices of the non-dominated points.

    Raises:
        EmptyInput: No points were given.
    """
    points = _as_matrix(points)
    order = np.lexsort(points.T[::-1])
    survivors = _skyline_sorted(points, order)
    return np.sort(survivors)


def _skyline_sorted(points, order):
    if order.size <= SKYLINE_CUTOFF:
        sub = points[order]
        return order[~domination_matrix(sub, sub).any(axis=0)]
    half = order.size // 2
    left = _skyline_sorted(points, order[:half])
    right = _skyline_sorted(points, order[half:])
    beaten = domination_matrix(points[left], points[right]).any(axis=0)
    return np.concatenate([left, right[~beaten]])
