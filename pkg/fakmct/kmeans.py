import warnings
from collections import namedtuple

import numba as nb
import numpy as np

from .exceptions import DimensionMismatch, InputError, InvalidParameters
from .stats_logger import StatsLogger


class KMeansParams(namedtuple('KMeansParams', 'k learning_rate convergence_tol max_passes',
                              defaults=(0.1, 1e-6, 500))):
    """ k seed points, constant learning rate n in (0, 1), stop when no seed moves more than tol over a pass """
    __slots__ = ()

    def validate(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParameters(f'k out of range: {self.k} (expected integer >= 1)')
        if not 0 < self.learning_rate < 1:
            raise InvalidParameters(f'learning rate out of range: {self.learning_rate} (expected 0 < n < 1)')
        if not self.convergence_tol > 0:
            raise InvalidParameters(f'convergence tolerance out of range: {self.convergence_tol}')
        if int(self.max_passes) != self.max_passes or self.max_passes < 1:
            raise InvalidParameters(f'max passes out of range: {self.max_passes} (expected integer >= 1)')
        return self


@nb.njit(cache=True)
def squared_distances(x, seeds):
    ret = np.zeros(seeds.shape[0], dtype=np.float64)
    for r in range(seeds.shape[0]):
        d = 0.0
        for i in range(x.shape[0]):
            t = x[i] - seeds[r, i]
            d += t * t
        ret[r] = d
    return ret


@nb.njit(cache=True)
def nearest_seed(x, seeds):
    dis = squared_distances(x, seeds)
    best = 0
    for r in range(1, dis.shape[0]):
        if dis[r] < dis[best]:
            best = r
    return best


@nb.njit(cache=True)
def online_pass(data, seeds, learning_rate, counts):
    # seeds and counts are updated in place
    for t in range(data.shape[0]):
        w = nearest_seed(data[t], seeds)
        counts[w] += 1
        for i in range(data.shape[1]):
            seeds[w, i] += learning_rate * (data[t, i] - seeds[w, i])


def _as_points(data):
    data = np.array(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] == 0:
        raise InputError(f'k-means needs a non-empty list of vectors, got shape {data.shape}')
    if not np.isfinite(data).all():
        raise InputError('k-means data must be finite')
    return data


def _check_point(x, seeds):
    x = np.ascontiguousarray(x, dtype=np.float64)
    seeds = np.ascontiguousarray(seeds, dtype=np.float64)
    if seeds.ndim != 2 or x.ndim != 1 or x.shape[0] != seeds.shape[1]:
        raise DimensionMismatch(f'point of shape {x.shape} does not match seeds of shape {seeds.shape}')
    return x, seeds


def assign(x, seeds):
    """ Index (0-based) of the nearest seed by squared Euclidean distance, ties to the lowest index """
    x, seeds = _check_point(x, seeds)
    return int(nearest_seed(x, seeds))


def update_winner(seeds, x, learning_rate):
    if not 0 < learning_rate < 1:
        raise InvalidParameters(f'learning rate out of range: {learning_rate} (expected 0 < n < 1)')
    x, seeds = _check_point(x, seeds)
    seeds = seeds.copy()
    w = nearest_seed(x, seeds)
    seeds[w] += learning_rate * (x - seeds[w])
    return seeds


def init_seeds(data, k):
    """
    Greedy farthest-point initialization: the first seed is the point of maximal norm, every next one maximizes
    the distance to its nearest chosen seed. Ties go to the lowest point index.
    """
    data = _as_points(data)
    chosen = [int(np.argmax((data ** 2).sum(axis=1)))]
    nearest = ((data - data[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        j = int(np.argmax(nearest))
        chosen.append(j)
        nearest = np.minimum(nearest, ((data - data[j]) ** 2).sum(axis=1))
    return data[chosen].copy(), chosen


def fit(data, params, stats=None, verbose=False):
    """
    Online K-Means: passes over the data in fixed order (assign + winner update per point) until the largest
    seed displacement over a pass drops below `convergence_tol` or `max_passes` is reached. A pass leaving a
    cluster empty reseeds it to the point farthest from its current seed. Labels come from a final pure
    assignment pass.
    """
    params.validate()
    if stats is None:
        stats = StatsLogger()
    data = _as_points(data)

    k = int(params.k)
    if k > data.shape[0]:
        raise InvalidParameters(f'k out of range: {k} exceeds the number of points ({data.shape[0]})')
    distinct = len(np.unique(data, axis=0))
    if k > distinct:
        warnings.warn(f'k reduced from {k} to {distinct}: only {distinct} distinct points', RuntimeWarning)
        stats.log_event('kmeans_k_reduced')
        k = distinct

    stats.log_event('kmeans_fits')
    seeds, _ = init_seeds(data, k)
    for pass_num in range(params.max_passes):
        start = seeds.copy()
        counts = np.zeros(k, dtype=np.int64)
        online_pass(data, seeds, params.learning_rate, counts)
        stats.log_event('kmeans_passes')
        stats.log_cumulative_value('kmeans_passes_per_k', k, 1)

        empty = np.flatnonzero(counts == 0)
        if len(empty):
            for r in empty:
                seeds[r] = data[np.argmax(((data - seeds[r]) ** 2).sum(axis=1))]
                stats.log_event('kmeans_repairs')
            if verbose:
                print(f'pass {pass_num + 1}: reseeded empty clusters {empty.tolist()}')
            continue

        displacement = np.sqrt(((seeds - start) ** 2).sum(axis=1)).max()
        if verbose:
            print(f'pass {pass_num + 1}: displacement={displacement:.3g} counts={counts.tolist()}')
        if displacement < params.convergence_tol:
            break

    labels = np.array([nearest_seed(x, seeds) for x in data], dtype=np.int64)
    return seeds, labels


def within_cluster_ss(data, labels):
    data = _as_points(data)
    labels = np.asarray(labels)
    ret = 0.0
    for label in np.unique(labels):
        members = data[labels == label]
        ret += float(((members - members.mean(axis=0)) ** 2).sum())
    return ret


def to_dict(seeds, labels):
    return {'seeds': np.asarray(seeds).tolist(), 'labels': np.asarray(labels).tolist()}
