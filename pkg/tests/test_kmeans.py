import itertools
import warnings

import numpy as np
import pytest

from fakmct import kmeans
from fakmct.exceptions import DimensionMismatch, InputError, InvalidParameters
from fakmct.kmeans import KMeansParams, assign, fit, init_seeds, update_winner, within_cluster_ss
from fakmct.stats_logger import StatsLogger

# per-family machine workloads of dataset 4 (families p1-3, p4-6, p7-9, p10, p11-12)
FEATURES = np.array([
    [2.35, 0.91, 0, 0, 0],
    [1.65, 2.69, 0.97, 0.79, 0],
    [0.56, 1.92, 2.52, 0, 0],
    [0, 0.58, 1.82, 0.63, 0],
    [0, 0, 1.85, 0.63, 0],
    [0, 0, 1.80, 0, 0.94],
    [0, 0, 0, 0, 1.35],
    [0, 0, 0, 0, 1.54],
])


def optimal_ss(data, k):
    """ Exhaustive minimum within-cluster sum of squares over every labelling """
    labellings = np.array(list(itertools.product(range(k), repeat=len(data))))
    sq = (data ** 2).sum(axis=1)
    ret = np.zeros(len(labellings))
    for c in range(k):
        mask = (labellings == c).astype(np.float64)
        counts = mask.sum(axis=1)
        sums = mask @ data
        with np.errstate(invalid='ignore', divide='ignore'):
            ret += np.where(counts > 0, mask @ sq - (sums ** 2).sum(axis=1) / counts, 0.0)
    return ret.min()


def test_assign_brute_force():
    rng = np.random.default_rng(3)
    data = rng.random((10, 2))
    seeds = rng.random((3, 2))
    for x in data:
        assert assign(x, seeds) == int(np.argmin(((seeds - x) ** 2).sum(axis=1)))


def test_assign_ties_and_errors():
    seeds = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert assign([1.0, 0.0], seeds) == 0
    with pytest.raises(DimensionMismatch):
        assign([1.0, 0.0, 0.0], seeds)


def test_update_winner():
    seeds = np.array([[0.0, 0.0], [1.0, 1.0]])
    updated = update_winner(seeds, [0.9, 0.8], 0.1)
    assert updated[0].tolist() == [0.0, 0.0]
    assert updated[1].tolist() == pytest.approx([0.99, 0.98])
    assert seeds[1].tolist() == [1.0, 1.0]
    with pytest.raises(InvalidParameters):
        update_winner(seeds, [0.9, 0.8], 1.0)


@pytest.mark.parametrize('params, message', [
    (KMeansParams(0), 'k out of range'),
    (KMeansParams(2, learning_rate=0), 'learning rate out of range'),
    (KMeansParams(2, learning_rate=1), 'learning rate out of range'),
    (KMeansParams(2, convergence_tol=0), 'convergence tolerance out of range'),
    (KMeansParams(2, max_passes=0), 'max passes out of range'),
])
def test_invalid_params(params, message):
    with pytest.raises(InvalidParameters, match=message):
        params.validate()


@pytest.mark.parametrize('k, chosen', [(2, [1, 7]), (3, [1, 7, 3]), (4, [1, 7, 3, 0])])
def test_farthest_point_init(k, chosen):
    seeds, indices = init_seeds(FEATURES, k)
    assert indices == chosen
    assert np.array_equal(seeds, FEATURES[chosen])


@pytest.mark.parametrize('k, labels', [
    (2, [0, 0, 0, 1, 1, 1, 1, 1]),
    (3, [0, 0, 2, 2, 2, 2, 1, 1]),
    (4, [3, 0, 2, 2, 2, 2, 1, 1]),
])
def test_dataset4_features(k, labels):
    stats = StatsLogger()
    seeds, result = fit(FEATURES, KMeansParams(k), stats=stats)
    assert result.tolist() == labels
    assert seeds.shape == (k, 5)
    d = stats.get_stats_dict()
    assert d['kmeans_fits'] == 1
    assert 1 <= d['kmeans_passes'] <= 500
    assert d['kmeans_passes_per_k'] == {str(k): d['kmeans_passes']}


def test_k_above_point_count():
    with pytest.raises(InvalidParameters, match='exceeds the number of points'):
        fit(FEATURES[:2], KMeansParams(3))


def test_k_reduced_to_distinct_points():
    data = np.array([[0.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    stats = StatsLogger()
    with pytest.warns(RuntimeWarning, match='k reduced from 3 to 2'):
        seeds, labels = fit(data, KMeansParams(3), stats=stats)
    assert seeds.shape == (2, 2)
    assert labels.tolist() == [0, 0, 1]
    assert stats.get_stats_dict()['kmeans_k_reduced'] == 1


def test_invalid_data():
    with pytest.raises(InputError):
        fit(np.zeros((0, 2)), KMeansParams(1))
    with pytest.raises(InputError):
        fit([[0.0, np.inf]], KMeansParams(1))


def test_single_cluster_is_the_mean_region():
    data = np.array([[0.0], [1.0], [2.0]])
    seeds, labels = fit(data, KMeansParams(1, max_passes=2000, convergence_tol=1e-9))
    assert labels.tolist() == [0, 0, 0]
    assert 0.5 < seeds[0, 0] < 1.5


def test_determinism():
    rng = np.random.default_rng(11)
    data = rng.random((20, 3))
    a = fit(data, KMeansParams(4))
    b = fit(data, KMeansParams(4))
    assert a[0].tobytes() == b[0].tobytes()
    assert np.array_equal(a[1], b[1])


def test_within_cluster_ss():
    data = np.array([[0.0], [2.0], [10.0]])
    assert within_cluster_ss(data, [0, 0, 1]) == pytest.approx(2.0)
    assert kmeans.to_dict([[1.0]], [0, 0]) == {'seeds': [[1.0]], 'labels': [0, 0]}


def oracle_instance(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    n = int(rng.integers(max(k, 4), 11))
    centers = rng.random((k, 2))
    data = centers[rng.integers(0, k, n)] + rng.normal(scale=0.05, size=(n, 2))
    return data, k


def test_oracle_equivalence():
    failures = []
    for seed in range(50):
        data, k = oracle_instance(seed)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', RuntimeWarning)
            seeds, labels = fit(data, KMeansParams(k))
        # labels are always nearest-seed consistent
        assert [assign(x, seeds) for x in data] == labels.tolist()
        ss, best = within_cluster_ss(data, labels), optimal_ss(data, k)
        if ss > best * 1.05 + 1e-12:
            failures.append((seed, k, len(data), ss, best))
    assert len(failures) <= 5, failures


def test_two_obvious_clusters():
    data = np.array([[0, 0], [0, 0.1], [5, 5], [5, 5.1]])
    seeds, labels = fit(data, KMeansParams(2))
    assert labels[0] == labels[1] != labels[2] == labels[3]
    # every update is a convex combination of seeds and points
    assert (seeds >= data.min(axis=0)).all() and (seeds <= data.max(axis=0)).all()

    _, labels = fit(data, KMeansParams(1))
    assert labels.tolist() == [0, 0, 0, 0]
