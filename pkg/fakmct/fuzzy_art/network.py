from collections import namedtuple

import numpy as np

from . import kernels
from ..exceptions import CategoryCapacityExceeded, DimensionMismatch, InvalidParameters, WorkloadFormatError
from ..matrix import PartFamilies, WorkloadMatrix, compact_labels
from ..stats_logger import StatsLogger

REJECT = -1
EQUILIBRIUM_TOLERANCE = 1e-12


class FuzzyArtParams(namedtuple('FuzzyArtParams',
                                'vigilance choice_parameter learning_rate max_categories max_epochs',
                                defaults=(0.75, 1e-6, 1.0, 100, 200))):
    """
    vigilance (rho) in [0, 1], choice_parameter (alpha) > 0, learning_rate (beta) in (0, 1].
    Defaults are the network creation values of the hybrid procedure (fast learning, beta = 1).
    """
    __slots__ = ()

    def validate(self):
        if not 0 <= self.vigilance <= 1:
            raise InvalidParameters(f'vigilance out of range: {self.vigilance} (expected 0 <= rho <= 1)')
        if not self.choice_parameter > 0:
            raise InvalidParameters(f'choice parameter out of range: {self.choice_parameter} (expected alpha > 0)')
        if not 0 < self.learning_rate <= 1:
            raise InvalidParameters(f'learning rate out of range: {self.learning_rate} (expected 0 < beta <= 1)')
        for name in ['max_categories', 'max_epochs']:
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidParameters(f'{name.replace("_", " ")} out of range: {value} (expected integer >= 1)')
        return self


def _as_vector(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _check_dimensions(a, b):
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionMismatch(f'dimension mismatch: {a.shape} vs {b.shape}')


def complement_code(matrix):
    """
    One coded vector per part (row of the result). Layout interleaves every machine time with its complement:
    (x_1, 1 - x_1, x_2, 1 - x_2, ...), so each vector has city-block norm equal to the machine count.
    """
    if isinstance(matrix, WorkloadMatrix):
        values = matrix.values
    else:
        values = np.asarray(matrix, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
    if not np.isfinite(values).all() or (values < 0).any() or (values > 1).any():
        i, j = np.argwhere(~((values >= 0) & (values <= 1)))[0]
        raise WorkloadFormatError(f'value outside [0, 1] at machine {i + 1}, part {j + 1}: {values[i, j]}')

    coded = np.zeros((values.shape[1], 2 * values.shape[0]), dtype=np.float64)
    coded[:, 0::2] = values.T
    coded[:, 1::2] = 1 - values.T
    return coded


def choice(coded, weight, alpha):
    coded, weight = _as_vector(coded), _as_vector(weight)
    _check_dimensions(coded, weight)
    if not alpha > 0:
        raise InvalidParameters(f'choice parameter out of range: {alpha}')
    return kernels.fuzzy_and_norm(coded, weight) / (alpha + kernels.city_block_norm(weight))


def match(coded, weight):
    coded, weight = _as_vector(coded), _as_vector(weight)
    _check_dimensions(coded, weight)
    norm = kernels.city_block_norm(coded)
    assert norm > 0
    return kernels.fuzzy_and_norm(coded, weight) / norm


def learn(weight, coded, beta):
    weight, coded = _as_vector(weight), _as_vector(coded)
    _check_dimensions(coded, weight)
    if not 0 < beta <= 1:
        raise InvalidParameters(f'learning rate out of range: {beta}')
    return kernels.learning_law(weight, coded, beta)


class FuzzyArtNetwork:
    """
    Category layer of a Fuzzy-ART network over complement-coded vectors.

    Weights are preallocated for `max_categories` rows initialized to ones (the uncommitted prototype); only the
    first `category_count` rows are committed categories.
    """

    def __init__(self, params, dimension, stats=None):
        self.params = params.validate()
        self.dimension = int(dimension)
        self.stats = stats if stats is not None else StatsLogger()
        self.weights = np.ones((params.max_categories, self.dimension), dtype=np.float64)
        self.category_count = 0
        self.weight_change = 0.0
        self.epochs = 0
        self.converged = False

    @property
    def committed_weights(self):
        return self.weights[:self.category_count]

    def present(self, coded, learn=True):
        """
        Present one coded vector. Categories are visited in descending choice order (ties to the lowest index),
        the first one passing the resonance test wins. Without a resonating category a new one is committed when
        learning and capacity allow it, otherwise REJECT is returned. With learning disabled the network is not
        modified.
        """
        coded = _as_vector(coded)
        if coded.shape != (self.dimension,):
            raise DimensionMismatch(f'expected coded vector of dimension {self.dimension}, got {coded.shape}')

        params = self.params
        committed = self.committed_weights
        scores = kernels.activations(coded, committed, params.choice_parameter)
        norm = kernels.city_block_norm(coded)
        for j in np.argsort(-scores, kind='stable'):
            if kernels.fuzzy_and_norm(coded, committed[j]) / norm >= params.vigilance:
                if learn:
                    new_weight = kernels.learning_law(committed[j], coded, params.learning_rate)
                    self.weight_change = max(self.weight_change,
                                             kernels.max_abs_difference(new_weight, committed[j]))
                    self.weights[j] = new_weight
                return int(j)
            # mismatch reset
            self.stats.log_event('art_resets')

        if not learn or self.category_count >= params.max_categories:
            self.stats.log_event('art_rejects')
            return REJECT

        j = self.category_count
        new_weight = kernels.learning_law(self.weights[j], coded, params.learning_rate)
        self.weight_change = max(self.weight_change, kernels.max_abs_difference(new_weight, self.weights[j]))
        self.weights[j] = new_weight
        self.category_count += 1
        self.stats.log_event('art_commits')
        self.stats.log_max_value('art_categories', self.category_count)
        return j

    def classify(self, coded):
        return self.present(coded, learn=False)

    def to_dict(self, families=None):
        ret = {
            'params': dict(self.params._asdict()),
            'category_count': self.category_count,
            'epochs': self.epochs,
            'converged': self.converged,
            'weights': self.committed_weights.tolist(),
        }
        if families is not None:
            ret['part_family'] = families.part_family.tolist()
        return ret


def train(matrix, params=FuzzyArtParams(), stats=None, verbose=False):
    """
    Train on the parts of `matrix` (presented in column order every epoch) until an epoch leaves all weights and
    labels unchanged or `max_epochs` is reached, then classify every part once more without learning.
    Returns the network and the part families (labels compacted to 1..F by first appearance).
    """
    params.validate()
    coded = complement_code(matrix)
    network = FuzzyArtNetwork(params, coded.shape[1], stats)

    labels = None
    for epoch in range(params.max_epochs):
        network.weight_change = 0.0
        count_before = network.category_count
        new_labels = np.array([network.present(c) for c in coded], dtype=np.int64)
        network.stats.log_event('art_epochs')
        network.epochs = epoch + 1
        stable = labels is not None and np.array_equal(labels, new_labels) and \
            network.category_count == count_before and network.weight_change <= EQUILIBRIUM_TOLERANCE
        labels = new_labels
        network.stats.log_max_value('art_max_weight_change', network.weight_change)
        if verbose:
            print(f'epoch {epoch + 1}: categories={network.category_count} '
                  f'weight_change={network.weight_change:.3g} labels={labels.tolist()}')
        if stable:
            network.converged = True
            break

    final = np.array([network.classify(c) for c in coded], dtype=np.int64)
    if (final == REJECT).any():
        j = int(np.flatnonzero(final == REJECT)[0])
        part = matrix.part_labels[j] if isinstance(matrix, WorkloadMatrix) else f'p{j + 1}'
        raise CategoryCapacityExceeded(
            f'part {part} resonates with no category after {network.epochs} epochs '
            f'({network.category_count}/{params.max_categories} categories committed)')

    family_count, part_family = compact_labels(final)
    return network, PartFamilies(family_count, part_family)
