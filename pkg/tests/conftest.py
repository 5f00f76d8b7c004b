import numpy as np
import pytest

from fakmct import datasets
from fakmct.matrix import WorkloadMatrix, compact_labels

# machine_cell | part_cell of the published dataset 4 figures, machines and parts in index order
FIGURE_CONFIGS = {
    5: ([1, 2, 2, 2, 2, 2, 1, 1], [1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1]),
    6: ([1, 3, 3, 3, 3, 3, 2, 2], [1, 1, 3, 3, 3, 3, 3, 3, 3, 3, 2, 2]),
    7: ([1, 3, 3, 4, 4, 4, 2, 2], [1, 1, 3, 3, 3, 3, 4, 4, 4, 4, 2, 2]),
}
FIGURE_MGE = {5: 0.641376, 6: 0.685438, 7: 0.657692}

DATASET4_FAMILIES = [1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 5, 5]


@pytest.fixture
def dataset4():
    return datasets.load_dataset(4)


def perfect_blocks(machines, parts, cells, seed=0):
    """ Fully dense block-diagonal matrix with values in [0.8, 1], blocks of equal size """
    assert machines % cells == 0 and parts % cells == 0
    rng = np.random.default_rng(seed)
    values = np.zeros((machines, parts))
    rm, rp = machines // cells, parts // cells
    for c in range(cells):
        values[c * rm:(c + 1) * rm, c * rp:(c + 1) * rp] = rng.uniform(0.8, 1.0, (rm, rp))
    machine_cell = np.repeat(np.arange(1, cells + 1), rm)
    part_cell = np.repeat(np.arange(1, cells + 1), rp)
    return WorkloadMatrix(values), machine_cell, part_cell


@pytest.fixture
def two_blocks():
    return WorkloadMatrix([[0.9, 0.9, 0, 0],
                           [0.9, 0.9, 0, 0],
                           [0, 0, 0.9, 0.9],
                           [0, 0, 0.9, 0.9]])


def random_workload(rng, machines=None, parts=None, density=0.3):
    if machines is None:
        machines = int(rng.integers(2, 31))
    if parts is None:
        parts = int(rng.integers(2, 51))
    values = np.where(rng.random((machines, parts)) < density, rng.uniform(0.05, 1.0, (machines, parts)), 0.0)
    # every machine and every part keeps at least one operation
    values[np.arange(machines), rng.integers(0, parts, machines)] = rng.uniform(0.05, 1.0, machines)
    values[rng.integers(0, machines, parts), np.arange(parts)] = rng.uniform(0.05, 1.0, parts)
    return WorkloadMatrix(values)


def reference_fuzzy_art(matrix, rho=0.75, alpha=1e-6, beta=1.0, max_epochs=200):
    """ Step-by-step scalar Fuzzy-ART on plain lists, the slow oracle for `fuzzy_art.train` """
    columns = [[float(matrix.values[i, j]) for i in range(matrix.machine_count)] for j in range(matrix.part_count)]
    coded = []
    for col in columns:
        vec = []
        for x in col:
            vec += [x, 1 - x]
        coded.append(vec)

    def norm(a):
        s = 0.0
        for v in a:
            s += abs(v)
        return s

    def and_norm(a, b):
        s = 0.0
        for u, v in zip(a, b):
            s += min(u, v)
        return s

    def resonating(vec, weights):
        choices = [and_norm(vec, w) / (alpha + norm(w)) for w in weights]
        for j in sorted(range(len(weights)), key=lambda j: -choices[j]):
            if and_norm(vec, weights[j]) / norm(vec) >= rho:
                return j
        return None

    weights = []
    labels = None
    for _ in range(max_epochs):
        changed = False
        new_labels = []
        for vec in coded:
            j = resonating(vec, weights)
            if j is None:
                weights.append([1.0] * len(vec))
                j = len(weights) - 1
                changed = True
            new = [min(beta * min(u, v) + (1 - beta) * v, v) for u, v in zip(vec, weights[j])]
            if max(abs(a - b) for a, b in zip(new, weights[j])) > 1e-12:
                changed = True
            weights[j] = new
            new_labels.append(j)
        stable = labels == new_labels and not changed
        labels = new_labels
        if stable:
            break

    final = [resonating(vec, weights) for vec in coded]
    assert None not in final
    return compact_labels(final)[1].tolist()
