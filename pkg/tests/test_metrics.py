import numpy as np
import pytest

from fakmct import datasets
from fakmct.exceptions import DimensionMismatch, EmptyCellError, FixtureMismatch, InvalidParameters
from fakmct.matrix import CellConfiguration, WorkloadMatrix
from fakmct.metrics import (_cell_totals, _mge, enumerate_block_cuts, evaluate, format_percent,
                            reconstruct_figure_config)

from .conftest import FIGURE_CONFIGS, FIGURE_MGE, perfect_blocks, random_workload


def test_format_percent():
    assert format_percent(0.691267) == '69.13%'
    assert format_percent(1.0) == '100.00%'


def test_hand_computed_example():
    matrix = WorkloadMatrix([[0.5, 0.4, 0.0],
                             [0.0, 0.3, 0.6],
                             [0.2, 0.0, 0.7]])
    config = CellConfiguration([1, 2, 2], [1, 1, 2])
    metrics = evaluate(matrix, config)
    # cell 1 = m1 x {p1, p2}: 0.9, no voids; cell 2 = {m2, m3} x p3: 1.3, no voids; outside: 0.3 + 0.2
    assert metrics.t_pti == pytest.approx(2.2)
    assert metrics.t_pto == pytest.approx(0.5)
    assert metrics.ee == 2
    assert metrics.voids_total == 0
    assert metrics.mge == pytest.approx(2.2 / 2.7)
    assert [c.n_ek for c in metrics.per_cell] == [2, 2]
    assert metrics.per_cell[1].machines == ('m2', 'm3')
    assert metrics.per_cell[1].parts == ('p3',)


def test_voids_penalty():
    matrix = WorkloadMatrix([[0.5, 0.0],
                             [0.5, 0.5]])
    metrics = evaluate(matrix, CellConfiguration([1, 1], [1, 1]))
    # one void out of four elements: 1.5 / (1.5 + 1.5 * 1 / 4)
    assert metrics.voids_total == 1
    assert metrics.mge == pytest.approx(1.5 / 1.875)


@pytest.mark.parametrize('machines, parts, cells', [(4, 4, 2), (6, 9, 3), (12, 20, 4), (30, 50, 5)])
def test_perfect_packing(machines, parts, cells):
    matrix, machine_cell, part_cell = perfect_blocks(machines, parts, cells)
    metrics = evaluate(matrix, CellConfiguration(machine_cell, part_cell))
    assert metrics.mge == pytest.approx(1.0, abs=1e-9)
    assert metrics.ee == 0
    assert metrics.voids_total == 0


def test_empty_cell_and_dimension_errors(two_blocks):
    with pytest.raises(EmptyCellError):
        evaluate(two_blocks, CellConfiguration([1, 1, 1, 1], [1, 1, 2, 2], check=False))
    with pytest.raises(DimensionMismatch):
        evaluate(two_blocks, CellConfiguration([1, 2], [1, 2]))


def test_single_cell_dataset4(dataset4):
    metrics = evaluate(dataset4, CellConfiguration([1] * 8, [1] * 12))
    assert metrics.ee == 0
    assert metrics.t_pto == 0
    assert metrics.mge == pytest.approx(0.611465, abs=1e-6)


@pytest.mark.parametrize('figure', [5, 6, 7])
def test_reconstruct_figures(dataset4, figure):
    fixture = datasets.load_figures()[figure]
    config = reconstruct_figure_config(dataset4, fixture.row_order, fixture.col_order, fixture.cells, fixture.ee,
                                      fixture.mge, fixture.tolerance)
    machine_cell, part_cell = FIGURE_CONFIGS[figure]
    assert config.machine_cell.tolist() == machine_cell
    assert config.part_cell.tolist() == part_cell

    metrics = evaluate(dataset4, config)
    assert metrics.ee == fixture.ee
    assert metrics.mge == pytest.approx(FIGURE_MGE[figure], abs=1e-6)
    assert metrics.t_pti + metrics.t_pto == pytest.approx(dataset4.total(), rel=1e-12)


def test_figure7_block_totals(dataset4):
    metrics = evaluate(dataset4, CellConfiguration(*FIGURE_CONFIGS[7]))
    assert [c.t_ptk for c in metrics.per_cell] == pytest.approx([1.52, 2.89, 6.00, 6.73])
    assert metrics.t_pti == pytest.approx(17.14)
    assert metrics.per_cell[3].n_vk == 1
    assert metrics.per_cell[3].n_ek == 12


def test_reconstruction_failures(dataset4):
    fixture = datasets.load_figures()[5]
    with pytest.raises(FixtureMismatch, match='nearest candidates') as e:
        reconstruct_figure_config(dataset4, fixture.row_order, fixture.col_order, 2, 4, 0.99)
    assert len(e.value.candidates) == 5

    # a uniform matrix cut 1+2 or 2+1 leaves the same exceptional elements
    uniform = WorkloadMatrix(np.ones((3, 3)))
    with pytest.raises(FixtureMismatch, match='under-determined') as e:
        reconstruct_figure_config(uniform, [0, 1, 2], [0, 1, 2], 2, 4, 0.5, tolerance=1.0)
    assert len(e.value.candidates) == 2


def test_reconstruction_accepts_indices(dataset4):
    config = reconstruct_figure_config(dataset4, [0, 6, 7, 4, 5, 1, 2, 3], [0, 1, 10, 11, 2, 3, 4, 5, 6, 9, 7, 8],
                                      2, 4, 0.6415)
    assert config.machine_cell.tolist() == FIGURE_CONFIGS[5][0]


def test_enumerate_block_cuts(dataset4):
    rows = list(range(8))
    cols = list(range(12))
    assert len(list(enumerate_block_cuts(dataset4, rows, cols, 2))) == 7 * 11
    with pytest.raises(InvalidParameters):
        list(enumerate_block_cuts(dataset4, rows, cols, 9))


def random_config(rng, machines, parts):
    cells = int(rng.integers(1, min(machines, parts) + 1))
    machine_cell = np.concatenate([np.arange(1, cells + 1), rng.integers(1, cells + 1, machines - cells)])
    part_cell = np.concatenate([np.arange(1, cells + 1), rng.integers(1, cells + 1, parts - cells)])
    return CellConfiguration(rng.permutation(machine_cell), rng.permutation(part_cell))


def metamorphic_cases():
    yield 'fig5', datasets.load_dataset(4), CellConfiguration(*FIGURE_CONFIGS[5])
    yield 'fig6', datasets.load_dataset(4), CellConfiguration(*FIGURE_CONFIGS[6])
    yield 'fig7', datasets.load_dataset(4), CellConfiguration(*FIGURE_CONFIGS[7])
    for seed in range(100):
        rng = np.random.default_rng(seed)
        matrix = random_workload(rng, machines=int(rng.integers(2, 16)), parts=int(rng.integers(2, 26)))
        yield f'random{seed}', matrix, random_config(rng, *matrix.shape)


@pytest.mark.parametrize('name, matrix, config', list(metamorphic_cases()))
def test_metamorphic(name, matrix, config):
    metrics = evaluate(matrix, config)
    assert 0 <= metrics.mge <= 1

    # every nonzero is either exceptional or inside a cell
    in_cell = sum(c.n_ek - c.n_vk for c in metrics.per_cell)
    assert metrics.ee + in_cell == np.count_nonzero(matrix.values)

    # perfect packing is the only way to reach 1
    if metrics.ee > 0 or metrics.voids_total > 0:
        assert metrics.mge < 1
    else:
        assert metrics.mge == pytest.approx(1.0, abs=1e-12)

    # conservation
    assert metrics.t_pti + metrics.t_pto == pytest.approx(matrix.total(), rel=1e-9)

    # scale invariance
    for s in [0.1, 0.5, 2.0]:
        scaled = evaluate(matrix.scaled(s), config)
        assert scaled.mge == pytest.approx(metrics.mge, abs=1e-9)
        assert scaled.ee == metrics.ee

    # permutation invariance
    rng = np.random.default_rng(len(name))
    rows, cols = rng.permutation(matrix.machine_count), rng.permutation(matrix.part_count)
    permuted = WorkloadMatrix(matrix.values[np.ix_(rows, cols)],
                              [matrix.machine_labels[i] for i in rows], [matrix.part_labels[j] for j in cols])
    other = evaluate(permuted, config.reordered(rows, cols))
    assert other.ee == metrics.ee
    assert other.voids_total == metrics.voids_total
    assert other.mge == pytest.approx(metrics.mge, abs=1e-12)


@pytest.mark.parametrize('name, matrix, config', list(metamorphic_cases()))
def test_extra_void_lowers_mge(name, matrix, config):
    values = matrix.values
    t_ptk, n_vk, n_ek, _ = _cell_totals(values, values > 0, config.machine_cell, config.part_cell, config.cell_count)
    _, _, mge = _mge(t_ptk, n_vk, n_ek)
    for k in range(1, config.cell_count + 1):
        if t_ptk[k] == 0:
            continue
        more_voids = n_vk.copy()
        more_voids[k] += 1
        assert _mge(t_ptk, more_voids, n_ek)[2] < mge
