import itertools
from collections import namedtuple

import numpy as np

from .exceptions import EmptyCellError, FixtureMismatch, InputError, InvalidParameters
from .matrix import CellConfiguration

CellMetrics = namedtuple('CellMetrics', 'machines parts t_ptk n_vk n_ek')


class GroupingMetrics(namedtuple('GroupingMetrics', 't_pti t_pto per_cell ee mge')):
    """
    t_pti / t_pto -- processing time inside / outside the diagonal blocks
    per_cell      -- CellMetrics per cell (T_ptk, void count N_vk, block size N_ek)
    ee            -- exceptional elements, nonzero entries outside every block
    mge           -- modified grouping efficiency, a fraction in [0, 1]
    """
    __slots__ = ()

    @property
    def voids_total(self):
        return sum(c.n_vk for c in self.per_cell)

    @property
    def cell_count(self):
        return len(self.per_cell)

    def to_dict(self):
        return {
            'mge': self.mge,
            'ee': self.ee,
            'voids_total': self.voids_total,
            'cells': [dict(c._asdict(), machines=list(c.machines), parts=list(c.parts)) for c in self.per_cell],
            't_pti': self.t_pti,
            't_pto': self.t_pto,
        }


def format_percent(fraction):
    return f'{fraction * 100:.2f}%'


def _cell_totals(values, nonzero, machine_cell, part_cell, cell_count):
    # label 0 collects everything outside the blocks
    inside = machine_cell[:, None] == part_cell[None, :]
    cell_of = np.where(inside, machine_cell[:, None], 0).ravel()
    t_ptk = np.bincount(cell_of, weights=values.ravel(), minlength=cell_count + 1)
    n_vk = np.bincount(cell_of[~nonzero.ravel()], minlength=cell_count + 1)
    n_ek = np.bincount(machine_cell, minlength=cell_count + 1) * np.bincount(part_cell, minlength=cell_count + 1)
    ee = int(np.count_nonzero(nonzero & ~inside))
    return t_ptk, n_vk, n_ek, ee


def _mge(t_ptk, n_vk, n_ek):
    t_pti = t_ptk[1:].sum()
    t_pto = t_ptk[0]
    # denominator exactly as defined: T_pto + sum T_ptk + sum T_ptk * N_vk / N_ek
    denominator = t_pto + t_ptk[1:].sum() + (t_ptk[1:] * n_vk[1:] / n_ek[1:]).sum()
    return float(t_pti), float(t_pto), float(t_pti / denominator) if denominator > 0 else 0.0


def evaluate(matrix, config):
    config.check_matches(matrix)
    values = matrix.values
    t_ptk, n_vk, n_ek, ee = _cell_totals(values, values > 0, config.machine_cell, config.part_cell,
                                         config.cell_count)
    empty = np.flatnonzero(n_ek[1:] == 0)
    if len(empty):
        raise EmptyCellError(f'cell {empty[0] + 1} has no elements; repair the configuration before evaluating')
    t_pti, t_pto, mge = _mge(t_ptk, n_vk, n_ek)

    per_cell = []
    for k in range(1, config.cell_count + 1):
        per_cell.append(CellMetrics(machines=tuple(matrix.machine_labels[i] for i in config.machines_in(k)),
                                    parts=tuple(matrix.part_labels[j] for j in config.parts_in(k)),
                                    t_ptk=float(t_ptk[k]), n_vk=int(n_vk[k]), n_ek=int(n_ek[k])))
    return GroupingMetrics(t_pti=t_pti, t_pto=t_pto, per_cell=per_cell, ee=ee, mge=mge)


def _resolve_order(order, labels, name):
    ret = []
    for item in order:
        if isinstance(item, str):
            if item not in labels:
                raise InputError(f'unknown {name} label {item!r} in displayed order')
            ret.append(labels.index(item))
        else:
            ret.append(int(item))
    if sorted(ret) != list(range(len(labels))):
        raise InputError(f'displayed {name} order must list every {name} exactly once')
    return np.array(ret, dtype=np.int64)


def _contiguous_blocks(order, cuts):
    labels = np.zeros(len(order), dtype=np.int64)
    bounds = [0, *cuts, len(order)]
    for block, (start, end) in enumerate(zip(bounds[:-1], bounds[1:])):
        labels[order[start:end]] = block + 1
    return labels


def enumerate_block_cuts(matrix, displayed_row_order, displayed_col_order, cells):
    """
    Yield (configuration, ee, mge) for every way of cutting the displayed row order and the displayed column order
    into `cells` contiguous blocks each, blocks paired in display order.
    """
    rows = _resolve_order(displayed_row_order, matrix.machine_labels, 'machine')
    cols = _resolve_order(displayed_col_order, matrix.part_labels, 'part')
    if not 1 <= cells <= min(matrix.shape):
        raise InvalidParameters(f'cell count out of range: {cells} (expected 1..{min(matrix.shape)})')

    values = matrix.values
    nonzero = values > 0
    for row_cuts in itertools.combinations(range(1, len(rows)), cells - 1):
        machine_cell = _contiguous_blocks(rows, row_cuts)
        for col_cuts in itertools.combinations(range(1, len(cols)), cells - 1):
            part_cell = _contiguous_blocks(cols, col_cuts)
            t_ptk, n_vk, n_ek, ee = _cell_totals(values, nonzero, machine_cell, part_cell, cells)
            _, _, mge = _mge(t_ptk, n_vk, n_ek)
            yield CellConfiguration(machine_cell, part_cell, cells, check=False), ee, mge


def reconstruct_figure_config(matrix, displayed_row_order, displayed_col_order, cells, target_ee, target_mge,
                             tolerance=0.0005):
    """
    Recover the block boundaries of a published block-diagonal figure: among all contiguous cuts of the displayed
    orders, return the unique configuration with exactly `target_ee` exceptional elements and MGE within
    `tolerance` of `target_mge`. Raises FixtureMismatch (carrying the nearest candidates) otherwise.
    """
    candidates = list(enumerate_block_cuts(matrix, displayed_row_order, displayed_col_order, cells))
    matches = [c for c in candidates if c[1] == target_ee and abs(c[2] - target_mge) <= tolerance]
    if len(matches) == 1:
        return matches[0][0]

    if not matches:
        nearest = sorted(candidates, key=lambda c: (abs(c[1] - target_ee), abs(c[2] - target_mge)))[:5]
        text = '\n'.join(f'  EE={ee} MGE={format_percent(mge)} machines={c.machine_cell.tolist()} '
                         f'parts={c.part_cell.tolist()}' for c, ee, mge in nearest)
        error = FixtureMismatch(f'no {cells}-cell configuration matches EE={target_ee}, '
                                f'MGE={format_percent(target_mge)} (+/- {tolerance}); nearest candidates:\n{text}')
        error.candidates = nearest
        raise error

    text = '\n'.join(f'  EE={ee} MGE={format_percent(mge)} machines={c.machine_cell.tolist()} '
                     f'parts={c.part_cell.tolist()}' for c, ee, mge in matches)
    error = FixtureMismatch(f'{len(matches)} configurations match EE={target_ee}, MGE={format_percent(target_mge)}; '
                            f'the figure is under-determined:\n{text}')
    error.candidates = matches
    raise error
