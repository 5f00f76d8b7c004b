import json
from collections import namedtuple
from pathlib import Path

import numpy as np
import pandas as pd
import toolz

from .exceptions import DimensionMismatch, EmptyCellError, InputError, WorkloadFormatError

PartFamilies = namedtuple('PartFamilies', 'family_count part_family')
MachineGroups = namedtuple('MachineGroups', 'group_count machine_group')


def compact_labels(labels):
    """ Relabel to 1..n keeping the order of first appearance """
    labels = np.asarray(labels)
    assert (labels >= 0).all(), labels
    mapping = {label: i + 1 for i, label in enumerate(toolz.unique(labels.tolist()))}
    return len(mapping), np.array([mapping[label] for label in labels.tolist()], dtype=np.int64)


class WorkloadMatrix:
    """
    Dense machines x parts matrix of operation times. Row i is machine i, column j is part j and a zero entry means
    that the part does not visit the machine. Values are kept read-only after construction.

    Values above 1 are accepted here (e.g. raw times before normalization); Fuzzy-ART input is checked separately
    with `check_unit_range`.
    """

    def __init__(self, values, machine_labels=None, part_labels=None):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise WorkloadFormatError(f'workload matrix must be a non-empty 2-D table, got shape {values.shape}')
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise WorkloadFormatError(f'non-finite workload at machine {i + 1}, part {j + 1}')

        self.machine_labels = self._labels(machine_labels, 'm', values.shape[0])
        self.part_labels = self._labels(part_labels, 'p', values.shape[1])

        if (values < 0).any():
            i, j = np.argwhere(values < 0)[0]
            raise WorkloadFormatError(f'negative workload {values[i, j]} at '
                                      f'{self.machine_labels[i]}, {self.part_labels[j]}')

        empty_rows = np.flatnonzero(~(values > 0).any(axis=1))
        if len(empty_rows):
            raise WorkloadFormatError(f'machine {self.machine_labels[empty_rows[0]]} has no operations (empty row)')
        empty_cols = np.flatnonzero(~(values > 0).any(axis=0))
        if len(empty_cols):
            raise WorkloadFormatError(f'part {self.part_labels[empty_cols[0]]} visits no machine (empty column)')

        values.setflags(write=False)
        self.values = values

    @staticmethod
    def _labels(labels, prefix, count):
        if labels is None:
            return tuple(f'{prefix}{i + 1}' for i in range(count))
        labels = tuple(str(l) for l in labels)
        if len(labels) != count:
            raise WorkloadFormatError(f'expected {count} labels, got {len(labels)}')
        return labels

    @property
    def machine_count(self):
        return self.values.shape[0]

    @property
    def part_count(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def total(self):
        return float(self.values.sum())

    def check_unit_range(self):
        if (self.values > 1).any():
            i, j = np.argwhere(self.values > 1)[0]
            raise WorkloadFormatError(f'value exceeds 1 at {self.machine_labels[i]}, {self.part_labels[j]} '
                                      f'({self.values[i, j]}); use normalization')

    def normalized(self):
        ma = self.values.max()
        if ma <= 1:
            return self
        return self.scaled(1 / ma)

    def scaled(self, factor):
        return WorkloadMatrix(self.values * factor, self.machine_labels, self.part_labels)

    def __eq__(self, other):
        return (isinstance(other, WorkloadMatrix) and self.shape == other.shape and
                np.array_equal(self.values, other.values) and
                self.machine_labels == other.machine_labels and self.part_labels == other.part_labels)

    def __repr__(self):
        return f'WorkloadMatrix({self.machine_count}x{self.part_count}, total={self.total():.4f})'


class CellConfiguration:
    """
    Joined machine-cell and part-cell assignment. Labels are 1-based, cell k is the block
    (machines with label k) x (parts with label k).
    """

    def __init__(self, machine_cell, part_cell, cell_count=None, check=True):
        self.machine_cell = np.array(machine_cell, dtype=np.int64)
        self.part_cell = np.array(part_cell, dtype=np.int64)
        if self.machine_cell.ndim != 1 or self.part_cell.ndim != 1 or \
                not len(self.machine_cell) or not len(self.part_cell):
            raise InputError('cell assignment must be non-empty 1-D label lists')
        if cell_count is None:
            cell_count = int(max(self.machine_cell.max(), self.part_cell.max()))
        self.cell_count = int(cell_count)
        for name, labels in [('machine', self.machine_cell), ('part', self.part_cell)]:
            if labels.min() < 1 or labels.max() > self.cell_count:
                raise InputError(f'{name} cell labels must lie in 1..{self.cell_count}')
        self.machine_cell.setflags(write=False)
        self.part_cell.setflags(write=False)
        if check:
            self.check_nonempty()

    def check_nonempty(self):
        for k in range(1, self.cell_count + 1):
            if not (self.machine_cell == k).any() or not (self.part_cell == k).any():
                raise EmptyCellError(f'cell {k} has {np.sum(self.machine_cell == k)} machines and '
                                     f'{np.sum(self.part_cell == k)} parts')

    def machines_in(self, k):
        return np.flatnonzero(self.machine_cell == k)

    def parts_in(self, k):
        return np.flatnonzero(self.part_cell == k)

    def reordered(self, row_order, col_order):
        return CellConfiguration(self.machine_cell[np.asarray(row_order)], self.part_cell[np.asarray(col_order)],
                                 self.cell_count, check=False)

    def check_matches(self, matrix):
        if (len(self.machine_cell), len(self.part_cell)) != matrix.shape:
            raise DimensionMismatch(f'configuration covers {len(self.machine_cell)}x{len(self.part_cell)}, '
                                    f'matrix is {matrix.machine_count}x{matrix.part_count}')

    def to_dict(self):
        return {'cells': self.cell_count,
                'machine_cell': self.machine_cell.tolist(),
                'part_cell': self.part_cell.tolist()}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d['machine_cell'], d['part_cell'], d['cells'])
        except KeyError as e:
            raise InputError(f'cell configuration is missing {e}')

    def __eq__(self, other):
        return (isinstance(other, CellConfiguration) and self.cell_count == other.cell_count and
                np.array_equal(self.machine_cell, other.machine_cell) and
                np.array_equal(self.part_cell, other.part_cell))

    def __repr__(self):
        return f'CellConfiguration(cells={self.cell_count}, machines={self.machine_cell.tolist()}, ' \
               f'parts={self.part_cell.tolist()})'


def _parse_number(text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        return None
    if not np.isfinite(value):
        return None
    return value


def load_csv(path, normalize=False):
    path = Path(path)
    try:
        df = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                         skip_blank_lines=True, skipinitialspace=True)
    except FileNotFoundError:
        raise InputError(f'no such file: {path}')
    except pd.errors.EmptyDataError:
        raise WorkloadFormatError(f'{path} is empty')
    except pd.errors.ParserError as e:
        raise WorkloadFormatError(f'ragged rows in {path}: {e}')

    missing = pd.isna(df).to_numpy()
    if missing.any():
        row = np.argwhere(missing)[0][0]
        raise WorkloadFormatError(f'ragged rows in {path}: row {row + 1} has fewer fields than row 1')
    cells = df.to_numpy(dtype=object)

    # label mode is triggered by any cell failing numeric parse in row 0 / column 0,
    # the corner cell belongs to both and decides only when nothing else does;
    # a single row can only carry a machine label
    has_header = any(_parse_number(c) is None for c in cells[0, 1:])
    has_label_column = any(_parse_number(c) is None for c in cells[1:, 0])
    if not has_header and not has_label_column and _parse_number(cells[0, 0]) is None:
        if cells.shape[0] > 1:
            has_header = True
        else:
            has_label_column = True
    body_start = 1 if has_header else 0
    col_start = 1 if has_label_column else 0

    body = cells[body_start:, col_start:]
    if body.size == 0:
        raise WorkloadFormatError(f'{path} holds no workload values')
    values = np.zeros(body.shape, dtype=np.float64)
    for (i, j), c in np.ndenumerate(body):
        value = _parse_number(c)
        if value is None:
            raise WorkloadFormatError(f'non-numeric cell {c!r} at row {i + body_start + 1}, '
                                      f'column {j + col_start + 1} of {path}')
        values[i, j] = value

    machine_labels = [str(c).strip() for c in cells[body_start:, 0]] if has_label_column else None
    part_labels = [str(c).strip() for c in cells[0, col_start:]] if has_header else None
    matrix = WorkloadMatrix(values, machine_labels, part_labels)
    if normalize:
        return matrix.normalized()
    matrix.check_unit_range()
    return matrix


def save_csv(matrix, path):
    df = pd.DataFrame(matrix.values, index=list(matrix.machine_labels), columns=list(matrix.part_labels))
    df.to_csv(path, float_format='%.6g')


def block_orders(config):
    row_order = np.argsort(config.machine_cell, kind='stable')
    col_order = np.argsort(config.part_cell, kind='stable')
    return row_order, col_order


def permute(matrix, config):
    config.check_matches(matrix)
    row_order, col_order = block_orders(config)
    return WorkloadMatrix(matrix.values[np.ix_(row_order, col_order)],
                          [matrix.machine_labels[i] for i in row_order],
                          [matrix.part_labels[j] for j in col_order])


def render_blocks(matrix, config):
    """ Text rendering of the block-diagonal form; exceptional elements are starred, voids shown as 'o' """
    config.check_matches(matrix)
    row_order, col_order = block_orders(config)
    permuted = permute(matrix, config)
    row_cells = config.machine_cell[row_order]
    col_cells = config.part_cell[col_order]

    width = max(6, max(len(l) for l in permuted.part_labels) + 2)
    label_width = max(len(l) for l in permuted.machine_labels) + 1

    header = ' ' * label_width
    for j, label in enumerate(permuted.part_labels):
        if j > 0 and col_cells[j] != col_cells[j - 1]:
            header += ' |'
        header += f'{label:>{width}}'
    lines = [header]
    for i, label in enumerate(permuted.machine_labels):
        if i > 0 and row_cells[i] != row_cells[i - 1]:
            lines.append('-' * len(header))
        line = f'{label:<{label_width}}'
        for j in range(permuted.part_count):
            if j > 0 and col_cells[j] != col_cells[j - 1]:
                line += ' |'
            value = permuted.values[i, j]
            inside = row_cells[i] == col_cells[j]
            if value > 0:
                text = f'{value:.2f}' + ('' if inside else '*')
            else:
                text = 'o' if inside else '.'
            line += f'{text:>{width}}'
        lines.append(line)
    return '\n'.join(lines)


def config_to_json(config, path=None):
    text = json.dumps(config.to_dict())
    if path is not None:
        Path(path).write_text(text)
    return text


def config_from_json(text_or_path):
    text = text_or_path
    if isinstance(text_or_path, Path) or not str(text_or_path).lstrip().startswith('{'):
        text = Path(text_or_path).read_text()
    try:
        return CellConfiguration.from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise InputError(f'invalid cell configuration JSON: {e}')
