import json
from collections import namedtuple
from pathlib import Path

from ..exceptions import InputError
from ..matrix import load_csv

DATA_DIR = Path(__file__).parent.absolute()

DatasetInfo = namedtuple('DatasetInfo', 'number source machines parts filename')
FigureFixture = namedtuple('FigureFixture', 'figure cells row_order col_order ee mge tolerance')

# benchmark problems converted to workload matrices; only dataset 4 has its matrix published in full
DATASETS = {
    1: DatasetInfo(1, 'King and Nakornchai (1982)', 5, 7, None),
    2: DatasetInfo(2, 'Seiffodini (1989)', 5, 18, None),
    3: DatasetInfo(3, 'Kusiak (1987)', 7, 11, None),
    4: DatasetInfo(4, 'Seiffodini and Wolfe (1986)', 8, 12, 'dataset4.csv'),
    5: DatasetInfo(5, 'Chandrasekharan et al. (1986a)', 8, 20, None),
    6: DatasetInfo(6, 'Mosier et al. (1985)', 10, 10, None),
    7: DatasetInfo(7, 'Askin et al. (1987)', 14, 23, None),
    8: DatasetInfo(8, 'Srinivasan et al. (1990)', 16, 30, None),
    9: DatasetInfo(9, 'Chandrasekharan et al. (1989a)', 24, 40, None),
    10: DatasetInfo(10, 'Stanfel (1985a)', 30, 50, None),
}

DATASET4_PATH = DATA_DIR / 'dataset4.csv'
DATASET4_FIGURES_PATH = DATA_DIR / 'dataset4_figures.json'


def dataset_path(number):
    if number not in DATASETS:
        raise InputError(f'unknown dataset {number}; known datasets: {sorted(DATASETS)}')
    info = DATASETS[number]
    if info.filename is None:
        raise InputError(f'dataset {number} ({info.source}, {info.machines}x{info.parts}) is not bundled; '
                         f'pass its workload matrix as a CSV file')
    return DATA_DIR / info.filename


def load_dataset(number, normalize=False):
    matrix = load_csv(dataset_path(number), normalize=normalize)
    info = DATASETS[number]
    assert matrix.shape == (info.machines, info.parts), (matrix.shape, info)
    return matrix


def load_figures(path=DATASET4_FIGURES_PATH):
    with Path(path).open() as f:
        raw = json.load(f)
    return {int(figure): FigureFixture(int(figure), v['cells'], v['row_order'], v['col_order'], v['ee'], v['mge'],
                                       v.get('tolerance', 0.0005))
            for figure, v in raw.items()}
