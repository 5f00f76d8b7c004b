import warnings
from collections import namedtuple
from multiprocessing.pool import ThreadPool

import numpy as np

from . import fuzzy_art, kmeans
from .exceptions import InvalidParameters
from .matrix import CellConfiguration, MachineGroups, PartFamilies, compact_labels
from .metrics import evaluate
from .stats_logger import StatsLogger

SweepRow = namedtuple('SweepRow', 'k cells ee mge config optimal')


def machine_features(matrix, families):
    """ Feature f of machine i is the total processing time machine i spends on the parts of family f """
    part_family = np.asarray(families.part_family)
    if part_family.shape != (matrix.part_count,):
        raise InvalidParameters(f'part families cover {part_family.shape[0]} parts, matrix has {matrix.part_count}')
    ret = np.zeros((matrix.machine_count, families.family_count), dtype=np.float64)
    for f in range(families.family_count):
        ret[:, f] = matrix.values[:, part_family == f + 1].sum(axis=1)
    return ret


def cross_workload(matrix, part_mask, machine_mask):
    return float(matrix.values[np.ix_(machine_mask, part_mask)].sum())


def _fit_machine_groups(data, km_params, stats, verbose):
    seeds, labels = kmeans.fit(data, km_params, stats=stats, verbose=verbose)
    group_count, machine_group = compact_labels(labels)
    # seed of every compacted group, in group label order
    group_seeds = np.array([seeds[labels[machine_group == g][0]] for g in range(1, group_count + 1)])
    return MachineGroups(group_count, machine_group), group_seeds


def _attach(matrix, part_units, groups):
    """
    part_units -- label per part of the units attached as a whole (a part family, or the part itself)
    Returns for every unit (1-based) the machine group maximizing the workload between them, ties to the lowest
    group label.
    """
    unit_count = int(part_units.max())
    ret = np.zeros(unit_count + 1, dtype=np.int64)
    for unit in range(1, unit_count + 1):
        loads = [cross_workload(matrix, part_units == unit, groups.machine_group == g)
                 for g in range(1, groups.group_count + 1)]
        ret[unit] = int(np.argmax(loads)) + 1
    return ret


def _join(groups, group_seeds, part_group, stats):
    """
    Turn machine groups and the group every part is attached to into a CellConfiguration. Groups that received
    no part are merged into the attached group whose seed is nearest.
    """
    attached = sorted(set(part_group.tolist()))
    group_to_cell = {}
    for g in range(1, groups.group_count + 1):
        if g in attached:
            group_to_cell[g] = g
            continue
        distances = [((group_seeds[g - 1] - group_seeds[a - 1]) ** 2).sum() for a in attached]
        group_to_cell[g] = attached[int(np.argmin(distances))]
        stats.log_event('cell_merges')
        warnings.warn(f'machine group {g} received no parts and was merged into group {group_to_cell[g]}',
                      RuntimeWarning)

    machine_cell = np.array([group_to_cell[g] for g in groups.machine_group.tolist()])
    # cell labels follow machine group labels, compacted over the non-empty cells
    relabel = {g: i + 1 for i, g in enumerate(attached)}
    return CellConfiguration([relabel[g] for g in machine_cell.tolist()],
                             [relabel[g] for g in part_group.tolist()], len(attached))


def form_cells(matrix, families, km_params, stats=None, verbose=False):
    """ Machine stage of the hybrid: K-Means over per-family machine workloads, then family-to-group attachment """
    if stats is None:
        stats = StatsLogger()
    km_params.validate()
    if km_params.k > matrix.machine_count:
        raise InvalidParameters(f'k out of range: {km_params.k} exceeds the machine count ({matrix.machine_count})')
    features = machine_features(matrix, families)
    groups, group_seeds = _fit_machine_groups(features, km_params, stats, verbose)
    family_group = _attach(matrix, np.asarray(families.part_family), groups)
    part_group = family_group[np.asarray(families.part_family)]
    return _join(groups, group_seeds, part_group, stats), groups


def run_fakmct(matrix, art_params=fuzzy_art.FuzzyArtParams(), km_params=kmeans.KMeansParams(3), stats=None,
               verbose=False):
    """
    Hybrid Fuzzy-ART / K-Means cell formation. Fuzzy-ART on complement-coded part columns gives the part families,
    K-Means on per-family machine workloads gives the machine groups, and every family joins the machine group it
    loads most.

    Returns (CellConfiguration, PartFamilies, MachineGroups).
    """
    if stats is None:
        stats = StatsLogger()
    _, families = fuzzy_art.train(matrix, art_params, stats=stats, verbose=verbose)
    config, groups = form_cells(matrix, families, km_params, stats=stats, verbose=verbose)
    return config, families, groups


def run_kmeans_baseline(matrix, k, km_params=None, stats=None, verbose=False):
    """
    Simple K-Means comparator: K-Means over raw machine rows, then every part joins the group it loads most.
    """
    if stats is None:
        stats = StatsLogger()
    km_params = (km_params or kmeans.KMeansParams(k))._replace(k=k)
    km_params.validate()
    if k > min(matrix.shape):
        raise InvalidParameters(f'k out of range: {k} exceeds min(machines, parts) = {min(matrix.shape)}')
    groups, group_seeds = _fit_machine_groups(matrix.values, km_params, stats, verbose)
    parts = np.arange(1, matrix.part_count + 1)
    part_group = _attach(matrix, parts, groups)[parts]
    return _join(groups, group_seeds, part_group, stats)


def pick_optimum(rows):
    """ Highest MGE, then fewest exceptional elements, then smallest k """
    return min(rows, key=lambda r: (-r.mge, r.ee, r.k)).k


def sweep_cells(matrix, k_min, k_max, art_params=fuzzy_art.FuzzyArtParams(), km_params=kmeans.KMeansParams(2),
                stats=None, jobs=1, verbose=False):
    """
    Run the machine stage for every k in k_min..k_max. The Fuzzy-ART part families do not depend on k and are
    trained once. Returns SweepRow records sorted by k with the optimum flagged.
    """
    if stats is None:
        stats = StatsLogger()
    if not 1 <= k_min <= k_max <= matrix.machine_count:
        raise InvalidParameters(f'k range out of range: {k_min}..{k_max} '
                                f'(expected 1 <= k-min <= k-max <= {matrix.machine_count})')
    _, families = fuzzy_art.train(matrix, art_params, stats=stats, verbose=verbose)

    def single_k(k):
        local_stats = StatsLogger()
        config, _ = form_cells(matrix, families, km_params._replace(k=k), stats=local_stats)
        metrics = evaluate(matrix, config)
        return local_stats, SweepRow(k, config.cell_count, metrics.ee, metrics.mge, config, False)

    ks = list(range(k_min, k_max + 1))
    if jobs > 1:
        with ThreadPool(jobs) as pool:
            results = pool.map(single_k, ks)
    else:
        results = [single_k(k) for k in ks]

    rows = []
    for local_stats, row in sorted(results, key=lambda r: r[1].k):
        stats.merge(local_stats)
        rows.append(row)
    optimum = pick_optimum(rows)
    return [r._replace(optimal=r.k == optimum) for r in rows]
