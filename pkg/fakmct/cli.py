import json
import sys
import time
from argparse import ArgumentParser
from pathlib import Path

import numpy as np
import pandas as pd

from . import datasets, kmeans
from .exceptions import AlgorithmError, FixtureMismatch, InputError
from .fuzzy_art import FuzzyArtParams, train
from .kmeans import KMeansParams
from .matrix import load_csv, permute, render_blocks, save_csv
from .metrics import evaluate, format_percent, reconstruct_figure_config
from .pipeline import machine_features, run_fakmct, run_kmeans_baseline, sweep_cells
from .stats_logger import StatsLogger

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ALGORITHM = 3
EXIT_FIXTURE = 4


def load_input(args):
    if args.input is not None:
        return load_csv(args.input, normalize=args.normalize), args.input
    if args.dataset is not None:
        path = datasets.dataset_path(args.dataset)
        return load_csv(path, normalize=args.normalize), path
    raise InputError('--input <csv> (or --dataset <number>) is required')


def art_params_from_args(args):
    return FuzzyArtParams(vigilance=args.vigilance, choice_parameter=args.alpha, learning_rate=args.beta,
                          max_categories=args.max_categories, max_epochs=args.epochs).validate()


def km_params_from_args(args, k):
    return KMeansParams(k=k, learning_rate=args.learning_rate, convergence_tol=args.tol,
                        max_passes=args.max_passes).validate()


def parameters_dict(args, **extra):
    ret = {
        'vigilance': args.vigilance,
        'alpha': args.alpha,
        'beta': args.beta,
        'max_categories': args.max_categories,
        'epochs': args.epochs,
        'learning_rate': args.learning_rate,
        'convergence_tol': args.tol,
        'max_passes': args.max_passes,
        'normalize': args.normalize,
    }
    ret.update(extra)
    return ret


def configuration_report(config, metrics):
    return {
        'configuration': config.to_dict(),
        'metrics': metrics.to_dict(),
        'mge_percent': format_percent(metrics.mge),
    }


def metrics_table(metrics, method):
    rows = [dict(method=method, cell=i + 1, machines=' '.join(c.machines), parts=' '.join(c.parts),
                 t_ptk=c.t_ptk, n_vk=c.n_vk, n_ek=c.n_ek) for i, c in enumerate(metrics.per_cell)]
    rows.append(dict(method=method, cell='all', t_ptk=metrics.t_pti, n_vk=metrics.voids_total,
                     n_ek=sum(c.n_ek for c in metrics.per_cell), ee=metrics.ee, t_pto=metrics.t_pto,
                     mge=metrics.mge))
    return pd.DataFrame(rows)


def print_summary(name, metrics):
    print(f'{name}: cells={metrics.cell_count} EE={metrics.ee} voids={metrics.voids_total} '
          f'MGE={format_percent(metrics.mge)}')


def cmd_cluster(args):
    if args.k is None:
        raise InputError('--k <int> is required for cluster')
    matrix, source = load_input(args)
    art_params = art_params_from_args(args)
    km_params = km_params_from_args(args, args.k)

    stats = StatsLogger()
    start_time = time.time()
    network = None
    if args.dump_network is not None:
        network, _ = train(matrix, art_params, stats=StatsLogger())
    config, families, groups = run_fakmct(matrix, art_params, km_params, stats=stats, verbose=args.verbose)
    metrics = evaluate(matrix, config)

    report = {
        'input': {'path': str(source), 'machines': matrix.machine_count, 'parts': matrix.part_count},
        'parameters': parameters_dict(args, k=args.k, baseline=args.baseline),
        'part_families': {'family_count': families.family_count, 'part_family': families.part_family.tolist()},
        'machine_groups': {'group_count': groups.group_count, 'machine_group': groups.machine_group.tolist()},
        **configuration_report(config, metrics),
        'stats': stats.get_stats_dict(),
    }
    tables = [metrics_table(metrics, 'fakmct')]

    baseline = None
    if args.baseline == 'kmeans':
        baseline_stats = StatsLogger()
        baseline = run_kmeans_baseline(matrix, args.k, km_params, stats=baseline_stats, verbose=args.verbose)
        baseline_metrics = evaluate(matrix, baseline)
        report['baseline'] = {'method': 'kmeans', **configuration_report(baseline, baseline_metrics),
                              'stats': baseline_stats.get_stats_dict()}
        tables.append(metrics_table(baseline_metrics, 'kmeans'))
    report['duration'] = time.time() - start_time

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / 'report.json').open('w') as f:
        json.dump(report, f, indent=2)
    if args.format == 'csv':
        pd.concat(tables, ignore_index=True).to_csv(out / 'report.csv', index=False)
    save_csv(permute(matrix, config), out / 'permuted.csv')
    (out / 'blocks.txt').write_text(render_blocks(matrix, config) + '\n')
    if baseline is not None:
        save_csv(permute(matrix, baseline), out / 'baseline_permuted.csv')
        (out / 'baseline_blocks.txt').write_text(render_blocks(matrix, baseline) + '\n')
    if network is not None:
        dump = network.to_dict(families)
        seeds, labels = kmeans.fit(machine_features(matrix, families), km_params, stats=StatsLogger())
        dump['kmeans'] = kmeans.to_dict(seeds, labels)
        with Path(args.dump_network).open('w') as f:
            json.dump(dump, f, indent=2)
    if args.plot is not None:
        from .visualization import plot_blocks
        plot_blocks(matrix, config, args.plot, title=f'{matrix.machine_count}x{matrix.part_count}, '
                                                      f'MGE {format_percent(metrics.mge)}')

    print(render_blocks(matrix, config))
    print()
    print_summary('fakmct', metrics)
    if baseline is not None:
        print_summary('kmeans', evaluate(matrix, baseline))
    print(f'duration: {report["duration"]:.3f}s, outputs in {out}')
    return EXIT_OK


def cmd_sweep(args):
    if args.k_min is None or args.k_max is None:
        raise InputError('--k-min and --k-max are required for sweep')
    matrix, source = load_input(args)
    art_params = art_params_from_args(args)
    km_params = km_params_from_args(args, args.k_min)

    stats = StatsLogger()
    start_time = time.time()
    rows = sweep_cells(matrix, args.k_min, args.k_max, art_params, km_params, stats=stats, jobs=args.jobs,
                       verbose=args.verbose)
    duration = time.time() - start_time

    df = pd.DataFrame([dict(k=r.k, cells=r.cells, ee=r.ee, mge=r.mge, mge_percent=format_percent(r.mge),
                            optimal=r.optimal) for r in rows])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == 'json':
        with (out / 'sweep.json').open('w') as f:
            json.dump({'input': {'path': str(source), 'machines': matrix.machine_count,
                                 'parts': matrix.part_count},
                       'parameters': parameters_dict(args, k_min=args.k_min, k_max=args.k_max),
                       'rows': [dict(k=r.k, cells=r.cells, ee=r.ee, mge=r.mge, optimal=r.optimal,
                                     configuration=r.config.to_dict()) for r in rows],
                       'stats': stats.get_stats_dict(),
                       'duration': duration}, f, indent=2)
    else:
        df.to_csv(out / 'sweep.csv', index=False)
    if args.plot_data is not None:
        with Path(args.plot_data).open('w') as f:
            f.write('# k mge_percent ee\n')
            for r in rows:
                f.write(f'{r.k} {r.mge * 100:.6f} {r.ee}\n')
    if args.plot is not None:
        from .visualization import plot_sweep
        plot_sweep(rows, args.plot)

    with pd.option_context('display.width', None, 'display.max_columns', None):
        print(df.drop(columns=['mge']).to_string(index=False))
    optimum = [r for r in rows if r.optimal][0]
    print(f'optimal number of cells: k={optimum.k} (EE={optimum.ee}, MGE={format_percent(optimum.mge)})')
    print(f'duration: {duration:.3f}s, outputs in {out}')
    return EXIT_OK


def cmd_verify_fixture(args):
    matrix = load_csv(args.input, normalize=args.normalize) if args.input is not None else datasets.load_dataset(4)
    figures = datasets.load_figures(args.figures if args.figures is not None else datasets.DATASET4_FIGURES_PATH)
    selected = args.figure if args.figure else sorted(figures)
    for figure in selected:
        if figure not in figures:
            raise InputError(f'figure {figure} is not in the fixture (available: {sorted(figures)})')

    failures = 0
    for figure in selected:
        fixture = figures[figure]
        try:
            config = reconstruct_figure_config(matrix, fixture.row_order, fixture.col_order, fixture.cells,
                                              fixture.ee, fixture.mge, fixture.tolerance)
        except FixtureMismatch as e:
            print(f'figure {figure}: FAILED\n{e}', file=sys.stderr)
            failures += 1
            continue

        metrics = evaluate(matrix, config)
        assert metrics.ee == fixture.ee and abs(metrics.mge - fixture.mge) <= fixture.tolerance
        print(f'figure {figure}: {fixture.cells} cells, EE={metrics.ee}, MGE={format_percent(metrics.mge)} '
              f'(target {format_percent(fixture.mge)} +/- {fixture.tolerance * 100:.2f} pp)')
        for i, cell in enumerate(metrics.per_cell):
            print(f'  cell {i + 1}: machines {" ".join(cell.machines)} | parts {" ".join(cell.parts)}')
    return EXIT_FIXTURE if failures else EXIT_OK


def cmd_profile(args):
    if args.k is None:
        raise InputError('--k <int> is required for profile')
    matrix, _ = load_input(args)
    art_params = art_params_from_args(args)
    km_params = km_params_from_args(args, args.k)

    # compile the kernels outside of the measurement
    run_fakmct(matrix, art_params, km_params)

    if args.profiler == 'cProfile':
        import cProfile
        import pstats
        pr = cProfile.Profile()
        pr.enable()
    elif args.profiler == 'pyinstrument':
        from pyinstrument import Profiler
        profiler = Profiler()
        profiler.start()

    durations = []
    for _ in range(args.repeats):
        start_time = time.time()
        config, _, _ = run_fakmct(matrix, art_params, km_params)
        evaluate(matrix, config)
        durations.append(time.time() - start_time)

    if args.profiler == 'cProfile':
        pr.disable()
        stats = pstats.Stats(pr).sort_stats(pstats.SortKey.CUMULATIVE)
        stats.print_stats(30)
    elif args.profiler == 'pyinstrument':
        profiler.stop()
        print(profiler.output_text(unicode=True, color=False))

    print(f'runs            : {len(durations)}')
    print(f'time_per_run    : {np.mean(durations):.4f}s (max {np.max(durations):.4f}s)')
    print(f'runs_per_second : {len(durations) / np.sum(durations):.1f}')
    return EXIT_OK


def parse_args(argv=None):
    parser = ArgumentParser(description='Hybrid Fuzzy-ART / K-Means cell formation over workload matrices')
    parser.add_argument('mode', choices=('cluster', 'sweep', 'verify-fixture', 'profile'))
    parser.add_argument('--input', type=Path, help='workload matrix CSV (machines in rows, parts in columns)')
    parser.add_argument('--dataset', type=int, help='bundled benchmark dataset number instead of --input')
    parser.add_argument('--normalize', action='store_true',
                        help='divide all workloads by the global maximum when it exceeds 1')
    parser.add_argument('--k', type=int, help='number of machine groups (cluster, profile)')
    parser.add_argument('--k-min', type=int)
    parser.add_argument('--k-max', type=int)
    parser.add_argument('--vigilance', type=float, default=0.75)
    parser.add_argument('--alpha', type=float, default=1e-6, help='Fuzzy-ART choice parameter')
    parser.add_argument('--beta', type=float, default=1.0, help='Fuzzy-ART learning rate')
    parser.add_argument('--epochs', type=int, default=200)
    parser.add_argument('--max-categories', type=int, default=100)
    parser.add_argument('--learning-rate', type=float, default=0.1, help='K-Means learning rate')
    parser.add_argument('--tol', type=float, default=1e-6, help='K-Means convergence tolerance')
    parser.add_argument('--max-passes', type=int, default=500)
    parser.add_argument('--baseline', choices=('kmeans',), default=None)
    parser.add_argument('--out', type=Path, default=Path('out'))
    parser.add_argument('--format', choices=('json', 'csv'), default='json',
                        help='cluster: report.json plus a report.csv cell table; sweep: sweep.json or sweep.csv')
    parser.add_argument('--jobs', type=int, default=1, help='threads evaluating sweep values of k')
    parser.add_argument('--plot', type=Path, default=None, help='save a PNG plot (cluster: blocks, sweep: MGE vs k)')
    parser.add_argument('--plot-data', type=Path, default=None, help='gnuplot-ready MGE vs k data file (sweep)')
    parser.add_argument('--dump-network', type=Path, default=None, help='Fuzzy-ART network JSON dump (cluster)')
    parser.add_argument('--figure', type=int, action='append', help='verify only this figure (verify-fixture)')
    parser.add_argument('--figures', type=Path, default=None, help='figure fixture JSON (verify-fixture)')
    parser.add_argument('--repeats', type=int, default=10)
    parser.add_argument('--profiler', choices=('cProfile', 'pyinstrument', 'none'), default='none')
    parser.add_argument('-v', '--verbose', action='store_true')

    args = parser.parse_args(argv)
    if args.verbose:
        print('ARGS:', args)
    return args


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code

    commands = {
        'cluster': cmd_cluster,
        'sweep': cmd_sweep,
        'verify-fixture': cmd_verify_fixture,
        'profile': cmd_profile,
    }
    try:
        return commands[args.mode](args)
    except InputError as e:
        print(f'input error: {e}', file=sys.stderr)
        return EXIT_INPUT
    except AlgorithmError as e:
        print(f'algorithm error: {e}', file=sys.stderr)
        return EXIT_ALGORITHM
    except FixtureMismatch as e:
        print(f'fixture error: {e}', file=sys.stderr)
        return EXIT_FIXTURE
