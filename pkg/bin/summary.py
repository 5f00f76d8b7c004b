import json
import sys
from pathlib import Path

import pandas as pd

HEADER = '-' * 50


def load_reports(filepaths):
    """ One row per (report, method) pair out of `cluster` report.json files """
    rows = []
    for filepath in filepaths:
        with Path(filepath).open() as f:
            report = json.load(f)
        methods = [('fakmct', report)]
        if 'baseline' in report:
            methods.append((report['baseline']['method'], report['baseline']))
        for method, r in methods:
            metrics = r['metrics']
            rows.append(dict(
                report=str(filepath),
                input=Path(report['input']['path']).name,
                k=report['parameters']['k'],
                method=method,
                cells=len(metrics['cells']),
                ee=metrics['ee'],
                voids=metrics['voids_total'],
                t_pti=metrics['t_pti'],
                t_pto=metrics['t_pto'],
                mge=metrics['mge'] * 100,
                duration=report['duration'],
            ))
    return pd.DataFrame(rows)


def print_comparison(df):
    print(HEADER, 'BY INPUT AND k:')
    table = df.pivot_table(index=['input', 'k'], columns='method', values=['mge', 'ee', 'cells'], aggfunc='first')
    print(table.round(2))
    print()

    if df.method.nunique() > 1:
        print(HEADER, 'MGE GAIN OVER THE BASELINE (pp):')
        mge = df.pivot_table(index=['input', 'k'], columns='method', values='mge', aggfunc='first')
        for baseline in [m for m in mge.columns if m != 'fakmct']:
            gain = (mge['fakmct'] - mge[baseline]).dropna()
            print(f'  vs {baseline:8}: mean {gain.mean():+.2f}  min {gain.min():+.2f}  max {gain.max():+.2f} '
                  f'({(gain > 0).sum()}/{len(gain)} better)')
        print()


def print_summary(df):
    print(HEADER, 'SUMMARY:')
    for method, d in df.groupby('method'):
        print(f'  {method:8}: MGE {d.mge.mean():6.2f}% +/- {d.mge.std(ddof=0):5.2f}  '
              f'EE {d.ee.mean():5.1f}  runtime {d.duration.mean():.3f}s ({len(d)}x)')
    print()


def main(filepaths):
    df = load_reports(filepaths)
    print(HEADER, 'ALL RUNS:')
    print(df.sort_values(['input', 'k', 'method']).to_string(index=False))
    print()
    print_comparison(df)
    print_summary(df)


if __name__ == '__main__':
    pd.set_option('display.max_columns', None)
    pd.set_option('display.width', None)
    pd.set_option('display.max_colwidth', 30)

    filepaths = sorted(Path('out').glob('**/report.json')) if len(sys.argv) <= 1 else sys.argv[1:]
    main(filepaths)
