import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns
import toolz

from .matrix import block_orders, permute


def plot_sweep(rows, path):
    """ MGE and exceptional elements against the number of cells requested, optimum marked """
    sns.set()
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = [r.k for r in rows]
    sns.lineplot(x=ks, y=[r.mge * 100 for r in rows], marker='o', ax=ax, label='MGE (%)')
    ax.set_xlabel('number of cells (k)')
    ax.set_ylabel('MGE (%)')
    ax.set_xticks(ks)
    ax2 = ax.twinx()
    ax2.bar(ks, [r.ee for r in rows], alpha=0.25, color='gray', label='EE')
    ax2.set_ylabel('exceptional elements')
    ax2.grid(False)
    for r in rows:
        if r.optimal:
            ax.axvline(r.k, linestyle='--', color='red')
            ax.set_title(f'optimal number of cells: {r.k} ({r.mge * 100:.2f}%)')
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_blocks(matrix, config, path, title=None):
    """ Heat map of the block-diagonalized matrix with cell outlines """
    permuted = permute(matrix, config)
    row_order, col_order = block_orders(config)
    sns.set()
    fig, ax = plt.subplots(figsize=(1 + 0.5 * permuted.part_count, 1 + 0.4 * permuted.machine_count))
    data = np.where(permuted.values > 0, permuted.values, np.nan)
    sns.heatmap(data, annot=permuted.values, fmt='.2f', cmap='Blues', cbar=False, linewidths=0.5,
                xticklabels=permuted.part_labels, yticklabels=permuted.machine_labels, ax=ax)

    rows_by_cell = toolz.groupby(lambda i: config.machine_cell[row_order[i]], range(len(row_order)))
    cols_by_cell = toolz.groupby(lambda j: config.part_cell[col_order[j]], range(len(col_order)))
    for cell, rows in rows_by_cell.items():
        cols = cols_by_cell.get(cell, [])
        if not cols:
            continue
        ax.add_patch(plt.Rectangle((min(cols), min(rows)), len(cols), len(rows),
                                   fill=False, edgecolor='red', linewidth=2))
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
