# apps/homology/reduction.py
"""
Сокращение цепного комплекса перед нормальной формой Смита.

Пара (a, b), b ∈ C_k, a ∈ C_{k-1}, с коэффициентом ∂b при a равным ±1 снимается
без изменения остальных коэффициентов, если a - единственная грань b (коредукция)
или b - единственная кограница a (свободная грань). Гомологии при этом не меняются,
а граничные матрицы просто ограничиваются на оставшиеся клетки.

Коредукции нужна затравка: в каждой компоненте, где все столбцы ∂_1 имеют сумму 0,
снимается одна вершина, и H_0 получает слагаемое Z.
"""
import logging

import networkx as nx
import numpy as np

from .structures import ChainComplex, ReducedComplex

logger = logging.getLogger(__name__)

MAX_ROUNDS = 10 ** 4


def _seed(C: ChainComplex, alive):
    M = C.boundaries[1]
    sums = np.zeros(M.n_cols, dtype=np.int64)
    np.add.at(sums, M.cols, M.values)
    first = np.full(M.n_cols, -1, dtype=np.int64)
    first[M.cols[::-1]] = M.rows[::-1]
    G = nx.Graph()
    G.add_nodes_from(range(M.n_rows))
    G.add_edges_from(zip(M.rows.tolist(), first[M.cols].tolist()))
    unbalanced = set(M.rows[sums[M.cols] != 0].tolist())
    seeds = 0
    for component in nx.connected_components(G):
        if component & unbalanced:
            continue
        alive[0][min(component)] = False
        seeds += 1
    return seeds


def _pairs(entries, row_alive, col_alive, single):
    """
    Снимает пары с единичным коэффициентом: single='column' - столбец с одним
    живым элементом, single='row' - строка с одним живым элементом.
    """
    rows, cols, values = entries
    live = row_alive[rows] & col_alive[cols]
    rows, cols, values = rows[live], cols[live], values[live]
    if single == 'column':
        counts = np.bincount(cols, minlength=len(col_alive))[cols]
    else:
        counts = np.bincount(rows, minlength=len(row_alive))[rows]
    hit = (counts == 1) & (np.abs(values) == 1)
    a, b = rows[hit], cols[hit]
    _, first = np.unique(a if single == 'column' else b, return_index=True)
    a, b = a[first], b[first]
    row_alive[a] = False
    col_alive[b] = False
    return (rows, cols, values), len(a)


def coreduce(C: ChainComplex) -> ReducedComplex:
    """Снимает пары раундами, пока что-то снимается"""
    alive = [np.ones(len(basis), dtype=bool) for basis in C.bases]
    seeds = _seed(C, alive) if C.trunc >= 1 else 0
    entries = [None] + [(M.rows, M.cols, M.values) for M in C.boundaries[1:]]
    removed = 0
    for rounds in range(1, MAX_ROUNDS + 1):
        changed = 0
        for k in range(1, C.trunc + 1):
            for single in ('column', 'row'):
                entries[k], count = _pairs(entries[k], alive[k - 1], alive[k], single)
                changed += count
        removed += changed
        if not changed:
            break
    boundaries = [C.boundaries[0].restrict(np.ones(0, dtype=bool), alive[0])]
    for k in range(1, C.trunc + 1):
        boundaries.append(C.boundaries[k].restrict(alive[k - 1], alive[k]))
    sizes = tuple(int(mask.sum()) for mask in alive)
    logger.debug(
        'Сокращение %s: %d пар за %d раундов, затравок %d, осталось %s',
        C.name or 'комплекса', removed, rounds, seeds, sizes,
    )
    return ReducedComplex(boundaries=tuple(boundaries), sizes=sizes, seeds=seeds, pairs=removed)
