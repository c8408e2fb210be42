# apps/homology/smith.py
"""
Нормальная форма Смита над Z.

Плотный алгоритм выбирает опорный элемент наименьшего ненулевого модуля
(при равенстве - первый в построчном порядке) и работает с целыми Python
произвольной точности. Для граничных матриц сначала выполняется разреженное
исключение по опорным элементам ±1, плотная форма строится только для остатка.
"""
import logging

from django.conf import settings

from .structures import SmithForm, SparseMatrix

logger = logging.getLogger(__name__)


def _identity(size):
    return [[int(i == j) for j in range(size)] for i in range(size)]


def _smallest(A, t, m, n):
    best = None
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return best


def smith_normal_form(matrix, n_cols=None, with_transforms=True) -> SmithForm:
    """
    Возвращает (U, D, V) с U·M·V = D, D диагональна, d_1 | d_2 | …, d_i >= 0.
    Без with_transforms матрицы U и V не накапливаются (остаются None).
    """
    A = [[int(v) for v in row] for row in matrix]
    m = len(A)
    n = n_cols if n_cols is not None else (len(A[0]) if A else 0)
    U = _identity(m) if with_transforms else None
    V = _identity(n) if with_transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        # row_target -= q * row_source
        A[target] = [a - q * b for a, b in zip(A[target], A[source])]
        if U is not None:
            U[target] = [a - q * b for a, b in zip(U[target], U[source])]

    def add_col(target, source, q):
        for row in A:
            row[target] -= q * row[source]
        if V is not None:
            for row in V:
                row[target] -= q * row[source]

    t = 0
    while t < min(m, n):
        pivot = _smallest(A, t, m, n)
        if pivot is None:
            break
        _, i, j = pivot
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    dirty = dirty or bool(A[i][t])
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    dirty = dirty or bool(A[t][j])
            if dirty:
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(A[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if U is not None:
                U[t] = [-a for a in U[t]]
        t += 1
    return SmithForm(U=U, D=A, V=V)


def invariant_factors(M: SparseMatrix, dense_limit=None):
    """
    Ненулевые инвариантные множители разреженной матрицы по возрастанию.
    Столбцы с элементом ±1 исключаются без заполнения плотной матрицы.
    """
    if dense_limit is None:
        dense_limit = getattr(settings, 'SMITH_DENSE_LIMIT', 64)
    active = {j: dict(col) for j, col in enumerate(M.columns) if col}
    units = 0
    if len(active) > dense_limit or M.n_rows > dense_limit:
        row_index = {}
        for j, col in active.items():
            for i in col:
                row_index.setdefault(i, set()).add(j)
        changed = True
        while changed:
            changed = False
            for c in sorted(active):
                col = active.get(c)
                if col is None:
                    continue
                candidates = [i for i, v in col.items() if v in (1, -1)]
                if not candidates:
                    continue
                r = min(candidates, key=lambda i: (len(row_index[i]), i))
                u = col[r]
                for c2 in sorted(row_index[r] - {c}):
                    col2 = active[c2]
                    factor = col2[r] * u
                    for i, v in col.items():
                        new = col2.get(i, 0) - factor * v
                        if new:
                            if i not in col2:
                                row_index[i].add(c2)
                            col2[i] = new
                        elif i in col2:
                            del col2[i]
                            row_index[i].discard(c2)
                    if not col2:
                        del active[c2]
                for i in col:
                    row_index[i].discard(c)
                del active[c]
                del row_index[r]
                units += 1
                changed = True
    if not active:
        return [1] * units
    rows = sorted({i for col in active.values() for i in col})
    position = {i: k for k, i in enumerate(rows)}
    cols = sorted(active)
    dense = [[0] * len(cols) for _ in rows]
    for k, c in enumerate(cols):
        for i, v in active[c].items():
            dense[position[i]][k] = v
    logger.debug(
        'SNF: %d единичных опор, плотный остаток %dx%d', units, len(rows), len(cols),
    )
    form = smith_normal_form(dense, n_cols=len(cols), with_transforms=False)
    return [1] * units + form.invariant_factors


def rank(M: SparseMatrix, dense_limit=None):
    return len(invariant_factors(M, dense_limit))
