# apps/homology/structures.py
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

WEQ_DISCLAIMER = (
    'Сертификат проверяет только необходимое условие слабой эквивалентности: '
    'биекцию на π0 и изоморфизм целочисленных гомологий ниже усечения.'
)


def _index_array(values):
    return np.asarray(values, dtype=np.int64).reshape(-1)


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """
    Целочисленная матрица в координатной форме: rows, cols, values упорядочены
    по (столбец, строка), повторов и нулей нет. Конструктор ожидает уже
    канонические массивы, для произвольных троек есть from_coo.
    """

    n_rows: int
    n_cols: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    @classmethod
    def from_coo(cls, n_rows, n_cols, rows, cols, values):
        """Повторяющиеся позиции складываются, нулевые суммы отбрасываются"""
        rows, cols, values = _index_array(rows), _index_array(cols), _index_array(values)
        if len(rows):
            key = cols * max(n_rows, 1) + rows
            order = np.argsort(key, kind='stable')
            key, rows, cols, values = key[order], rows[order], cols[order], values[order]
            starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
            values = np.add.reduceat(values, starts)
            rows, cols = rows[starts], cols[starts]
            keep = values != 0
            rows, cols, values = rows[keep], cols[keep], values[keep]
        return cls(n_rows, n_cols, rows, cols, values)

    @classmethod
    def from_columns(cls, n_rows, n_cols, columns):
        """columns[j] = {строка: значение}"""
        rows, cols, values = [], [], []
        for j, col in enumerate(columns):
            for i, v in col.items():
                rows.append(i)
                cols.append(j)
                values.append(v)
        return cls.from_coo(n_rows, n_cols, rows, cols, values)

    @classmethod
    def zero(cls, n_rows, n_cols):
        empty = np.zeros(0, dtype=np.int64)
        return cls(n_rows, n_cols, empty, empty, empty)

    @classmethod
    def from_dense(cls, rows, n_cols=None):
        n_rows = len(rows)
        n_cols = n_cols if n_cols is not None else (len(rows[0]) if rows else 0)
        dense = np.array(rows, dtype=np.int64).reshape(n_rows, n_cols)
        i, j = np.nonzero(dense)
        return cls.from_coo(n_rows, n_cols, i, j, dense[i, j])

    @cached_property
    def columns(self):
        """columns[j] = {строка: ненулевое значение}"""
        result = tuple({} for _ in range(self.n_cols))
        for i, j, v in zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()):
            result[j][i] = v
        return result

    def to_dense(self):
        dense = np.zeros(self.shape, dtype=np.int64)
        dense[self.rows, self.cols] = self.values
        return dense.tolist()

    def entry(self, i, j):
        return self.columns[j].get(i, 0)

    @property
    def nnz(self):
        return len(self.values)

    def is_zero(self):
        return not self.nnz

    def restrict(self, row_keep, col_keep):
        """Подматрица по маскам строк и столбцов с перенумерацией"""
        row_keep = np.asarray(row_keep, dtype=bool)
        col_keep = np.asarray(col_keep, dtype=bool)
        live = row_keep[self.rows] & col_keep[self.cols]
        row_number = np.cumsum(row_keep) - 1
        col_number = np.cumsum(col_keep) - 1
        return SparseMatrix(
            int(row_keep.sum()), int(col_keep.sum()),
            row_number[self.rows[live]], col_number[self.cols[live]], self.values[live],
        )

    def nonzero_columns(self):
        keep = np.zeros(self.n_cols, dtype=bool)
        keep[self.cols] = True
        return self.restrict(np.ones(self.n_rows, dtype=bool), keep)

    def __matmul__(self, other: 'SparseMatrix') -> 'SparseMatrix':
        if self.n_cols != other.n_rows:
            raise ValueError(f'Несогласованные размеры {self.shape} и {other.shape}')
        counts = np.bincount(self.cols, minlength=self.n_cols)
        starts = np.cumsum(counts) - counts
        repeats = counts[other.rows]
        total = int(repeats.sum())
        offsets = np.arange(total) - np.repeat(np.cumsum(repeats) - repeats, repeats)
        source = np.repeat(starts[other.rows], repeats) + offsets
        return SparseMatrix.from_coo(
            self.n_rows, other.n_cols,
            self.rows[source],
            np.repeat(other.cols, repeats),
            self.values[source] * np.repeat(other.values, repeats),
        )

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.values, other.values)
        )

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)


@dataclass(frozen=True)
class SmithForm:
    U: list
    D: list
    V: list

    @property
    def diagonal(self):
        size = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(size)]

    @property
    def invariant_factors(self):
        return [d for d in self.diagonal if d]


@dataclass(frozen=True)
class ChainComplex:
    """
    Нормализованный цепной комплекс до степени trunc.
    boundaries[k] = ∂_k: C_k -> C_{k-1}; boundaries[0] - нулевое отображение в C_{-1} = 0.
    """

    trunc: int
    bases: tuple
    boundaries: tuple
    name: str = field(default='', compare=False)
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def ranks(self):
        return tuple(len(b) for b in self.bases)

    def euler_characteristic(self):
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))


@dataclass(frozen=True)
class ReducedComplex:
    """
    Комплекс после снятия пар (a, b) с ∂b = ±a или с b единственной кограницей a.
    boundaries[k] - ограничения ∂_k на оставшиеся клетки, sizes[k] - их число,
    seeds - снятые вершины, по одной на компоненту (каждая даёт слагаемое Z в H_0).
    """

    boundaries: tuple
    sizes: tuple
    seeds: int = 0
    pairs: int = 0


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    torsion: tuple = ()

    @property
    def is_trivial(self):
        return self.betti == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.betti:
            parts.append('Z' if self.betti == 1 else f'Z^{self.betti}')
        parts.extend(f'Z/{d}' for d in self.torsion)
        return ' ⊕ '.join(parts) if parts else '0'


@dataclass(frozen=True)
class HomologyResult:
    groups: tuple
    reliable_through: int
    name: str = field(default='', compare=False)

    def reliable(self, degree):
        return degree <= self.reliable_through

    @cached_property
    def reliable_groups(self):
        return tuple(self.groups[: self.reliable_through + 1])

    def bettis(self):
        return tuple(g.betti for g in self.reliable_groups)

    def entries(self):
        for k, group in enumerate(self.groups):
            yield {'degree': k, 'group': group, 'reliable': self.reliable(k)}

    def __str__(self):
        return '(' + ', '.join(str(g) for g in self.reliable_groups) + ')'


@dataclass(frozen=True)
class InducedMap:
    """Матрицы цепного отображения и вердикт «изоморфизм до степени k включительно»"""

    matrices: tuple
    verdicts: tuple


@dataclass(frozen=True)
class DegreeVerdict:
    degree: int
    source: HomologyGroup
    target: HomologyGroup
    cone_acyclic: bool
    iso: bool


@dataclass(frozen=True)
class WeqCertificate:
    passed: bool
    pi0_bijection: bool
    degrees: tuple
    trunc: int
    first_failure: object = None
    name: str = ''
    disclaimer: str = WEQ_DISCLAIMER

    def __bool__(self):
        return self.passed
