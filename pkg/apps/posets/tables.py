# apps/posets/tables.py
"""
Ex N(P) на массивах numpy.

n-симплекс (Ex N P)_n - монотонное отображение s_<[n] -> P, строка номеров значений
в P.elements; столбцы идут по subdivision(n).elements. Строки уровня перечисляются
в лексикографическом порядке, как в monotone_maps, поэтому короткие метки
образующих те же, что у табличной сборки. Грани и вырождения - выборки столбцов
по element_face_plan и element_degeneracy_plan, поиск строк - по упорядоченным кодам.
"""
import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.simplicial.structures import ArraySimplicialSet, SimplexRef, TabularSimplicialSet
from apps.simplicial.utils import format_label, normalize_word
from core.exceptions import DanglingReferenceError, EnumerationCapExceeded
from .ex import element_degeneracy_plan, element_face_plan
from .structures import FinitePoset
from .utils import default_cap, default_trunc, sd_poset

logger = logging.getLogger(__name__)

CHUNK_ROWS = 1 << 17


def order_matrix(P: FinitePoset):
    """le[a, b] - a <= b, по номерам в P.elements"""
    le = np.zeros((len(P), len(P)), dtype=bool)
    for a, b in P.leq:
        le[P.position[a], P.position[b]] = True
    return le


def value_dtype(size):
    return np.min_scalar_type(max(size - 1, 0))


def _parents(Q: FinitePoset):
    """Для каждого элемента Q.linear_order - номера непосредственно меньших"""
    position = {q: idx for idx, q in enumerate(Q.linear_order)}
    parents = [[] for _ in Q.linear_order]
    for a, b in Q.hasse_edges():
        parents[position[b]].append(position[a])
    return parents


def monotone_blocks(Q: FinitePoset, P: FinitePoset, le=None, prune=None, chunk=CHUNK_ROWS):
    """
    Монотонные отображения Q -> P блоками строк (столбцы - Q.linear_order)
    в лексикографическом порядке. prune = (width, keep): как только назначены
    первые width столбцов, остаются строки с keep(table) = True.
    """
    le = order_matrix(P) if le is None else le
    parents = _parents(Q)
    width = len(parents)
    dtype = value_dtype(len(P))

    def extend(table, i):
        if prune is not None and i == prune[0]:
            table = table[prune[1](table)]
        if i == width:
            if len(table):
                yield table
            return
        allowed = np.ones((len(table), len(P)), dtype=bool)
        for j in parents[i]:
            allowed &= le[table[:, j]]
        rows, values = np.nonzero(allowed)
        grown = np.empty((len(rows), i + 1), dtype=dtype)
        grown[:, :i] = table[rows]
        grown[:, i] = values
        for start in range(0, len(grown), chunk):
            yield from extend(grown[start:start + chunk], i + 1)

    yield from extend(np.zeros((1, 0), dtype=dtype), 0)


def monotone_table(Q: FinitePoset, P: FinitePoset, cap=None, what='монотонные отображения', le=None):
    cap = default_cap() if cap is None else cap
    blocks = []
    total = 0
    for block in monotone_blocks(Q, P, le):
        total += len(block)
        if total > cap:
            raise EnumerationCapExceeded(what, cap)
        blocks.append(block)
    if not blocks:
        return np.zeros((0, len(Q)), dtype=value_dtype(len(P)))
    return np.concatenate(blocks)


def row_codes(table, base):
    codes = np.zeros(len(table), dtype=np.int64)
    for column in np.asarray(table, dtype=np.int64).T:
        codes = codes * base + column
    return codes


class RowIndex:
    """
    Номера строк таблицы по содержимому. Строки кодируются числом в системе
    счисления с основанием base, пока код помещается в int64; иначе - через np.unique.
    """

    def __init__(self, table, base):
        self.table = np.asarray(table)
        self.base = max(int(base), 1)
        self.exact = self.table.shape[1] * math.log2(max(self.base, 2)) < 62
        if self.exact:
            codes = row_codes(self.table, self.base)
            self.order = np.argsort(codes, kind='stable')
            self.codes = codes[self.order]

    def find(self, rows):
        """Номера строк rows, -1 для отсутствующих"""
        rows = np.asarray(rows)
        if not len(self.table) or not len(rows):
            return np.full(len(rows), -1, dtype=np.int64)
        if self.exact:
            codes = row_codes(rows, self.base)
            at = np.minimum(np.searchsorted(self.codes, codes), len(self.codes) - 1)
            return np.where(self.codes[at] == codes, self.order[at], -1)
        stacked = np.concatenate([self.table, rows])
        _, inverse = np.unique(stacked, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        owner = np.full(inverse.max() + 1, -1, dtype=np.int64)
        owner[inverse[:len(self.table)][::-1]] = np.arange(len(self.table))[::-1]
        return owner[inverse[len(self.table):]]


class ExFaces(Mapping):
    """Грани образующих PosetExComplex по запросу; вершины граней не имеют"""

    def __init__(self, complex_):
        self.complex = complex_

    def __getitem__(self, label):
        E = self.complex
        n, j = E.simplicial_set.locate(label)
        if n == 0:
            raise KeyError(label)
        x = E.nondegenerate[n][j]
        return tuple(E.normal_form_at(n - 1, int(y)) for y in E.face_index[n][x])

    def __iter__(self):
        for gens in self.complex.simplicial_set.generators[1:]:
            yield from gens

    def __len__(self):
        return sum(len(gens) for gens in self.complex.simplicial_set.generators[1:])


@dataclass(frozen=True, eq=False)
class PosetExComplex:
    """
    Ex N(P) до усечения: levels[n] - все n-симплексы строками номеров значений.
    to_key(values, n) и to_values(key) переводят значения в ключ и обратно
    (для B_Ex(*, P, *) ключ - объекты и морфизмы функтора в запятую-категорию).
    Интерфейс как у ExComplex: trunc, size, ref, key_of, simplicial_set, tabular.
    """

    source: object
    poset: FinitePoset
    levels: tuple
    prefix: str
    name: str
    kind: str = 'poset'
    to_key: Callable = None
    to_values: Callable = None

    @property
    def trunc(self):
        return len(self.levels) - 1

    def size(self, n):
        return len(self.levels[n])

    def key(self, n, row):
        values = tuple(self.poset.elements[v] for v in row)
        return self.to_key(values, n) if self.to_key else values

    def row_of(self, key):
        values = self.to_values(key) if self.to_values else key
        try:
            return np.array([self.poset.position[v] for v in values], dtype=np.int64)
        except KeyError:
            raise DanglingReferenceError(
                f'{self.name}: значение вне {self.poset.name or "порядка"} в {format_label(key)}',
            ) from None

    @cached_property
    def indexes(self):
        return tuple(RowIndex(table, len(self.poset)) for table in self.levels)

    def find(self, n, rows):
        return self.indexes[n].find(rows)

    def index(self, n, key):
        row = self.row_of(key)
        x = int(self.find(n, row[None, :])[0]) if len(row) == self.levels[n].shape[1] else -1
        if x < 0:
            raise DanglingReferenceError(f'{self.name}: симплекс {format_label(key)} отсутствует на уровне {n}')
        return x

    def _lookup(self, n, rows, context):
        found = self.find(n, rows)
        if (found < 0).any():
            raise DanglingReferenceError(f'{self.name}: {context} выводит за уровень {n}')
        return found

    @cached_property
    def face_index(self):
        """face_index[n][x, i] - номер d_i x в levels[n - 1]"""
        result = [np.zeros((self.size(0), 0), dtype=np.int64)]
        for n in range(1, self.trunc + 1):
            table = self.levels[n]
            result.append(np.stack([
                self._lookup(n - 1, table[:, list(element_face_plan(n, i))], f'd_{i}')
                for i in range(n + 1)
            ], axis=1))
        return tuple(result)

    @cached_property
    def degeneracy_index(self):
        """degeneracy_index[n][x, i] - номер s_i x в levels[n + 1], пусто на верхнем уровне"""
        result = []
        for n in range(self.trunc):
            table = self.levels[n]
            result.append(np.stack([
                self._lookup(n + 1, table[:, list(element_degeneracy_plan(n, i))], f's_{i}')
                for i in range(n + 1)
            ], axis=1))
        result.append(np.zeros((self.size(self.trunc), 0), dtype=np.int64))
        return tuple(result)

    @cached_property
    def splittings(self):
        """
        По уровням: first[x] - наименьшее j с x = s_j d_j x (-1 у невырожденных),
        generator_dim[x], generator_row[x] - образующая разложения Эйленберга-Зильбера.
        """
        first, generator_dim, generator_row = [], [], []
        for n, table in enumerate(self.levels):
            j_first = np.full(len(table), -1, dtype=np.int64)
            for j in reversed(range(n)):
                columns = np.asarray(element_face_plan(n, j))[list(element_degeneracy_plan(n - 1, j))]
                j_first[(table == table[:, columns]).all(axis=1)] = j
            dims = np.full(len(table), n, dtype=np.int64)
            rows = np.arange(len(table), dtype=np.int64)
            degenerate = np.flatnonzero(j_first >= 0)
            if len(degenerate):
                parent = self.face_index[n][degenerate, j_first[degenerate]]
                dims[degenerate] = generator_dim[n - 1][parent]
                rows[degenerate] = generator_row[n - 1][parent]
            first.append(j_first)
            generator_dim.append(dims)
            generator_row.append(rows)
        return tuple(first), tuple(generator_dim), tuple(generator_row)

    @cached_property
    def nondegenerate(self):
        return tuple(np.flatnonzero(first < 0) for first in self.splittings[0])

    @cached_property
    def numbers(self):
        """numbers[n][x] - номер невырожденного x среди образующих размерности n"""
        return tuple(np.cumsum(first < 0) - 1 for first in self.splittings[0])

    def label(self, n, x):
        return f'{self.prefix}{n}_{int(self.numbers[n][x])}'

    def word(self, n, x):
        first = self.splittings[0]
        letters = []
        while n > 0 and first[n][x] >= 0:
            j = int(first[n][x])
            letters.append(j)
            x = int(self.face_index[n][x, j])
            n -= 1
        word = ()
        for j in reversed(letters):
            word = normalize_word((j,) + word)
        return word

    def normal_form_at(self, n, x) -> SimplexRef:
        _, dims, rows = self.splittings
        return SimplexRef(self.word(n, x), self.label(int(dims[n][x]), int(rows[n][x])), n)

    def ref(self, n, key) -> SimplexRef:
        """Нормальная форма симплекса с ключом key в терминах коротких меток"""
        return self.normal_form_at(n, self.index(n, key))

    def key_of(self, label):
        n, j = self.simplicial_set.locate(label)
        return self.key(n, self.levels[n][self.nondegenerate[n][j]])

    @cached_property
    def simplicial_set(self) -> ArraySimplicialSet:
        generators = tuple(
            tuple(f'{self.prefix}{n}_{j}' for j in range(len(self.nondegenerate[n])))
            for n in range(self.trunc + 1)
        )
        face_numbers = [np.zeros((len(generators[0]), 0), dtype=np.int64)]
        for n in range(1, self.trunc + 1):
            faces = self.face_index[n][self.nondegenerate[n]]
            face_numbers.append(np.where(self.splittings[0][n - 1][faces] < 0, self.numbers[n - 1][faces], -1))
        X = ArraySimplicialSet(
            d_max=self.trunc,
            generators=generators,
            faces=ExFaces(self),
            name=self.name,
            face_numbers=tuple(face_numbers),
        )
        logger.info('%s: образующие %s', self.name, X.counts())
        return X

    @cached_property
    def names(self):
        return {
            self.key(n, self.levels[n][x]): self.label(n, x)
            for n in range(self.trunc + 1) for x in self.nondegenerate[n]
        }

    @cached_property
    def tabular(self) -> TabularSimplicialSet:
        """Табличная форма с полными ключами (строится по запросу)"""
        return TabularSimplicialSet(
            d_max=self.trunc,
            levels=tuple(tuple(self.key(n, row) for row in table) for n, table in enumerate(self.levels)),
            faces=tuple(tuple(map(tuple, F.tolist())) for F in self.face_index),
            degeneracies=tuple(tuple(map(tuple, S.tolist())) for S in self.degeneracy_index),
            name=self.name,
        )


def poset_ex_complex(P: FinitePoset, trunc=None, cap=None, prefix='exp', kind='poset', what='Ex N(P)',
                     name=None, source=None, to_key=None, to_values=None) -> PosetExComplex:
    """Ex N(P) до trunc; превышение лимита на уровне n сообщается с level=n"""
    trunc = default_trunc() if trunc is None else trunc
    cap = default_cap() if cap is None else cap
    name = name or f'Ex N({P.name})'
    le = order_matrix(P)
    levels = []
    for n in range(trunc + 1):
        try:
            levels.append(monotone_table(sd_poset(n), P, cap, what, le))
        except EnumerationCapExceeded as exc:
            logger.warning('%s: лимит %s превышен на уровне %s', name, cap, n)
            raise EnumerationCapExceeded(what, cap, level=n) from exc
    logger.debug('%s: уровни %s', name, [len(table) for table in levels])
    return PosetExComplex(
        source=P if source is None else source,
        poset=P,
        levels=tuple(levels),
        prefix=prefix,
        name=name,
        kind=kind,
        to_key=to_key,
        to_values=to_values,
    )
