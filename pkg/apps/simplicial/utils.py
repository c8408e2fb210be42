import logging
from collections import defaultdict
from itertools import combinations

import networkx as nx
from networkx.algorithms import isomorphism as nx_isomorphism

from core.exceptions import (
    DanglingReferenceError,
    IndexOutOfRangeError,
    SimplicialIdentityError,
    TruncationError,
)
from .structures import (
    BiSimplexRef,
    BisimplicialSet,
    MapReport,
    MapViolation,
    SimplexRef,
    SimplicialMap,
    SimplicialSet,
    TabularSimplicialSet,
)

logger = logging.getLogger(__name__)


# --- Метки ---------------------------------------------------------------

def format_label(identifier):
    """Детерминированная строковая метка для составного идентификатора"""
    if isinstance(identifier, str):
        return identifier
    if isinstance(identifier, SimplexRef):
        inner = format_label(identifier.generator)
        if not identifier.word:
            return inner
        return ''.join(f's{j}' for j in identifier.word) + f'({inner})'
    if isinstance(identifier, (tuple, list)):
        return '(' + ','.join(format_label(x) for x in identifier) + ')'
    if isinstance(identifier, frozenset):
        return '{' + ','.join(sorted(format_label(x) for x in identifier)) + '}'
    return str(identifier)


# --- Арифметика слов вырождения -------------------------------------------

def normalize_word(indices):
    """
    Приводит слово s_{j1}…s_{jr} к строго убывающей форме
    по тождеству s_i s_j = s_{j+1} s_i (i <= j).
    """
    word = list(indices)
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a <= b:
                word[k], word[k + 1] = b + 1, a
                changed = True
    return tuple(word)


def is_normal_word(word):
    return all(word[k] > word[k + 1] for k in range(len(word) - 1)) and all(j >= 0 for j in word)


def commute_face(word, i):
    """
    Проносит d_i через слово вырождения.
    Возвращает (слово, None), если грань сократилась (d_i s_i = d_{i+1} s_i = id),
    иначе (внешнее слово, индекс грани образующей).
    """
    out = []
    idx = i
    for pos, j in enumerate(word):
        if idx < j:
            out.append(j - 1)
        elif idx == j or idx == j + 1:
            return normalize_word(out + list(word[pos + 1:])), None
        else:
            out.append(j)
            idx -= 1
    return tuple(out), idx


def face(X: SimplicialSet, r: SimplexRef, i: int) -> SimplexRef:
    if r.dim < 1 or not 0 <= i <= r.dim:
        raise IndexOutOfRangeError(
            f'Грань d_{i} не определена для симплекса размерности {r.dim}',
            index=i, dim=r.dim,
        )
    outer, idx = commute_face(r.word, i)
    if idx is None:
        return SimplexRef(outer, r.generator, r.dim - 1)
    inner = X.faces[r.generator][idx]
    return SimplexRef(normalize_word(outer + inner.word), inner.generator, r.dim - 1)


def degenerate(X: SimplicialSet, r: SimplexRef, i: int) -> SimplexRef:
    if not 0 <= i <= r.dim:
        raise IndexOutOfRangeError(
            f'Вырождение s_{i} не определено для симплекса размерности {r.dim}',
            index=i, dim=r.dim,
        )
    if r.dim + 1 > X.d_max:
        raise TruncationError(
            f's_{i} выводит за усечение d_max={X.d_max}', dim=r.dim + 1, d_max=X.d_max,
        )
    return SimplexRef(normalize_word((i,) + r.word), r.generator, r.dim + 1)


# --- Проверка ---------------------------------------------------------------

def validate_simplicial_set(X: SimplicialSet):
    if X.d_max < 0:
        raise TruncationError('d_max должен быть неотрицательным', d_max=X.d_max)
    if len(X.generators) != X.d_max + 1:
        raise TruncationError(
            'Число уровней образующих не совпадает с d_max + 1',
            levels=len(X.generators), d_max=X.d_max,
        )
    seen = set()
    for gens in X.generators:
        for g in gens:
            if g in seen:
                raise SimplicialIdentityError(f'Повторная образующая {format_label(g)}')
            seen.add(g)

    for n, gens in enumerate(X.generators):
        for g in gens:
            if n == 0:
                if X.faces.get(g):
                    raise SimplicialIdentityError(f'У вершины {format_label(g)} есть грани')
                continue
            refs = X.faces.get(g)
            if refs is None or len(refs) != n + 1:
                raise SimplicialIdentityError(
                    f'У образующей {format_label(g)} должно быть {n + 1} граней',
                    generator=format_label(g),
                )
            for i, ref in enumerate(refs):
                if ref.generator not in X:
                    raise DanglingReferenceError(
                        f'Грань d_{i} образующей {format_label(g)} ссылается на '
                        f'неизвестную образующую {format_label(ref.generator)}',
                    )
                if ref.dim != n - 1 or X.dim(ref.generator) + len(ref.word) != n - 1:
                    raise SimplicialIdentityError(
                        f'Грань d_{i} образующей {format_label(g)} имеет неверную размерность',
                    )
                if not is_normal_word(ref.word) or (ref.word and ref.word[0] >= ref.dim):
                    raise SimplicialIdentityError(
                        f'Слово {list(ref.word)} в грани d_{i} образующей '
                        f'{format_label(g)} не в нормальной форме',
                    )

    for n, gens in enumerate(X.generators):
        if n < 2:
            continue
        for g in gens:
            r = X.ref(g)
            for j in range(n + 1):
                for i in range(j):
                    lhs = face(X, face(X, r, j), i)
                    rhs = face(X, face(X, r, i), j - 1)
                    if lhs != rhs:
                        raise SimplicialIdentityError(
                            f'd_{i} d_{j} != d_{j - 1} d_{i} на образующей {format_label(g)}',
                            generator=format_label(g), i=i, j=j,
                        )
    return X


# --- Стандартные объекты ------------------------------------------------------

def _subset_complex(n, keep, trunc, name):
    d_max = max(trunc if trunc is not None else n + 1, 0)
    generators = []
    faces = {}
    for k in range(d_max + 1):
        gens = []
        if k <= n:
            for subset in combinations(range(n + 1), k + 1):
                if not keep(subset):
                    continue
                gens.append(subset)
                if k > 0:
                    faces[subset] = tuple(
                        SimplexRef((), subset[:i] + subset[i + 1:], k - 1) for i in range(k + 1)
                    )
        generators.append(tuple(gens))
    return SimplicialSet(d_max=d_max, generators=tuple(generators), faces=faces, name=name)


def standard_simplex(n: int, trunc=None) -> SimplicialSet:
    """Δ^n: по одной образующей на каждое (k+1)-элементное подмножество {0,…,n}"""
    if n < 0:
        raise IndexOutOfRangeError('Размерность симплекса должна быть неотрицательной', n=n)
    return _subset_complex(n, lambda s: True, trunc, f'Δ^{n}')


def boundary_simplex(n: int, trunc=None) -> SimplicialSet:
    """∂Δ^n; для n = 0 - пустое симплициальное множество"""
    if n < 0:
        raise IndexOutOfRangeError('Размерность симплекса должна быть неотрицательной', n=n)
    if n == 0:
        d_max = trunc if trunc is not None else 0
        return SimplicialSet(d_max=d_max, generators=((),) * (d_max + 1), faces={}, name='∂Δ^0')
    return _subset_complex(
        n, lambda s: len(s) <= n, trunc if trunc is not None else n, f'∂Δ^{n}'
    )


def horn(n: int, k: int, trunc=None) -> SimplicialSet:
    """Рог Λ^n_k: граница без k-й грани"""
    if n < 1 or not 0 <= k <= n:
        raise IndexOutOfRangeError(f'Рог Λ^{n}_{k} не определён', n=n, k=k)
    missing = tuple(v for v in range(n + 1) if v != k)
    return _subset_complex(
        n,
        lambda s: len(s) <= n and s != missing,
        trunc if trunc is not None else n,
        f'Λ^{n}_{k}',
    )


def simplicial_complex(facets, trunc=None, name='') -> SimplicialSet:
    """
    Симплициальный комплекс на вершинах 0..n, заданный максимальными гранями.
    По умолчанию d_max на единицу больше размерности комплекса.
    """
    facets = [frozenset(f) for f in facets]
    if not facets or any(not f for f in facets):
        raise IndexOutOfRangeError('Комплекс задаётся непустыми гранями')
    n = max(max(f) for f in facets)
    top = max(len(f) for f in facets) - 1
    return _subset_complex(
        n,
        lambda s: any(f.issuperset(s) for f in facets),
        trunc if trunc is not None else top + 1,
        name,
    )


def discrete(points, trunc=1, name='') -> SimplicialSet:
    """Дискретное симплициальное множество на заданных вершинах"""
    points = tuple(points)
    return SimplicialSet(
        d_max=trunc,
        generators=(points,) + ((),) * trunc,
        faces={},
        name=name,
    )


def truncate(X: SimplicialSet, d: int) -> SimplicialSet:
    if d > X.d_max:
        raise TruncationError(f'Нельзя поднять усечение {X.d_max} до {d}', d_max=X.d_max)
    generators = X.generators[:d + 1]
    kept = {g for gens in generators for g in gens}
    faces = {g: refs for g, refs in X.faces.items() if g in kept}
    return SimplicialSet(d_max=d, generators=generators, faces=faces, labels=X.labels, name=X.name)


# --- Табличная форма ---------------------------------------------------------

def build_tabular(d_max, level_fn, face_fn, degeneracy_fn, name=''):
    """
    Собирает TabularSimplicialSet из функций на ключах:
    level_fn(n) -> ключи n-симплексов, face_fn(n, key, i), degeneracy_fn(n, key, i).
    """
    levels = []
    positions = []
    for n in range(d_max + 1):
        level = tuple(level_fn(n))
        index = {}
        for idx, key in enumerate(level):
            if key in index:
                raise SimplicialIdentityError(
                    f'Повторный симплекс {format_label(key)} на уровне {n}',
                )
            index[key] = idx
        levels.append(level)
        positions.append(index)

    def lookup(n, key, context):
        try:
            return positions[n][key]
        except KeyError:
            raise DanglingReferenceError(
                f'{context}: симплекс {format_label(key)} отсутствует на уровне {n}',
            ) from None

    faces = [tuple(() for _ in levels[0])]
    for n in range(1, d_max + 1):
        faces.append(tuple(
            tuple(lookup(n - 1, face_fn(n, key, i), f'd_{i}') for i in range(n + 1))
            for key in levels[n]
        ))
    degeneracies = []
    for n in range(d_max + 1):
        if n == d_max:
            degeneracies.append(tuple(() for _ in levels[n]))
            continue
        degeneracies.append(tuple(
            tuple(lookup(n + 1, degeneracy_fn(n, key, i), f's_{i}') for i in range(n + 1))
            for key in levels[n]
        ))
    logger.debug('Табличное множество %s: уровни %s', name, [len(level) for level in levels])
    return TabularSimplicialSet(
        d_max=d_max,
        levels=tuple(levels),
        faces=tuple(faces),
        degeneracies=tuple(degeneracies),
        name=name,
    )


def to_tabular(X: SimplicialSet, trunc=None) -> TabularSimplicialSet:
    trunc = X.d_max if trunc is None else trunc
    if trunc > X.d_max:
        raise TruncationError(f'Усечение {trunc} выше d_max={X.d_max}', d_max=X.d_max)
    return build_tabular(
        trunc,
        lambda n: X.simplices(n),
        lambda n, r, i: face(X, r, i),
        lambda n, r, i: SimplexRef(normalize_word((i,) + r.word), r.generator, n + 1),
        name=X.name,
    )


def normalize(T: TabularSimplicialSet, labels=None) -> SimplicialSet:
    return T.to_generator_form(labels=labels)


def validate_tabular(T: TabularSimplicialSet):
    """Проверяет все пять симплициальных тождеств потаблично"""
    F, S = T.faces, T.degeneracies
    for n in range(T.d_max + 1):
        for x in range(T.size(n)):
            if n >= 2:
                for j in range(n + 1):
                    for i in range(j):
                        if F[n - 1][F[n][x][j]][i] != F[n - 1][F[n][x][i]][j - 1]:
                            raise SimplicialIdentityError(f'd_{i} d_{j} на уровне {n}, симплекс {x}')
            if n + 1 <= T.d_max:
                for j in range(n + 1):
                    y = S[n][x][j]
                    if F[n + 1][y][j] != x or F[n + 1][y][j + 1] != x:
                        raise SimplicialIdentityError(f'd_j s_j на уровне {n}, симплекс {x}')
                    for i in range(n + 2):
                        if i < j:
                            expected = S[n - 1][F[n][x][i]][j - 1] if n >= 1 else None
                        elif i > j + 1:
                            expected = S[n - 1][F[n][x][i - 1]][j]
                        else:
                            continue
                        if F[n + 1][y][i] != expected:
                            raise SimplicialIdentityError(f'd_{i} s_{j} на уровне {n}, симплекс {x}')
            if n + 2 <= T.d_max:
                for j in range(n + 1):
                    for i in range(j + 1):
                        if S[n + 1][S[n][x][j]][i] != S[n + 1][S[n][x][i]][j + 1]:
                            raise SimplicialIdentityError(f's_{i} s_{j} на уровне {n}, симплекс {x}')
    return T


def apply_operator(T: TabularSimplicialSet, n, x, theta):
    """
    X(θ)(x) для монотонного θ: [k] -> [n], заданного кортежем значений.
    Сначала грани на образ θ, затем вырождения в позициях повторов.
    """
    image = set(theta)
    dim = n
    for v in reversed(range(n + 1)):
        if v not in image:
            x = T.faces[dim][x][v]
            dim -= 1
    for j in range(len(theta) - 1):
        if theta[j] == theta[j + 1]:
            x = T.degeneracies[dim][x][j]
            dim += 1
    return x


# --- Произведения и диагональ -------------------------------------------------

def product(X: SimplicialSet, Y: SimplicialSet, trunc=None) -> SimplicialSet:
    """Категорное произведение, собранное потаблично и нормализованное"""
    trunc = min(X.d_max, Y.d_max) if trunc is None else trunc
    TX, TY = to_tabular(X, trunc), to_tabular(Y, trunc)
    T = build_tabular(
        trunc,
        lambda n: ((x, y) for x in TX.levels[n] for y in TY.levels[n]),
        lambda n, key, i: (
            TX.levels[n - 1][TX.faces[n][TX.index(n, key[0])][i]],
            TY.levels[n - 1][TY.faces[n][TY.index(n, key[1])][i]],
        ),
        lambda n, key, i: (
            TX.levels[n + 1][TX.degeneracies[n][TX.index(n, key[0])][i]],
            TY.levels[n + 1][TY.degeneracies[n][TY.index(n, key[1])][i]],
        ),
        name=f'{X.name}×{Y.name}',
    )
    return normalize(T)


def external_product(K: SimplicialSet, L: SimplicialSet) -> BisimplicialSet:
    """(K ⊠ L)_{m,n} = K_m × L_n"""
    generators = {}
    h_faces = {}
    v_faces = {}
    for m, k_gens in enumerate(K.generators):
        for n, l_gens in enumerate(L.generators):
            cells = []
            for g in k_gens:
                for h in l_gens:
                    cell = (g, h)
                    cells.append(cell)
                    if m > 0:
                        h_faces[cell] = tuple(
                            BiSimplexRef(r.word, (), (r.generator, h), (m - 1, n))
                            for r in K.faces[g]
                        )
                    if n > 0:
                        v_faces[cell] = tuple(
                            BiSimplexRef((), r.word, (g, r.generator), (m, n - 1))
                            for r in L.faces[h]
                        )
            generators[(m, n)] = tuple(cells)
    return BisimplicialSet(
        d_max=(K.d_max, L.d_max),
        generators=generators,
        h_faces=h_faces,
        v_faces=v_faces,
        name=f'{K.name}⊠{L.name}',
    )


def h_face(B: BisimplicialSet, r: BiSimplexRef, i: int) -> BiSimplexRef:
    m, n = r.bidegree
    if m < 1 or not 0 <= i <= m:
        raise IndexOutOfRangeError(f'Горизонтальная грань d_{i} не определена', bidegree=r.bidegree)
    outer, idx = commute_face(r.h_word, i)
    if idx is None:
        return BiSimplexRef(outer, r.v_word, r.generator, (m - 1, n))
    inner = B.h_faces[r.generator][idx]
    return BiSimplexRef(
        normalize_word(outer + inner.h_word),
        normalize_word(r.v_word + inner.v_word),
        inner.generator,
        (m - 1, n),
    )


def v_face(B: BisimplicialSet, r: BiSimplexRef, i: int) -> BiSimplexRef:
    m, n = r.bidegree
    if n < 1 or not 0 <= i <= n:
        raise IndexOutOfRangeError(f'Вертикальная грань d_{i} не определена', bidegree=r.bidegree)
    outer, idx = commute_face(r.v_word, i)
    if idx is None:
        return BiSimplexRef(r.h_word, outer, r.generator, (m, n - 1))
    inner = B.v_faces[r.generator][idx]
    return BiSimplexRef(
        normalize_word(r.h_word + inner.h_word),
        normalize_word(outer + inner.v_word),
        inner.generator,
        (m, n - 1),
    )


def h_degenerate(B, r: BiSimplexRef, i: int) -> BiSimplexRef:
    m, n = r.bidegree
    return BiSimplexRef(normalize_word((i,) + r.h_word), r.v_word, r.generator, (m + 1, n))


def v_degenerate(B, r: BiSimplexRef, i: int) -> BiSimplexRef:
    m, n = r.bidegree
    return BiSimplexRef(r.h_word, normalize_word((i,) + r.v_word), r.generator, (m, n + 1))


def validate_bisimplicial_set(B: BisimplicialSet):
    """Горизонтальные и вертикальные тождества и перестановочность граней"""
    for g, (m, n) in B.bidegree_of.items():
        r = B.ref(g)
        for j in range(m + 1):
            for i in range(j):
                if m >= 2 and h_face(B, h_face(B, r, j), i) != h_face(B, h_face(B, r, i), j - 1):
                    raise SimplicialIdentityError(f'Горизонтальное тождество на {format_label(g)}')
        for j in range(n + 1):
            for i in range(j):
                if n >= 2 and v_face(B, v_face(B, r, j), i) != v_face(B, v_face(B, r, i), j - 1):
                    raise SimplicialIdentityError(f'Вертикальное тождество на {format_label(g)}')
        if m >= 1 and n >= 1:
            for i in range(m + 1):
                for j in range(n + 1):
                    if h_face(B, v_face(B, r, j), i) != v_face(B, h_face(B, r, i), j):
                        raise SimplicialIdentityError(
                            f'Грани d^h_{i} и d^v_{j} не коммутируют на {format_label(g)}',
                        )
    return B


def diagonal(B: BisimplicialSet, trunc=None) -> SimplicialSet:
    """δ*(B)_n = B_{n,n}, d_i = d^h_i d^v_i, s_i = s^h_i s^v_i"""
    trunc = min(B.d_max) if trunc is None else trunc
    T = build_tabular(
        trunc,
        lambda n: B.bisimplices(n, n),
        lambda n, r, i: h_face(B, v_face(B, r, i), i),
        lambda n, r, i: h_degenerate(B, v_degenerate(B, r, i), i),
        name=f'δ*({B.name})',
    )
    return normalize(T)


def column_tabular(B: BisimplicialSet, m: int, trunc=None) -> TabularSimplicialSet:
    trunc = B.d_max[1] if trunc is None else trunc
    if m > B.d_max[0] or trunc > B.d_max[1]:
        raise TruncationError(f'Столбец {m} до {trunc} выходит за d_max={B.d_max}', d_max=B.d_max)
    return build_tabular(
        trunc,
        lambda n: B.bisimplices(m, n),
        lambda n, r, i: v_face(B, r, i),
        lambda n, r, i: v_degenerate(B, r, i),
        name=f'{B.name}[{m},•]',
    )


def row_tabular(B: BisimplicialSet, k: int, trunc=None) -> TabularSimplicialSet:
    trunc = B.d_max[0] if trunc is None else trunc
    if k > B.d_max[1] or trunc > B.d_max[0]:
        raise TruncationError(f'Строка {k} до {trunc} выходит за d_max={B.d_max}', d_max=B.d_max)
    return build_tabular(
        trunc,
        lambda n: B.bisimplices(n, k),
        lambda n, r, i: h_face(B, r, i),
        lambda n, r, i: h_degenerate(B, r, i),
        name=f'{B.name}[•,{k}]',
    )


def column(B: BisimplicialSet, m: int) -> SimplicialSet:
    """Вертикальное симплициальное множество B_{m,•}"""
    return normalize(column_tabular(B, m))


def row(B: BisimplicialSet, k: int) -> SimplicialSet:
    """Горизонтальное симплициальное множество B_{•,k}"""
    return normalize(row_tabular(B, k))


# --- Отображения ---------------------------------------------------------------

def apply_map(f: SimplicialMap, r: SimplexRef) -> SimplexRef:
    image = f.assignment[r.generator]
    return SimplexRef(normalize_word(r.word + image.word), image.generator, r.dim)


def identity_map(X: SimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, {g: X.ref(g) for g in X.dim_of}, name=f'id_{X.name}')


def collapse_map(X: SimplicialSet, point=None) -> SimplicialMap:
    """Единственное отображение в Δ^0 (с тем же усечением)"""
    point = point if point is not None else standard_simplex(0, trunc=X.d_max)
    vertex = point.generators[0][0]
    assignment = {
        g: SimplexRef(tuple(range(n - 1, -1, -1)), vertex, n) for g, n in X.dim_of.items()
    }
    return SimplicialMap(X, point, assignment, name=f'{X.name}→*')


def compose_maps(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """g ∘ f"""
    return SimplicialMap(
        f.source,
        g.target,
        {x: apply_map(g, r) for x, r in f.assignment.items()},
        name=f'{g.name}∘{f.name}',
    )


def is_simplicial_map(f: SimplicialMap) -> MapReport:
    X, Y = f.source, f.target
    for g in X.dim_of:
        if g not in f.assignment:
            raise DanglingReferenceError(f'Образующая {format_label(g)} не отображена')
        image = f.assignment[g]
        if image.generator not in Y:
            raise DanglingReferenceError(
                f'Образ {format_label(g)} ссылается на неизвестную образующую '
                f'{format_label(image.generator)}',
            )
    violations = []
    for g, n in X.dim_of.items():
        image = f.assignment[g]
        if image.dim != n:
            violations.append(MapViolation(g, -1, SimplexRef((), g, n), image))
            continue
        for i in (range(n + 1) if n > 0 else ()):
            actual = apply_map(f, X.faces[g][i])
            expected = face(Y, image, i)
            if actual != expected:
                violations.append(MapViolation(g, i, expected, actual))
    if violations:
        logger.info('Отображение %s: %d нарушений', f.name, len(violations))
    return MapReport(valid=not violations, violations=tuple(violations))


def maps_equal(f: SimplicialMap, g: SimplicialMap) -> bool:
    return dict(f.assignment) == dict(g.assignment)


# --- Изоморфизм ---------------------------------------------------------------

def _face_graph(X: SimplicialSet):
    G = nx.DiGraph()
    for n, gens in enumerate(X.generators):
        for g in gens:
            G.add_node(g, dim=n)
    for g in X.dim_of:
        marks = defaultdict(list)
        for i, r in enumerate(X.faces.get(g, ())):
            marks[r.generator].append((i, r.word))
        for h, data in marks.items():
            G.add_edge(g, h, marks=tuple(data))
    return G


def isomorphism(X: SimplicialSet, Y: SimplicialSet):
    """Изоморфизм без учёта меток: словарь образующих X -> образующие Y или None"""
    if X.counts() != Y.counts():
        return None
    matcher = nx_isomorphism.DiGraphMatcher(
        _face_graph(X),
        _face_graph(Y),
        node_match=lambda a, b: a['dim'] == b['dim'],
        edge_match=lambda a, b: a['marks'] == b['marks'],
    )
    if not matcher.is_isomorphic():
        return None
    return dict(matcher.mapping)


def is_isomorphic(X: SimplicialSet, Y: SimplicialSet) -> bool:
    return isomorphism(X, Y) is not None


def relabel(X: SimplicialSet, mapping) -> SimplicialSet:
    """Переименование образующих по словарю старый -> новый"""
    generators = tuple(tuple(mapping[g] for g in gens) for gens in X.generators)
    faces = {
        mapping[g]: tuple(SimplexRef(r.word, mapping[r.generator], r.dim) for r in refs)
        for g, refs in X.faces.items()
    }
    return SimplicialSet(d_max=X.d_max, generators=generators, faces=faces, name=X.name)
