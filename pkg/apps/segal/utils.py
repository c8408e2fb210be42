# apps/segal/utils.py
"""
Хребты, отображения Сигала, ходячий изоморфизм J, обратимые морфизмы и полнота.
Проверки строгие (биекции множеств) и рассчитаны на входы нервного вида.
"""
import logging
from itertools import product as cartesian

from apps.homology.utils import weq_certificate
from apps.posets.structures import FiniteCategory
from apps.posets.utils import nerve
from apps.simplicial.structures import BiSimplexRef, BisimplicialSet, SimplicialMap, SimplicialSet
from apps.simplicial.utils import (
    apply_operator,
    column_tabular,
    external_product,
    h_degenerate,
    normalize,
    row_tabular,
    simplicial_complex,
    standard_simplex,
)
from core.exceptions import IndexOutOfRangeError
from .structures import CompletenessVerdict, SegalLevel, SegalReport

logger = logging.getLogger(__name__)


# --- Хребты и J ------------------------------------------------------------------------

def spine(n: int, trunc=None) -> SimplicialSet:
    """Sp^n: рёбра {i, i+1} симплекса Δ^n, склеенные по общим вершинам"""
    if n < 1:
        raise IndexOutOfRangeError('Хребет определён для n >= 1', n=n)
    return simplicial_complex([[i, i + 1] for i in range(n)], trunc=trunc, name=f'Sp^{n}')


def spine_inclusion(n: int, trunc=None) -> SimplicialMap:
    S = spine(n, trunc)
    D = standard_simplex(n, trunc=S.d_max)
    return SimplicialMap(S, D, {g: D.ref(g) for g in S.dim_of}, name=f'Sp^{n}↪Δ^{n}')


def walking_iso(name='J') -> FiniteCategory:
    """Группоид с двумя объектами и единственным изоморфизмом f: x -> y"""
    identities = {'x': 'id_x', 'y': 'id_y'}
    morphisms = {'id_x': ('x', 'x'), 'id_y': ('y', 'y'), 'f': ('x', 'y'), 'f^-1': ('y', 'x')}
    composition = {}
    for m, (a, b) in morphisms.items():
        composition[(m, identities[a])] = m
        composition[(identities[b], m)] = m
    composition[('f^-1', 'f')] = 'id_x'
    composition[('f', 'f^-1')] = 'id_y'
    return FiniteCategory(('x', 'y'), morphisms, identities, composition, name).validate()


# --- Обратимые морфизмы ------------------------------------------------------------------

def inverse_table(C: FiniteCategory):
    """Обратимый морфизм -> его обратный (тождества включены)"""
    table = {}
    for m, (a, b) in C.morphisms.items():
        for g in C.hom(b, a):
            if C.compose(g, m) == C.identities[a] and C.compose(m, g) == C.identities[b]:
                table[m] = g
                break
    return table


def invertibles(C: FiniteCategory) -> tuple:
    """Неединичные обратимые морфизмы в порядке перечисления"""
    table = inverse_table(C)
    return tuple(m for m in C.non_identity() if m in table)


def completeness_check(C: FiniteCategory) -> CompletenessVerdict:
    """Все морфизмы обратимы, т.е. C - группоид"""
    invertible = invertibles(C)
    rest = tuple(m for m in C.non_identity() if m not in invertible)
    logger.info('%s: обратимых %d, необратимых %d', C.name, len(invertible), len(rest))
    return CompletenessVerdict(complete=not rest, invertibles=invertible, non_invertible=rest)


# --- Бисимплициальные множества из категорий --------------------------------------------

def constant_nerve(X, trunc=None) -> BisimplicialSet:
    """N(C) ⊠ Δ^0 (или K ⊠ Δ^0 для симплициального множества K)"""
    K = X if isinstance(X, SimplicialSet) else nerve(X, trunc)
    return external_product(K, standard_simplex(0, trunc=1))


def _full_strings(C, m):
    """Все строки длины m, тождества включены: (объекты, морфизмы)"""
    strings = [((x,), ()) for x in C.objects]
    for _ in range(m):
        strings = [
            (objects + (C.target(f),), morphisms + (f,))
            for objects, morphisms in strings
            for f in C.morphisms if C.source(f) == objects[-1]
        ]
    return strings


def _iso_strings(C, inverse, x, k):
    strings = [((), x)]
    for _ in range(k):
        strings = [(s + (u,), C.target(u)) for s, end in strings for u in inverse if C.source(u) == end]
    return [s for s, _ in strings]


def _h_face(C, key, i):
    objects, morphisms, isos = key
    m = len(morphisms)
    if i == 0:
        morphisms = morphisms[1:]
    elif i == m:
        morphisms = morphisms[:-1]
    else:
        morphisms = morphisms[:i - 1] + (C.compose(morphisms[i], morphisms[i - 1]),) + morphisms[i + 1:]
    return objects[:i] + objects[i + 1:], morphisms, isos[:i] + isos[i + 1:]


def _v_face(C, inverse, key, j):
    objects, morphisms, isos = key
    k = len(isos[0])
    if j == 0:
        first = [s[0] for s in isos]
        objects = tuple(C.target(u) for u in first)
        # строка 1 - сопряжение строки 0 первыми изоморфизмами
        morphisms = tuple(
            C.compose(first[i + 1], C.compose(f, inverse[first[i]])) for i, f in enumerate(morphisms)
        )
        return objects, morphisms, tuple(s[1:] for s in isos)
    if j == k:
        return objects, morphisms, tuple(s[:-1] for s in isos)
    return objects, morphisms, tuple(s[:j - 1] + (C.compose(s[j], s[j - 1]),) + s[j + 1:] for s in isos)


def _normal_form(C, key) -> BiSimplexRef:
    """
    Горизонтальное вырождение в позиции i: тождество на месте i и совпадающие
    строки изоморфизмов i и i+1. Вертикальное в позиции j: j-й шаг всех строк тождествен.
    """
    objects, morphisms, isos = key
    m, k = len(morphisms), len(isos[0])
    h_rep = [i for i in range(m) if C.is_identity(morphisms[i]) and isos[i] == isos[i + 1]]
    v_rep = [j for j in range(k) if all(C.is_identity(s[j]) for s in isos)]
    dropped = {i + 1 for i in h_rep}
    generator = (
        tuple(x for p, x in enumerate(objects) if p not in dropped),
        tuple(f for p, f in enumerate(morphisms) if p not in h_rep),
        tuple(
            tuple(u for q, u in enumerate(s) if q not in v_rep)
            for p, s in enumerate(isos) if p not in dropped
        ),
    )
    return BiSimplexRef(tuple(reversed(h_rep)), tuple(reversed(v_rep)), generator, (m, k))


def classifying_diagram(C: FiniteCategory, m_max=2, k_max=1) -> BisimplicialSet:
    """
    X_{m,k} - функторы [m] × J[k] -> C, где J[k] - группоид с k+1 изоморфными объектами.
    Ячейка: строка x_0 -> … -> x_m и для каждого x_i строка из k изоморфизмов.
    Столбец X_{0,•} - нерв ядра C, X_{1,•} - нерв ядра категории стрелок.
    """
    inverse = inverse_table(C)
    generators, h_faces, v_faces = {}, {}, {}
    for m in range(m_max + 1):
        strings = _full_strings(C, m)
        for k in range(k_max + 1):
            by_object = {x: _iso_strings(C, inverse, x, k) for x in C.objects}
            cells = []
            for objects, morphisms in strings:
                for isos in cartesian(*(by_object[x] for x in objects)):
                    key = (objects, morphisms, tuple(isos))
                    r = _normal_form(C, key)
                    if r.h_word or r.v_word:
                        continue
                    cells.append(key)
                    if m:
                        h_faces[key] = tuple(_normal_form(C, _h_face(C, key, i)) for i in range(m + 1))
                    if k:
                        v_faces[key] = tuple(
                            _normal_form(C, _v_face(C, inverse, key, j)) for j in range(k + 1)
                        )
            generators[(m, k)] = tuple(cells)
    logger.debug(
        'Классифицирующая диаграмма %s: %s', C.name, {b: len(g) for b, g in generators.items()},
    )
    return BisimplicialSet(
        d_max=(m_max, k_max),
        generators=generators,
        h_faces=h_faces,
        v_faces=v_faces,
        name=f'NC({C.name})',
    )


# --- Проверки ----------------------------------------------------------------------

def segal_level(T, n, k=0) -> SegalLevel:
    """
    Отображение Сигала на уровне n табличного множества T.
    Мощность послойного произведения - число путей длины n в графе 1-симплексов.
    """
    spines = [tuple(apply_operator(T, n, x, (i, i + 1)) for i in range(n)) for x in range(T.size(n))]
    ways = [1] * T.size(0)
    for _ in range(n):
        step = [0] * T.size(0)
        for d0, d1 in T.faces[1]:
            step[d0] += ways[d1]
        ways = step
    fiber_product = sum(ways)
    distinct = len(set(spines))
    return SegalLevel(
        n=n,
        k=k,
        cells=len(spines),
        fiber_product=fiber_product,
        injective=distinct == len(spines),
        surjective=distinct == fiber_product,
    )


def segal_check(X: BisimplicialSet, n_max=None, k_max=None, name='') -> SegalReport:
    """Биективность отображений Сигала для 2 <= n <= n_max во всех строках k <= k_max"""
    n_max = X.d_max[0] if n_max is None else n_max
    k_max = X.d_max[1] if k_max is None else min(k_max, X.d_max[1])
    levels = []
    for k in range(k_max + 1):
        T = row_tabular(X, k, n_max)
        for n in range(2, n_max + 1):
            level = segal_level(T, n, k)
            levels.append(level)
            if not level.bijective:
                logger.info(
                    '%s: отображение Сигала (n=%d, k=%d) не биекция: %d ячеек, произведение %d',
                    X.name, n, k, level.cells, level.fiber_product,
                )
    return SegalReport(name=name or X.name, n_max=n_max, levels=tuple(levels))


def degeneracy_map(X: BisimplicialSet, trunc=None) -> SimplicialMap:
    """s_0: X_{0,•} -> X_{1,•}"""
    T0, T1 = column_tabular(X, 0, trunc), column_tabular(X, 1, trunc)
    X0, X1 = normalize(T0), normalize(T1)
    assignment = {
        r: T1.normal_form(n, h_degenerate(X, r, 0))
        for n, gens in enumerate(X0.generators)
        for r in gens
    }
    return SimplicialMap(X0, X1, assignment, name=f's_0: {X0.name} -> {X1.name}')


def degeneracy_equivalence_check(X: BisimplicialSet, trunc=None):
    """Сертификат слабой эквивалентности s_0: X_{0,•} -> X_{1,•} (π0 и гомологии)"""
    return weq_certificate(degeneracy_map(X, trunc))


def segal_report(C: FiniteCategory, n_max=4, k_max=2) -> SegalReport:
    """
    Отображения Сигала нерва N(C) ⊠ Δ^0 до n_max, обратимые морфизмы, полнота и
    s_0 классифицирующей диаграммы с вертикальным усечением k_max.
    """
    segal = segal_check(constant_nerve(C, n_max), n_max, k_max=0, name=C.name)
    return SegalReport(
        name=C.name,
        n_max=n_max,
        levels=segal.levels,
        completeness=completeness_check(C),
        degeneracy=degeneracy_equivalence_check(classifying_diagram(C, 1, k_max)),
    )
