# apps/covers/utils.py
"""
Хорошие покрытия в стянутой модели: каждое непустое пересечение U_α - точка.

Чехов нерв ČU: n-симплексы - наборы (a_0, …, a_n) с {a_0, …, a_n} ∈ Σ.
Замыкание U^cl индексируется самим Σ, U_α ∩ U_β = U_{α∪β}.
ψ: ČU -> B_Ex(*, Σ, *) задаётся σ_A, φ: B_Ex(*, Σ, *) -> ČU^cl задаётся ρ_A.
Σ упорядочено по включению, поэтому σ_A монотонно.
"""
import logging
from itertools import combinations

import numpy as np
from django.conf import settings

from apps.bar.utils import hocolim, point_bar_ex, point_bar_key, point_diagram
from apps.posets.ex import subdivision
from apps.posets.structures import FinitePoset, MonotoneMap
from apps.posets.tables import PosetExComplex, RowIndex
from apps.posets.utils import default_trunc, sd_poset, subset_poset
from apps.simplicial.structures import SimplicialMap, SimplicialSet, TableAssignment, TabularSimplicialSet
from apps.simplicial.utils import build_tabular, format_label, normalize, simplicial_complex
from core.exceptions import CoverComplexError
from .structures import CoverComplex

logger = logging.getLogger(__name__)

DEFAULT_TRIANGULATIONS = {
    'circle': [[0, 1], [0, 2], [1, 2]],
    'sphere': [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
    'torus': [
        [i, (i + 1) % 7, (i + 3) % 7] for i in range(7)
    ] + [
        [i, (i + 2) % 7, (i + 3) % 7] for i in range(7)
    ],
}


# --- Покрытия ------------------------------------------------------------------------

def validate_cover(cov: CoverComplex):
    index = set(cov.index_set)
    if not cov.index_set:
        raise CoverComplexError('Пустое множество индексов')
    if len(index) != len(cov.index_set):
        raise CoverComplexError('Индексы повторяются')
    for alpha in cov.nonempty:
        if not alpha:
            raise CoverComplexError('Пустое множество в Σ')
        if not alpha <= index:
            raise CoverComplexError(f'{format_label(alpha)} ссылается на неизвестные индексы')
        if len(alpha) > 1:
            for a in alpha:
                if alpha - {a} not in cov.nonempty:
                    raise CoverComplexError(
                        f'Σ не замкнуто вниз: {format_label(alpha)} без {format_label(alpha - {a})}',
                    )
    for a in cov.index_set:
        if frozenset({a}) not in cov.nonempty:
            raise CoverComplexError(f'Пустой элемент покрытия U_{format_label(a)}')
    if cov.support is not None:
        if set(cov.support) != index or any(not s for s in cov.support.values()):
            raise CoverComplexError('Носители заданы не для всех индексов')
    return cov


def cover_from_facets(facets, labels=None, name='', reference=''):
    """Покрытие звёздами вершин: Σ - все грани комплекса"""
    vertices = sorted({v for f in facets for v in f})
    labels = labels or {v: v for v in vertices}
    nonempty = set()
    for f in facets:
        f = [labels[v] for v in f]
        for k in range(1, len(f) + 1):
            nonempty.update(frozenset(c) for c in combinations(f, k))
    cov = CoverComplex(
        index_set=tuple(labels[v] for v in vertices),
        nonempty=frozenset(nonempty),
        reference=reference,
        name=name,
    )
    return validate_cover(cov)


def reference_triangulations(trunc=None):
    """Минимальные триангуляции: окружность, сфера, тор на 7 вершинах"""
    table = getattr(settings, 'REFERENCE_TRIANGULATIONS', None) or DEFAULT_TRIANGULATIONS
    return {
        name: simplicial_complex(facets, trunc=trunc, name=name) for name, facets in table.items()
    }


def reference_homology(cov: CoverComplex, trunc):
    """Заданные гомологии покрытия или гомологии его эталонной триангуляции"""
    if cov.reference_homology is not None:
        return tuple(cov.reference_homology)
    if not cov.reference:
        return None
    from apps.homology.utils import simplicial_homology

    triangulations = reference_triangulations(trunc)
    if cov.reference not in triangulations:
        raise CoverComplexError(f'Нет эталонной триангуляции "{cov.reference}"')
    return simplicial_homology(triangulations[cov.reference]).reliable_groups


def relabel(cov: CoverComplex, mapping) -> CoverComplex:
    support = None
    if cov.support is not None:
        support = {mapping[a]: s for a, s in cov.support.items()}
    return CoverComplex(
        index_set=tuple(mapping[a] for a in cov.index_set),
        nonempty=frozenset(frozenset(mapping[a] for a in alpha) for alpha in cov.nonempty),
        support=support,
        reference_homology=cov.reference_homology,
        reference=cov.reference,
        name=cov.name,
    )


def closure(cov: CoverComplex) -> CoverComplex:
    """
    U^cl: индексы - элементы Σ (как множества исходных индексов), семейство
    {α_1, …, α_k} непусто, если α_1 ∪ … ∪ α_k ∈ Σ.
    """
    sigma = cov.base_nonempty
    index_set = tuple(sorted(sigma, key=lambda alpha: (len(alpha), sorted(format_label(a) for a in alpha))))
    maximal = [alpha for alpha in sigma if not any(alpha < beta for beta in sigma)]
    nonempty = set()
    for top in maximal:
        inside = [alpha for alpha in index_set if alpha <= top]
        for k in range(1, len(inside) + 1):
            nonempty.update(frozenset(c) for c in combinations(inside, k))
    logger.debug('Замыкание %s: %d индексов, %d непустых семейств', cov.name, len(index_set), len(nonempty))
    return CoverComplex(
        index_set=index_set,
        nonempty=frozenset(nonempty),
        support={alpha: alpha for alpha in index_set},
        reference_homology=cov.reference_homology,
        reference=cov.reference,
        name=cov.name if cov.name.endswith('^cl') else f'{cov.name}^cl',
    )


# --- Чехов нерв ----------------------------------------------------------------------

def cech_tabular(cov: CoverComplex, trunc=None):
    trunc = default_trunc() if trunc is None else trunc
    levels = [[(a,) for a in cov.index_set]]
    for _ in range(trunc):
        levels.append([
            t + (a,)
            for t in levels[-1]
            for a in cov.index_set
            if cov.is_nonempty(set(t) | {a})
        ])
    return build_tabular(
        trunc,
        lambda n: levels[n],
        lambda n, t, i: t[:i] + t[i + 1:],
        lambda n, t, i: t[:i + 1] + t[i:],
        name=f'Č({cov.name})',
    )


def cech_nerve(cov: CoverComplex, trunc=None) -> SimplicialSet:
    X = normalize(cech_tabular(cov, trunc))
    logger.info('%s: образующие %s', X.name, X.counts())
    return X


def canonical_inclusion(cov: CoverComplex, trunc=None, source=None, target_tabular=None) -> SimplicialMap:
    """ČU ↪ ČU^cl: индекс a переходит в носитель U_a"""
    source = source or cech_nerve(cov, trunc)
    T = target_tabular or cech_tabular(closure(cov), source.d_max)
    assignment = {
        t: T.normal_form(n, tuple(cov.support_of(a) for a in t))
        for n, gens in enumerate(source.generators)
        for t in gens
    }
    return SimplicialMap(source, normalize(T), assignment, name='ČU↪ČU^cl')


# --- σ_A и ρ_A -------------------------------------------------------------------------

def sigma_values(t):
    """Значения σ_A(t) на элементах s_<[n] в порядке subdivision(n).elements"""
    return tuple(frozenset(t[i] for i in S) for S in subdivision(len(t) - 1).elements)


def sigma_A(t, target: FinitePoset = None) -> MonotoneMap:
    """σ_A(a_0, …, a_n)({i_0, …, i_k}) = {a_{i_0}, …, a_{i_k}}"""
    if not t:
        raise CoverComplexError('σ_A определено на непустых наборах')
    n = len(t) - 1
    target = target or subset_poset(dict.fromkeys(t))
    assignment = dict(zip(subdivision(n).elements, sigma_values(t)))
    return MonotoneMap(sd_poset(n), target, assignment, name=f'σ_A{format_label(tuple(t))}')


def rho_A(alpha: MonotoneMap) -> tuple:
    """ρ_A(α) = (α({0}), …, α({n}))"""
    n = max(len(S) for S in alpha.source.elements) - 1
    return tuple(alpha((i,)) for i in range(n + 1))


# --- B_Ex(*, Σ, *) и отображения ψ, φ ------------------------------------------------------

def sigma_poset(cov: CoverComplex) -> FinitePoset:
    elements = cov.sigma
    leq = frozenset((a, b) for a in elements for b in elements if a <= b)
    return FinitePoset(elements, leq, f'Σ({cov.name})')


def sigma_category(cov: CoverComplex):
    return sigma_poset(cov).as_category()


def sigma_bar(cov: CoverComplex, trunc=None) -> SimplicialSet:
    """B(*, Σ, U) стянутой диаграммы, т.е. N(Σ)"""
    trunc = default_trunc() if trunc is None else trunc
    return hocolim(point_diagram(sigma_category(cov), trunc), trunc)


def sigma_bar_ex(cov: CoverComplex, trunc=None, cap=None) -> PosetExComplex:
    """B_Ex(*, Σ, *) на массивах; ключи и метки как у bar_ex_complex"""
    return point_bar_ex(sigma_poset(cov), trunc, cap)


def vertex_values(values, n):
    position = subdivision(n).element_position
    return tuple(values[position[(i,)]] for i in range(n + 1))


def psi_map(cov: CoverComplex, trunc=None, cap=None, source=None, target=None) -> SimplicialMap:
    """ψ: ČU -> B_Ex(*, Σ, *), набор t переходит в ячейку σ_A(t)"""
    target = target or sigma_bar_ex(cov, trunc, cap)
    source = source or cech_nerve(cov, target.trunc)
    assignment = {
        t: target.ref(n, point_bar_key(sigma_values(t), n))
        for n, gens in enumerate(source.generators)
        for t in gens
    }
    return SimplicialMap(source, target.simplicial_set, assignment, name='ψ')


def phi_hat(cov: CoverComplex, alpha) -> frozenset:
    """Индекс замыкания для α ∈ Σ: объединение носителей"""
    return frozenset().union(*(cov.support_of(a) for a in alpha))


def phi_image(cov: CoverComplex, values, n):
    """ρ_A в терминах индексов замыкания"""
    return tuple(phi_hat(cov, v) for v in vertex_values(values, n))


def cech_rows(T: TabularSimplicialSet):
    """Уровни табличного нерва Чеха как массивы номеров вершин"""
    vertex = {key[0]: v for v, key in enumerate(T.levels[0])}
    return tuple(
        np.array([[vertex[b] for b in key] for key in level], dtype=np.int64).reshape(len(level), n + 1)
        for n, level in enumerate(T.levels)
    )


def phi_vertices(cov: CoverComplex, source: PosetExComplex, T: TabularSimplicialSet):
    """Номер вершины T для каждого элемента порядка источника"""
    vertex = {key[0]: v for v, key in enumerate(T.levels[0])}
    try:
        return np.array([vertex[phi_hat(cov, alpha)] for alpha in source.poset.elements], dtype=np.int64)
    except KeyError:
        raise CoverComplexError(f'{cov.name}: ρ_A выводит за вершины {T.name}') from None


def phi_map(cov: CoverComplex, trunc=None, cap=None, source: PosetExComplex = None,
            target_tabular=None) -> SimplicialMap:
    """φ: B_Ex(*, Σ, *) -> ČU^cl, ячейка α переходит в ρ_A(α)"""
    source = source or sigma_bar_ex(cov, trunc, cap)
    T = target_tabular or cech_tabular(closure(cov), source.trunc)
    X = source.simplicial_set
    target = normalize(T)
    vertices = phi_vertices(cov, source, T)
    rows = cech_rows(T)
    images, generator_index = [], []
    for n in range(X.d_max + 1):
        table = source.levels[n][source.nondegenerate[n]]
        image = RowIndex(rows[n], len(rows[0])).find(vertices[table[:, :n + 1]])
        if (image < 0).any():
            raise CoverComplexError(f'{cov.name}: φ выводит за {T.name} на уровне {n}')
        nondegenerate = np.array([not word for word, _ in T.decompositions[n]], dtype=bool)
        number = np.cumsum(nondegenerate) - 1
        images.append(image)
        generator_index.append(np.where(nondegenerate[image], number[image], -1))

    def resolve(n, j):
        return T.normal_form_at(n, int(images[n][j]))

    return SimplicialMap(X, target, TableAssignment(X, generator_index, resolve), name='φ')
