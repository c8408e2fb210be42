# apps/covers/lifting.py
"""
Правое свойство поднятия относительно ∂Δ^n -> Δ^n.

Квадрат: n-симплекс y цели и согласованный набор (x_0, …, x_n) (n-1)-симплексов
источника с f(x_i) = d_i y и d_i x_j = d_{j-1} x_i при i < j. Поднятие - n-симплекс
x источника с d_i x = x_i и f(x) = y. При n = 0 проверяется сюръективность на вершинах.
"""
import logging

import numpy as np
from django.conf import settings

from apps.bar.utils import point_bar_values
from apps.posets.ex import coface, element_face_plan, subdivision
from apps.posets.structures import ExComplex, FinitePoset
from apps.posets.tables import PosetExComplex, RowIndex, monotone_blocks, order_matrix
from apps.simplicial.structures import SimplicialMap, TabularSimplicialSet
from apps.simplicial.utils import apply_map, format_label, to_tabular
from core.exceptions import EnumerationCapExceeded, TruncationError
from .structures import CoverComplex, DimensionSummary, LiftingFailure, RlpReport, TabularMap
from .utils import cech_rows, phi_image, phi_vertices

logger = logging.getLogger(__name__)

MAX_REPORTED_FAILURES = 20


def default_square_cap():
    return getattr(settings, 'RLP_SQUARE_CAP', 10 ** 6)


def tabular_map(f: SimplicialMap, n_max=None) -> TabularMap:
    n_max = min(f.source.d_max, f.target.d_max) if n_max is None else n_max
    S = to_tabular(f.source, n_max)
    T = to_tabular(f.target, n_max)
    levels = tuple(
        tuple(T.index(n, apply_map(f, r)) for r in S.levels[n]) for n in range(n_max + 1)
    )
    return TabularMap(S, T, levels, name=f.name)


def phi_tabular(cov: CoverComplex, source: ExComplex, target: TabularSimplicialSet) -> TabularMap:
    """φ на всех (в том числе вырожденных) симплексах B_Ex(*, Σ, *)"""
    S = source.tabular
    levels = []
    for n in range(min(S.d_max, target.d_max) + 1):
        levels.append(tuple(
            target.index(n, phi_image(cov, point_bar_values(key), n)) for key in S.levels[n]
        ))
    return TabularMap(S, target, tuple(levels), name='φ')


def _boundaries(f: TabularMap, preimages, n, y):
    """Все согласованные границы над y"""
    S, T = f.source, f.target
    targets = T.faces[n][y]
    over = preimages[n - 1]
    chosen = []

    def extend(j):
        if j == n + 1:
            yield tuple(chosen)
            return
        for x in over.get(targets[j], ()):
            if n >= 2 and any(
                S.faces[n - 1][x][i] != S.faces[n - 1][chosen[i]][j - 1] for i in range(j)
            ):
                continue
            chosen.append(x)
            yield from extend(j + 1)
            chosen.pop()

    yield from extend(0)


def _preimages(f: TabularMap, n):
    result = {}
    for x, y in enumerate(f.levels[n]):
        result.setdefault(y, []).append(x)
    return result


def _default_lifts(f: TabularMap, preimages):
    S = f.source
    by_faces = {}

    def lifts(n, y, boundary):
        if n == 0:
            return preimages[0].get(y, [])
        if n not in by_faces:
            index = {}
            for x in range(S.size(n)):
                index.setdefault(S.faces[n][x], []).append(x)
            by_faces[n] = index
        return [x for x in by_faces[n].get(boundary, ()) if f.levels[n][x] == y]

    return lifts


def check_rlp(f, n_max, cap=None, realizable=None, lifts=None, constructive=None) -> RlpReport:
    """
    Перебирает все квадраты для 0 <= n <= n_max.
    realizable(n, y, boundary) - фильтр реализуемых квадратов (по умолчанию все),
    lifts(n, y, boundary) - список поднятий (по умолчанию поиск по источнику уровня n),
    constructive(n, y, boundary) - предъявленное поднятие, должно входить в lifts.
    Поднятие обязано существовать только у реализуемых квадратов.
    """
    cap = default_square_cap() if cap is None else cap
    if isinstance(f, SimplicialMap):
        f = tabular_map(f, n_max)
    need_source = n_max if lifts is None else n_max - 1
    if f.target.d_max < n_max or f.source.d_max < need_source:
        raise TruncationError(
            f'{f.name}: для n <= {n_max} нужны цель до {n_max} и источник до {need_source}',
            n_max=n_max,
        )
    preimages = tuple(_preimages(f, n) for n in range(len(f.levels)))
    lifts = lifts or _default_lifts(f, preimages)
    realizable = realizable or (lambda n, y, boundary: True)

    dimensions = []
    failures = []
    total = 0
    for n in range(n_max + 1):
        counts = dict(squares=0, lifted=0, realizable=0, realizable_lifted=0,
                      constructive_checked=0, constructive_valid=0)
        for y in range(f.target.size(n)):
            for boundary in (_boundaries(f, preimages, n, y) if n else [()]):
                total += 1
                if total > cap:
                    raise EnumerationCapExceeded('RLP', cap, level=n)
                counts['squares'] += 1
                found = lifts(n, y, boundary)
                ok = realizable(n, y, boundary)
                counts['lifted'] += bool(found)
                if not ok:
                    continue
                counts['realizable'] += 1
                counts['realizable_lifted'] += bool(found)
                reason = None if found else 'нет поднятия'
                if constructive is not None and n >= 1:
                    counts['constructive_checked'] += 1
                    candidate = constructive(n, y, boundary)
                    if candidate is not None and candidate in found:
                        counts['constructive_valid'] += 1
                    else:
                        reason = reason or 'явное поднятие не является поднятием'
                if reason and len(failures) < MAX_REPORTED_FAILURES:
                    failures.append(LiftingFailure(
                        n=n,
                        simplex=format_label(f.target.levels[n][y]),
                        boundary=tuple(format_label(f.source.levels[n - 1][x]) for x in boundary),
                        realizable=True,
                        reason=reason,
                    ))
        dimensions.append(DimensionSummary(n=n, **counts))
        logger.info(
            'RLP %s, n=%d: квадратов %d, реализуемых %d, поднято %d',
            f.name, n, counts['squares'], counts['realizable'], counts['realizable_lifted'],
        )
    return RlpReport(map_name=f.name, n_max=n_max, dimensions=tuple(dimensions), failures=tuple(failures))


# --- Поднятия для φ -------------------------------------------------------------------------

def phi_lifting(cov: CoverComplex, source: ExComplex, f: TabularMap):
    """
    Реализуемость, точный поиск поднятий и явное поднятие для φ.
    Значения поднятия на собственных подмножествах [n] заданы границей,
    свободно только значение на самом [n].
    """
    S, T = source.tabular, f.target

    def values(n, x):
        return point_bar_values(S.levels[n][x])

    def top(n, x):
        return values(n, x)[subdivision(n).element_position[tuple(range(n + 1))]]

    def realizable(n, y, boundary):
        if n == 0:
            return True
        return frozenset().union(*(top(n - 1, x) for x in boundary)) in cov.nonempty

    def extend(n, boundary, tau):
        """Значения кандидата на s_<[n]: на грани j - значения x_j, на [n] - tau; None при несогласованности"""
        sub, lower = subdivision(n), subdivision(n - 1)
        result = [None] * len(sub.elements)
        result[sub.element_position[tuple(range(n + 1))]] = tau
        for j, x in enumerate(boundary):
            for S_low, v in zip(lower.elements, values(n - 1, x)):
                pos = sub.element_position[coface(j, S_low)]
                if result[pos] is None:
                    result[pos] = v
                elif result[pos] != v:
                    return None
        return tuple(result)

    def is_lift(n, y, boundary, candidate):
        sub = subdivision(n)
        if candidate is None:
            return False
        position = sub.element_position
        if any(not candidate[position[A]] <= candidate[position[B]] for A, B in sub.strict_pairs):
            return False
        return phi_image(cov, candidate, n) == T.levels[n][y]

    def lifts(n, y, boundary):
        if n == 0:
            return [
                (alpha,) for alpha in cov.sigma if phi_image(cov, (alpha,), 0) == T.levels[0][y]
            ]
        partial = extend(n, boundary, None)
        if partial is None:
            return []
        top_position = subdivision(n).element_position[tuple(range(n + 1))]
        lower = frozenset().union(*(v for v in partial if v is not None))
        found = []
        # значение на [n] должно содержать все остальные
        for tau in cov.sigma:
            if not lower <= tau:
                continue
            candidate = partial[:top_position] + (tau,) + partial[top_position + 1:]
            if is_lift(n, y, boundary, candidate):
                found.append(candidate)
        return found

    def constructive(n, y, boundary):
        return extend(n, boundary, frozenset().union(*(top(n - 1, x) for x in boundary)))

    return realizable, lifts, constructive


# --- Структурная проверка для φ ---------------------------------------------------------------

MAX_INDEX_BITS = 62


def boundary_poset(n) -> FinitePoset:
    """∂s_<[n]: собственные непустые подмножества [n], порядок элементов как в subdivision(n)"""
    elements = subdivision(n).elements[:-1]
    leq = frozenset((A, B) for A in elements for B in elements if set(A) <= set(B))
    return FinitePoset(elements, leq, f'∂s[{n}]')


def _index_masks(cov: CoverComplex, elements):
    position = {a: idx for idx, a in enumerate(cov.index_set)}
    masks = np.array([sum(1 << position[a] for a in alpha) for alpha in elements], dtype=np.int64)
    order = np.argsort(masks, kind='stable')
    sorted_masks = masks[order]

    def element_of(union):
        """Номер элемента с данной маской, -1 если его нет"""
        at = np.minimum(np.searchsorted(sorted_masks, union), len(sorted_masks) - 1)
        return np.where(sorted_masks[at] == union, order[at], -1)

    return masks, element_of


def structural_phi_rlp(cov: CoverComplex, source: PosetExComplex, target: TabularSimplicialSet,
                       n_max, cap=None) -> RlpReport:
    """
    RLP для φ без перебора границ по таблицам. При n >= 1 квадрат - монотонное
    g: ∂s_<[n] -> Σ, у которого вершины ρ_A(g) образуют симплекс y цели.
    Пусть U - объединение значений g. Поднятия - это α ∈ Σ с α ⊇ U на [n], они есть
    ровно при U ∈ Σ, явное поднятие - α = U. При n <= source.trunc явное поднятие
    ищется среди ячеек источника. В лимит входят только реализуемые квадраты.
    """
    cap = default_square_cap() if cap is None else cap
    if target.d_max < n_max:
        raise TruncationError(f'{target.name}: для n <= {n_max} нужна цель до {n_max}', n_max=n_max)
    P = source.poset
    le = order_matrix(P)
    masks, element_of = _index_masks(cov, P.elements)
    vertices = phi_vertices(cov, source, target)
    rows = cech_rows(target)
    base = len(rows[0])

    dimensions = []
    failures = []
    total = 0

    def report(n, y, reason, boundary=()):
        if len(failures) < MAX_REPORTED_FAILURES:
            failures.append(LiftingFailure(
                n=n, simplex=format_label(target.levels[n][y]), boundary=boundary,
                realizable=True, reason=reason,
            ))

    covered = np.zeros(base, dtype=bool)
    covered[vertices] = True
    total += base
    if total > cap:
        raise EnumerationCapExceeded('RLP', cap, level=0)
    for y in np.flatnonzero(~covered):
        report(0, int(y), 'нет поднятия')
    lifted = int(covered.sum())
    dimensions.append(DimensionSummary(n=0, squares=base, lifted=lifted, realizable=base, realizable_lifted=lifted))

    for n in range(1, n_max + 1):
        sub = subdivision(n)
        Q = boundary_poset(n)
        column = {S: idx for idx, S in enumerate(Q.linear_order)}
        vertex_columns = [column[(i,)] for i in range(n + 1)]
        # столбцы в порядке subdivision(n).elements
        arrange = [column[S] for S in sub.elements[:-1]]
        corners = [sub.element_position[(i,)] for i in range(n + 1)]
        simplices = RowIndex(rows[n], base)

        def keep(table):
            return simplices.find(vertices[table[:, vertex_columns]]) >= 0

        counts = dict(squares=0, realizable=0, valid=0)
        for block in monotone_blocks(Q, P, le, prune=(max(vertex_columns) + 1, keep)):
            top = element_of(np.bitwise_or.reduce(masks[block], axis=1))
            ok = top >= 0
            realizable = int(ok.sum())
            total += realizable
            if total > cap:
                raise EnumerationCapExceeded('RLP', cap, level=n)
            full = np.concatenate([block[ok][:, arrange].astype(np.int64), top[ok][:, None]], axis=1)
            valid = source.find(n, full) >= 0 if n <= source.trunc else np.ones(realizable, dtype=bool)
            counts['squares'] += len(block)
            counts['realizable'] += realizable
            counts['valid'] += int(valid.sum())
            for row in full[~valid][:MAX_REPORTED_FAILURES - len(failures)]:
                y = int(simplices.find(vertices[row[corners]][None, :])[0])
                faces = tuple(
                    format_label(source.key(n - 1, row[list(element_face_plan(n, j))])) for j in range(n + 1)
                )
                report(n, y, 'явное поднятие не является поднятием', faces)
        dimensions.append(DimensionSummary(
            n=n,
            squares=counts['squares'],
            lifted=counts['realizable'],
            realizable=counts['realizable'],
            realizable_lifted=counts['realizable'],
            constructive_checked=counts['realizable'],
            constructive_valid=counts['valid'],
        ))
        logger.info(
            'RLP φ, n=%d: квадратов %d, реализуемых %d, явных поднятий %d',
            n, counts['squares'], counts['realizable'], counts['valid'],
        )
    return RlpReport(map_name='φ', n_max=n_max, dimensions=tuple(dimensions), failures=tuple(failures))


def check_phi_rlp(cov: CoverComplex, source, target: TabularSimplicialSet, n_max, cap=None):
    """
    RLP для φ: источник нужен только до n_max - 1. Для B_Ex на массивах и не более
    62 индексов - структурная проверка, иначе перебор квадратов check_rlp.
    """
    if source.trunc < n_max - 1:
        raise TruncationError(f'B_Ex построен до {source.trunc}, нужно {n_max - 1}', n_max=n_max)
    if isinstance(source, PosetExComplex) and len(cov.index_set) <= MAX_INDEX_BITS:
        return structural_phi_rlp(cov, source, target, n_max, cap)
    f = phi_tabular(cov, source, target)
    realizable, lifts, constructive = phi_lifting(cov, source, f)
    return check_rlp(f, n_max, cap, realizable=realizable, lifts=lifts, constructive=constructive)
