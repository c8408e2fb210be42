import logging
from functools import lru_cache
from itertools import combinations

import networkx as nx
from django.conf import settings

from apps.simplicial.structures import SimplexRef, SimplicialMap, SimplicialSet
from core.exceptions import CategoryError, EnumerationCapExceeded, PosetError, TruncationError
from .structures import FiniteCategory, FinitePoset, Functor, MonotoneMap

logger = logging.getLogger(__name__)


def default_trunc():
    return getattr(settings, 'SIMPLICIAL_DEFAULT_TRUNC', 3)


def default_cap():
    return getattr(settings, 'EX_ENUMERATION_CAP', 10 ** 6)


# --- Проверка ------------------------------------------------------------------

def validate_poset(P: FinitePoset):
    elements = set(P.elements)
    if len(elements) != len(P.elements):
        raise PosetError(f'Повторяющиеся элементы в {P.name or "порядке"}')
    for a, b in P.leq:
        if a not in elements or b not in elements:
            raise PosetError(f'Пара ({a}, {b}) ссылается на неизвестный элемент')
    for a in P.elements:
        if (a, a) not in P.leq:
            raise PosetError(f'Отношение не рефлексивно на {a}')
    for a, b in P.leq:
        if a != b and (b, a) in P.leq:
            raise PosetError(f'Отношение не антисимметрично на ({a}, {b})')
    for a, b in P.leq:
        for c in P.elements:
            if (b, c) in P.leq and (a, c) not in P.leq:
                raise PosetError(f'Отношение не транзитивно на ({a}, {b}, {c})')
    return P


def validate_category(C: FiniteCategory):
    objects = set(C.objects)
    for m, (a, b) in C.morphisms.items():
        if a not in objects or b not in objects:
            raise CategoryError(f'Морфизм {m} ссылается на неизвестный объект')
    for a in C.objects:
        ident = C.identities.get(a)
        if ident is None or C.morphisms.get(ident) != (a, a):
            raise CategoryError(f'Нет тождественного морфизма объекта {a}')
    for g, (b, c) in C.morphisms.items():
        for f, (a, b2) in C.morphisms.items():
            if b2 != b:
                if (g, f) in C.composition:
                    raise CategoryError(f'Композиция {g}∘{f} задана для несоставимых морфизмов')
                continue
            h = C.composition.get((g, f))
            if h is None:
                raise CategoryError(f'Не задана композиция {g}∘{f}')
            if C.morphisms.get(h) != (a, c):
                raise CategoryError(f'Композиция {g}∘{f} имеет неверные концы')
    for m, (a, b) in C.morphisms.items():
        if C.composition[(m, C.identities[a])] != m or C.composition[(C.identities[b], m)] != m:
            raise CategoryError(f'Нарушен закон единицы для {m}')
    for f in C.morphisms:
        for g in C.morphisms:
            if C.source(g) != C.target(f):
                continue
            gf = C.composition[(g, f)]
            for h in C.morphisms:
                if C.source(h) != C.target(g):
                    continue
                if C.composition[(h, gf)] != C.composition[(C.composition[(h, g)], f)]:
                    raise CategoryError(f'Нарушена ассоциативность на {h}∘{g}∘{f}')
    return C


# --- Стандартные порядки ----------------------------------------------------------

def ordinal(n: int) -> FinitePoset:
    """[n] = {0 < 1 < … < n}"""
    elements = tuple(range(n + 1))
    leq = frozenset((a, b) for a in elements for b in elements if a <= b)
    return FinitePoset(elements, leq, f'[{n}]')


def discrete_poset(elements, name='') -> FinitePoset:
    elements = tuple(elements)
    return FinitePoset(elements, frozenset((a, a) for a in elements), name)


def subset_poset(A) -> FinitePoset:
    """sA: непустые подмножества A по включению"""
    A = tuple(A)
    if not A:
        raise PosetError('Множество индексов пусто')
    elements = tuple(
        frozenset(c) for k in range(1, len(A) + 1) for c in combinations(A, k)
    )
    leq = frozenset((a, b) for a in elements for b in elements if a <= b)
    return FinitePoset(elements, leq, f's{{{",".join(map(str, A))}}}')


def chains(P: FinitePoset, max_length=None):
    """Непустые цепи в порядке линейного расширения, по длине, затем лексикографически"""
    order = P.linear_order
    position = {a: idx for idx, a in enumerate(order)}
    result = []
    layer = [(a,) for a in order]
    length = 1
    while layer and (max_length is None or length <= max_length):
        result.extend(layer)
        nxt = []
        for c in layer:
            last = position[c[-1]]
            for b in order[last + 1:]:
                if P.lt(c[-1], b):
                    nxt.append(c + (b,))
        layer = nxt
        length += 1
    return result


def height(P: FinitePoset):
    """Длина самой длинной цепи минус один"""
    if not P.elements:
        return -1
    return nx.dag_longest_path_length(P.graph)


def chain_poset(P: FinitePoset) -> FinitePoset:
    """s_<P: непустые цепи P по включению"""
    elements = tuple(chains(P))
    sets = {c: frozenset(c) for c in elements}
    leq = frozenset((a, b) for a in elements for b in elements if sets[a] <= sets[b])
    return FinitePoset(elements, leq, f's_<{P.name}')


# --- Нервы ---------------------------------------------------------------------------

def chain_ref(sequence):
    """Нормальная форма симплекса нерва, заданного нестрого возрастающей цепью"""
    sequence = tuple(sequence)
    repeats = [j for j in range(len(sequence) - 1) if sequence[j] == sequence[j + 1]]
    generator = tuple(a for j, a in enumerate(sequence) if j == 0 or sequence[j - 1] != a)
    return SimplexRef(tuple(reversed(repeats)), generator, len(sequence) - 1)


def string_ref(C: FiniteCategory, objects, morphisms):
    """
    Нормальная форма строки x0 -f1-> x1 … -fn-> xn:
    тождество на позиции j (с нуля) даёт вырождение s_j.
    """
    repeats = [j for j, m in enumerate(morphisms) if C.is_identity(m)]
    generator = [objects[0]]
    for j, m in enumerate(morphisms):
        if j in repeats:
            continue
        generator.extend((m, objects[j + 1]))
    return SimplexRef(tuple(reversed(repeats)), tuple(generator), len(morphisms))


def _split_string(s):
    return s[0::2], s[1::2]


def _poset_nerve(P: FinitePoset, trunc):
    top = height(P)
    d_max = top + 1 if trunc is None else trunc
    by_length = {}
    for c in chains(P, max_length=d_max + 1):
        by_length.setdefault(len(c), []).append(c)
    generators = tuple(tuple(by_length.get(k + 1, ())) for k in range(d_max + 1))
    faces = {
        c: tuple(SimplexRef((), c[:i] + c[i + 1:], len(c) - 2) for i in range(len(c)))
        for gens in generators[1:] for c in gens
    }
    return SimplicialSet(d_max=d_max, generators=generators, faces=faces, name=f'N({P.name})')


def _category_nerve(C: FiniteCategory, trunc):
    if trunc is None:
        if not C.is_direct:
            trunc = default_trunc()
        else:
            G = nx.DiGraph()
            G.add_nodes_from(C.objects)
            G.add_edges_from(C.morphisms[m] for m in C.non_identity())
            trunc = nx.dag_longest_path_length(G) + 1
    non_identity = C.non_identity()
    layer = [(x,) for x in C.objects]
    generators = [tuple(layer)]
    for _ in range(trunc):
        layer = [s + (m, C.target(m)) for s in layer for m in non_identity if C.source(m) == s[-1]]
        generators.append(tuple(layer))
    faces = {}
    for n, gens in enumerate(generators):
        if n == 0:
            continue
        for s in gens:
            objects, morphisms = _split_string(s)
            refs = [SimplexRef((), s[2:], n - 1)]
            for i in range(1, n):
                composite = C.compose(morphisms[i], morphisms[i - 1])
                refs.append(string_ref(
                    C,
                    objects[:i] + objects[i + 1:],
                    morphisms[:i - 1] + (composite,) + morphisms[i + 1:],
                ))
            refs.append(SimplexRef((), s[:-2], n - 1))
            faces[s] = tuple(refs)
    return SimplicialSet(d_max=trunc, generators=tuple(generators), faces=faces, name=f'N({C.name})')


def nerve(C, trunc=None) -> SimplicialSet:
    """
    Нерв конечной категории или порядка.
    Невырожденные n-симплексы - строки из n неединичных составимых морфизмов,
    для порядка - строгие цепи длины n + 1.
    """
    if isinstance(C, FinitePoset):
        X = _poset_nerve(C, trunc)
    elif isinstance(C, FiniteCategory):
        X = _category_nerve(C, trunc)
    else:
        raise TypeError(f'Нерв не определён для {type(C).__name__}')
    logger.debug('Нерв %s: образующие %s', C.name, X.counts())
    return X


def nerve_map(F, trunc=None, source=None, target=None) -> SimplicialMap:
    """Нерв монотонного отображения или функтора"""
    if isinstance(F, MonotoneMap):
        source = source or nerve(F.source, trunc)
        target = target or nerve(F.target, source.d_max)
        assignment = {
            c: chain_ref(F.assignment[a] for a in c)
            for gens in source.generators for c in gens
        }
    elif isinstance(F, Functor):
        source = source or nerve(F.source, trunc)
        target = target or nerve(F.target, source.d_max)
        assignment = {}
        for gens in source.generators:
            for s in gens:
                objects, morphisms = _split_string(s)
                assignment[s] = string_ref(
                    F.target,
                    tuple(F.on_objects[x] for x in objects),
                    tuple(F.on_morphisms[m] for m in morphisms),
                )
    else:
        raise TypeError(f'Нерв не определён для {type(F).__name__}')
    if target.d_max < source.d_max:
        raise TruncationError('Усечение цели ниже усечения источника', d_max=target.d_max)
    return SimplicialMap(source, target, assignment, name=f'N({F.name})')


# --- Подразбиение ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def sd_poset(n: int) -> FinitePoset:
    """s_<[n]: непустые подмножества [n] по включению"""
    return chain_poset(ordinal(n))


def sd_simplex(n: int, trunc=None) -> SimplicialSet:
    """Sd Δ^n = N(s_<[n])"""
    return nerve(sd_poset(n), trunc)


def sd_nerve(P: FinitePoset, trunc=None) -> SimplicialSet:
    """Sd N(P) = N(s_<P); подразбиение реализовано только для нервов порядков"""
    return nerve(chain_poset(P), trunc)


# --- Перечисления ------------------------------------------------------------------------

def monotone_maps(Q: FinitePoset, P: FinitePoset, cap=None, what='монотонные отображения'):
    """
    Все монотонные отображения Q -> P в лексикографическом порядке
    (элементы Q в порядке линейного расширения, значения в порядке элементов P).
    """
    cap = default_cap() if cap is None else cap
    order = Q.linear_order
    below = [[j for j in range(i) if Q.lt(order[j], order[i])] for i in range(len(order))]
    values = [None] * len(order)
    results = []

    def place(i):
        if i == len(order):
            if len(results) >= cap:
                raise EnumerationCapExceeded(what, cap)
            results.append(dict(zip(order, values)))
            return
        for p in P.elements:
            if all(P.le(values[j], p) for j in below[i]):
                values[i] = p
                place(i + 1)
        values[i] = None

    place(0)
    return results


def functors_from_poset(Q: FinitePoset, C: FiniteCategory, cap=None, what='функторы'):
    """
    Все функторы Q -> C: пары (объекты по Q.linear_order, морфизмы по Q.strict_pairs).
    Морфизм на паре a < q вынужден композицией, если между a и q есть промежуточный элемент.
    """
    cap = default_cap() if cap is None else cap
    order = Q.linear_order
    obj = {}
    mor = {}
    results = []

    def place(i):
        if i == len(order):
            if len(results) >= cap:
                raise EnumerationCapExceeded(what, cap)
            results.append((
                tuple(obj[q] for q in order),
                tuple(mor[p] for p in Q.strict_pairs),
            ))
            return
        q = order[i]
        preds = Q.below(q)
        for x in C.objects:
            obj[q] = x
            assign(i, q, preds, len(preds) - 1)
        obj.pop(q, None)

    def assign(i, q, preds, k):
        if k < 0:
            place(i + 1)
            return
        a = preds[k]
        forced = None
        for l in preds[k + 1:]:
            if Q.lt(a, l):
                h = C.compose(mor[(l, q)], mor[(a, l)])
                if forced is None:
                    forced = h
                elif forced != h:
                    return
        candidates = (forced,) if forced is not None else C.hom(obj[a], obj[q])
        for m in candidates:
            mor[(a, q)] = m
            assign(i, q, preds, k - 1)
        mor.pop((a, q), None)

    place(0)
    return results


def functor_from_assignment(Q: FinitePoset, C: FiniteCategory, assignment, name=''):
    objects, morphisms = assignment
    on_objects = dict(zip(Q.linear_order, objects))
    on_morphisms = {(a, a): C.identities[on_objects[a]] for a in Q.elements}
    on_morphisms.update(zip(Q.strict_pairs, morphisms))
    return Functor(Q.as_category(), C, on_objects, on_morphisms, name=name)
