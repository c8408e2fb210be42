# apps/posets/ex.py
"""
Функтор Ex, правый сопряжённый к подразбиению Sd.

(Ex X)_n - симплициальные отображения Sd Δ^n -> X. Отображение из нерва порядка
задаётся значениями на цепях s_<[n], согласованными с гранями, поэтому перебор
идёт по цепям, а кандидаты берутся из индекса "набор граней -> симплексы X".
Грани и вырождения Ex - предкомпозиция с Sd кограней δ^i и ковырождений σ^i.
"""
import logging
from functools import lru_cache

from apps.simplicial.structures import SimplexRef, SimplicialMap, SimplicialSet
from apps.simplicial.utils import (
    apply_map,
    apply_operator,
    build_tabular,
    face,
    normalize,
    normalize_word,
    relabel,
    to_tabular,
    truncate,
)
from core.exceptions import EnumerationCapExceeded, TruncationError
from .structures import ExComplex, FiniteCategory, FinitePoset, Subdivision
from .utils import (
    chain_ref,
    chains,
    default_cap,
    default_trunc,
    functors_from_poset,
    nerve,
    sd_poset,
)

logger = logging.getLogger(__name__)


# --- Подразбиение стандартного симплекса --------------------------------------

@lru_cache(maxsize=None)
def subdivision(n: int) -> Subdivision:
    P = sd_poset(n)
    return Subdivision(n=n, elements=P.linear_order, chains=tuple(chains(P)))


def coface(i, S):
    """δ^i: [n-1] -> [n] на подмножестве"""
    return tuple(s if s < i else s + 1 for s in S)


def codegeneracy(i, S):
    """σ^i: [n+1] -> [n] на подмножестве (образ как множество)"""
    return tuple(sorted({s if s <= i else s - 1 for s in S}))


@lru_cache(maxsize=None)
def face_plan(n: int, i: int):
    """Позиции цепей Sd Δ^n, в которые δ^i переводит цепи Sd Δ^{n-1}"""
    target = subdivision(n).chain_position
    return tuple(
        target[tuple(coface(i, S) for S in c)] for c in subdivision(n - 1).chains
    )


@lru_cache(maxsize=None)
def degeneracy_plan(n: int, i: int):
    """
    Для каждой цепи Sd Δ^{n+1}: (слово, позиция цепи в Sd Δ^n, размерность).
    Образ цепи под σ^i - нестрого возрастающая последовательность, т.е. вырожденный
    симплекс нерва.
    """
    target = subdivision(n).chain_position
    plan = []
    for c in subdivision(n + 1).chains:
        r = chain_ref(codegeneracy(i, S) for S in c)
        plan.append((r.word, target[r.generator], r.dim))
    return tuple(plan)


@lru_cache(maxsize=None)
def element_face_plan(n: int, i: int):
    target = subdivision(n).element_position
    return tuple(target[coface(i, S)] for S in subdivision(n - 1).elements)


@lru_cache(maxsize=None)
def element_degeneracy_plan(n: int, i: int):
    target = subdivision(n).element_position
    return tuple(target[codegeneracy(i, S)] for S in subdivision(n + 1).elements)


def _on_word(word, r: SimplexRef, dim):
    return SimplexRef(normalize_word(word + r.word), r.generator, dim)


# --- Перебор отображений Sd Δ^n -> X ----------------------------------------

def _boundary_index(X: SimplicialSet, n):
    """index[k][(d_0 σ, …, d_k σ)] -> симплексы σ ∈ X_k"""
    index = [{(): list(X.simplices(0))}]
    for k in range(1, n + 1):
        table = {}
        for r in X.simplices(k):
            table.setdefault(tuple(face(X, r, i) for i in range(k + 1)), []).append(r)
        index.append(table)
    return index


def _chain_schedule(sub: Subdivision):
    """
    Порядок назначения: по элементам в линейном порядке, внутри - цепи с этим
    максимумом по длине. Все грани очередной цепи к этому моменту назначены.
    """
    by_max = {}
    for c in sub.chains:
        by_max.setdefault(c[-1], []).append(c)
    schedule = []
    for S in sub.elements:
        for c in sorted(by_max.get(S, ()), key=len):
            faces = tuple(sub.chain_position[c[:i] + c[i + 1:]] for i in range(len(c))) if len(c) > 1 else ()
            schedule.append((sub.chain_position[c], len(c) - 1, faces))
    return schedule


def sd_maps(X: SimplicialSet, n: int, cap=None, index=None):
    """
    Все отображения Sd Δ^n -> X: кортежи симплексов X, выровненные по subdivision(n).chains.
    """
    cap = default_cap() if cap is None else cap
    if n > X.d_max:
        raise TruncationError(f'Ex_{n} требует X до размерности {n}', d_max=X.d_max)
    sub = subdivision(n)
    index = index or _boundary_index(X, n)
    schedule = _chain_schedule(sub)
    values = [None] * len(sub.chains)
    results = []

    def place(t):
        if t == len(schedule):
            if len(results) >= cap:
                raise EnumerationCapExceeded('Ex', cap, level=n)
            results.append(tuple(values))
            return
        pos, k, faces = schedule[t]
        for r in index[k].get(tuple(values[p] for p in faces), ()):
            values[pos] = r
            place(t + 1)
        values[pos] = None

    place(0)
    return results


def _short_names(T, prefix):
    names = {}
    for n, level in enumerate(T.levels):
        j = 0
        for x, key in enumerate(level):
            if T.decompositions[n][x][0]:
                continue
            names[key] = f'{prefix}{n}_{j}'
            j += 1
    return names


def ex_complex(source, T, kind, prefix, name):
    names = _short_names(T, prefix)
    simplicial_set = relabel(normalize(T), names)
    logger.info('%s: образующие %s', name, simplicial_set.counts())
    return ExComplex(source=source, tabular=T, simplicial_set=simplicial_set, names=names, kind=kind)


def _resolve_trunc(trunc, d_max=None):
    trunc = default_trunc() if trunc is None else trunc
    if d_max is not None:
        trunc = min(trunc, d_max)
    return trunc


def ex_tabular(X: SimplicialSet, trunc=None, cap=None):
    trunc = _resolve_trunc(trunc, X.d_max)
    index = _boundary_index(X, trunc)
    levels = [sd_maps(X, n, cap, index) for n in range(trunc + 1)]
    return build_tabular(
        trunc,
        lambda n: levels[n],
        lambda n, key, i: tuple(key[p] for p in face_plan(n, i)),
        lambda n, key, i: tuple(_on_word(word, key[p], dim) for word, p, dim in degeneracy_plan(n, i)),
        name=f'Ex({X.name})',
    )


def ex(X: SimplicialSet, trunc=None, cap=None, prefix='ex') -> ExComplex:
    """Ex X до размерности trunc (не выше d_max входа)"""
    T = ex_tabular(X, trunc, cap)
    return ex_complex(X, T, 'maps', prefix, f'Ex({X.name})')


def ex_levels(X: SimplicialSet, trunc=None, cap=None):
    """Число n-симплексов Ex X (включая вырожденные) по уровням"""
    trunc = _resolve_trunc(trunc, X.d_max)
    index = _boundary_index(X, trunc)
    return tuple(len(sd_maps(X, n, cap, index)) for n in range(trunc + 1))


def max_ex_trunc(X: SimplicialSet, trunc, cap=None):
    """Наибольшее усечение не выше trunc, при котором перебор Ex X укладывается в лимит"""
    trunc = _resolve_trunc(trunc, X.d_max)
    index = _boundary_index(X, trunc)
    for n in range(trunc + 1):
        try:
            sd_maps(X, n, cap, index)
        except EnumerationCapExceeded:
            logger.warning('Ex(%s): лимит на уровне %s, усечение %s', X.name, n, n - 1)
            return n - 1
    return trunc


# --- Ex нервов порядков и категорий ---------------------------------------------

def ex_nerve_poset(P: FinitePoset, trunc=None, cap=None, prefix='exp'):
    """
    (Ex N P)_n = монотонные отображения s_<[n] -> P, ключ - значения по subdivision(n).elements.
    Строится на массивах (tables.PosetExComplex), метки те же, что у табличной сборки.
    """
    from .tables import poset_ex_complex

    return poset_ex_complex(P, _resolve_trunc(trunc), cap, prefix, what='Ex N(P)', name=f'Ex N({P.name})')


def ex_nerve_category(C: FiniteCategory, trunc=None, cap=None, prefix='exc') -> ExComplex:
    """
    (Ex N C)_n = функторы s_<[n] -> C; ключ - (объекты по subdivision(n).elements,
    морфизмы по subdivision(n).strict_pairs).
    """
    trunc = _resolve_trunc(trunc)
    cap = default_cap() if cap is None else cap
    levels = []
    for n in range(trunc + 1):
        # subdivision(n).elements и strict_pairs совпадают с порядком sd_poset(n)
        levels.append(functors_from_poset(sd_poset(n), C, cap, what='Ex N(C)'))

    def face_fn(n, key, i):
        objects, morphisms = key
        sub, lower = subdivision(n), subdivision(n - 1)
        return (
            tuple(objects[p] for p in element_face_plan(n, i)),
            tuple(
                morphisms[sub.pair_position[(coface(i, A), coface(i, B))]]
                for A, B in lower.strict_pairs
            ),
        )

    def degeneracy_fn(n, key, i):
        objects, morphisms = key
        sub, upper = subdivision(n), subdivision(n + 1)
        new_morphisms = []
        for A, B in upper.strict_pairs:
            a, b = codegeneracy(i, A), codegeneracy(i, B)
            if a == b:
                new_morphisms.append(C.identities[objects[sub.element_position[a]]])
            else:
                new_morphisms.append(morphisms[sub.pair_position[(a, b)]])
        return (
            tuple(objects[p] for p in element_degeneracy_plan(n, i)),
            tuple(new_morphisms),
        )

    T = build_tabular(trunc, lambda n: levels[n], face_fn, degeneracy_fn, name=f'Ex N({C.name})')
    return ex_complex(C, T, 'category', prefix, f'Ex N({C.name})')


# --- Отображение последней вершины и функториальность -------------------------------

def last_vertex_map(X: SimplicialSet, trunc=None, cap=None, target: ExComplex = None) -> SimplicialMap:
    """
    b_X: X -> Ex X. Симплекс x переходит в x ∘ (Sd Δ^n -> Δ^n, S ↦ max S):
    на цепи S_0 ⊂ … ⊂ S_k значение X(θ)(x), θ(j) = max S_j.
    """
    target = target or ex(X, trunc, cap)
    trunc = target.trunc
    source = truncate(X, trunc) if X.d_max > trunc else X
    T = to_tabular(X, trunc)
    assignment = {}
    for n, gens in enumerate(source.generators):
        sub = subdivision(n)
        for g in gens:
            x = T.index(n, X.ref(g))
            key = tuple(
                T.levels[len(c) - 1][apply_operator(T, n, x, tuple(S[-1] for S in c))]
                for c in sub.chains
            )
            assignment[g] = target.ref(n, key)
    return SimplicialMap(source, target.simplicial_set, assignment, name=f'b_{X.name}')


def ex_map(f: SimplicialMap, trunc=None, cap=None, source: ExComplex = None, target: ExComplex = None):
    """Ex f: Ex X -> Ex Y, посткомпозиция с f"""
    source = source or ex(f.source, trunc, cap)
    target = target or ex(f.target, source.trunc, cap)
    if target.trunc < source.trunc:
        raise TruncationError('Усечение Ex цели ниже усечения Ex источника', d_max=target.trunc)
    assignment = {}
    for n, gens in enumerate(source.simplicial_set.generators):
        for label in gens:
            key = source.key_of(label)
            assignment[label] = target.ref(n, tuple(apply_map(f, r) for r in key))
    return SimplicialMap(source.simplicial_set, target.simplicial_set, assignment, name=f'Ex({f.name})')


def ex_poset_comparison(P: FinitePoset, trunc=None, cap=None, source: ExComplex = None,
                        target: ExComplex = None) -> SimplicialMap:
    """
    Канонический изоморфизм Ex N P (через монотонные отображения) -> Ex(N P)
    (через отображения Sd Δ^n -> N P): монотонное m задаёт на цепи c симплекс m(c).
    """
    source = source or ex_nerve_poset(P, trunc, cap)
    target = target or ex(nerve(P, source.trunc), source.trunc, cap)
    assignment = {}
    for n, gens in enumerate(source.simplicial_set.generators):
        sub = subdivision(n)
        for label in gens:
            values = dict(zip(sub.elements, source.key_of(label)))
            key = tuple(chain_ref(values[S] for S in c) for c in sub.chains)
            assignment[label] = target.ref(n, key)
    return SimplicialMap(source.simplicial_set, target.simplicial_set, assignment, name=f'cmp_{P.name}')


def is_generator_bijection(f: SimplicialMap) -> bool:
    """Невырожденные образы, инъективность и равные количества образующих"""
    images = list(f.assignment.values())
    if any(r.word for r in images):
        return False
    if len({r.generator for r in images}) != len(images):
        return False
    return f.source.counts() == f.target.counts()
