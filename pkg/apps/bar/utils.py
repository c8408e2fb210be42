# apps/bar/utils.py
"""
Двусторонняя симплициальная бар-конструкция B(F, I, E), её Ex-вариант B_Ex,
сравнение b: B -> B_Ex, гомотопические копределы и замена Даггера.

Ячейка бар-конструкции уровня n при симплициальной степени k:
(i_0, …, i_n; u_1, …, u_n; e ∈ E(i_0)_k; f ∈ F(i_n)_k), u_j: i_{j-1} -> i_j.
Симплициальное множество получается диагональю (n = k).
"""
import logging
from functools import lru_cache

from apps.posets.ex import (
    codegeneracy,
    coface,
    element_degeneracy_plan,
    element_face_plan,
    ex_complex,
    subdivision,
)
from apps.posets.structures import ExComplex, FiniteCategory, FinitePoset, Functor
from apps.posets.tables import PosetExComplex, poset_ex_complex
from apps.posets.utils import default_cap, default_trunc, functors_from_poset, sd_poset
from apps.simplicial.structures import SimplexRef, SimplicialMap, SimplicialSet
from apps.simplicial.utils import (
    apply_map,
    build_tabular,
    compose_maps,
    degenerate,
    discrete,
    face,
    identity_map,
    is_simplicial_map,
    maps_equal,
    normalize,
    standard_simplex,
)
from core.exceptions import EnumerationCapExceeded, FunctorialityError, TruncationError
from .structures import CONTRAVARIANT, COVARIANT, Diagram, SetFunctor, Weight

logger = logging.getLogger(__name__)


# --- Функторы в множества -------------------------------------------------------

def validate_set_functor(Y: SetFunctor):
    I = Y.shape
    for u, (a, b) in I.morphisms.items():
        src, tgt = (a, b) if Y.variance == COVARIANT else (b, a)
        table = Y.action.get(u)
        if table is None or set(table) != set(Y.values[src]):
            raise FunctorialityError(f'{Y.name}: действие {u} задано не на {src}')
        if any(v not in Y.values[tgt] for v in table.values()):
            raise FunctorialityError(f'{Y.name}: действие {u} выводит из {tgt}')
    for x, ident in I.identities.items():
        if any(Y.action[ident][v] != v for v in Y.values[x]):
            raise FunctorialityError(f'{Y.name}: тождество {ident} действует нетривиально')
    for (g, f), h in I.composition.items():
        first, second = (f, g) if Y.variance == COVARIANT else (g, f)
        for v, w in Y.action[first].items():
            if Y.action[second][w] != Y.action[h][v]:
                raise FunctorialityError(f'{Y.name}: нарушена композиция {g}∘{f}')
    return Y


def constant_set_functor(I: FiniteCategory, point='*', variance=COVARIANT):
    return SetFunctor(
        I,
        {x: (point,) for x in I.objects},
        {u: {point: point} for u in I.morphisms},
        variance,
        name='*',
    )


def corepresentable(I: FiniteCategory, c):
    """I(c, -): ковариантный, u действует посткомпозицией"""
    values = {x: I.hom(c, x) for x in I.objects}
    action = {
        u: {m: I.compose(u, m) for m in values[I.source(u)]} for u in I.morphisms
    }
    return SetFunctor(I, values, action, COVARIANT, name=f'I({c},-)')


def representable(I: FiniteCategory, d):
    """I(-, d): контравариантный, u действует предкомпозицией"""
    values = {x: I.hom(x, d) for x in I.objects}
    action = {
        u: {m: I.compose(m, u) for m in values[I.target(u)]} for u in I.morphisms
    }
    return SetFunctor(I, values, action, CONTRAVARIANT, name=f'I(-,{d})')


def level_functor(E: Diagram, k) -> SetFunctor:
    values = {}
    for x, X in E.values.items():
        if k > X.d_max:
            raise TruncationError(f'{E.name}: значение в {x} известно только до {X.d_max}', d_max=X.d_max)
        values[x] = tuple(X.simplices(k))
    action = {}
    for u, f in E.maps.items():
        a, b = E.shape.morphisms[u]
        action[u] = {r: apply_map(f, r) for r in values[a if E.variance == COVARIANT else b]}
    return SetFunctor(E.shape, values, action, E.variance, name=f'{E.name}_{k}')


# --- Диаграммы ----------------------------------------------------------------------

def validate_diagram(E: Diagram):
    I = E.shape
    for x in I.objects:
        if x not in E.values:
            raise FunctorialityError(f'{E.name}: нет значения в {x}')
    for u, (a, b) in I.morphisms.items():
        src, tgt = (a, b) if E.variance == COVARIANT else (b, a)
        f = E.maps.get(u)
        if f is None:
            raise FunctorialityError(f'{E.name}: нет отображения для {u}')
        if f.source != E.values[src] or f.target != E.values[tgt]:
            raise FunctorialityError(f'{E.name}: отображение {u} не согласовано с концами')
        if not is_simplicial_map(f):
            raise FunctorialityError(f'{E.name}: {u} не симплициально')
    for x, ident in I.identities.items():
        if not maps_equal(E.maps[ident], identity_map(E.values[x])):
            raise FunctorialityError(f'{E.name}: тождество {ident} не переходит в тождество')
    for (g, f), h in I.composition.items():
        composite = (
            compose_maps(E.maps[g], E.maps[f]) if E.variance == COVARIANT
            else compose_maps(E.maps[f], E.maps[g])
        )
        if not maps_equal(composite, E.maps[h]):
            raise FunctorialityError(f'{E.name}: нарушена композиция {g}∘{f}')
    return E


def point_diagram(I: FiniteCategory, trunc=None, cls=Diagram):
    trunc = default_trunc() if trunc is None else trunc
    point = standard_simplex(0, trunc=trunc)
    ident = identity_map(point)
    return cls(I, {x: point for x in I.objects}, {u: ident for u in I.morphisms}, name='*')


def point_weight(I: FiniteCategory, trunc=None):
    return point_diagram(I, trunc, cls=Weight)


def discrete_diagram(Y: SetFunctor, trunc=None):
    """Функтор в множества как диаграмма дискретных симплициальных множеств"""
    trunc = default_trunc() if trunc is None else trunc
    values = {x: discrete(tuple(Y.values[x]), trunc, name=f'{Y.name}({x})') for x in Y.shape.objects}
    maps = {}
    for u, (a, b) in Y.shape.morphisms.items():
        src, tgt = (a, b) if Y.variance == COVARIANT else (b, a)
        maps[u] = SimplicialMap(
            values[src], values[tgt],
            {v: SimplexRef((), w, 0) for v, w in Y.action[u].items()},
        )
    cls = Diagram if Y.variance == COVARIANT else Weight
    return cls(Y.shape, values, maps, name=Y.name)


# --- Запятая-категория --------------------------------------------------------------

def comma_category(Y: SetFunctor, X: SetFunctor) -> FiniteCategory:
    """
    I_{Y⫽X}: объекты (i, y ∈ Y(i), x ∈ X(i)); морфизм (i, y, x) -> (j, y', x')
    - это u: i -> j с Y(u)(y) = y' и X(u)(x') = x. Имя морфизма - (u, источник, цель).
    """
    I = Y.shape
    if Y.variance != COVARIANT or X.variance != CONTRAVARIANT:
        raise FunctorialityError('Запятая-категория требует ковариантный Y и контравариантный X')
    objects = tuple((i, y, x) for i in I.objects for y in Y.values[i] for x in X.values[i])
    morphisms = {}
    for u, (i, j) in I.morphisms.items():
        for y in Y.values[i]:
            for x_target in X.values[j]:
                source = (i, y, X.action[u][x_target])
                target = (j, Y.action[u][y], x_target)
                morphisms[(u, source, target)] = (source, target)
    identities = {o: (I.identities[o[0]], o, o) for o in objects}
    outgoing = {}
    for m, (source, _) in morphisms.items():
        outgoing.setdefault(source, []).append(m)
    composition = {}
    for f, (a, b) in morphisms.items():
        for g in outgoing.get(b, ()):
            c = morphisms[g][1]
            composition[(g, f)] = (I.compose(g[0], f[0]), a, c)
    return FiniteCategory(
        objects=objects,
        morphisms=morphisms,
        identities=identities,
        composition=composition,
        name=f'{I.name}_{{{Y.name}⫽{X.name}}}',
    )


def comma_projection(C: FiniteCategory, I: FiniteCategory) -> Functor:
    """Забывающий функтор I_{Y⫽X} -> I"""
    return Functor(
        C, I,
        {o: o[0] for o in C.objects},
        {m: m[0] for m in C.morphisms},
        name='π',
    )


# --- Бар-конструкция ------------------------------------------------------------------

def strings(I: FiniteCategory, n):
    """Составимые строки из n морфизмов (тождества допускаются): (объекты, морфизмы)"""
    layer = [((x,), ()) for x in I.objects]
    for _ in range(n):
        layer = [
            (objects + (I.target(u),), morphisms + (u,))
            for objects, morphisms in layer
            for u in I.morphisms if I.source(u) == objects[-1]
        ]
    return layer


def _check_trunc(F, E, trunc):
    for D in (F, E):
        if D.d_max() < trunc:
            raise TruncationError(f'{D.name}: значения известны только до {D.d_max()}', d_max=D.d_max())


def bar_level(F: Weight, I: FiniteCategory, E: Diagram, n, k):
    """Ячейки B_n(F, I, E) в симплициальной степени k"""
    cells = []
    for objects, morphisms in strings(I, n):
        for e in E.values[objects[0]].simplices(k):
            for f in F.values[objects[-1]].simplices(k):
                cells.append((objects, morphisms, e, f))
    return cells


def _transport_face(F, I, E, key, i):
    objects, morphisms, e, f = key
    n = len(morphisms)
    if i == 0:
        e = apply_map(E.maps[morphisms[0]], e)
        objects, morphisms = objects[1:], morphisms[1:]
    elif i == n:
        f = apply_map(F.maps[morphisms[-1]], f)
        objects, morphisms = objects[:-1], morphisms[:-1]
    else:
        composite = I.compose(morphisms[i], morphisms[i - 1])
        objects = objects[:i] + objects[i + 1:]
        morphisms = morphisms[:i - 1] + (composite,) + morphisms[i + 1:]
    return (
        objects,
        morphisms,
        face(E.values[objects[0]], e, i),
        face(F.values[objects[-1]], f, i),
    )


def _insert_identity(F, I, E, key, i):
    objects, morphisms, e, f = key
    return (
        objects[:i + 1] + objects[i:],
        morphisms[:i] + (I.identities[objects[i]],) + morphisms[i:],
        degenerate(E.values[objects[0]], e, i),
        degenerate(F.values[objects[-1]], f, i),
    )


def bar_tabular(F: Weight, I: FiniteCategory, E: Diagram, trunc=None):
    trunc = default_trunc() if trunc is None else trunc
    _check_trunc(F, E, trunc)
    return build_tabular(
        trunc,
        lambda n: bar_level(F, I, E, n, n),
        lambda n, key, i: _transport_face(F, I, E, key, i),
        lambda n, key, i: _insert_identity(F, I, E, key, i),
        name=f'B({F.name},{I.name},{E.name})',
    )


def bar(F: Weight, I: FiniteCategory, E: Diagram, trunc=None) -> SimplicialSet:
    """Диагональ бисимплициальной бар-конструкции"""
    X = normalize(bar_tabular(F, I, E, trunc))
    logger.info('%s: образующие %s', X.name, X.counts())
    return X


# --- Ex-вариант ---------------------------------------------------------------------------

def bar_ex_tabular(F: Weight, I: FiniteCategory, E: Diagram, trunc=None, cap=None):
    """
    Уровень n: функторы s_<[n] -> I_{E_n⫽F_n}. Ключ - (объекты (i, e, f) по
    subdivision(n).elements, морфизмы I по subdivision(n).strict_pairs).
    """
    trunc = default_trunc() if trunc is None else trunc
    cap = default_cap() if cap is None else cap
    _check_trunc(F, E, trunc)
    levels = []
    for n in range(trunc + 1):
        C = comma_category(E.level(n), F.level(n))
        try:
            functors = functors_from_poset(sd_poset(n), C, cap, what='B_Ex')
        except EnumerationCapExceeded as exc:
            logger.warning('B_Ex: лимит %s превышен на уровне %s', cap, n)
            raise EnumerationCapExceeded('B_Ex', cap, level=n) from exc
        levels.append([(objects, tuple(m[0] for m in morphisms)) for objects, morphisms in functors])

    def vertical(objects, op, i):
        return tuple(
            (j, op(E.values[j], e, i), op(F.values[j], f, i)) for j, e, f in objects
        )

    def face_fn(n, key, i):
        objects, us = key
        sub, lower = subdivision(n), subdivision(n - 1)
        objects = tuple(objects[p] for p in element_face_plan(n, i))
        us = tuple(
            us[sub.pair_position[(coface(i, A), coface(i, B))]] for A, B in lower.strict_pairs
        )
        return vertical(objects, face, i), us

    def degeneracy_fn(n, key, i):
        objects, us = key
        sub, upper = subdivision(n), subdivision(n + 1)
        new_us = []
        for A, B in upper.strict_pairs:
            a, b = codegeneracy(i, A), codegeneracy(i, B)
            if a == b:
                new_us.append(I.identities[objects[sub.element_position[a]][0]])
            else:
                new_us.append(us[sub.pair_position[(a, b)]])
        objects = tuple(objects[p] for p in element_degeneracy_plan(n, i))
        return vertical(objects, degenerate, i), tuple(new_us)

    return build_tabular(
        trunc, lambda n: levels[n], face_fn, degeneracy_fn,
        name=f'B_Ex({F.name},{I.name},{E.name})',
    )


def bar_ex_complex(F: Weight, I: FiniteCategory, E: Diagram, trunc=None, cap=None) -> ExComplex:
    T = bar_ex_tabular(F, I, E, trunc, cap)
    return ex_complex((F, I, E), T, 'bar', 'bx', T.name)


def bar_ex(F: Weight, I: FiniteCategory, E: Diagram, trunc=None, cap=None) -> SimplicialSet:
    return bar_ex_complex(F, I, E, trunc, cap).simplicial_set


@lru_cache(maxsize=None)
def point_simplex(n):
    """Единственный n-симплекс точки"""
    return next(standard_simplex(0, trunc=n).simplices(n))


def point_bar_key(values, n):
    """Ключ ячейки B_Ex(*, P, *) по значениям s_<[n] -> P, в форме bar_ex_tabular"""
    sub = subdivision(n)
    pt = point_simplex(n)
    position = sub.element_position
    objects = tuple((v, pt, pt) for v in values)
    morphisms = tuple((values[position[A]], values[position[B]]) for A, B in sub.strict_pairs)
    return objects, morphisms


def point_bar_values(key):
    return tuple(obj[0] for obj in key[0])


def point_bar_ex(P: FinitePoset, trunc=None, cap=None) -> PosetExComplex:
    """
    B_Ex(*, P, *) для порядка P. Запятая-категория точечных диаграмм - это сам P,
    так что ячейки уровня n - монотонные отображения s_<[n] -> P и перебор идёт
    на массивах. Ключи и метки совпадают с bar_ex_complex(*, P, *).
    """
    return poset_ex_complex(
        P, trunc, cap, prefix='bx', kind='bar', what='B_Ex', name=f'B_Ex(*,{P.name},*)',
        to_key=point_bar_key, to_values=point_bar_values,
    )


def _string_objects(F, E, key):
    """Объекты запятой-категории вдоль строки бар-ячейки"""
    objects, morphisms, e, f = key
    es = [e]
    for u in morphisms:
        es.append(apply_map(E.maps[u], es[-1]))
    fs = [f]
    for u in reversed(morphisms):
        fs.append(apply_map(F.maps[u], fs[-1]))
    fs.reverse()
    return [(objects[j], es[j], fs[j]) for j in range(len(objects))]


def _segment(I, objects, morphisms, a, b):
    """Композиция u_b ∘ … ∘ u_{a+1}: i_a -> i_b"""
    if a == b:
        return I.identities[objects[a]]
    composite = morphisms[a]
    for t in range(a + 1, b):
        composite = I.compose(morphisms[t], composite)
    return composite


def bar_comparison(F: Weight, I: FiniteCategory, E: Diagram, trunc=None, cap=None,
                   source: SimplicialSet = None, target: ExComplex = None) -> SimplicialMap:
    """
    b: B(F, I, E) -> B_Ex(F, I, E), по уровням отображение последней вершины:
    цепь S_0 ⊂ … ⊂ S_k переходит в строку между объектами с номерами max S_j.
    """
    source = source or bar(F, I, E, trunc)
    target = target or bar_ex_complex(F, I, E, source.d_max, cap)
    assignment = {}
    for n, gens in enumerate(source.generators):
        sub = subdivision(n)
        for key in gens:
            objects, morphisms = key[0], key[1]
            along = _string_objects(F, E, key)
            image = (
                tuple(along[S[-1]] for S in sub.elements),
                tuple(_segment(I, objects, morphisms, A[-1], B[-1]) for A, B in sub.strict_pairs),
            )
            assignment[key] = target.ref(n, image)
    return SimplicialMap(source, target.simplicial_set, assignment, name='b')


# --- Гомотопические копределы ------------------------------------------------------------

def hocolim(E: Diagram, trunc=None) -> SimplicialSet:
    """B(*, I, E); значения симплициальные множества, поэтому кофибрантная замена не нужна"""
    trunc = default_trunc() if trunc is None else trunc
    return bar(point_weight(E.shape, trunc), E.shape, E, trunc)


def hocolim_map(E: Diagram, u: Functor, trunc=None, source=None, target_tabular=None) -> SimplicialMap:
    """Каноническое hocolim(E ∘ u) -> hocolim(E) для функтора u: J -> I"""
    trunc = default_trunc() if trunc is None else trunc
    I = E.shape
    source = source or hocolim(E.restrict(u), trunc)
    T = target_tabular or bar_tabular(point_weight(I, trunc), I, E, trunc)
    assignment = {}
    for n, gens in enumerate(source.generators):
        for key in gens:
            objects, morphisms, e, f = key
            image = (
                tuple(u.on_objects[j] for j in objects),
                tuple(u.on_morphisms[m] for m in morphisms),
                e,
                f,
            )
            assignment[key] = T.normal_form(n, image)
    return SimplicialMap(source, normalize(T), assignment, name=f'hocolim({u.name})')


# --- Замена Даггера ---------------------------------------------------------------------

def dugger_diagram(C: FiniteCategory, c, trunc=None):
    """Y_•(c) = C(c, -) как диаграмма дискретных множеств"""
    return discrete_diagram(corepresentable(C, c), trunc)


def dugger_Q(F: Weight, C: FiniteCategory, c, trunc=None) -> SimplicialSet:
    """Q F(c) = B(F, C, C(c, -))"""
    trunc = default_trunc() if trunc is None else trunc
    return bar(F, C, dugger_diagram(C, c, trunc), trunc)


def dugger_Q_ex(F: Weight, C: FiniteCategory, c, trunc=None, cap=None) -> ExComplex:
    trunc = default_trunc() if trunc is None else trunc
    return bar_ex_complex(F, C, dugger_diagram(C, c, trunc), trunc, cap)


def augmentation(F: Weight, C: FiniteCategory, c, Q: SimplicialSet) -> SimplicialMap:
    """q: Q F(c) -> F(c), ячейка (m: c -> i_0, u_1, …, u_n, f) ↦ F(u_n ∘ … ∘ u_1 ∘ m)(f)"""
    assignment = {}
    for gens in Q.generators:
        for key in gens:
            _, morphisms, e, f = key
            g = e.generator
            for u in morphisms:
                g = C.compose(u, g)
            assignment[key] = apply_map(F.maps[g], f)
    return SimplicialMap(Q, F.values[c], assignment, name='q')


def augmentation_ex(F: Weight, C: FiniteCategory, c, Q: ExComplex) -> SimplicialMap:
    """q_Ex: значение функтора s_<[n] -> C_{Y(c)⫽F} на вершине [n] переводится в F(c)"""
    assignment = {}
    for n, gens in enumerate(Q.simplicial_set.generators):
        top = subdivision(n).element_position[tuple(range(n + 1))]
        for label in gens:
            objects, _ = Q.key_of(label)
            _, e, f = objects[top]
            assignment[label] = apply_map(F.maps[e.generator], f)
    return SimplicialMap(Q.simplicial_set, F.values[c], assignment, name='q_Ex')
