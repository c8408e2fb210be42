# apps/posets/structures.py
"""Конечные частично упорядоченные множества, категории, монотонные отображения и функторы"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from apps.simplicial.structures import SimplexRef, SimplicialSet, TabularSimplicialSet

import networkx as nx

from core.exceptions import CategoryError, FunctorialityError, NonMonotoneError, PosetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FinitePoset:
    """
    elements - элементы в заданном порядке (он задаёт порядок перечисления),
    leq - множество пар (a, b) с a <= b, включая рефлексивные.
    """

    elements: tuple
    leq: frozenset
    name: str = field(default='', compare=False)

    @classmethod
    def from_relation(cls, elements, pairs, name=''):
        """Рефлексивно-транзитивное замыкание заданных пар"""
        elements = tuple(elements)
        G = nx.DiGraph()
        G.add_nodes_from(elements)
        G.add_edges_from((a, b) for a, b in pairs if a != b)
        closure = nx.transitive_closure_dag(G) if nx.is_directed_acyclic_graph(G) else None
        if closure is None:
            raise PosetError(f'Отношение на {name or "множестве"} содержит цикл')
        leq = frozenset(closure.edges()) | frozenset((a, a) for a in elements)
        return cls(elements, leq, name)

    @cached_property
    def position(self):
        return {a: idx for idx, a in enumerate(self.elements)}

    def le(self, a, b):
        return (a, b) in self.leq

    def lt(self, a, b):
        return a != b and (a, b) in self.leq

    def __contains__(self, a):
        return a in self.position

    def __len__(self):
        return len(self.elements)

    @cached_property
    def graph(self):
        G = nx.DiGraph()
        G.add_nodes_from(self.elements)
        G.add_edges_from((a, b) for a, b in self.leq if a != b)
        return G

    def hasse_edges(self):
        reduction = nx.transitive_reduction(self.graph)
        return sorted(reduction.edges(), key=lambda e: (self.position[e[0]], self.position[e[1]]))

    @cached_property
    def linear_order(self):
        """Линейное расширение, ближайшее к заданному порядку элементов"""
        return tuple(nx.lexicographical_topological_sort(self.graph, key=self.position.__getitem__))

    def linear_extension(self):
        return self.linear_order

    def below(self, b):
        return [a for a in self.linear_order if self.lt(a, b)]

    def maximal_elements(self):
        return [a for a in self.elements if not any(self.lt(a, b) for b in self.elements)]

    def opposite(self):
        return FinitePoset(
            self.elements, frozenset((b, a) for a, b in self.leq), f'{self.name}^op',
        )

    @cached_property
    def strict_pairs(self):
        """Строгие пары a < b в порядке линейного расширения"""
        order = {a: idx for idx, a in enumerate(self.linear_order)}
        return tuple(sorted(
            ((a, b) for a, b in self.leq if a != b),
            key=lambda p: (order[p[1]], order[p[0]]),
        ))

    def as_category(self):
        morphisms = {}
        for a in self.elements:
            morphisms[(a, a)] = (a, a)
        for a, b in self.strict_pairs:
            morphisms[(a, b)] = (a, b)
        composition = {}
        for g, (b, c) in morphisms.items():
            for f, (a, b2) in morphisms.items():
                if b2 == b:
                    composition[(g, f)] = (a, c)
        return FiniteCategory(
            objects=self.elements,
            morphisms=morphisms,
            identities={a: (a, a) for a in self.elements},
            composition=composition,
            name=self.name,
        )

    def validate(self):
        from .utils import validate_poset
        return validate_poset(self)


@dataclass(frozen=True)
class FiniteCategory:
    """
    morphisms: имя -> (источник, цель) в порядке перечисления;
    composition: (g, f) -> g∘f для всех пар с target(f) = source(g).
    """

    objects: tuple
    morphisms: Mapping
    identities: Mapping
    composition: Mapping
    name: str = field(default='', compare=False)

    def source(self, m):
        return self.morphisms[m][0]

    def target(self, m):
        return self.morphisms[m][1]

    def compose(self, g, f):
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise CategoryError(f'Композиция {g}∘{f} не определена', g=str(g), f=str(f)) from None

    def is_identity(self, m):
        return self.identities.get(self.source(m)) == m

    @cached_property
    def homs(self):
        result = {}
        for m, (a, b) in self.morphisms.items():
            result.setdefault((a, b), []).append(m)
        return {key: tuple(value) for key, value in result.items()}

    def hom(self, a, b):
        return self.homs.get((a, b), ())

    def non_identity(self):
        return [m for m in self.morphisms if not self.is_identity(m)]

    def opposite(self):
        return FiniteCategory(
            objects=self.objects,
            morphisms={m: (b, a) for m, (a, b) in self.morphisms.items()},
            identities=dict(self.identities),
            composition={(f, g): h for (g, f), h in self.composition.items()},
            name=f'{self.name}^op',
        )

    @cached_property
    def is_direct(self):
        """Нет циклов из неединичных морфизмов: нерв конечен"""
        G = nx.DiGraph()
        G.add_nodes_from(self.objects)
        for m in self.non_identity():
            a, b = self.morphisms[m]
            if a == b:
                return False
            G.add_edge(a, b)
        return nx.is_directed_acyclic_graph(G)

    def validate(self):
        from .utils import validate_category
        return validate_category(self)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePoset
    target: FinitePoset
    assignment: Mapping
    name: str = field(default='', compare=False)

    def __call__(self, a):
        return self.assignment[a]

    def validate(self):
        for a, b in self.source.leq:
            if not self.target.le(self.assignment[a], self.assignment[b]):
                raise NonMonotoneError(
                    f'{self.name or "Отображение"} не монотонно на паре ({a}, {b})',
                )
        return self


@dataclass(frozen=True)
class Functor:
    source: FiniteCategory
    target: FiniteCategory
    on_objects: Mapping
    on_morphisms: Mapping
    name: str = field(default='', compare=False)

    def __call__(self, m):
        return self.on_morphisms[m]

    def validate(self):
        C, D = self.source, self.target
        for m, (a, b) in C.morphisms.items():
            image = self.on_morphisms.get(m)
            if image is None or D.morphisms.get(image) != (self.on_objects[a], self.on_objects[b]):
                raise FunctorialityError(f'Функтор {self.name} не согласован с концами {m}')
        for a in C.objects:
            if self.on_morphisms[C.identities[a]] != D.identities[self.on_objects[a]]:
                raise FunctorialityError(f'Функтор {self.name} не сохраняет тождество {a}')
        for (g, f), h in C.composition.items():
            if D.compose(self.on_morphisms[g], self.on_morphisms[f]) != self.on_morphisms[h]:
                raise FunctorialityError(f'Функтор {self.name} не сохраняет композицию {g}∘{f}')
        return self


def compose_functors(G: Functor, F: Functor) -> Functor:
    return Functor(
        F.source,
        G.target,
        {a: G.on_objects[b] for a, b in F.on_objects.items()},
        {m: G.on_morphisms[n] for m, n in F.on_morphisms.items()},
        name=f'{G.name}∘{F.name}',
    )


@dataclass(frozen=True)
class Subdivision:
    """
    Данные Sd Δ^n: элементы s_<[n] (возрастающие кортежи) в линейном порядке
    и цепи - невырожденные симплексы Sd Δ^n.
    """

    n: int
    elements: tuple
    chains: tuple

    @cached_property
    def element_position(self):
        return {S: idx for idx, S in enumerate(self.elements)}

    @cached_property
    def chain_position(self):
        return {c: idx for idx, c in enumerate(self.chains)}

    @cached_property
    def strict_pairs(self):
        order = self.element_position
        pairs = [(A, B) for A in self.elements for B in self.elements if A != B and set(A) <= set(B)]
        return tuple(sorted(pairs, key=lambda p: (order[p[1]], order[p[0]])))

    @cached_property
    def pair_position(self):
        return {p: idx for idx, p in enumerate(self.strict_pairs)}


@dataclass(frozen=True)
class ExComplex:
    """
    Ex до усечения: tabular хранит полные ключи (значения отображения Sd Δ^n -> X
    на цепях либо монотонного отображения s_<[n] -> P), simplicial_set - нормальную
    форму с короткими метками, names - ключ невырожденного симплекса -> метка.
    """

    source: object
    tabular: TabularSimplicialSet
    simplicial_set: SimplicialSet
    names: Mapping
    kind: str = 'maps'

    @property
    def trunc(self):
        return self.tabular.d_max

    def size(self, n):
        return self.tabular.size(n)

    @cached_property
    def keys(self):
        return {label: key for key, label in self.names.items()}

    def ref(self, n, key) -> SimplexRef:
        """Нормальная форма симплекса с ключом key в терминах коротких меток"""
        r = self.tabular.normal_form(n, key)
        return SimplexRef(r.word, self.names[r.generator], n)

    def key_of(self, label):
        return self.keys[label]
