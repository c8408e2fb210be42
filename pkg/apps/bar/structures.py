# apps/bar/structures.py
"""Диаграммы, веса и функторы в множества над конечной категорией"""
import logging
from dataclasses import dataclass, field
from typing import Mapping

from apps.posets.structures import FiniteCategory, Functor
from apps.simplicial.structures import SimplicialSet

logger = logging.getLogger(__name__)

COVARIANT = 'covariant'
CONTRAVARIANT = 'contravariant'


@dataclass(frozen=True)
class SetFunctor:
    """
    Функтор в конечные множества. Для ковариантного action[u] переводит
    values[source(u)] в values[target(u)], для контравариантного - наоборот.
    """

    shape: FiniteCategory
    values: Mapping
    action: Mapping
    variance: str = COVARIANT
    name: str = field(default='', compare=False)

    def __call__(self, u, element):
        return self.action[u][element]

    def validate(self):
        from .utils import validate_set_functor
        return validate_set_functor(self)


@dataclass(frozen=True)
class Diagram:
    """E: I -> sSet; maps[u]: values[source(u)] -> values[target(u)]"""

    shape: FiniteCategory
    values: Mapping
    maps: Mapping
    name: str = field(default='', compare=False)

    variance = COVARIANT

    def value(self, i) -> SimplicialSet:
        return self.values[i]

    def d_max(self):
        return min(X.d_max for X in self.values.values())

    def level(self, k) -> SetFunctor:
        """Функтор k-симплексов i ↦ E(i)_k"""
        from .utils import level_functor
        return level_functor(self, k)

    def restrict(self, u: Functor):
        """E ∘ u для функтора u: J -> I (для весов - F ∘ u^op)"""
        return type(self)(
            shape=u.source,
            values={j: self.values[u.on_objects[j]] for j in u.source.objects},
            maps={m: self.maps[u.on_morphisms[m]] for m in u.source.morphisms},
            name=f'{self.name}∘{u.name}',
        )

    def validate(self):
        from .utils import validate_diagram
        return validate_diagram(self)


@dataclass(frozen=True)
class Weight(Diagram):
    """F: I^op -> sSet; maps[u]: values[target(u)] -> values[source(u)]"""

    variance = CONTRAVARIANT
