# apps/covers/structures.py
"""Комбинаторные хорошие покрытия и отчёты конвейера теоремы о нерве"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional

from apps.simplicial.structures import TabularSimplicialSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverComplex:
    """
    Покрытие {U_a}: index_set - индексы, nonempty - семейство Σ непустых
    пересечений (непустые подмножества index_set).
    support[a] - множество исходных индексов, пересечением которых является U_a
    (у замыкания); None означает support[a] = {a}.
    """

    index_set: tuple
    nonempty: frozenset
    support: Optional[Mapping] = None
    reference_homology: Optional[tuple] = field(default=None, compare=False)
    reference: str = field(default='', compare=False)
    name: str = field(default='', compare=False)

    def support_of(self, a) -> frozenset:
        return frozenset({a}) if self.support is None else self.support[a]

    @cached_property
    def base_nonempty(self) -> frozenset:
        """Σ в терминах исходных индексов: объединения носителей по элементам Σ"""
        return frozenset(
            frozenset().union(*(self.support_of(a) for a in alpha)) for alpha in self.nonempty
        )

    def is_nonempty(self, indices) -> bool:
        return frozenset(indices) in self.nonempty

    @cached_property
    def sigma(self) -> tuple:
        """Σ в детерминированном порядке: по размеру, затем по позициям индексов"""
        position = {a: idx for idx, a in enumerate(self.index_set)}
        return tuple(sorted(
            self.nonempty, key=lambda alpha: (len(alpha), sorted(position[a] for a in alpha)),
        ))

    def validate(self):
        from .utils import validate_cover
        return validate_cover(self)


@dataclass(frozen=True)
class TabularMap:
    """Отображение табличных множеств: levels[n][x] - индекс образа x в target.levels[n]"""

    source: TabularSimplicialSet
    target: TabularSimplicialSet
    levels: tuple
    name: str = ''

    def image(self, n, x):
        return self.levels[n][x]


@dataclass(frozen=True)
class LiftingFailure:
    n: int
    simplex: object
    boundary: tuple
    realizable: bool
    reason: str


@dataclass(frozen=True)
class DimensionSummary:
    n: int
    squares: int = 0
    lifted: int = 0
    realizable: int = 0
    realizable_lifted: int = 0
    constructive_checked: int = 0
    constructive_valid: int = 0

    @property
    def passed(self):
        return (
            self.realizable_lifted == self.realizable
            and self.constructive_valid == self.constructive_checked
        )


@dataclass(frozen=True)
class RlpReport:
    map_name: str
    n_max: int
    dimensions: tuple
    failures: tuple = ()

    @property
    def passed(self):
        return all(d.passed for d in self.dimensions)

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class DegreeAgreement:
    degree: int
    groups: Mapping
    agree: bool


@dataclass(frozen=True)
class WhiteheadReport:
    cover: str
    trunc: int
    ex_trunc: int
    homology: Mapping
    agreement: tuple
    psi: object
    phi: object
    factorization: bool
    rlp: RlpReport
    notes: tuple = ()
    reference: tuple = ()

    @property
    def homology_agrees(self):
        return all(d.agree for d in self.agreement)

    @property
    def first_mismatch(self) -> Optional[int]:
        return next((d.degree for d in self.agreement if not d.agree), None)

    @property
    def passed(self):
        return (
            self.homology_agrees
            and bool(self.psi)
            and bool(self.phi)
            and self.factorization
            and bool(self.rlp)
        )
