# apps/segal/structures.py
"""Отчёты проверок Сигала и полноты"""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SegalLevel:
    """Отображение Сигала X_{n,k} -> X_{1,k} ×_{X_{0,k}} … ×_{X_{0,k}} X_{1,k}"""

    n: int
    k: int
    cells: int
    fiber_product: int
    injective: bool
    surjective: bool

    @property
    def bijective(self):
        return self.injective and self.surjective


@dataclass(frozen=True)
class CompletenessVerdict:
    complete: bool
    invertibles: tuple
    non_invertible: tuple


@dataclass(frozen=True)
class SegalReport:
    name: str
    n_max: int
    levels: tuple
    completeness: Optional[CompletenessVerdict] = None
    degeneracy: Optional[object] = None

    @property
    def segal(self):
        return all(level.bijective for level in self.levels)

    @property
    def first_failure(self):
        return next(((level.n, level.k) for level in self.levels if not level.bijective), None)

    @property
    def passed(self):
        return self.segal

    def __bool__(self):
        return self.passed
