# apps/affine/structures.py
"""Точные аффинные отображения и отчёты проверок"""
from dataclasses import dataclass, field

import sympy as sp


def _column(values):
    values = [sp.Rational(v) for v in values]
    return sp.ImmutableMatrix(len(values), 1, values)


@dataclass(frozen=True)
class AffineMap:
    """
    x -> matrix·x + offset, R^source -> R^target с рациональными коэффициентами.
    Для Δ_e^n координаты барицентрические: source = n + 1.
    """

    matrix: sp.ImmutableMatrix
    offset: sp.ImmutableMatrix
    name: str = field(default='', compare=False)

    @classmethod
    def linear(cls, matrix, name=''):
        matrix = sp.ImmutableMatrix(matrix)
        return cls(matrix, sp.ImmutableMatrix.zeros(matrix.rows, 1), name)

    @classmethod
    def identity(cls, dim, name=''):
        return cls.linear(sp.ImmutableMatrix.eye(dim), name or f'id_{dim}')

    @property
    def source(self):
        return self.matrix.cols

    @property
    def target(self):
        return self.matrix.rows

    def __call__(self, point):
        return sp.ImmutableMatrix(self.matrix * _column(point) + self.offset)

    def compose(self, other: 'AffineMap', name='') -> 'AffineMap':
        """self ∘ other"""
        return AffineMap(
            sp.ImmutableMatrix(self.matrix * other.matrix),
            sp.ImmutableMatrix(self.matrix * other.offset + self.offset),
            name or f'{self.name}∘{other.name}',
        )

    def preserves_hyperplane(self):
        """Σ t = 1 переходит в Σ t = 1: суммы столбцов равны s и сумма сдвига равна 1 - s"""
        if self.source == 0:
            return sum(self.offset) == 1
        sums = {sum(self.matrix.col(c)) for c in range(self.source)}
        return len(sums) == 1 and sum(self.offset) == 1 - sums.pop()


@dataclass(frozen=True)
class IdentityFailure:
    family: str
    n: int
    i: int
    j: int


@dataclass(frozen=True)
class IdentityReport:
    n_max: int
    checked: int
    failures: tuple
    hyperplane: bool

    @property
    def passed(self):
        return self.hyperplane and not self.failures


@dataclass(frozen=True)
class NaturalityVerdict:
    """Квадрат Δ_e(σ) ∘ ι^n = ι^k ∘ |Δ|(σ) для монотонного σ: [n] -> [k]"""

    sigma: tuple
    k: int
    vertices_agree: bool
    commutes: bool

    @property
    def n(self):
        return len(self.sigma) - 1
