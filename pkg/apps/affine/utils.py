# apps/affine/utils.py
"""
Расширенные симплексы Δ_e^n = {t ∈ R^{n+1} : Σ t^i = 1} в барицентрических координатах,
их кограни и ковырождения, вложение стандартного симплекса и его естественность.
"""
import logging
from itertools import combinations_with_replacement

import sympy as sp

from core.exceptions import IndexOutOfRangeError, NonMonotoneError
from .structures import AffineMap, IdentityFailure, IdentityReport, NaturalityVerdict

logger = logging.getLogger(__name__)


def _unit_columns(rows, images):
    """Матрица rows × len(images), столбец c - базисный вектор e_{images[c]}"""
    entries = [[1 if images[c] == r else 0 for c in range(len(images))] for r in range(rows)]
    return sp.ImmutableMatrix(rows, len(images), [x for row in entries for x in row])


def coface(n: int, i: int) -> AffineMap:
    """d^i: Δ_e^{n-1} -> Δ_e^n, нулевая координата на месте i"""
    if n < 1 or not 0 <= i <= n:
        raise IndexOutOfRangeError(f'Кограница d^{i} в размерности {n} не определена', n=n, i=i)
    return AffineMap.linear(_unit_columns(n + 1, [c if c < i else c + 1 for c in range(n)]), f'd^{i}')


def codegeneracy(n: int, i: int) -> AffineMap:
    """s^i: Δ_e^{n+1} -> Δ_e^n, координаты i и i+1 складываются"""
    if n < 0 or not 0 <= i <= n:
        raise IndexOutOfRangeError(f'Ковырождение s^{i} в размерности {n} не определено', n=n, i=i)
    return AffineMap.linear(_unit_columns(n + 1, [c if c <= i else c - 1 for c in range(n + 2)]), f's^{i}')


def _identity_instances(n_max, d, s):
    """(семейство, n, i, j, левая часть, правая часть) для всех пяти семейств"""
    for n in range(n_max + 1):
        if n >= 2:
            for j in range(n + 1):
                for i in range(j):
                    yield 'dd', n, i, j, d(n, j).compose(d(n - 1, i)), d(n, i).compose(d(n - 1, j - 1))
        for j in range(n + 1):
            for i in range(j + 1):
                yield 'ss', n, i, j, s(n, j).compose(s(n + 1, i)), s(n, i).compose(s(n + 1, j + 1))
        identity = AffineMap.identity(n + 1)
        for j in range(n + 1):
            for i in range(n + 2):
                left = s(n, j).compose(d(n + 1, i))
                if i < j:
                    yield 'sd<', n, i, j, left, d(n, i).compose(s(n - 1, j - 1))
                elif i in (j, j + 1):
                    yield 'sd=', n, i, j, left, identity
                else:
                    yield 'sd>', n, i, j, left, d(n, i - 1).compose(s(n - 1, j))


def check_cosimplicial_identities(n_max: int, coface_fn=coface, codegeneracy_fn=codegeneracy) -> IdentityReport:
    """
    Точная проверка d^j d^i = d^i d^{j-1}, s^j s^i = s^i s^{j+1} и трёх
    семейств s^j d^i для всех индексов с базовой размерностью n <= n_max.
    """
    if n_max < 1:
        raise IndexOutOfRangeError('n_max должен быть не меньше 1', n_max=n_max)
    checked = 0
    failures = []
    for family, n, i, j, left, right in _identity_instances(n_max, coface_fn, codegeneracy_fn):
        checked += 1
        if left != right:
            failures.append(IdentityFailure(family, n, i, j))
    structure = [coface_fn(n, i) for n in range(1, n_max + 1) for i in range(n + 1)]
    structure += [codegeneracy_fn(n, i) for n in range(n_max + 1) for i in range(n + 1)]
    hyperplane = all(f.preserves_hyperplane() for f in structure)
    report = IdentityReport(n_max=n_max, checked=checked, failures=tuple(failures), hyperplane=hyperplane)
    log = logger.info if report.passed else logger.warning
    log('Косимплициальные тождества до n=%d: проверено %d, нарушений %d', n_max, checked, len(failures))
    return report


# --- Монотонные отображения ----------------------------------------------------------

def monotone_maps(n: int, k: int):
    """Все монотонные σ: [n] -> [k] как кортежи значений"""
    return list(combinations_with_replacement(range(k + 1), n + 1))


def _validate_sigma(sigma, k):
    if not sigma:
        raise IndexOutOfRangeError('σ задаётся непустым кортежем значений')
    if any(v < 0 or v > k for v in sigma):
        raise IndexOutOfRangeError(f'σ = {sigma} выходит за [{k}]', k=k)
    if any(a > b for a, b in zip(sigma, sigma[1:])):
        raise NonMonotoneError(f'σ = {sigma} не монотонно')


def structure_map(sigma, k=None) -> AffineMap:
    """
    Δ_e(σ) через разложение σ = d^{i_1}…d^{i_s} s^{j_1}…s^{j_t}:
    сначала ковырождения по повторам, затем кограни по пропущенным значениям.
    """
    sigma = tuple(sigma)
    k = max(sigma) if k is None else k
    _validate_sigma(sigma, k)
    n = len(sigma) - 1
    repeats = [j for j in range(n) if sigma[j] == sigma[j + 1]]
    image = set(sigma)
    result = AffineMap.identity(n + 1)
    dim = n
    for j in reversed(repeats):
        result = codegeneracy(dim - 1, j).compose(result)
        dim -= 1
    for i in (v for v in range(k + 1) if v not in image):
        result = coface(dim + 1, i).compose(result)
        dim += 1
    return AffineMap(result.matrix, result.offset, f'Δ_e{sigma}')


# --- Стандартный симплекс -----------------------------------------------------------

def vertices(n: int):
    """Вершины |Δ^n| ⊂ R^n: начало координат и базисные векторы"""
    return [tuple(1 if c == i - 1 else 0 for c in range(n)) for i in range(n + 1)]


def standard_inclusion(n: int) -> AffineMap:
    """ι^n: |Δ^n| ⊂ R^n -> Δ_e^n, x -> (1 - Σx, x_1, …, x_n)"""
    if n < 0:
        raise IndexOutOfRangeError('Размерность симплекса должна быть неотрицательной', n=n)
    rows = [[-1] * n] + [[1 if c == r else 0 for c in range(n)] for r in range(n)]
    matrix = sp.ImmutableMatrix(n + 1, n, [x for row in rows for x in row])
    offset = sp.ImmutableMatrix(n + 1, 1, [1] + [0] * n)
    return AffineMap(matrix, offset, f'ι^{n}')


def realization(sigma, k=None) -> AffineMap:
    """|Δ|(σ): |Δ^n| -> |Δ^k|, аффинное продолжение v_i -> v_{σ(i)}"""
    sigma = tuple(sigma)
    k = max(sigma) if k is None else k
    _validate_sigma(sigma, k)
    n = len(sigma) - 1
    target = [sp.ImmutableMatrix(k, 1, v) for v in vertices(k)]
    base = target[sigma[0]]
    columns = [target[sigma[c]] - base for c in range(1, n + 1)]
    matrix = sp.ImmutableMatrix(k, n, [columns[c][r] for r in range(k) for c in range(n)])
    return AffineMap(matrix, base, f'|Δ|{sigma}')


def naturality_check(sigma, k=None) -> NaturalityVerdict:
    """Δ_e(σ) ∘ ι^n = ι^k ∘ |Δ|(σ): на вершинах и как равенство аффинных отображений"""
    sigma = tuple(sigma)
    k = max(sigma) if k is None else k
    n = len(sigma) - 1
    left = structure_map(sigma, k).compose(standard_inclusion(n))
    right = standard_inclusion(k).compose(realization(sigma, k))
    agree = all(left(v) == right(v) for v in vertices(n))
    verdict = NaturalityVerdict(sigma=sigma, k=k, vertices_agree=agree, commutes=left == right)
    if not verdict.commutes:
        logger.warning('Квадрат естественности для σ=%s не коммутирует', sigma)
    return verdict


def naturality_sweep(n_max: int):
    """Все σ: [n] -> [k] с n, k <= n_max"""
    return [
        naturality_check(sigma, k)
        for n in range(n_max + 1)
        for k in range(n_max + 1)
        for sigma in monotone_maps(n, k)
    ]
