# apps/covers/pipeline.py
"""
Конвейер теоремы о нерве для стянутой модели покрытия:
ČU, B(*, Σ, *), B_Ex(*, Σ, *) и эталон должны иметь одинаковые гомологии,
ψ и φ - проходить сертификат, φ∘ψ - совпадать с ČU ↪ ČU^cl, φ - обладать RLP.
"""
import logging

from django.conf import settings

from apps.homology.structures import HomologyGroup
from apps.homology.utils import simplicial_homology, weq_certificate
from apps.posets.utils import default_trunc
from apps.simplicial.utils import compose_maps, maps_equal
from core.exceptions import CoverComplexError, EnumerationCapExceeded
from .lifting import check_phi_rlp
from .structures import CoverComplex, DegreeAgreement, WhiteheadReport
from .utils import (
    canonical_inclusion, cech_nerve, cech_tabular, closure, phi_map, psi_map,
    reference_homology, sigma_bar, sigma_bar_ex,
)

logger = logging.getLogger(__name__)


def default_rlp_max_dim():
    return getattr(settings, 'WHITEHEAD_RLP_MAX_DIM', 3)


def sigma_bar_ex_under_cap(cov: CoverComplex, ex_trunc, cap=None):
    """
    B_Ex(*, Σ, *) при наибольшем усечении <= ex_trunc, укладывающемся в лимит.
    Возвращает (комплекс, примечания).
    """
    notes = []
    while True:
        try:
            return sigma_bar_ex(cov, ex_trunc, cap), notes
        except EnumerationCapExceeded as exc:
            if not exc.level:
                raise
            logger.warning(
                '%s: B_Ex не укладывается в лимит на уровне %s, усечение снижено до %s',
                cov.name, exc.level, exc.level - 1,
            )
            notes.append(
                f'B_Ex построен до размерности {exc.level - 1}: на уровне {exc.level} '
                f'превышен лимит {exc.cap}, сравнение B_Ex идёт в степенях < {exc.level - 1}'
            )
            ex_trunc = exc.level - 1


def rlp_under_cap(cov: CoverComplex, B_ex, closure_tabular, n_max, cap, notes):
    """RLP для φ при наибольшем n <= n_max, для которого перебор квадратов укладывается в лимит"""
    while True:
        try:
            return check_phi_rlp(cov, B_ex, closure_tabular, n_max, cap)
        except EnumerationCapExceeded as exc:
            if not exc.level:
                raise
            logger.warning('%s: квадратов RLP больше лимита на уровне %s', cov.name, exc.level)
            notes.append(
                f'RLP проверено для n <= {exc.level - 1}: на уровне {exc.level} превышен лимит {exc.cap}'
            )
            n_max = exc.level - 1


def homology_agreement(results, trunc):
    """
    Сравнение по степеням 0..trunc-1 среди надёжных групп каждого результата.
    Эталон задан кортежем групп, недостающие степени считаются нулевыми.
    """
    agreement = []
    for k in range(trunc):
        groups = {}
        for name, result in results.items():
            if isinstance(result, tuple):
                groups[name] = result[k] if k < len(result) else HomologyGroup(0)
            elif k < len(result.groups) and result.reliable(k):
                groups[name] = result.groups[k]
        agree = len(set(groups.values())) <= 1
        agreement.append(DegreeAgreement(degree=k, groups=groups, agree=agree))
        if not agree:
            logger.warning('Степень %s: гомологии расходятся %s', k, {n: str(g) for n, g in groups.items()})
    return tuple(agreement)


def whitehead_pipeline(cov: CoverComplex, trunc=None, ex_trunc=None, rlp_max_dim=None, cap=None,
                       rlp_cap=None) -> WhiteheadReport:
    trunc = default_trunc() if trunc is None else trunc
    ex_trunc = trunc if ex_trunc is None else min(ex_trunc, trunc)
    rlp_max_dim = default_rlp_max_dim() if rlp_max_dim is None else rlp_max_dim
    cov = cov.validate()

    reference = reference_homology(cov, trunc)
    if reference is None:
        raise CoverComplexError(f'{cov.name}: не заданы эталонные гомологии', cover=cov.name)

    logger.info('Конвейер %s: trunc=%s, ex_trunc=%s', cov.name, trunc, ex_trunc)
    cech = cech_nerve(cov, trunc)
    results = {
        'cech': simplicial_homology(cech),
        'bar': simplicial_homology(sigma_bar(cov, trunc)),
    }

    B_ex, notes = sigma_bar_ex_under_cap(cov, ex_trunc, cap)
    ex_trunc = B_ex.trunc
    results['bar_ex'] = simplicial_homology(B_ex.simplicial_set)
    results['reference'] = tuple(reference)

    n_max = min(rlp_max_dim, ex_trunc + 1)
    closure_tabular = cech_tabular(closure(cov), max(ex_trunc, n_max))
    cech_ex = cech if ex_trunc == trunc else cech_nerve(cov, ex_trunc)

    psi = psi_map(cov, source=cech_ex, target=B_ex)
    phi = phi_map(cov, source=B_ex, target_tabular=closure_tabular)
    inclusion = canonical_inclusion(cov, source=cech_ex, target_tabular=closure_tabular)
    factorization = maps_equal(compose_maps(phi, psi), inclusion)
    if not factorization:
        logger.warning('%s: φ∘ψ не совпадает с ČU ↪ ČU^cl', cov.name)

    rlp = rlp_under_cap(cov, B_ex, closure_tabular, n_max, rlp_cap, notes)

    report = WhiteheadReport(
        cover=cov.name,
        trunc=trunc,
        ex_trunc=ex_trunc,
        homology={name: result for name, result in results.items() if name != 'reference'},
        agreement=homology_agreement(results, trunc),
        psi=weq_certificate(psi),
        phi=weq_certificate(phi, ex_trunc),
        factorization=factorization,
        rlp=rlp,
        notes=tuple(notes),
        reference=tuple(reference),
    )
    (logger.info if report.passed else logger.warning)(
        'Конвейер %s: %s', cov.name, 'пройден' if report.passed else 'не пройден',
    )
    return report
