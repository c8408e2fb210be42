import logging
from typing import Any, Dict

from celery import shared_task

from core.exceptions import SimplicialError
from core.utils.jsonio import deserialize
from .lifting import check_phi_rlp
from .pipeline import default_rlp_max_dim, sigma_bar_ex_under_cap, whitehead_pipeline
from .serializers import CoverComplexSerializer, RlpReportSerializer, WhiteheadReportSerializer
from .utils import cech_tabular, closure

logger = logging.getLogger(__name__)


@shared_task(bind=True, time_limit=1800, soft_time_limit=1740)
def run_whitehead_pipeline(self, payload: Dict[str, Any], trunc: int = None, ex_trunc: int = None,
                           rlp_max_dim: int = None, cap: int = None) -> Dict[str, Any]:
    """Конвейер теоремы о нерве для покрытия из JSON; результат - отчёт в JSON"""
    try:
        cov = deserialize(CoverComplexSerializer, payload)
        logger.info('Задача %s: конвейер для покрытия %s', self.request.id, cov.name)
        report = whitehead_pipeline(cov, trunc, ex_trunc, rlp_max_dim, cap)
        return WhiteheadReportSerializer(report).data
    except SimplicialError as exc:
        logger.warning('Задача %s завершилась ошибкой: %s', self.request.id, exc.message)
        return {'error': exc.as_report()}


@shared_task(bind=True, time_limit=1800, soft_time_limit=1740)
def run_rlp_check(self, payload: Dict[str, Any], n_max: int = None, cap: int = None,
                  rlp_cap: int = None) -> Dict[str, Any]:
    """Только RLP для φ: B_Ex строится до n_max - 1"""
    try:
        cov = deserialize(CoverComplexSerializer, payload)
        n_max = default_rlp_max_dim() if n_max is None else n_max
        B_ex, notes = sigma_bar_ex_under_cap(cov, max(n_max - 1, 0), cap)
        n_max = min(n_max, B_ex.trunc + 1)
        logger.info('Задача %s: RLP для %s, n <= %s', self.request.id, cov.name, n_max)
        target = cech_tabular(closure(cov), n_max)
        report = check_phi_rlp(cov, B_ex, target, n_max, rlp_cap)
        return {**RlpReportSerializer(report).data, 'notes': notes}
    except SimplicialError as exc:
        logger.warning('Задача %s завершилась ошибкой: %s', self.request.id, exc.message)
        return {'error': exc.as_report()}
