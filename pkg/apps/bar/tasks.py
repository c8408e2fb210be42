import logging
from typing import Any, Dict

from celery import shared_task

from apps.homology.serializers import HomologyDegreeSerializer, WeqCertificateSerializer
from apps.homology.utils import simplicial_homology, weq_certificate
from core.exceptions import SimplicialError
from core.utils.jsonio import deserialize
from .serializers import DiagramSerializer
from .utils import bar, bar_comparison, bar_ex_complex, point_weight

logger = logging.getLogger(__name__)


@shared_task(bind=True, time_limit=600, soft_time_limit=540)
def run_bar_comparison(self, payload: Dict[str, Any], trunc: int = None, cap: int = None,
                       weight: Dict[str, Any] = None) -> Dict[str, Any]:
    """
    B(F, I, E), B_Ex(F, I, E) и сертификат для b: B -> B_Ex.
    Без weight берётся точечный вес, т.е. гомотопический копредел E.
    """
    try:
        E = deserialize(DiagramSerializer, payload)
        trunc = E.d_max() if trunc is None else trunc
        F = deserialize(DiagramSerializer, weight) if weight else point_weight(E.shape, trunc)
        logger.info('Задача %s: бар-конструкция %s, trunc=%s', self.request.id, E.name, trunc)

        B = bar(F, E.shape, E, trunc)
        B_ex = bar_ex_complex(F, E.shape, E, trunc, cap)
        b = bar_comparison(F, E.shape, E, trunc, cap, source=B, target=B_ex)
        certificate = weq_certificate(b)
        return {
            'bar': HomologyDegreeSerializer(simplicial_homology(B), many=True).data,
            'bar_ex': HomologyDegreeSerializer(simplicial_homology(B_ex.simplicial_set), many=True).data,
            'comparison': WeqCertificateSerializer(certificate).data,
        }
    except SimplicialError as exc:
        logger.warning('Задача %s завершилась ошибкой: %s', self.request.id, exc.message)
        return {'error': exc.as_report()}
