# apps/segal/serializers.py

from rest_framework import serializers

from apps.homology.serializers import WeqCertificateSerializer
from apps.simplicial.utils import format_label
from .structures import CompletenessVerdict, SegalReport


class SegalLevelSerializer(serializers.Serializer):

    def to_representation(self, instance):
        return {
            'n': instance.n,
            'k': instance.k,
            'cells': instance.cells,
            'fiber_product': instance.fiber_product,
            'injective': instance.injective,
            'surjective': instance.surjective,
            'bijective': instance.bijective,
        }


class CompletenessVerdictSerializer(serializers.Serializer):

    def to_representation(self, instance: CompletenessVerdict):
        return {
            'complete': instance.complete,
            'invertibles': [format_label(m) for m in instance.invertibles],
            'non_invertible': [format_label(m) for m in instance.non_invertible],
        }


class SegalReportSerializer(serializers.Serializer):
    """Только вывод: вердикты по n, полнота и сертификат s_0, если они посчитаны"""

    def to_representation(self, instance: SegalReport):
        data = {
            'name': instance.name,
            'n_max': instance.n_max,
            'segal': instance.segal,
            'first_failure': list(instance.first_failure) if instance.first_failure else None,
            'levels': SegalLevelSerializer(instance.levels, many=True).data,
        }
        if instance.completeness is not None:
            data['completeness'] = CompletenessVerdictSerializer(instance.completeness).data
        if instance.degeneracy is not None:
            data['degeneracy'] = WeqCertificateSerializer(instance.degeneracy).data
        return data
