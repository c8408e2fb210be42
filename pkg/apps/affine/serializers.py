# apps/affine/serializers.py

import sympy as sp
from rest_framework import serializers

from .structures import AffineMap, IdentityReport, NaturalityVerdict


def rational_pair(value):
    value = sp.Rational(value)
    return [int(value.p), int(value.q)]


class RationalField(serializers.ListField):
    """Рациональное число как пара [числитель, знаменатель]"""

    def __init__(self, **kwargs):
        super().__init__(child=serializers.IntegerField(), min_length=2, max_length=2, **kwargs)

    def to_internal_value(self, data):
        p, q = super().to_internal_value(data)
        if q == 0:
            raise serializers.ValidationError('Нулевой знаменатель')
        return sp.Rational(p, q)

    def to_representation(self, value):
        return rational_pair(value)


class AffineMapSerializer(serializers.Serializer):
    """{"matrix": [[[p, q], ...], ...], "offset": [[p, q], ...]}; строки - координаты цели"""

    name = serializers.CharField(required=False, allow_blank=True, default='')
    matrix = serializers.ListField(child=serializers.ListField(child=RationalField()))
    offset = serializers.ListField(child=RationalField())

    def validate(self, attrs):
        rows = attrs['matrix']
        if len(rows) != len(attrs['offset']):
            raise serializers.ValidationError('Длина offset не совпадает с числом строк матрицы')
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise serializers.ValidationError('Строки матрицы разной длины')
        cols = widths.pop() if widths else 0
        attrs['instance'] = AffineMap(
            sp.ImmutableMatrix(len(rows), cols, [x for row in rows for x in row]),
            sp.ImmutableMatrix(len(rows), 1, attrs['offset']),
            attrs.get('name', ''),
        )
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: AffineMap):
        return {
            'name': instance.name,
            'matrix': [
                [rational_pair(instance.matrix[r, c]) for c in range(instance.source)]
                for r in range(instance.target)
            ],
            'offset': [rational_pair(x) for x in instance.offset],
        }


class IdentityReportSerializer(serializers.Serializer):

    def to_representation(self, instance: IdentityReport):
        return {
            'n_max': instance.n_max,
            'checked': instance.checked,
            'hyperplane': instance.hyperplane,
            'passed': instance.passed,
            'failures': [
                {'family': f.family, 'n': f.n, 'i': f.i, 'j': f.j} for f in instance.failures
            ],
        }


class NaturalityVerdictSerializer(serializers.Serializer):

    def to_representation(self, instance: NaturalityVerdict):
        return {
            'sigma': list(instance.sigma),
            'k': instance.k,
            'vertices_agree': instance.vertices_agree,
            'commutes': instance.commutes,
        }
