# apps/homology/serializers.py

from rest_framework import serializers

from apps.simplicial.utils import format_label
from .structures import ChainComplex, HomologyGroup, HomologyResult, WeqCertificate


class HomologyResultListSerializer(serializers.ListSerializer):

    def validate(self, attrs):
        degrees = [entry['degree'] for entry in attrs]
        if degrees != list(range(len(attrs))):
            raise serializers.ValidationError('Степени должны идти подряд начиная с 0')
        return attrs

    def create(self, validated_data):
        groups = tuple(HomologyGroup(e['betti'], tuple(e['torsion'])) for e in validated_data)
        reliable = [e['degree'] for e in validated_data if e.get('reliable', True)]
        return HomologyResult(groups=groups, reliable_through=max(reliable, default=-1))

    def to_representation(self, data):
        if isinstance(data, HomologyResult):
            data = list(data.entries())
        return [self.child.to_representation(item) for item in data]


class HomologyDegreeSerializer(serializers.Serializer):
    degree = serializers.IntegerField(min_value=0)
    betti = serializers.IntegerField(min_value=0)
    torsion = serializers.ListField(child=serializers.IntegerField(min_value=2), allow_empty=True)
    reliable = serializers.BooleanField(required=False, default=True)

    class Meta:
        list_serializer_class = HomologyResultListSerializer

    def validate_torsion(self, value):
        for a, b in zip(value, value[1:]):
            if b % a:
                raise serializers.ValidationError(f'{a} не делит {b}')
        return value

    def to_representation(self, instance):
        group = instance['group']
        return {
            'degree': instance['degree'],
            'betti': group.betti,
            'torsion': list(group.torsion),
            'reliable': instance['reliable'],
        }


class ReferenceHomologySerializer(serializers.Serializer):
    """Эталонные гомологии покрытия: {betti, torsion} по степеням"""

    betti = serializers.IntegerField(min_value=0)
    torsion = serializers.ListField(child=serializers.IntegerField(min_value=2), allow_empty=True, default=list)

    def create(self, validated_data):
        return HomologyGroup(validated_data['betti'], tuple(validated_data['torsion']))

    def to_representation(self, instance: HomologyGroup):
        return {'betti': instance.betti, 'torsion': list(instance.torsion)}


class ChainComplexSerializer(serializers.Serializer):
    """Экспорт граничных матриц для внешней проверки"""

    def to_representation(self, instance: ChainComplex):
        return {
            'trunc': instance.trunc,
            'ranks': list(instance.ranks),
            'bases': [[format_label(g) for g in basis] for basis in instance.bases],
            'boundaries': [M.to_dense() for M in instance.boundaries[1:]],
        }


class DegreeVerdictSerializer(serializers.Serializer):

    def to_representation(self, instance):
        return {
            'degree': instance.degree,
            'source': str(instance.source),
            'target': str(instance.target),
            'cone_acyclic': instance.cone_acyclic,
            'iso': instance.iso,
        }


class WeqCertificateSerializer(serializers.Serializer):

    def to_representation(self, instance: WeqCertificate):
        return {
            'map': instance.name,
            'passed': instance.passed,
            'pi0_bijection': instance.pi0_bijection,
            'trunc': instance.trunc,
            'first_failure': instance.first_failure,
            'degrees': DegreeVerdictSerializer(instance.degrees, many=True).data,
            'disclaimer': instance.disclaimer,
        }
