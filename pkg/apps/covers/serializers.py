# apps/covers/serializers.py

from rest_framework import serializers

from apps.homology.serializers import (
    HomologyDegreeSerializer, ReferenceHomologySerializer, WeqCertificateSerializer,
)
from apps.simplicial.serializers import label_field
from apps.simplicial.utils import format_label
from core.exceptions import SimplicialError
from .structures import CoverComplex, RlpReport, WhiteheadReport


class CoverComplexSerializer(serializers.Serializer):
    """
    {"index_set": [...], "nonempty": [[a], [a, b], ...]}: nonempty - всё семейство Σ,
    замкнутое вниз и содержащее все одноэлементные множества.
    reference - имя эталонной триангуляции (circle, sphere, torus).
    """

    name = serializers.CharField(required=False, allow_blank=True, default='')
    index_set = serializers.ListField(child=label_field(), allow_empty=False)
    nonempty = serializers.ListField(
        child=serializers.ListField(child=label_field(), allow_empty=False),
        allow_empty=False,
    )
    reference_homology = ReferenceHomologySerializer(many=True, required=False)
    reference = serializers.CharField(required=False, allow_blank=True, default='')

    def validate_nonempty(self, value):
        for alpha in value:
            if len(set(alpha)) != len(alpha):
                raise serializers.ValidationError(f'Индексы повторяются в {alpha}')
        return value

    def validate(self, attrs):
        groups = attrs.get('reference_homology')
        cov = CoverComplex(
            index_set=tuple(attrs['index_set']),
            nonempty=frozenset(frozenset(alpha) for alpha in attrs['nonempty']),
            reference_homology=None if groups is None else tuple(
                ReferenceHomologySerializer().create(g) for g in groups
            ),
            reference=attrs.get('reference', ''),
            name=attrs.get('name', ''),
        )
        try:
            cov.validate()
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        attrs['instance'] = cov
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: CoverComplex):
        position = {a: idx for idx, a in enumerate(instance.index_set)}
        data = {
            'name': instance.name,
            'index_set': [format_label(a) for a in instance.index_set],
            'nonempty': [
                [format_label(a) for a in sorted(alpha, key=position.__getitem__)]
                for alpha in instance.sigma
            ],
        }
        if instance.reference_homology is not None:
            data['reference_homology'] = ReferenceHomologySerializer(
                instance.reference_homology, many=True,
            ).data
        if instance.reference:
            data['reference'] = instance.reference
        return data


class RlpReportSerializer(serializers.Serializer):

    def to_representation(self, instance: RlpReport):
        return {
            'map': instance.map_name,
            'n_max': instance.n_max,
            'passed': instance.passed,
            'dimensions': [
                {
                    'n': d.n,
                    'squares': d.squares,
                    'lifted': d.lifted,
                    'realizable': d.realizable,
                    'realizable_lifted': d.realizable_lifted,
                    'constructive_checked': d.constructive_checked,
                    'constructive_valid': d.constructive_valid,
                    'passed': d.passed,
                }
                for d in instance.dimensions
            ],
            'failures': [
                {
                    'n': f.n,
                    'simplex': f.simplex,
                    'boundary': list(f.boundary),
                    'reason': f.reason,
                }
                for f in instance.failures
            ],
        }


class WhiteheadReportSerializer(serializers.Serializer):

    def to_representation(self, instance: WhiteheadReport):
        return {
            'cover': instance.cover,
            'trunc': instance.trunc,
            'ex_trunc': instance.ex_trunc,
            'passed': instance.passed,
            'homology_agrees': instance.homology_agrees,
            'first_mismatch': instance.first_mismatch,
            'reference': ReferenceHomologySerializer(instance.reference, many=True).data,
            'homology': {
                name: HomologyDegreeSerializer(result, many=True).data
                for name, result in instance.homology.items()
            },
            'agreement': [
                {
                    'degree': d.degree,
                    'groups': {name: str(group) for name, group in d.groups.items()},
                    'agree': d.agree,
                }
                for d in instance.agreement
            ],
            'psi': WeqCertificateSerializer(instance.psi).data,
            'phi': WeqCertificateSerializer(instance.phi).data,
            'factorization': instance.factorization,
            'rlp': RlpReportSerializer(instance.rlp).data,
            'notes': list(instance.notes),
        }
