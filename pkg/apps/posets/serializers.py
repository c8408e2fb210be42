# apps/posets/serializers.py

from rest_framework import serializers

from apps.simplicial.serializers import SimplicialMapSerializer, SimplicialSetSerializer, label_field
from apps.simplicial.utils import format_label
from core.exceptions import SimplicialError
from core.utils.jsonio import deserialize
from .structures import ExComplex, FiniteCategory, FinitePoset


class FinitePosetSerializer(serializers.Serializer):
    """
    {"elements": [...], "leq": [[a, b], ...]}; рефлексивные пары добавляются сами,
    транзитивность проверяется, а не достраивается.
    """

    name = serializers.CharField(required=False, allow_blank=True, default='')
    elements = serializers.ListField(child=label_field(), allow_empty=False)
    leq = serializers.ListField(
        child=serializers.ListField(child=label_field(), min_length=2, max_length=2),
        allow_empty=True,
    )

    def validate_elements(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Элементы повторяются')
        return value

    def validate(self, attrs):
        elements = tuple(attrs['elements'])
        known = set(elements)
        for a, b in attrs['leq']:
            if a not in known or b not in known:
                raise serializers.ValidationError(f'Пара ({a}, {b}) ссылается на неизвестный элемент')
        leq = frozenset(tuple(p) for p in attrs['leq']) | frozenset((a, a) for a in elements)
        P = FinitePoset(elements, leq, attrs.get('name', ''))
        try:
            P.validate()
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        attrs['instance'] = P
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: FinitePoset):
        position = instance.position
        pairs = sorted(
            ((a, b) for a, b in instance.leq if a != b),
            key=lambda p: (position[p[0]], position[p[1]]),
        )
        return {
            'name': instance.name,
            'elements': [format_label(a) for a in instance.elements],
            'leq': [[format_label(a), format_label(b)] for a, b in pairs],
        }


class MorphismSerializer(serializers.Serializer):
    name = label_field()
    source = label_field()
    target = label_field()


class FiniteCategorySerializer(serializers.Serializer):
    """
    Тождества по умолчанию называются id_<объект>. В compose достаточно
    перечислить композиции неединичных морфизмов: [g, f, g∘f].
    """

    name = serializers.CharField(required=False, allow_blank=True, default='')
    objects = serializers.ListField(child=label_field(), allow_empty=False)
    identities = serializers.DictField(child=label_field(), required=False)
    morphisms = MorphismSerializer(many=True, required=False)
    compose = serializers.ListField(
        child=serializers.ListField(child=label_field(), min_length=3, max_length=3),
        required=False,
    )

    def validate(self, attrs):
        objects = tuple(attrs['objects'])
        if len(set(objects)) != len(objects):
            raise serializers.ValidationError('Объекты повторяются')
        identities = {x: f'id_{x}' for x in objects}
        identities.update(attrs.get('identities', {}))
        morphisms = {identities[x]: (x, x) for x in objects}
        for entry in attrs.get('morphisms', []):
            name = entry['name']
            ends = (entry['source'], entry['target'])
            if name in morphisms and morphisms[name] != ends:
                raise serializers.ValidationError(f'Морфизм "{name}" задан дважды')
            if ends[0] not in objects or ends[1] not in objects:
                raise serializers.ValidationError(f'Морфизм "{name}" ссылается на неизвестный объект')
            morphisms[name] = ends
        composition = {}
        for m, (a, b) in morphisms.items():
            composition[(m, identities[a])] = m
            composition[(identities[b], m)] = m
        for g, f, h in attrs.get('compose', []):
            for m in (g, f, h):
                if m not in morphisms:
                    raise serializers.ValidationError(f'Неизвестный морфизм "{m}" в таблице композиции')
            composition[(g, f)] = h
        C = FiniteCategory(objects, morphisms, identities, composition, attrs.get('name', ''))
        try:
            C.validate()
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        attrs['instance'] = C
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: FiniteCategory):
        non_identity = instance.non_identity()
        return {
            'name': instance.name,
            'objects': [format_label(x) for x in instance.objects],
            'identities': {format_label(x): format_label(m) for x, m in instance.identities.items()},
            'morphisms': [
                {
                    'name': format_label(m),
                    'source': format_label(instance.source(m)),
                    'target': format_label(instance.target(m)),
                }
                for m in non_identity
            ],
            'compose': [
                [format_label(g), format_label(f), format_label(instance.composition[(g, f)])]
                for g in non_identity for f in non_identity
                if (g, f) in instance.composition
            ],
        }


def parse_order_or_category(payload):
    """Порядок, если есть ключ elements, иначе категория"""
    if isinstance(payload, dict) and 'elements' in payload:
        return deserialize(FinitePosetSerializer, payload)
    return deserialize(FiniteCategorySerializer, payload)


class ExComplexSerializer(serializers.Serializer):
    """Только вывод: Ex до усечения в порождающей форме и число всех симплексов по уровням"""

    def to_representation(self, instance: ExComplex):
        return {
            'kind': instance.kind,
            'trunc': instance.trunc,
            'levels': [instance.size(n) for n in range(instance.trunc + 1)],
            'counts': list(instance.simplicial_set.counts()),
            'simplicial_set': SimplicialSetSerializer(instance.simplicial_set).data,
        }


class ComparisonMapSerializer(serializers.Serializer):
    """Только вывод: отображение b_X или Ex f без повторения источника и цели"""

    def to_representation(self, instance):
        return SimplicialMapSerializer(instance, context={'embedded': True}).data
