# apps/bar/serializers.py

from rest_framework import serializers

from apps.posets.serializers import FiniteCategorySerializer
from apps.simplicial.serializers import SimplicialMapSerializer, SimplicialSetSerializer
from apps.simplicial.utils import identity_map
from core.exceptions import SchemaError, SimplicialError
from core.utils.jsonio import deserialize
from .structures import CONTRAVARIANT, COVARIANT, Diagram, Weight


class DiagramSerializer(serializers.Serializer):
    """
    {"shape": категория, "values": {объект: симплициальное множество},
     "maps": {морфизм: {"assignment": …}}, "variance": "covariant" | "contravariant"}.
    Отображения тождеств можно не указывать.
    """

    variance = serializers.ChoiceField(choices=(COVARIANT, CONTRAVARIANT), default=COVARIANT)
    name = serializers.CharField(required=False, allow_blank=True, default='')
    shape = FiniteCategorySerializer()
    values = serializers.DictField(child=SimplicialSetSerializer())
    maps = serializers.DictField(child=serializers.DictField(), required=False)

    def validate(self, attrs):
        I = attrs['shape']['instance']
        raw_values = attrs['values']
        missing = [x for x in I.objects if x not in raw_values]
        if missing:
            raise serializers.ValidationError(f'Нет значений в объектах {missing}')
        values = {x: raw_values[x]['instance'] for x in I.objects}
        covariant = attrs['variance'] == COVARIANT
        raw_maps = attrs.get('maps', {})
        maps = {}
        for u, (a, b) in I.morphisms.items():
            source, target = (values[a], values[b]) if covariant else (values[b], values[a])
            if u not in raw_maps:
                if not I.is_identity(u):
                    raise serializers.ValidationError(f'Нет отображения для морфизма "{u}"')
                maps[u] = identity_map(values[a])
                continue
            try:
                maps[u] = deserialize(
                    SimplicialMapSerializer, raw_maps[u], source=source, target=target,
                )
            except SchemaError as exc:
                raise serializers.ValidationError({u: exc.details.get('errors', [exc.message])})
        cls = Diagram if covariant else Weight
        E = cls(I, values, maps, name=attrs.get('name') or I.name)
        try:
            E.validate()
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        attrs['instance'] = E
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: Diagram):
        I = instance.shape
        return {
            'variance': instance.variance,
            'name': instance.name,
            'shape': FiniteCategorySerializer(I).data,
            'values': {x: SimplicialSetSerializer(X).data for x, X in instance.values.items()},
            'maps': {
                u: SimplicialMapSerializer(instance.maps[u], context={'embedded': True}).data
                for u in I.non_identity()
            },
        }
