# apps/simplicial/serializers.py

from rest_framework import serializers

from core.exceptions import SimplicialError
from .structures import BiSimplexRef, BisimplicialSet, SimplexRef, SimplicialMap, SimplicialSet
from .utils import format_label, is_simplicial_map, validate_bisimplicial_set


def label_table(X: SimplicialSet):
    """Метки всех образующих; совпадение меток у разных образующих - ошибка"""
    table = {}
    used = set()
    for gens in X.generators:
        for g in gens:
            label = X.label(g)
            if label in used:
                raise serializers.ValidationError(f'Неоднозначная метка образующей "{label}"')
            used.add(label)
            table[g] = label
    return table


def word_field():
    return serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=True)


def label_field(**kwargs):
    return serializers.CharField(trim_whitespace=False, **kwargs)


class SimplexRefSerializer(serializers.Serializer):
    word = word_field()
    gen = label_field()


class SimplicialSetSerializer(serializers.Serializer):
    d_max = serializers.IntegerField(min_value=0)
    generators = serializers.ListField(
        child=serializers.ListField(child=label_field(), allow_empty=True),
        allow_empty=True,
    )
    faces = serializers.DictField(
        child=serializers.ListField(child=SimplexRefSerializer(), allow_empty=True),
        required=False,
    )

    def validate_generators(self, value):
        seen = set()
        for gens in value:
            for label in gens:
                if label in seen:
                    raise serializers.ValidationError(f'Образующая "{label}" повторяется')
                seen.add(label)
        return value

    def validate(self, attrs):
        d_max = attrs['d_max']
        levels = [tuple(gens) for gens in attrs['generators']]
        if len(levels) > d_max + 1:
            raise serializers.ValidationError('Образующие выше d_max')
        levels += [()] * (d_max + 1 - len(levels))
        dims = {g: n for n, gens in enumerate(levels) for g in gens}
        raw_faces = attrs.get('faces', {})
        unknown = [g for g in raw_faces if g not in dims]
        if unknown:
            raise serializers.ValidationError(f'Грани заданы для неизвестных образующих: {unknown}')
        faces = {}
        for g, refs in raw_faces.items():
            n = dims[g]
            faces[g] = tuple(SimplexRef(tuple(r['word']), r['gen'], n - 1) for r in refs)
        X = SimplicialSet(d_max=d_max, generators=tuple(levels), faces=faces)
        try:
            X.validate()
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        attrs['instance'] = X
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: SimplicialSet):
        labels = label_table(instance)
        faces = {}
        for n, gens in enumerate(instance.generators):
            if n == 0:
                continue
            for g in gens:
                faces[labels[g]] = [
                    {'word': list(r.word), 'gen': labels[r.generator]} for r in instance.faces[g]
                ]
        return {
            'd_max': instance.d_max,
            'generators': [[labels[g] for g in gens] for gens in instance.generators],
            'faces': faces,
        }


class SimplicialMapSerializer(serializers.Serializer):
    """
    Отображение: таблица образов образующих.
    Источник и цель берутся из вложенных полей или из контекста (диаграммы).
    """

    source = SimplicialSetSerializer(required=False)
    target = SimplicialSetSerializer(required=False)
    assignment = serializers.DictField(child=SimplexRefSerializer())

    def validate(self, attrs):
        source = attrs['source']['instance'] if 'source' in attrs else self.context.get('source')
        target = attrs['target']['instance'] if 'target' in attrs else self.context.get('target')
        if source is None or target is None:
            raise serializers.ValidationError('Не заданы источник и цель отображения')
        source_by_label = {source.label(g): g for g in source.dim_of}
        target_by_label = {target.label(g): g for g in target.dim_of}
        assignment = {}
        for label, ref in attrs['assignment'].items():
            if label not in source_by_label:
                raise serializers.ValidationError(f'Неизвестная образующая источника "{label}"')
            if ref['gen'] not in target_by_label:
                raise serializers.ValidationError(f'Неизвестная образующая цели "{ref["gen"]}"')
            g = source_by_label[label]
            assignment[g] = SimplexRef(tuple(ref['word']), target_by_label[ref['gen']], source.dim(g))
        missing = [source.label(g) for g in source.dim_of if g not in assignment]
        if missing:
            raise serializers.ValidationError(f'Образующие без образа: {missing}')
        f = SimplicialMap(source, target, assignment)
        try:
            report = is_simplicial_map(f)
        except SimplicialError as exc:
            raise serializers.ValidationError(exc.message)
        if not report.valid:
            v = report.violations[0]
            raise serializers.ValidationError(
                f'Отображение не коммутирует с гранью d_{v.index} на "{source.label(v.generator)}"'
            )
        attrs['instance'] = f
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: SimplicialMap):
        source_labels = label_table(instance.source)
        target_labels = label_table(instance.target)
        payload = {}
        if not self.context.get('embedded'):
            payload['source'] = SimplicialSetSerializer(instance.source).data
            payload['target'] = SimplicialSetSerializer(instance.target).data
        payload['assignment'] = {
            source_labels[g]: {'word': list(r.word), 'gen': target_labels[r.generator]}
            for g, r in instance.assignment.items()
        }
        return payload


class BiSimplexRefSerializer(serializers.Serializer):
    h_word = word_field()
    v_word = word_field()
    gen = label_field()


class BidegreeGeneratorsSerializer(serializers.Serializer):
    bidegree = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2)
    labels = serializers.ListField(child=label_field(), allow_empty=True)


class BisimplicialSetSerializer(serializers.Serializer):
    d_max = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2)
    generators = BidegreeGeneratorsSerializer(many=True)
    h_faces = serializers.DictField(child=serializers.ListField(child=BiSimplexRefSerializer()), required=False)
    v_faces = serializers.DictField(child=serializers.ListField(child=BiSimplexRefSerializer()), required=False)

    def validate(self, attrs):
        generators = {}
        bidegrees = {}
        for entry in attrs['generators']:
            key = tuple(entry['bidegree'])
            if key in generators:
                raise serializers.ValidationError(f'Бистепень {list(key)} указана дважды')
            generators[key] = tuple(entry['labels'])
            for label in entry['labels']:
                if label in bidegrees:
                    raise serializers.ValidationError(f'Образующая "{label}" повторяется')
                bidegrees[label] = key

        def build(raw, horizontal):
            faces = {}
            for label, refs in raw.items():
                if label not in bidegrees:
                    raise serializers.ValidationError(f'Грани для неизвестной образующей "{label}"')
                m, n = bidegrees[label]
                target = (m - 1, n) if horizontal else (m, n - 1)
                expected = (m if horizontal else n) + 1
                if len(refs) != expected:
                    raise serializers.ValidationError(f'У "{label}" должно быть {expected} граней')
                for r in refs:
                    if r['gen'] not in bidegrees:
                        raise serializers.ValidationError(f'Ссылка на неизвестную образующую "{r["gen"]}"')
                faces[label] = tuple(
                    BiSimplexRef(tuple(r['h_word']), tuple(r['v_word']), r['gen'], target) for r in refs
                )
            return faces

        B = BisimplicialSet(
            d_max=tuple(attrs['d_max']),
            generators=generators,
            h_faces=build(attrs.get('h_faces', {}), True),
            v_faces=build(attrs.get('v_faces', {}), False),
        )
        try:
            validate_bisimplicial_set(B)
        except (SimplicialError, KeyError) as exc:
            raise serializers.ValidationError(str(exc))
        attrs['instance'] = B
        return attrs

    def create(self, validated_data):
        return validated_data['instance']

    def to_representation(self, instance: BisimplicialSet):
        def refs(table):
            return {
                format_label(g): [
                    {'h_word': list(r.h_word), 'v_word': list(r.v_word), 'gen': format_label(r.generator)}
                    for r in values
                ]
                for g, values in table.items()
            }

        return {
            'd_max': list(instance.d_max),
            'generators': [
                {'bidegree': list(key), 'labels': [format_label(g) for g in gens]}
                for key, gens in instance.generators.items()
            ],
            'h_faces': refs(instance.h_faces),
            'v_faces': refs(instance.v_faces),
        }
