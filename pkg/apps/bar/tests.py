import json
from io import StringIO

from django.core.management import call_command
from django.test import SimpleTestCase

from apps.homology.utils import simplicial_homology, weq_certificate
from apps.posets.ex import ex_nerve_poset
from apps.posets.serializers import FiniteCategorySerializer
from apps.posets.structures import FinitePoset, Functor, compose_functors
from apps.posets.utils import nerve, ordinal
from apps.simplicial.utils import (
    boundary_simplex,
    compose_maps,
    identity_map,
    is_isomorphic,
    is_simplicial_map,
    maps_equal,
)
from core.exceptions import FunctorialityError, SchemaError
from core.utils.commands import resolve_input
from core.utils.jsonio import deserialize, dumps, read_json, serialize
from .serializers import DiagramSerializer
from .structures import CONTRAVARIANT, Weight
from .tasks import run_bar_comparison
from .utils import (
    augmentation,
    augmentation_ex,
    bar,
    bar_comparison,
    bar_ex_complex,
    bar_level,
    comma_category,
    comma_projection,
    constant_set_functor,
    corepresentable,
    discrete_diagram,
    dugger_diagram,
    dugger_Q,
    dugger_Q_ex,
    hocolim,
    hocolim_map,
    point_diagram,
    point_weight,
    representable,
)


def fixture(name):
    return read_json(resolve_input(name))


def fixture_category(name):
    return deserialize(FiniteCategorySerializer, fixture(name))


def monotone_functor(assignment, source: FinitePoset, target: FinitePoset, name=''):
    return Functor(
        source.as_category(),
        target.as_category(),
        dict(assignment),
        {(a, b): (assignment[a], assignment[b]) for a, b in source.leq},
        name=name,
    )


def constant_weight(C, X):
    ident = identity_map(X)
    return Weight(C, {x: X for x in C.objects}, {u: ident for u in C.morphisms}, name=X.name)


def sample_presheaves(C, trunc):
    """Точка, все представимые и постоянная граница треугольника"""
    result = [point_weight(C, trunc)]
    result += [discrete_diagram(representable(C, d), trunc) for d in C.objects]
    result.append(constant_weight(C, boundary_simplex(2, trunc=trunc)))
    return result


class CommaCategoryTests(SimpleTestCase):

    def test_constant_functors_give_shape(self):
        I = ordinal(2).as_category()
        C = comma_category(
            constant_set_functor(I),
            constant_set_functor(I, variance=CONTRAVARIANT),
        )
        self.assertEqual(len(C.objects), 3)
        self.assertEqual(len(C.morphisms), 6)
        self.assertTrue(is_isomorphic(nerve(C, 3), nerve(I, 3)))

    def test_slice_under_zero(self):
        I = ordinal(1).as_category()
        C = comma_category(corepresentable(I, 0), constant_set_functor(I, variance=CONTRAVARIANT))
        self.assertTrue(is_isomorphic(nerve(C, 2), nerve(ordinal(1), 2)))
        under_one = comma_category(corepresentable(I, 1), constant_set_functor(I, variance=CONTRAVARIANT))
        self.assertEqual(len(under_one.objects), 1)

    def test_object_count_is_pullback(self):
        J = fixture_category('three_object_iso.json')
        Y, X = corepresentable(J, 'a'), representable(J, 'b')
        C = comma_category(Y, X)
        expected = sum(len(Y.values[i]) * len(X.values[i]) for i in J.objects)
        self.assertEqual(len(C.objects), expected)
        C.validate()
        comma_projection(C, J).validate()

    def test_set_functors_validate(self):
        J = fixture_category('walking_iso.json')
        for x in J.objects:
            corepresentable(J, x).validate()
            representable(J, x).validate()

    def test_wrong_variance_rejected(self):
        I = ordinal(1).as_category()
        with self.assertRaises(FunctorialityError):
            comma_category(constant_set_functor(I), constant_set_functor(I))


class BarTests(SimpleTestCase):

    def test_terminal(self):
        I = ordinal(0).as_category()
        for n in range(4):
            self.assertEqual(len(bar_level(point_weight(I, 3), I, point_diagram(I, 3), n, 0)), 1)
        self.assertEqual(simplicial_homology(hocolim(point_diagram(I, 3), 3)).bettis(), (1, 0, 0))

    def test_level_zero_is_objects(self):
        J = fixture_category('walking_iso.json')
        cells = bar_level(point_weight(J, 1), J, point_diagram(J, 1), 0, 0)
        self.assertEqual(sorted(c[0][0] for c in cells), sorted(J.objects))

    def test_point_bar_is_nerve(self):
        shapes = [
            ordinal(1).as_category(),
            ordinal(2).as_category(),
            fixture_category('interval_category.json'),
            fixture_category('walking_iso.json'),
        ]
        for I in shapes:
            with self.subTest(shape=I.name):
                B = bar(point_weight(I, 2), I, point_diagram(I, 2), 2)
                self.assertTrue(is_isomorphic(B, nerve(I, 2)))

    def test_level_counts_match_comma_nerve(self):
        I = ordinal(2).as_category()
        E = dugger_diagram(I, 0, trunc=2)
        F = discrete_diagram(representable(I, 1), trunc=2)
        for k in range(3):
            C = comma_category(E.level(k), F.level(k))
            N = nerve(C, 2)
            for n in range(3):
                with self.subTest(k=k, n=n):
                    self.assertEqual(len(bar_level(F, I, E, n, k)), len(list(N.simplices(n))))

    def test_pushout_of_two_points(self):
        E = deserialize(DiagramSerializer, fixture('pushout_diagram.json'))
        X = hocolim(E, 2)
        self.assertEqual(simplicial_homology(X).bettis(), (1, 1))

    def test_bar_ex_of_poset_matches_monotone_maps(self):
        P = ordinal(1)
        I = P.as_category()
        B_ex = bar_ex_complex(point_weight(I, 2), I, point_diagram(I, 2), 2)
        E = ex_nerve_poset(P, 2)
        self.assertEqual(
            [B_ex.tabular.size(n) for n in range(3)],
            [E.tabular.size(n) for n in range(3)],
        )
        self.assertEqual(B_ex.tabular.size(1), 5)

    def test_bar_ex_terminal_is_contractible(self):
        I = ordinal(0).as_category()
        B_ex = bar_ex_complex(point_weight(I, 2), I, point_diagram(I, 2), 2)
        self.assertEqual(simplicial_homology(B_ex.simplicial_set).bettis(), (1, 0))


class ComparisonTests(SimpleTestCase):

    def check_comparison(self, F, I, E, trunc):
        B = bar(F, I, E, trunc)
        B_ex = bar_ex_complex(F, I, E, trunc)
        b = bar_comparison(F, I, E, trunc, source=B, target=B_ex)
        self.assertTrue(is_simplicial_map(b))
        self.assertTrue(weq_certificate(b))
        self.assertEqual(
            simplicial_homology(B).reliable_groups,
            simplicial_homology(B_ex.simplicial_set).reliable_groups,
        )

    def test_point_diagrams(self):
        for I in (ordinal(0).as_category(), ordinal(1).as_category(), fixture_category('walking_iso.json')):
            with self.subTest(shape=I.name):
                self.check_comparison(point_weight(I, 2), I, point_diagram(I, 2), 2)

    def test_pushout(self):
        E = deserialize(DiagramSerializer, fixture('pushout_diagram.json'))
        self.check_comparison(point_weight(E.shape, 2), E.shape, E, 2)

    def test_representable_weight(self):
        I = ordinal(1).as_category()
        self.check_comparison(
            discrete_diagram(representable(I, 1), 2), I, dugger_diagram(I, 0, 2), 2,
        )


class HocolimMapTests(SimpleTestCase):

    def test_composition(self):
        I = ordinal(2).as_category()
        E = dugger_diagram(I, 0, trunc=2)
        u = monotone_functor({0: 0, 1: 2}, ordinal(1), ordinal(2), name='u')
        v = monotone_functor({0: 1}, ordinal(0), ordinal(1), name='v')
        f = hocolim_map(E, u, 2)
        g = hocolim_map(E.restrict(u), v, 2)
        self.assertTrue(is_simplicial_map(f))
        self.assertTrue(is_simplicial_map(g))
        self.assertTrue(maps_equal(compose_maps(f, g), hocolim_map(E, compose_functors(u, v), 2)))

    def test_identity_functor(self):
        P = ordinal(1)
        E = point_diagram(P.as_category(), 2)
        ident = monotone_functor({0: 0, 1: 1}, P, P, name='id')
        f = hocolim_map(E, ident, 2)
        self.assertTrue(maps_equal(f, identity_map(f.target)))


class DuggerTests(SimpleTestCase):

    def test_representable_at_zero_is_contractible(self):
        I = ordinal(1).as_category()
        F = discrete_diagram(representable(I, 1), 2)
        self.assertEqual(simplicial_homology(dugger_Q(F, I, 0, 2)).bettis(), (1, 0))

    def test_augmentation(self):
        for n in (1, 2):
            C = ordinal(n).as_category()
            for F in sample_presheaves(C, 2):
                for c in C.objects:
                    if not F.values[c].generators[0]:
                        continue
                    with self.subTest(shape=C.name, presheaf=F.name, at=c):
                        Q = dugger_Q(F, C, c, 2)
                        q = augmentation(F, C, c, Q)
                        self.assertTrue(is_simplicial_map(q))
                        self.assertTrue(weq_certificate(q))

    def test_ex_augmentation_factors(self):
        C = ordinal(1).as_category()
        for F in sample_presheaves(C, 2):
            for c in C.objects:
                if not F.values[c].generators[0]:
                    continue
                with self.subTest(presheaf=F.name, at=c):
                    Q = dugger_Q(F, C, c, 2)
                    Q_ex = dugger_Q_ex(F, C, c, 2)
                    q = augmentation(F, C, c, Q)
                    q_ex = augmentation_ex(F, C, c, Q_ex)
                    self.assertTrue(is_simplicial_map(q_ex))
                    self.assertTrue(weq_certificate(q_ex))
                    b = bar_comparison(F, C, dugger_diagram(C, c, 2), 2, source=Q, target=Q_ex)
                    self.assertTrue(maps_equal(compose_maps(q_ex, b), q))

    def test_ex_augmentation_on_two_simplex_shape(self):
        C = ordinal(2).as_category()
        for F in sample_presheaves(C, 2)[:-1]:
            Q_ex = dugger_Q_ex(F, C, 0, 2)
            self.assertTrue(weq_certificate(augmentation_ex(F, C, 0, Q_ex)))


class DiagramSerializerTests(SimpleTestCase):

    def test_output_is_fixed_point(self):
        E = deserialize(DiagramSerializer, fixture('pushout_diagram.json'))
        once = dumps(serialize(DiagramSerializer, E))
        again = dumps(serialize(DiagramSerializer, deserialize(DiagramSerializer, json.loads(once))))
        self.assertEqual(once, again)

    def test_missing_map_rejected(self):
        payload = fixture('pushout_diagram.json')
        del payload['maps']['q']
        with self.assertRaises(SchemaError):
            deserialize(DiagramSerializer, payload)

    def test_non_functorial_composite_rejected(self):
        payload = {
            'shape': {
                'objects': ['0', '1', '2'],
                'morphisms': [
                    {'name': 'f', 'source': '0', 'target': '1'},
                    {'name': 'g', 'source': '1', 'target': '2'},
                    {'name': 'h', 'source': '0', 'target': '2'},
                ],
                'compose': [['g', 'f', 'h']],
            },
            'values': {
                '0': {'d_max': 1, 'generators': [['a'], []]},
                '1': {'d_max': 1, 'generators': [['b', 'c'], []]},
                '2': {'d_max': 1, 'generators': [['d', 'e'], []]},
            },
            'maps': {
                'f': {'assignment': {'a': {'word': [], 'gen': 'b'}}},
                'g': {'assignment': {'b': {'word': [], 'gen': 'd'}, 'c': {'word': [], 'gen': 'e'}}},
                'h': {'assignment': {'a': {'word': [], 'gen': 'e'}}},
            },
        }
        with self.assertRaises(SchemaError):
            deserialize(DiagramSerializer, payload)


class BarCommandTests(SimpleTestCase):

    def run_command(self, *args, **kwargs):
        out = StringIO()
        call_command('bar', *args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()

    def test_pushout_homology(self):
        payload = json.loads(self.run_command('pushout_diagram.json', trunc=2))
        self.assertEqual([e['betti'] for e in payload['homology'] if e['reliable']], [1, 1])

    def test_ex_comparison(self):
        output = self.run_command('pushout_diagram.json', trunc=2, ex=True)
        payload = json.loads(output)
        self.assertTrue(payload['comparison']['passed'])
        self.assertEqual(output, self.run_command('pushout_diagram.json', trunc=2, ex=True))


class BarTaskTests(SimpleTestCase):

    def test_eager_comparison(self):
        result = run_bar_comparison.apply(args=(fixture('pushout_diagram.json'),), kwargs={'trunc': 2}).get()
        self.assertTrue(result['comparison']['passed'])
        self.assertEqual([e['betti'] for e in result['bar'] if e['reliable']], [1, 1])

    def test_schema_error_reported(self):
        result = run_bar_comparison.apply(args=({'values': {}},)).get()
        self.assertEqual(result['error']['error'], 'schema_violation')
