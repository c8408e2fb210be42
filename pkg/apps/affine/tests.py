import json
from io import StringIO

import sympy as sp
from django.core.management import call_command
from django.test import SimpleTestCase

from core.exceptions import IndexOutOfRangeError, NonMonotoneError
from core.utils.jsonio import deserialize, serialize
from .serializers import AffineMapSerializer
from .structures import AffineMap
from .utils import (
    check_cosimplicial_identities,
    codegeneracy,
    coface,
    monotone_maps,
    naturality_check,
    naturality_sweep,
    realization,
    standard_inclusion,
    structure_map,
)


class AffineMapTests(SimpleTestCase):

    def test_coface_inserts_zero(self):
        self.assertEqual(coface(1, 0)([sp.Rational(1)]), sp.ImmutableMatrix([0, 1]))
        t = [sp.Rational(1, 3), sp.Rational(2, 3)]
        self.assertEqual(coface(2, 1)(t), sp.ImmutableMatrix([sp.Rational(1, 3), 0, sp.Rational(2, 3)]))

    def test_codegeneracy_adds(self):
        t = [sp.Rational(1, 4), sp.Rational(3, 4)]
        self.assertEqual(codegeneracy(0, 0)(t), sp.ImmutableMatrix([1]))
        self.assertEqual(codegeneracy(1, 0).matrix, sp.ImmutableMatrix([[1, 1, 0], [0, 0, 1]]))

    def test_compose_associative(self):
        f, g, h = coface(3, 1), coface(2, 0), codegeneracy(1, 1)
        self.assertEqual(f.compose(g).compose(h), f.compose(g.compose(h)))
        self.assertEqual(AffineMap.identity(4).compose(f), f)

    def test_hyperplane(self):
        for n in range(1, 4):
            for i in range(n + 1):
                self.assertTrue(coface(n, i).preserves_hyperplane())
                self.assertTrue(codegeneracy(n, i).preserves_hyperplane())
        scaled = AffineMap.linear(sp.ImmutableMatrix([[2, 0], [0, 1]]))
        self.assertFalse(scaled.preserves_hyperplane())

    def test_out_of_range(self):
        with self.assertRaises(IndexOutOfRangeError):
            coface(2, 3)
        with self.assertRaises(IndexOutOfRangeError):
            codegeneracy(1, 2)

    def test_serializer(self):
        f = coface(2, 1).compose(codegeneracy(1, 0))
        data = serialize(AffineMapSerializer, f)
        self.assertEqual(data['matrix'][0], [[1, 1], [1, 1], [0, 1]])
        self.assertEqual(deserialize(AffineMapSerializer, data), f)

    def test_serializer_rational(self):
        payload = {'matrix': [[[1, 2]]], 'offset': [[1, 2]]}
        f = deserialize(AffineMapSerializer, payload)
        self.assertEqual(f([1]), sp.ImmutableMatrix([1]))
        self.assertTrue(f.preserves_hyperplane())


class CosimplicialIdentityTests(SimpleTestCase):

    def test_small(self):
        self.assertTrue(check_cosimplicial_identities(2).passed)

    def test_up_to_five(self):
        report = check_cosimplicial_identities(5)
        self.assertTrue(report.passed)
        self.assertEqual(report.failures, ())
        self.assertTrue(report.hyperplane)

    def test_perturbed_coface(self):
        report = check_cosimplicial_identities(3, coface_fn=lambda n, i: coface(n, min(i + 1, n)))
        self.assertFalse(report.passed)
        self.assertIn('sd=', {f.family for f in report.failures})

    def test_n_max_zero(self):
        with self.assertRaises(IndexOutOfRangeError):
            check_cosimplicial_identities(0)


class NaturalityTests(SimpleTestCase):

    def test_monotone_maps(self):
        self.assertEqual(len(monotone_maps(1, 1)), 3)
        self.assertEqual(len(monotone_maps(2, 3)), 20)

    def test_identity(self):
        verdict = naturality_check((0, 1, 2))
        self.assertTrue(verdict.commutes)
        self.assertEqual(structure_map((0, 1, 2)), AffineMap.identity(3))

    def test_surjection_to_point(self):
        self.assertTrue(naturality_check((0, 0)).commutes)
        self.assertEqual(structure_map((0, 0)).matrix, sp.ImmutableMatrix([[1, 1]]))
        self.assertEqual(realization((0, 0)).offset.shape, (0, 1))

    def test_structure_map_columns(self):
        self.assertEqual(
            structure_map((0, 0, 2)).matrix,
            sp.ImmutableMatrix([[1, 1, 0], [0, 0, 0], [0, 0, 1]]),
        )
        self.assertEqual(structure_map((1,), 1), coface(1, 0))

    def test_exhaustive(self):
        verdicts = naturality_sweep(3)
        self.assertEqual(len(verdicts), sum(len(monotone_maps(n, k)) for n in range(4) for k in range(4)))
        self.assertTrue(all(v.commutes and v.vertices_agree for v in verdicts))

    def test_non_monotone(self):
        with self.assertRaises(NonMonotoneError):
            structure_map((1, 0))


class AffineCommandTests(SimpleTestCase):

    def test_command(self):
        out = StringIO()
        call_command('affine_check', n_max=3, naturality_max=2, stdout=out, stderr=StringIO())
        payload = json.loads(out.getvalue())
        self.assertTrue(payload['identities']['passed'])
        self.assertTrue(payload['naturality']['passed'])
        self.assertEqual(payload['naturality']['checked'], 31)
