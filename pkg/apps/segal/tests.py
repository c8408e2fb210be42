import json
from io import StringIO

from django.core.management import call_command
from django.test import SimpleTestCase

from apps.homology.utils import simplicial_homology
from apps.posets.serializers import FiniteCategorySerializer
from apps.posets.utils import nerve, ordinal
from apps.simplicial.utils import (
    boundary_simplex,
    column,
    is_isomorphic,
    is_simplicial_map,
    standard_simplex,
    validate_bisimplicial_set,
)
from core.exceptions import IndexOutOfRangeError
from core.utils.commands import resolve_input
from core.utils.jsonio import deserialize, read_json
from .serializers import SegalReportSerializer
from .utils import (
    classifying_diagram,
    completeness_check,
    constant_nerve,
    degeneracy_equivalence_check,
    inverse_table,
    invertibles,
    segal_check,
    segal_report,
    spine,
    spine_inclusion,
    walking_iso,
)

CORPUS = ('walking_iso.json', 'interval_category.json', 'three_object_iso.json', 'mixed_category.json')


def fixture_category(name):
    return deserialize(FiniteCategorySerializer, read_json(resolve_input(name)))


class SpineTests(SimpleTestCase):

    def test_spine_one_is_simplex(self):
        self.assertTrue(is_isomorphic(spine(1), standard_simplex(1)))

    def test_counts(self):
        self.assertEqual(spine(2).counts(), (3, 2))
        self.assertEqual(spine(4).counts(), (5, 4))

    def test_inclusion(self):
        for n in (1, 2, 4):
            f = spine_inclusion(n)
            self.assertTrue(is_simplicial_map(f))
            images = [r.generator for r in f.assignment.values()]
            self.assertEqual(len(set(images)), len(images))
            self.assertTrue(all(not r.word for r in f.assignment.values()))
        self.assertIn((1, 2), {r.generator for r in spine_inclusion(3).assignment.values()})

    def test_spine_zero(self):
        with self.assertRaises(IndexOutOfRangeError):
            spine(0)


class WalkingIsoTests(SimpleTestCase):

    def test_nerve_counts(self):
        self.assertEqual(nerve(walking_iso(), 3).counts(), (2, 2, 2, 2))

    def test_contractible(self):
        self.assertEqual(simplicial_homology(nerve(walking_iso(), 3)).bettis(), (1, 0, 0))

    def test_all_invertible(self):
        J = walking_iso()
        self.assertEqual(invertibles(J), ('f', 'f^-1'))
        self.assertEqual(inverse_table(J)['f'], 'f^-1')

    def test_fixture_matches(self):
        self.assertTrue(is_isomorphic(nerve(fixture_category('walking_iso.json'), 3), nerve(walking_iso(), 3)))


class CompletenessTests(SimpleTestCase):

    def test_interval_incomplete(self):
        verdict = completeness_check(fixture_category('interval_category.json'))
        self.assertFalse(verdict.complete)
        self.assertEqual(verdict.invertibles, ())
        self.assertEqual(verdict.non_invertible, ('u',))

    def test_groupoids_complete(self):
        for name in ('walking_iso.json', 'three_object_iso.json'):
            self.assertTrue(completeness_check(fixture_category(name)).complete)

    def test_mixed_flags_iso_pair(self):
        verdict = completeness_check(fixture_category('mixed_category.json'))
        self.assertFalse(verdict.complete)
        self.assertEqual(verdict.invertibles, ('ab', 'ba'))
        self.assertEqual(verdict.non_invertible, ('bc', 'ac'))

    def test_invertibles_closed(self):
        for name in CORPUS:
            C = fixture_category(name)
            table = inverse_table(C)
            for u in table:
                self.assertIn(table[u], table)
                for v in table:
                    if C.source(v) == C.target(u):
                        self.assertIn(C.compose(v, u), table)


class SegalCheckTests(SimpleTestCase):

    def test_corpus_nerves(self):
        for name in CORPUS:
            C = fixture_category(name)
            report = segal_check(constant_nerve(C, 4), 4)
            self.assertTrue(report.segal, name)
            self.assertEqual([level.n for level in report.levels if level.k == 0], [2, 3, 4])

    def test_poset_nerve(self):
        self.assertTrue(segal_check(constant_nerve(ordinal(3), 4)))

    def test_boundary_fails(self):
        report = segal_check(constant_nerve(boundary_simplex(2, trunc=2)), 2)
        self.assertFalse(report.segal)
        self.assertEqual(report.first_failure, (2, 0))
        level = report.levels[0]
        self.assertEqual((level.cells, level.fiber_product), (9, 10))
        self.assertTrue(level.injective)
        self.assertFalse(level.surjective)

    def test_terminal(self):
        report = segal_check(constant_nerve(standard_simplex(0, trunc=4)))
        self.assertTrue(report.segal)
        self.assertTrue(all(level.cells == level.fiber_product == 1 for level in report.levels))

    def test_deterministic(self):
        C = fixture_category('three_object_iso.json')
        first = SegalReportSerializer(segal_check(constant_nerve(C, 3))).data
        self.assertEqual(first, SegalReportSerializer(segal_check(constant_nerve(C, 3))).data)


class ClassifyingDiagramTests(SimpleTestCase):

    def test_identities(self):
        for C in (walking_iso(), fixture_category('interval_category.json')):
            validate_bisimplicial_set(classifying_diagram(C, 2, 2))

    def test_column_zero_is_core_nerve(self):
        X = classifying_diagram(walking_iso(), 1, 2)
        self.assertTrue(is_isomorphic(column(X, 0), nerve(walking_iso(), 2)))

    def test_segal_in_every_row(self):
        for C in (walking_iso(), fixture_category('mixed_category.json')):
            self.assertTrue(segal_check(classifying_diagram(C, 3, 1)).segal)

    def test_degeneracy_equivalence(self):
        for name, expected in (
            ('walking_iso.json', True),
            ('three_object_iso.json', True),
            ('interval_category.json', False),
            ('mixed_category.json', False),
        ):
            X = classifying_diagram(fixture_category(name), 1, 2)
            self.assertEqual(degeneracy_equivalence_check(X).passed, expected, name)


class SegalReportTests(SimpleTestCase):

    def test_report(self):
        report = segal_report(walking_iso(), n_max=3)
        self.assertTrue(report.passed)
        self.assertTrue(report.completeness.complete)
        self.assertTrue(report.degeneracy.passed)

    def test_command(self):
        out = StringIO()
        call_command('segal', 'walking_iso.json', stdout=out, stderr=StringIO())
        payload = json.loads(out.getvalue())
        self.assertTrue(payload['segal'])
        self.assertTrue(payload['completeness']['complete'])
        self.assertEqual(payload['completeness']['invertibles'], ['f', 'g'])
        self.assertTrue(payload['degeneracy']['passed'])
        self.assertEqual([level['n'] for level in payload['levels']], [2, 3, 4])

    def test_command_text(self):
        out = StringIO()
        call_command('segal', 'interval_category.json', n_max=3, format='text', stdout=out, stderr=StringIO())
        self.assertIn('полнота: нет', out.getvalue())
