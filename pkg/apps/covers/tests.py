import json
import random
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.bar.tasks import run_bar_comparison
from apps.bar.utils import bar_ex_complex, point_diagram, point_weight
from apps.homology.structures import HomologyGroup
from apps.homology.utils import simplicial_homology, weq_certificate
from apps.posets.structures import MonotoneMap
from apps.posets.utils import sd_poset, subset_poset
from apps.simplicial.structures import SimplexRef, SimplicialMap
from apps.simplicial.utils import (
    boundary_simplex,
    compose_maps,
    identity_map,
    is_simplicial_map,
    maps_equal,
    standard_simplex,
)
from core.celery import app as celery_app
from core.exceptions import EXIT_INVARIANT, EXIT_SCHEMA, CoverComplexError, EnumerationCapExceeded, SchemaError
from core.utils.commands import resolve_input
from core.utils.jsonio import deserialize, read_json, serialize
from .lifting import check_phi_rlp, check_rlp, phi_lifting, phi_tabular, structural_phi_rlp
from .pipeline import whitehead_pipeline
from .serializers import CoverComplexSerializer
from .structures import CoverComplex
from .tasks import run_rlp_check, run_whitehead_pipeline
from .utils import (
    canonical_inclusion,
    cech_nerve,
    cech_tabular,
    closure,
    cover_from_facets,
    phi_map,
    psi_map,
    reference_homology,
    reference_triangulations,
    relabel,
    rho_A,
    sigma_A,
    sigma_bar,
    sigma_bar_ex,
    sigma_category,
)


def fixture(name):
    return read_json(resolve_input(name))


def load_cover(name):
    return deserialize(CoverComplexSerializer, fixture(name))


def small_covers():
    return [load_cover(name) for name in ('interval_cover.json', 'circle_cover.json', 'sphere_cover.json')]


class CoverComplexTests(SimpleTestCase):

    def test_fixtures_validate(self):
        for name in ('interval_cover.json', 'circle_cover.json', 'sphere_cover.json', 'torus_cover.json'):
            cov = load_cover(name)
            self.assertEqual(cov.validate(), cov)
        self.assertEqual(len(load_cover('torus_cover.json').nonempty), 42)

    def test_missing_singleton(self):
        cov = CoverComplex(('a', 'b'), frozenset({frozenset('a')}))
        with self.assertRaises(CoverComplexError):
            cov.validate()

    def test_not_downward_closed(self):
        cov = CoverComplex(
            ('a', 'b', 'c'),
            frozenset({frozenset('a'), frozenset('b'), frozenset('c'), frozenset('abc')}),
        )
        with self.assertRaises(CoverComplexError):
            cov.validate()

    def test_unknown_index(self):
        payload = {'index_set': ['a'], 'nonempty': [['a'], ['b'], ['a', 'b']]}
        with self.assertRaises(SchemaError):
            deserialize(CoverComplexSerializer, payload)

    def test_serializer_fixed_point(self):
        for cov in small_covers():
            data = serialize(CoverComplexSerializer, cov)
            again = deserialize(CoverComplexSerializer, data)
            self.assertEqual(again, cov)
            self.assertEqual(serialize(CoverComplexSerializer, again), data)

    def test_explicit_reference_homology(self):
        cov = load_cover('interval_cover.json')
        self.assertEqual(cov.reference_homology, (HomologyGroup(1),))
        self.assertEqual(reference_homology(cov, 3), (HomologyGroup(1),))


class CechNerveTests(SimpleTestCase):

    def test_interval(self):
        self.assertEqual(simplicial_homology(cech_nerve(load_cover('interval_cover.json'), 3)).bettis(), (1, 0, 0))

    def test_circle(self):
        self.assertEqual(simplicial_homology(cech_nerve(load_cover('circle_cover.json'), 3)).bettis(), (1, 1, 0))

    def test_sphere(self):
        H = simplicial_homology(cech_nerve(load_cover('sphere_cover.json'), 3))
        self.assertEqual(H.bettis(), (1, 0, 1))
        self.assertTrue(all(not g.torsion for g in H.reliable_groups))

    def test_torus_matches_reference(self):
        cov = load_cover('torus_cover.json')
        H = simplicial_homology(cech_nerve(cov, 3))
        self.assertEqual(H.reliable_groups, reference_homology(cov, 3))
        self.assertEqual(H.bettis(), (1, 2, 1))

    def test_levels(self):
        X = cech_nerve(load_cover('interval_cover.json'), 2)
        self.assertEqual(X.counts(), (2, 2, 2))
        self.assertEqual(set(X.generators[1]), {('a', 'b'), ('b', 'a')})

    def test_reference_triangulations(self):
        bettis = {name: simplicial_homology(X).bettis() for name, X in reference_triangulations(3).items()}
        self.assertEqual(bettis['circle'], (1, 1, 0))
        self.assertEqual(bettis['sphere'], (1, 0, 1))
        self.assertEqual(bettis['torus'], (1, 2, 1))

    def test_relabel_invariance(self):
        rng = random.Random(7)
        for cov in small_covers():
            before = simplicial_homology(cech_nerve(cov, 3)).reliable_groups
            labels = list(cov.index_set)
            shuffled = labels[:]
            rng.shuffle(shuffled)
            renamed = relabel(cov, dict(zip(labels, shuffled)))
            self.assertEqual(simplicial_homology(cech_nerve(renamed, 3)).reliable_groups, before)

    def test_cover_from_facets(self):
        cov = cover_from_facets([[0, 1], [0, 2], [1, 2]], labels={0: 'a', 1: 'b', 2: 'c'})
        self.assertEqual(cov, load_cover('circle_cover.json'))


class ClosureTests(SimpleTestCase):

    def test_interval_closure(self):
        cl = closure(load_cover('interval_cover.json'))
        self.assertEqual(len(cl.index_set), 3)
        self.assertEqual(cl.index_set[-1], frozenset('ab'))
        # все семейства лежат под {a, b}
        self.assertEqual(len(cl.nonempty), 7)

    def test_flags_by_union(self):
        cl = closure(load_cover('circle_cover.json'))
        a, b, c = frozenset('a'), frozenset('b'), frozenset('c')
        self.assertTrue(cl.is_nonempty({a, b, a | b}))
        self.assertFalse(cl.is_nonempty({a | b, c}))
        self.assertFalse(cl.is_nonempty({a, b, c}))

    def test_preserves_homology(self):
        for cov in small_covers():
            self.assertEqual(
                simplicial_homology(cech_nerve(closure(cov), 3)).reliable_groups,
                simplicial_homology(cech_nerve(cov, 3)).reliable_groups,
            )

    def test_idempotent(self):
        for cov in small_covers():
            once = closure(cov)
            self.assertEqual(closure(once), once)

    def test_canonical_inclusion(self):
        cov = load_cover('circle_cover.json')
        inclusion = canonical_inclusion(cov, 2)
        self.assertTrue(is_simplicial_map(inclusion))
        self.assertTrue(weq_certificate(inclusion))


class SigmaRhoTests(SimpleTestCase):

    def test_single_index(self):
        alpha = sigma_A(('a',))
        self.assertEqual(dict(alpha.assignment), {(0,): frozenset('a')})

    def test_degenerate_tuple(self):
        alpha = sigma_A(('a', 'a'))
        self.assertEqual(set(alpha.assignment.values()), {frozenset('a')})
        alpha.validate()

    def test_edge(self):
        alpha = sigma_A(('a', 'b'))
        self.assertEqual(alpha((0,)), frozenset('a'))
        self.assertEqual(alpha((1,)), frozenset('b'))
        self.assertEqual(alpha((0, 1)), frozenset('ab'))
        self.assertEqual(rho_A(alpha), (frozenset('a'), frozenset('b')))

    def test_rho_of_constant(self):
        beta = frozenset('ab')
        P = sd_poset(2)
        alpha = MonotoneMap(P, subset_poset('ab'), {S: beta for S in P.elements})
        self.assertEqual(rho_A(alpha), (beta, beta, beta))

    def test_round_trip(self):
        rng = random.Random(2024)
        for _ in range(100):
            t = tuple(rng.choice('abcd') for _ in range(rng.randint(1, 4)))
            alpha = sigma_A(t)
            alpha.validate()
            self.assertEqual(rho_A(alpha), tuple(frozenset({a}) for a in t))

    def test_empty_tuple(self):
        with self.assertRaises(CoverComplexError):
            sigma_A(())


class ComparisonMapTests(SimpleTestCase):

    def test_psi_on_interval(self):
        cov = load_cover('interval_cover.json')
        psi = psi_map(cov, 2)
        self.assertTrue(is_simplicial_map(psi))
        self.assertTrue(weq_certificate(psi))

    def test_psi_circle(self):
        cov = load_cover('circle_cover.json')
        psi = psi_map(cov, 3)
        certificate = weq_certificate(psi)
        self.assertTrue(certificate)
        self.assertEqual(simplicial_homology(psi.target).bettis(), (1, 1, 0))

    def test_psi_sphere(self):
        cov = load_cover('sphere_cover.json')
        psi = psi_map(cov, 2)
        self.assertTrue(weq_certificate(psi))
        self.assertEqual(simplicial_homology(psi.source).bettis(), (1, 0))

    def test_sigma_bar_is_nerve_of_sigma(self):
        cov = load_cover('circle_cover.json')
        self.assertEqual(simplicial_homology(sigma_bar(cov, 3)).bettis(), (1, 1, 0))

    def test_phi_vertex_bijection(self):
        for cov in small_covers():
            B_ex = sigma_bar_ex(cov, 1)
            phi = phi_map(cov, source=B_ex)
            images = [phi.assignment[g] for g in phi.source.generators[0]]
            self.assertTrue(all(not r.word for r in images))
            self.assertEqual(len({r.generator for r in images}), len(images))
            self.assertEqual(len(images), len(phi.target.generators[0]))

    def test_sigma_bar_ex_matches_comma_category_enumeration(self):
        cov = load_cover('circle_cover.json')
        fast = sigma_bar_ex(cov, 2)
        I = sigma_category(cov)
        slow = bar_ex_complex(point_weight(I, 2), I, point_diagram(I, 2), 2)
        self.assertEqual(fast.simplicial_set.name, slow.simplicial_set.name)
        self.assertEqual(fast.tabular.levels, slow.tabular.levels)
        self.assertEqual(fast.tabular.faces, slow.tabular.faces)
        self.assertEqual(fast.tabular.degeneracies, slow.tabular.degeneracies)
        self.assertEqual(fast.simplicial_set.generators, slow.simplicial_set.generators)
        for gens in slow.simplicial_set.generators[1:]:
            for g in gens:
                self.assertEqual(fast.simplicial_set.faces[g], slow.simplicial_set.faces[g])
                self.assertEqual(fast.key_of(g), slow.key_of(g))

    def test_sphere_bar_ex_under_default_cap(self):
        B_ex = sigma_bar_ex(load_cover('sphere_cover.json'))
        self.assertEqual(B_ex.trunc, 3)
        self.assertEqual(simplicial_homology(B_ex.simplicial_set).bettis(), (1, 0, 1))

    def test_phi_sphere_is_simplicial(self):
        cov = load_cover('sphere_cover.json')
        self.assertTrue(is_simplicial_map(phi_map(cov, 2)))

    def test_factorization(self):
        for cov in small_covers():
            trunc = 2
            B_ex = sigma_bar_ex(cov, trunc)
            T = cech_tabular(closure(cov), trunc)
            cech = cech_nerve(cov, trunc)
            psi = psi_map(cov, source=cech, target=B_ex)
            phi = phi_map(cov, source=B_ex, target_tabular=T)
            inclusion = canonical_inclusion(cov, source=cech, target_tabular=T)
            self.assertTrue(maps_equal(compose_maps(phi, psi), inclusion), cov.name)


class LiftingTests(SimpleTestCase):

    def test_identity(self):
        X = boundary_simplex(2, trunc=2)
        report = check_rlp(identity_map(X), 2)
        self.assertTrue(report)
        self.assertEqual([d.n for d in report.dimensions], [0, 1, 2])

    def test_broken_vertex_image(self):
        X = standard_simplex(1, trunc=1)
        v = SimplexRef((), (0,), 0)
        f = SimplicialMap(X, X, {(0,): v, (1,): v, (0, 1): SimplexRef((0,), (0,), 1)}, name='f')
        self.assertTrue(is_simplicial_map(f))
        report = check_rlp(f, 1)
        self.assertFalse(report)
        self.assertFalse(report.dimensions[0].passed)
        self.assertEqual(report.failures[0].n, 0)

    def test_boundary_inclusion(self):
        X, Y = boundary_simplex(2, trunc=2), standard_simplex(2, trunc=2)
        f = SimplicialMap(X, Y, {g: Y.ref(g) for g in X.dim_of}, name='∂Δ^2↪Δ^2')
        report = check_rlp(f, 2)
        self.assertEqual([d.passed for d in report.dimensions], [True, True, False])
        self.assertEqual(report.dimensions[2].realizable - report.dimensions[2].realizable_lifted, 1)

    def test_cap(self):
        with self.assertRaises(EnumerationCapExceeded):
            check_rlp(identity_map(boundary_simplex(2, trunc=2)), 2, cap=3)

    def assert_phi_rlp(self, cov, n_max=3):
        B_ex = sigma_bar_ex(cov, n_max - 1)
        report = check_phi_rlp(cov, B_ex, cech_tabular(closure(cov), n_max), n_max)
        self.assertTrue(report, report.failures)
        for d in report.dimensions[1:]:
            self.assertGreater(d.realizable, 0)
            self.assertEqual(d.realizable_lifted, d.realizable)
            self.assertEqual(d.constructive_checked, d.realizable)
            self.assertEqual(d.constructive_valid, d.constructive_checked)
            self.assertLessEqual(d.lifted, d.squares)
        return report

    def test_phi_circle(self):
        report = self.assert_phi_rlp(load_cover('circle_cover.json'))
        # над вырожденными симплексами есть нереализуемые квадраты
        self.assertLess(report.dimensions[2].realizable, report.dimensions[2].squares)

    def test_phi_interval(self):
        self.assert_phi_rlp(load_cover('interval_cover.json'))

    def test_phi_sphere(self):
        report = self.assert_phi_rlp(load_cover('sphere_cover.json'), n_max=3)
        self.assertEqual(report.dimensions[3].squares, 1147214)
        self.assertEqual(report.dimensions[3].realizable, 651206)

    def enumerated_phi_rlp(self, cov, B_ex, T, n_max):
        f = phi_tabular(cov, B_ex, T)
        realizable, lifts, constructive = phi_lifting(cov, B_ex, f)
        return check_rlp(f, n_max, realizable=realizable, lifts=lifts, constructive=constructive)

    def test_structural_matches_square_enumeration(self):
        for name, n_max in (('interval_cover.json', 3), ('circle_cover.json', 3), ('sphere_cover.json', 2)):
            cov = load_cover(name)
            B_ex = sigma_bar_ex(cov, n_max - 1)
            T = cech_tabular(closure(cov), n_max)
            structural = structural_phi_rlp(cov, B_ex, T, n_max)
            self.assertEqual(structural.dimensions, self.enumerated_phi_rlp(cov, B_ex, T, n_max).dimensions, name)

    def test_structural_cap_counts_realizable_squares(self):
        cov = load_cover('circle_cover.json')
        B_ex = sigma_bar_ex(cov, 2)
        T = cech_tabular(closure(cov), 3)
        report = structural_phi_rlp(cov, B_ex, T, 3)
        realizable = sum(d.realizable for d in report.dimensions)
        self.assertLess(realizable, sum(d.squares for d in report.dimensions))
        self.assertTrue(structural_phi_rlp(cov, B_ex, T, 3, cap=realizable))
        with self.assertRaises(EnumerationCapExceeded) as ctx:
            structural_phi_rlp(cov, B_ex, T, 3, cap=realizable - 1)
        self.assertEqual(ctx.exception.level, 3)

    def test_structural_checks_lifts_against_source_cells(self):
        cov = load_cover('circle_cover.json')
        B_ex = sigma_bar_ex(cov, 2)
        T = cech_tabular(closure(cov), 2)
        report = structural_phi_rlp(cov, B_ex, T, 2)
        self.assertEqual(report.dimensions[2].constructive_valid, report.dimensions[2].realizable)


class WhiteheadPipelineTests(SimpleTestCase):

    def test_interval(self):
        report = whitehead_pipeline(load_cover('interval_cover.json'), trunc=2)
        self.assertTrue(report.passed)
        for result in report.homology.values():
            self.assertEqual(result.bettis(), (1, 0))

    def test_circle(self):
        report = whitehead_pipeline(load_cover('circle_cover.json'), trunc=3)
        self.assertTrue(report.passed)
        self.assertEqual(report.ex_trunc, 3)
        self.assertEqual(report.rlp.n_max, 3)
        for name in ('cech', 'bar', 'bar_ex'):
            self.assertEqual(report.homology[name].bettis(), (1, 1, 0))

    def test_sphere_degrades_ex(self):
        report = whitehead_pipeline(load_cover('sphere_cover.json'), trunc=3, cap=30000, rlp_max_dim=2)
        self.assertTrue(report.passed)
        self.assertEqual(report.ex_trunc, 2)
        self.assertEqual(len(report.notes), 1)
        self.assertEqual(report.homology['cech'].bettis(), (1, 0, 1))
        self.assertEqual(report.homology['bar'].bettis(), (1, 0, 1))
        self.assertEqual(report.homology['bar_ex'].bettis(), (1, 0))
        self.assertEqual(set(report.agreement[2].groups), {'cech', 'bar', 'reference'})

    def test_sphere_with_defaults(self):
        report = whitehead_pipeline(load_cover('sphere_cover.json'))
        self.assertTrue(report.passed)
        self.assertEqual(report.notes, ())
        self.assertEqual((report.trunc, report.ex_trunc, report.rlp.n_max), (3, 3, 3))
        for name in ('cech', 'bar', 'bar_ex'):
            self.assertEqual(report.homology[name].bettis(), (1, 0, 1))
        self.assertTrue(report.factorization)
        self.assertTrue(report.psi)
        self.assertTrue(report.phi)

    def test_mismatch(self):
        payload = dict(fixture('circle_cover.json'), reference_homology=[{'betti': 1}, {'betti': 0}])
        payload.pop('reference')
        report = whitehead_pipeline(deserialize(CoverComplexSerializer, payload), trunc=2)
        self.assertFalse(report.passed)
        self.assertEqual(report.first_mismatch, 1)
        self.assertTrue(report.factorization)

    def test_missing_reference(self):
        payload = dict(fixture('circle_cover.json'))
        payload.pop('reference')
        with self.assertRaises(CoverComplexError):
            whitehead_pipeline(deserialize(CoverComplexSerializer, payload), trunc=2)


class CoverCommandTests(SimpleTestCase):

    def run_command(self, name, *args, **kwargs):
        out = StringIO()
        call_command(name, *args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()

    def test_cech(self):
        payload = json.loads(self.run_command('cech', 'circle_cover.json', trunc=2, homology=True))
        self.assertEqual([g['betti'] for g in payload['homology']], [1, 1])
        self.assertEqual(len(payload['nerve']['generators'][0]), 3)

    def test_cech_closure(self):
        payload = json.loads(self.run_command('cech', 'interval_cover.json', trunc=1, closure=True))
        self.assertEqual(len(payload['generators'][0]), 3)

    def test_whitehead_circle(self):
        output = self.run_command('whitehead', 'circle_cover.json', trunc=3)
        payload = json.loads(output)
        self.assertTrue(payload['passed'])
        self.assertTrue(payload['rlp']['passed'])
        self.assertEqual([g['betti'] for g in payload['homology']['cech']], [1, 1, 0])
        self.assertEqual(output, self.run_command('whitehead', 'circle_cover.json', trunc=3))

    def test_whitehead_text(self):
        output = self.run_command('whitehead', 'interval_cover.json', trunc=2, format='text', rlp_max_dim=2)
        self.assertIn('φ∘ψ', output)

    def test_whitehead_failure_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('whitehead', 'boundary2.json')
        self.assertEqual(ctx.exception.returncode, EXIT_SCHEMA)

    def test_whitehead_without_reference(self):
        payload = fixture('interval_cover.json')
        payload.pop('reference_homology')
        cov = deserialize(CoverComplexSerializer, payload)
        with self.assertRaises(CoverComplexError) as ctx:
            whitehead_pipeline(cov, trunc=1)
        self.assertEqual(ctx.exception.exit_code, EXIT_INVARIANT)

    def test_whitehead_async(self):
        payload = json.loads(self.run_command('whitehead', 'interval_cover.json', trunc=2, run_async=True))
        self.assertEqual(payload['cover'], 'interval')
        self.assertTrue(payload['task_id'])


class CoverTaskTests(SimpleTestCase):

    def test_pipeline_task(self):
        result = run_whitehead_pipeline.apply(args=(fixture('interval_cover.json'),), kwargs={'trunc': 2}).get()
        self.assertTrue(result['passed'])
        self.assertEqual(result['ex_trunc'], 2)

    def test_rlp_task(self):
        result = run_rlp_check.apply(args=(fixture('circle_cover.json'),), kwargs={'n_max': 2}).get()
        self.assertTrue(result['passed'])
        self.assertEqual([d['n'] for d in result['dimensions']], [0, 1, 2])

    def test_schema_error(self):
        result = run_whitehead_pipeline.apply(args=({'index_set': []},)).get()
        self.assertEqual(result['error']['error'], 'schema_violation')

    def test_long_tasks_go_to_pipelines_queue(self):
        routes = celery_app.conf.task_routes
        for task in (run_whitehead_pipeline, run_rlp_check, run_bar_comparison):
            self.assertEqual(routes[task.name], {'queue': 'pipelines'})
        self.assertEqual(celery_app.conf.task_default_queue, 'default')
        self.assertEqual(set(celery_app.conf.task_queues), {'default', 'pipelines'})
