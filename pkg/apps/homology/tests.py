import json
import random
from io import StringIO

import sympy
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.simplicial.structures import SimplexRef, SimplicialMap, SimplicialSet
from apps.simplicial.utils import (
    boundary_simplex,
    collapse_map,
    identity_map,
    relabel,
    simplicial_complex,
    standard_simplex,
)
from core.exceptions import EXIT_SCHEMA
from core.utils.jsonio import deserialize, dumps
from .reduction import coreduce
from .serializers import HomologyDegreeSerializer, WeqCertificateSerializer
from .smith import invariant_factors, smith_normal_form
from .structures import HomologyGroup, SparseMatrix
from .utils import (
    compose_certificate,
    components,
    homology,
    mapping_cone,
    normalized_chains,
    simplicial_homology,
    validate_chain_complex,
    weq_certificate,
)


def projective_plane():
    """Минимальная симплициальная модель RP^2: одна вершина, одно ребро, одна 2-клетка"""
    v = SimplexRef((), 'v', 0)
    e = SimplexRef((), 'e', 1)
    return SimplicialSet(
        d_max=3,
        generators=(('v',), ('e',), ('t',), ()),
        faces={
            'e': (v, v),
            't': (e, SimplexRef((0,), 'v', 1), e),
        },
        name='RP2',
    ).validate()


def torus():
    """Семивершинная триангуляция тора"""
    facets = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    facets += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    return simplicial_complex(facets, name='T^2')


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


class ChainComplexTests(SimpleTestCase):

    def test_point(self):
        C = normalized_chains(standard_simplex(0), 0)
        self.assertEqual(C.ranks, (1,))

    def test_circle_boundary_columns(self):
        C = normalized_chains(boundary_simplex(2))
        self.assertEqual(C.ranks, (3, 3, 0))
        for col in C.boundaries[1].columns:
            self.assertEqual(sum(col.values()), 0)
            self.assertEqual(sorted(col.values()), [-1, 1])

    def test_boundary_squared_vanishes(self):
        C = normalized_chains(standard_simplex(2))
        self.assertTrue((C.boundaries[1] @ C.boundaries[2]).is_zero())
        for X in (standard_simplex(3), boundary_simplex(3), projective_plane()):
            validate_chain_complex(normalized_chains(X))


class SparseMatrixTests(SimpleTestCase):

    def test_repeated_entries_are_summed(self):
        M = SparseMatrix.from_coo(2, 3, [1, 0, 1, 0], [2, 1, 2, 0], [1, 4, -1, 2])
        self.assertEqual(M.to_dense(), [[2, 4, 0], [0, 0, 0]])
        self.assertEqual(M.nnz, 2)
        self.assertEqual(list(M.cols), [0, 1])

    def test_restrict_renumbers(self):
        M = SparseMatrix.from_dense([[1, 2, 0], [0, 3, 4], [5, 0, 6]])
        R = M.restrict([True, False, True], [False, True, True])
        self.assertEqual(R.to_dense(), [[2, 0], [0, 6]])
        self.assertEqual(M.nonzero_columns().shape, (3, 3))
        Z = SparseMatrix.from_dense([[0, 1, 0], [0, 2, 0]])
        self.assertEqual(Z.nonzero_columns().to_dense(), [[1], [2]])

    def test_product_matches_dense(self):
        rng = random.Random(5)
        for _ in range(30):
            m, k, n = rng.randint(1, 6), rng.randint(1, 6), rng.randint(1, 6)
            A = [[rng.choice((0, 0, 1, -1, 3)) for _ in range(k)] for _ in range(m)]
            B = [[rng.choice((0, 0, 1, -2)) for _ in range(n)] for _ in range(k)]
            product = SparseMatrix.from_dense(A, n_cols=k) @ SparseMatrix.from_dense(B, n_cols=n)
            self.assertEqual(product.to_dense(), matmul(A, B))
            self.assertEqual(product, SparseMatrix.from_dense(matmul(A, B), n_cols=n))

    def test_mismatched_shapes(self):
        with self.assertRaises(ValueError):
            SparseMatrix.zero(2, 3) @ SparseMatrix.zero(2, 3)


class SmithNormalFormTests(SimpleTestCase):

    def check_form(self, M):
        form = smith_normal_form(M)
        U, D, V = form.U, form.D, form.V
        self.assertEqual(matmul(matmul(U, M), V), D)
        self.assertIn(sympy.Matrix(U).det(), (1, -1))
        self.assertIn(sympy.Matrix(V).det(), (1, -1))
        for i, row in enumerate(D):
            for j, value in enumerate(row):
                if i != j:
                    self.assertEqual(value, 0)
        diagonal = [d for d in form.diagonal if d]
        self.assertTrue(all(d > 0 for d in diagonal))
        for a, b in zip(diagonal, diagonal[1:]):
            self.assertEqual(b % a, 0)
        self.assertEqual(len(diagonal), sympy.Matrix(M).rank())
        return form

    def test_zero_matrix(self):
        form = self.check_form([[0, 0], [0, 0]])
        self.assertEqual(form.D, [[0, 0], [0, 0]])
        self.assertEqual(form.U, [[1, 0], [0, 1]])
        self.assertEqual(form.V, [[1, 0], [0, 1]])

    def test_diag_two_three(self):
        form = self.check_form([[2, 0], [0, 3]])
        self.assertEqual(form.diagonal, [1, 6])

    def test_random_matrices(self):
        rng = random.Random(10)
        for _ in range(100):
            m, n = rng.randint(1, 8), rng.randint(1, 8)
            M = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)]
            form = self.check_form(M)
            if m == n:
                product = 1
                for d in form.diagonal:
                    product *= d
                self.assertEqual(product, abs(sympy.Matrix(M).det()))

    def test_big_entries_stay_exact(self):
        big = 10 ** 30
        form = self.check_form([[big, 0], [0, big + 1]])
        self.assertEqual(form.diagonal, [1, big * (big + 1)])

    def test_sparse_elimination_matches_dense(self):
        rng = random.Random(3)
        for _ in range(30):
            m, n = rng.randint(1, 9), rng.randint(1, 9)
            rows = [
                [rng.choice((0, 0, 0, 1, -1, 2)) for _ in range(n)] for _ in range(m)
            ]
            M = SparseMatrix.from_dense(rows, n_cols=n)
            dense = smith_normal_form(rows, n_cols=n, with_transforms=False).invariant_factors
            self.assertEqual(invariant_factors(M, dense_limit=0), dense)


class HomologyTests(SimpleTestCase):

    def test_circle(self):
        result = simplicial_homology(boundary_simplex(2))
        self.assertEqual(result.bettis(), (1, 1))
        self.assertEqual(result.groups[1].torsion, ())
        self.assertFalse(result.reliable(2))

    def test_sphere(self):
        self.assertEqual(simplicial_homology(boundary_simplex(3)).bettis(), (1, 0, 1))

    def test_simplices_are_contractible(self):
        for n in range(5):
            bettis = simplicial_homology(standard_simplex(n)).bettis()
            self.assertEqual(bettis, (1,) + (0,) * n)

    def test_torsion(self):
        result = simplicial_homology(projective_plane())
        self.assertEqual(result.groups[0], HomologyGroup(1))
        self.assertEqual(result.groups[1], HomologyGroup(0, (2,)))
        self.assertEqual(result.groups[2], HomologyGroup(0))
        self.assertEqual(str(result.groups[1]), 'Z/2')

    def test_euler_characteristic_matches_bettis(self):
        for X in (boundary_simplex(2), boundary_simplex(3), standard_simplex(3)):
            result = simplicial_homology(X)
            alternating = sum((-1) ** k * b for k, b in enumerate(result.bettis()))
            self.assertEqual(X.euler_characteristic(), alternating)

    def test_invariant_under_relabeling(self):
        X = boundary_simplex(3)
        Y = relabel(X, {g: f'x{idx}' for idx, g in enumerate(reversed(list(X.dim_of)))})
        self.assertEqual(simplicial_homology(X), simplicial_homology(Y))

    def test_components(self):
        X = SimplicialSet(d_max=1, generators=(('p', 'q', 'r'), ()), faces={})
        self.assertEqual(components(X), [('p',), ('q',), ('r',)])
        self.assertEqual(len(components(boundary_simplex(2))), 1)

    def test_result_serialization(self):
        result = simplicial_homology(projective_plane())
        payload = json.loads(dumps(HomologyDegreeSerializer(result, many=True).data))
        self.assertEqual(payload[1], {'degree': 1, 'betti': 0, 'torsion': [2], 'reliable': True})
        parsed = deserialize(HomologyDegreeSerializer, payload, many=True)
        self.assertEqual(parsed.groups, result.groups)
        self.assertEqual(parsed.reliable_through, result.reliable_through)


class ReductionTests(SimpleTestCase):

    def samples(self):
        return (
            standard_simplex(3),
            boundary_simplex(2),
            boundary_simplex(3),
            boundary_simplex(4),
            projective_plane(),
            torus(),
            simplicial_complex([(0, 1), (2, 3, 4)], name='две компоненты'),
        )

    def test_matches_unreduced_homology(self):
        for X in self.samples():
            C = normalized_chains(X)
            with self.subTest(X=X.name):
                self.assertEqual(homology(C), homology(C, reduce=False))

    def test_matches_on_mapping_cone(self):
        for X in (boundary_simplex(2), boundary_simplex(3), torus()):
            cone = mapping_cone(collapse_map(X))
            self.assertEqual(homology(cone), homology(cone, reduce=False))

    def test_torus(self):
        result = simplicial_homology(torus())
        self.assertEqual(result.bettis(), (1, 2, 1))
        self.assertTrue(all(not g.torsion for g in result.groups))

    def test_one_seed_per_component(self):
        R = coreduce(normalized_chains(simplicial_complex([(0, 1), (2, 3, 4)])))
        self.assertEqual(R.seeds, 2)
        self.assertGreater(R.pairs, 0)
        self.assertEqual(coreduce(normalized_chains(projective_plane())).seeds, 1)
        cone = mapping_cone(collapse_map(boundary_simplex(2)))
        self.assertEqual(coreduce(cone).seeds, 0)

    def test_reduced_sizes_keep_euler_characteristic(self):
        for X in self.samples():
            C = normalized_chains(X)
            R = coreduce(C)
            reduced = sum((-1) ** k * size for k, size in enumerate(R.sizes)) + R.seeds
            self.assertEqual(reduced, C.euler_characteristic())

    def test_result_is_cached(self):
        C = normalized_chains(boundary_simplex(3))
        self.assertIs(homology(C), homology(C))
        self.assertIsNot(homology(C), homology(C, reduce=False))


class CertificateTests(SimpleTestCase):

    def test_identity_passes(self):
        cert = weq_certificate(identity_map(boundary_simplex(3)))
        self.assertTrue(cert.passed)
        self.assertIsNone(cert.first_failure)

    def test_collapsing_circle_fails_in_degree_one(self):
        cert = weq_certificate(collapse_map(boundary_simplex(2)))
        self.assertFalse(cert)
        self.assertTrue(cert.pi0_bijection)
        self.assertEqual(cert.first_failure, 1)
        self.assertTrue(cert.degrees[0].iso)
        payload = WeqCertificateSerializer(cert).data
        self.assertIn('disclaimer', payload)

    def test_disconnected_target_fails_on_pi0(self):
        point = standard_simplex(0, trunc=1)
        two = SimplicialSet(d_max=1, generators=(('p', 'q'), ()), faces={})
        f = SimplicialMap(point, two, {(0,): two.ref('p')})
        cert = weq_certificate(f)
        self.assertFalse(cert.pi0_bijection)
        self.assertEqual(cert.first_failure, 'pi0')

    def test_mapping_cone_is_a_complex(self):
        validate_chain_complex(mapping_cone(collapse_map(boundary_simplex(3))))

    def test_composite_of_equivalences_passes(self):
        interval = standard_simplex(1)
        collapse = collapse_map(interval)
        point = collapse.target
        include = SimplicialMap(point, interval, {(0,): interval.ref((0,))})
        self.assertTrue(weq_certificate(collapse))
        self.assertTrue(weq_certificate(include))
        self.assertTrue(compose_certificate(include, collapse))
        self.assertTrue(compose_certificate(collapse, include))


class HomologyCommandTests(SimpleTestCase):

    def run_command(self, *args, **kwargs):
        out = StringIO()
        call_command('homology', *args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()

    def test_bundled_circle(self):
        output = self.run_command('boundary2.json')
        payload = json.loads(output)
        self.assertEqual([entry['betti'] for entry in payload if entry['reliable']], [1, 1])
        self.assertEqual(output, self.run_command('boundary2.json'))

    def test_text_format(self):
        output = self.run_command('boundary2.json', format='text')
        self.assertIn('H_1 = Z', output)

    def test_export_chains(self):
        payload = json.loads(self.run_command('boundary2.json', export_chains=True))
        self.assertEqual(payload['chains']['ranks'], [3, 3, 0])

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('no_such_file.json')
        self.assertEqual(ctx.exception.returncode, EXIT_SCHEMA)
