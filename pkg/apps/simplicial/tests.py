import json
import random

from django.test import SimpleTestCase

from core.exceptions import IndexOutOfRangeError, SchemaError, TruncationError
from core.utils.jsonio import deserialize, dumps, serialize
from .serializers import BisimplicialSetSerializer, SimplicialMapSerializer, SimplicialSetSerializer
from .structures import SimplexRef, SimplicialMap
from .utils import (
    apply_operator,
    boundary_simplex,
    collapse_map,
    column,
    compose_maps,
    degenerate,
    diagonal,
    external_product,
    face,
    horn,
    identity_map,
    is_isomorphic,
    is_simplicial_map,
    normalize,
    normalize_word,
    product,
    relabel,
    row,
    standard_simplex,
    to_tabular,
    validate_bisimplicial_set,
    validate_tabular,
)


def corpus():
    return [
        standard_simplex(0),
        standard_simplex(2),
        standard_simplex(3),
        boundary_simplex(2),
        boundary_simplex(3),
        horn(2, 1),
        horn(3, 0),
    ]


def vertex_sequence(r: SimplexRef):
    """Последовательность вершин симплекса Δ^n, заданного словом над подмножеством"""
    seq = list(r.generator)
    for j in reversed(r.word):
        seq = seq[:j + 1] + seq[j:]
    return tuple(seq)


def ref_from_sequence(seq):
    repeats = [j for j in range(len(seq) - 1) if seq[j] == seq[j + 1]]
    return SimplexRef(tuple(sorted(repeats, reverse=True)), tuple(sorted(set(seq))), len(seq) - 1)


class StandardObjectsTests(SimpleTestCase):

    def test_generator_counts(self):
        self.assertEqual(standard_simplex(0).counts(), (1,))
        self.assertEqual(standard_simplex(2).counts(), (3, 3, 1))
        self.assertEqual(standard_simplex(3).counts(), (4, 6, 4, 1))
        self.assertEqual(boundary_simplex(2).counts(), (3, 3))
        self.assertEqual(boundary_simplex(3).counts(), (4, 6, 4))
        self.assertEqual(horn(2, 1).counts(), (3, 2))

    def test_boundary_of_point_is_empty(self):
        self.assertEqual(boundary_simplex(0).counts(), ())

    def test_horn_rejects_bad_index(self):
        with self.assertRaises(IndexOutOfRangeError):
            horn(2, 3)

    def test_corpus_passes_validation(self):
        for X in corpus():
            X.validate()
            validate_tabular(to_tabular(X))

    def test_euler_characteristic(self):
        self.assertEqual(boundary_simplex(2).euler_characteristic(), 0)
        self.assertEqual(boundary_simplex(3).euler_characteristic(), 2)
        self.assertEqual(standard_simplex(3).euler_characteristic(), 1)


class WordArithmeticTests(SimpleTestCase):

    def setUp(self):
        self.point = standard_simplex(0, trunc=4)
        self.v = (0,)

    def test_face_cancels_degeneracy(self):
        r = SimplexRef((0,), self.v, 1)
        self.assertEqual(face(self.point, r, 0), SimplexRef((), self.v, 0))

    def test_face_commutes_past_degeneracy(self):
        X = standard_simplex(1, trunc=3)
        r = SimplexRef((0,), (0, 1), 2)
        self.assertEqual(face(X, r, 2), SimplexRef((0,), (0,), 1))

    def test_face_of_double_degeneracy(self):
        r = SimplexRef((1, 0), self.v, 2)
        self.assertEqual(face(self.point, r, 1), SimplexRef((0,), self.v, 1))

    def test_degenerate_normalizes_word(self):
        r = degenerate(self.point, degenerate(self.point, self.point.ref(self.v), 0), 0)
        self.assertEqual(r.word, (1, 0))
        self.assertEqual(degenerate(self.point, SimplexRef((0,), self.v, 1), 1).word, (1, 0))
        X = standard_simplex(2, trunc=4)
        self.assertEqual(degenerate(X, SimplexRef((2,), (0, 1, 2), 3), 0).word, (3, 0))

    def test_degenerate_above_truncation(self):
        X = standard_simplex(1, trunc=1)
        with self.assertRaises(TruncationError):
            degenerate(X, X.ref((0, 1)), 0)

    def test_face_index_out_of_range(self):
        X = standard_simplex(1)
        with self.assertRaises(IndexOutOfRangeError):
            face(X, X.ref((0, 1)), 2)

    def test_normalize_word_idempotent(self):
        rng = random.Random(7)
        for _ in range(200):
            word = [rng.randrange(5) for _ in range(rng.randrange(4))]
            once = normalize_word(word)
            self.assertEqual(normalize_word(once), once)

    def test_random_word_arithmetic_agrees_with_vertex_sequences(self):
        rng = random.Random(2024)
        X = standard_simplex(3, trunc=5)
        checked = 0
        while checked < 1200:
            dim = rng.randrange(1, 5)
            seq = tuple(sorted(rng.randrange(4) for _ in range(dim + 1)))
            r = ref_from_sequence(seq)
            self.assertEqual(vertex_sequence(r), seq)
            i = rng.randrange(dim + 1)
            self.assertEqual(
                vertex_sequence(face(X, r, i)), seq[:i] + seq[i + 1:],
            )
            if dim + 1 <= X.d_max:
                j = rng.randrange(dim + 1)
                self.assertEqual(
                    vertex_sequence(degenerate(X, r, j)), seq[:j + 1] + seq[j:],
                )
            checked += 1

    def test_face_identity_on_corpus(self):
        for X in corpus():
            for n, gens in enumerate(X.generators):
                if n < 2:
                    continue
                for g in gens:
                    r = X.ref(g)
                    for j in range(n + 1):
                        for i in range(j):
                            self.assertEqual(
                                face(X, face(X, r, j), i), face(X, face(X, r, i), j - 1),
                            )


class TabularTests(SimpleTestCase):

    def test_word_arithmetic_matches_tabular_expansion(self):
        X = boundary_simplex(3, trunc=4)
        T = to_tabular(X)
        for n in range(1, T.d_max + 1):
            for x, key in enumerate(T.levels[n]):
                for i in range(n + 1):
                    self.assertEqual(T.levels[n - 1][T.faces[n][x][i]], face(X, key, i))

    def test_normal_form_roundtrip(self):
        for X in corpus():
            Y = normalize(to_tabular(X))
            self.assertEqual(Y.counts(), X.counts())
            self.assertTrue(is_isomorphic(X, Y))
            Z = normalize(to_tabular(Y))
            self.assertEqual(Z.counts(), Y.counts())

    def test_apply_operator(self):
        X = standard_simplex(2, trunc=3)
        T = to_tabular(X)
        top = T.index(2, X.ref((0, 1, 2)))
        x = apply_operator(T, 2, top, (0, 0, 2))
        self.assertEqual(T.normal_form_at(2, x), SimplexRef((0,), X.ref((0, 2)), 2))
        self.assertEqual(apply_operator(T, 2, top, (0, 1, 2)), top)


class ProductDiagonalTests(SimpleTestCase):

    def test_square(self):
        P = product(standard_simplex(1), standard_simplex(1), trunc=2)
        self.assertEqual(P.counts(), (4, 5, 2))
        P.validate()

    def test_unit_law(self):
        point = standard_simplex(0, trunc=2)
        for Y in (boundary_simplex(2), standard_simplex(2, trunc=2)):
            self.assertTrue(is_isomorphic(product(point, Y), Y))
            self.assertTrue(is_isomorphic(product(Y, point), Y))

    def test_external_product_counts(self):
        B = external_product(standard_simplex(0), standard_simplex(0))
        self.assertEqual(sum(len(g) for g in B.generators.values()), 1)
        B = external_product(standard_simplex(1), standard_simplex(0))
        self.assertEqual(len(B.generators[(1, 0)]), 1)
        validate_bisimplicial_set(B)

    def test_diagonal_of_external_product_is_product(self):
        K, L = standard_simplex(1), standard_simplex(1)
        D = diagonal(external_product(K, L), trunc=2)
        self.assertTrue(is_isomorphic(D, product(K, L, trunc=2)))

    def test_diagonal_with_point_factor(self):
        point = standard_simplex(0, trunc=2)
        K = boundary_simplex(2)
        self.assertTrue(is_isomorphic(diagonal(external_product(K, point)), K))
        self.assertTrue(is_isomorphic(diagonal(external_product(point, K)), K))
        p = standard_simplex(2, trunc=2)
        self.assertTrue(is_isomorphic(diagonal(external_product(p, point)), p))

    def test_rows_and_columns(self):
        B = external_product(boundary_simplex(2), standard_simplex(1, trunc=2))
        self.assertEqual(column(B, 0).counts(), (6, 3))
        self.assertEqual(row(B, 0).counts(), (6, 6))


class SimplicialMapTests(SimpleTestCase):

    def test_identity_and_collapse(self):
        X = standard_simplex(2)
        self.assertTrue(is_simplicial_map(identity_map(X)))
        self.assertTrue(is_simplicial_map(collapse_map(standard_simplex(1))))

    def test_broken_map_reports_face(self):
        X = standard_simplex(1)
        f = SimplicialMap(X, X, {
            (0,): X.ref((0,)),
            (1,): X.ref((0,)),
            (0, 1): X.ref((0, 1)),
        })
        report = is_simplicial_map(f)
        self.assertFalse(report)
        self.assertEqual([v.index for v in report.violations], [0])

    def test_composition(self):
        X = boundary_simplex(2)
        f = compose_maps(collapse_map(X), identity_map(X))
        self.assertTrue(is_simplicial_map(f))

    def test_relabel_preserves_isomorphism_type(self):
        X = boundary_simplex(3)
        mapping = {g: f'g{idx}' for idx, g in enumerate(X.dim_of)}
        self.assertTrue(is_isomorphic(relabel(X, mapping), X))
        self.assertFalse(is_isomorphic(boundary_simplex(2), horn(2, 1)))


class SerializerTests(SimpleTestCase):

    def test_simplicial_set_emit_parse_emit(self):
        X = boundary_simplex(3)
        first = dumps(serialize(SimplicialSetSerializer, X))
        Y = deserialize(SimplicialSetSerializer, json.loads(first))
        self.assertEqual(dumps(serialize(SimplicialSetSerializer, Y)), first)
        self.assertEqual(Y.counts(), X.counts())

    def test_rejects_identity_violation(self):
        payload = {
            'd_max': 2,
            'generators': [['a', 'b', 'c'], ['ab', 'bc', 'ac'], ['abc']],
            'faces': {
                'ab': [{'word': [], 'gen': 'b'}, {'word': [], 'gen': 'a'}],
                'bc': [{'word': [], 'gen': 'c'}, {'word': [], 'gen': 'b'}],
                'ac': [{'word': [], 'gen': 'c'}, {'word': [], 'gen': 'a'}],
                'abc': [
                    {'word': [], 'gen': 'bc'},
                    {'word': [], 'gen': 'ab'},
                    {'word': [], 'gen': 'ab'},
                ],
            },
        }
        with self.assertRaises(SchemaError) as ctx:
            deserialize(SimplicialSetSerializer, payload)
        self.assertTrue(ctx.exception.details['errors'])

    def test_rejects_dangling_reference(self):
        payload = {
            'd_max': 1,
            'generators': [['a'], ['e']],
            'faces': {'e': [{'word': [], 'gen': 'a'}, {'word': [], 'gen': 'z'}]},
        }
        with self.assertRaises(SchemaError):
            deserialize(SimplicialSetSerializer, payload)

    def test_map_roundtrip(self):
        f = collapse_map(boundary_simplex(2))
        payload = json.loads(dumps(serialize(SimplicialMapSerializer, f)))
        g = deserialize(SimplicialMapSerializer, payload)
        self.assertEqual(payload, serialize(SimplicialMapSerializer, g))

    def test_bisimplicial_roundtrip(self):
        B = external_product(standard_simplex(1), boundary_simplex(2))
        payload = json.loads(dumps(serialize(BisimplicialSetSerializer, B)))
        C = deserialize(BisimplicialSetSerializer, payload)
        self.assertEqual(payload, serialize(BisimplicialSetSerializer, C))
