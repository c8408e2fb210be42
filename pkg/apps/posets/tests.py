import json
from io import StringIO
from itertools import combinations

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.homology.utils import simplicial_homology, weq_certificate
from apps.simplicial.structures import SimplicialMap
from apps.simplicial.utils import (
    boundary_simplex,
    collapse_map,
    compose_maps,
    horn,
    is_isomorphic,
    is_simplicial_map,
    maps_equal,
    standard_simplex,
)
from core.exceptions import (
    EXIT_CAP,
    EXIT_SCHEMA,
    DanglingReferenceError,
    EnumerationCapExceeded,
    PosetError,
    SchemaError,
)
from core.utils.commands import resolve_input
from core.utils.jsonio import deserialize, read_json, serialize
from .ex import (
    ex,
    ex_levels,
    ex_map,
    ex_nerve_category,
    ex_nerve_poset,
    ex_poset_comparison,
    is_generator_bijection,
    last_vertex_map,
    max_ex_trunc,
    subdivision,
)
from .serializers import FiniteCategorySerializer, FinitePosetSerializer
from .structures import FinitePoset, Functor, compose_functors
from .tables import RowIndex, monotone_blocks, monotone_table, poset_ex_complex
from .utils import (
    chain_poset,
    discrete_poset,
    monotone_maps,
    nerve,
    nerve_map,
    ordinal,
    sd_nerve,
    sd_poset,
    sd_simplex,
    subset_poset,
)


def small_posets(size):
    """Порядки на {0, …, size-1}, продолжаемые естественным; с точностью до изоморфизма это все порядки"""
    elements = tuple(range(size))
    pairs = list(combinations(elements, 2))
    seen = set()
    result = []
    for k in range(len(pairs) + 1):
        for chosen in combinations(pairs, k):
            P = FinitePoset.from_relation(elements, chosen, name=f'P{size}')
            if P.leq not in seen:
                seen.add(P.leq)
                result.append(P)
    return result


def functor_of(assignment, source: FinitePoset, target: FinitePoset, name=''):
    return Functor(
        source.as_category(),
        target.as_category(),
        dict(assignment),
        {(a, b): (assignment[a], assignment[b]) for a, b in source.leq},
        name=name,
    )


def fixture_category(name):
    return deserialize(FiniteCategorySerializer, read_json(resolve_input(name)))


class PosetTests(SimpleTestCase):

    def test_subset_poset(self):
        self.assertEqual(len(subset_poset('a')), 1)
        pair = subset_poset('ab')
        self.assertEqual(len(pair), 3)
        self.assertEqual(len(pair.hasse_edges()), 2)
        self.assertEqual(len(subset_poset('abc')), 7)
        with self.assertRaises(PosetError):
            subset_poset('')

    def test_chain_poset(self):
        self.assertEqual(len(chain_poset(ordinal(1))), 3)
        self.assertEqual(len(chain_poset(discrete_poset('xy'))), 2)
        self.assertEqual(len(chain_poset(ordinal(2))), 7)

    def test_cycle_rejected(self):
        with self.assertRaises(PosetError):
            FinitePoset.from_relation('ab', [('a', 'b'), ('b', 'a')])

    def test_monotone_map_enumeration(self):
        # монотонные [1] -> [1]: 00, 01, 11
        self.assertEqual(len(monotone_maps(ordinal(1), ordinal(1))), 3)
        with self.assertRaises(EnumerationCapExceeded):
            monotone_maps(ordinal(2), ordinal(2), cap=3)

    def test_poset_serialization(self):
        P = deserialize(FinitePosetSerializer, {'elements': ['a', 'b', 'c'], 'leq': [['a', 'b'], ['b', 'c'], ['a', 'c']]})
        self.assertTrue(P.le('a', 'c'))
        self.assertEqual(serialize(FinitePosetSerializer, P)['leq'], [['a', 'b'], ['a', 'c'], ['b', 'c']])
        with self.assertRaises(SchemaError):
            deserialize(FinitePosetSerializer, {'elements': ['a', 'b', 'c'], 'leq': [['a', 'b'], ['b', 'c']]})

    def test_category_serialization(self):
        C = fixture_category('walking_iso.json')
        self.assertEqual(C.compose('g', 'f'), 'id_0')
        payload = serialize(FiniteCategorySerializer, C)
        self.assertEqual(deserialize(FiniteCategorySerializer, payload), C)
        payload['compose'] = payload['compose'][:1]
        with self.assertRaises(SchemaError):
            deserialize(FiniteCategorySerializer, payload)


class NerveTests(SimpleTestCase):

    def test_nerve_of_interval_is_simplex(self):
        X = nerve(ordinal(1))
        self.assertEqual(X.counts(), (2, 1))
        self.assertTrue(is_isomorphic(X, standard_simplex(1)))

    def test_nerve_of_discrete_category(self):
        self.assertEqual(nerve(discrete_poset('xyz')).counts(), (3,))
        self.assertEqual(nerve(discrete_poset('xyz').as_category()).counts(), (3,))

    def test_nerve_of_two_simplex(self):
        X = nerve(ordinal(2))
        self.assertEqual(X.counts(), (3, 3, 1))
        self.assertTrue(is_isomorphic(X, standard_simplex(2)))
        X.validate()

    def test_category_nerves(self):
        self.assertEqual(nerve(fixture_category('interval_category.json')).counts(), (2, 1))
        J = nerve(fixture_category('walking_iso.json'), trunc=3)
        self.assertEqual(J.counts(), (2, 2, 2, 2))
        J.validate()
        nerve(fixture_category('three_object_iso.json'), trunc=2).validate()

    def test_poset_and_category_nerves_agree(self):
        for P in small_posets(3):
            self.assertTrue(is_isomorphic(nerve(P), nerve(P.as_category())))

    def test_nerve_is_functorial(self):
        F = functor_of({0: 0, 1: 2}, ordinal(1), ordinal(2), name='F')
        G = functor_of({0: 0, 1: 1, 2: 1}, ordinal(2), ordinal(1), name='G')
        for H in (F, G):
            H.validate()
        composite = nerve_map(compose_functors(G, F), trunc=2)
        separate = compose_maps(nerve_map(G, trunc=2), nerve_map(F, trunc=2))
        self.assertTrue(maps_equal(composite, separate))
        self.assertTrue(is_simplicial_map(composite))


class SubdivisionTests(SimpleTestCase):

    def test_sd_simplex_counts(self):
        self.assertEqual(sd_simplex(0).counts(), (1,))
        self.assertEqual(sd_simplex(1).counts(), (3, 2))
        X = sd_simplex(2)
        self.assertEqual(X.counts(), (7, 12, 6))
        self.assertEqual(X.euler_characteristic(), 1)

    def test_sd_nerve(self):
        self.assertTrue(is_isomorphic(sd_nerve(ordinal(1)), sd_simplex(1)))
        self.assertEqual(sd_nerve(discrete_poset('xy')).counts(), (2,))

    def test_euler_characteristic_of_subdivision(self):
        for size in range(1, 5):
            for P in small_posets(size):
                self.assertEqual(sd_nerve(P).euler_characteristic(), nerve(P).euler_characteristic())

    def test_subdivision_data(self):
        sub = subdivision(2)
        self.assertEqual(len(sub.elements), 7)
        self.assertEqual(len(sub.chains), 7 + 12 + 6)
        self.assertEqual(len(sub.strict_pairs), len(sd_poset(2).strict_pairs))


class ExTests(SimpleTestCase):

    def test_ex_of_point(self):
        E = ex(standard_simplex(0))
        self.assertEqual(E.simplicial_set.counts(), (1,))
        self.assertTrue(all(E.tabular.size(n) == 1 for n in range(E.trunc + 1)))

    def test_vertices_of_ex(self):
        self.assertEqual(ex(boundary_simplex(2)).simplicial_set.count(0), 3)

    def test_ex_of_single_element_poset(self):
        E = ex_nerve_poset(ordinal(0), trunc=3)
        self.assertEqual([E.tabular.size(n) for n in range(4)], [1, 1, 1, 1])

    def test_interval_poset_edges(self):
        P = ordinal(1)
        # {0},{1} <= {0,1}: значение на {0,1} равно 0 (один вариант) или 1 (четыре)
        self.assertEqual(ex_nerve_poset(P, trunc=1).tabular.size(1), 5)
        self.assertEqual(len(monotone_maps(sd_poset(1), P)), 5)
        self.assertEqual(ex_levels(nerve(P), trunc=1), (2, 5))

    def test_ex_of_subset_nerve_counts_monotone_maps(self):
        A = subset_poset('ab')
        levels = ex_levels(nerve(A), trunc=2)
        self.assertEqual(levels, tuple(len(monotone_maps(sd_poset(n), A)) for n in range(3)))

    def test_two_ex_constructions_agree(self):
        for size in range(1, 4):
            for P in small_posets(size):
                f = ex_poset_comparison(P, trunc=2)
                self.assertTrue(is_simplicial_map(f))
                self.assertTrue(is_generator_bijection(f))

    def test_ex_of_category_nerve(self):
        C = ordinal(1).as_category()
        self.assertEqual(ex_nerve_category(C, trunc=2).tabular.size(1), 5)
        J = ex_nerve_category(fixture_category('walking_iso.json'), trunc=1)
        # функторы s_<[1] -> J: объекты на трёх элементах, морфизмы однозначны
        self.assertEqual(J.tabular.size(1), 8)

    def test_cap(self):
        with self.assertRaises(EnumerationCapExceeded) as ctx:
            ex(boundary_simplex(2), trunc=2, cap=4)
        self.assertEqual(ctx.exception.level, 1)
        self.assertEqual(max_ex_trunc(boundary_simplex(2), 2, cap=4), 0)


class ArrayTableTests(SimpleTestCase):

    def test_table_rows_follow_monotone_maps(self):
        for Q, P in ((sd_poset(2), subset_poset('ab')), (sd_poset(1), ordinal(3)), (sd_poset(2), ordinal(0))):
            table = monotone_table(Q, P)
            expected = [[P.position[m[q]] for q in Q.linear_order] for m in monotone_maps(Q, P)]
            self.assertEqual(table.tolist(), expected)

    def test_blocks_do_not_depend_on_chunk(self):
        Q, P = sd_poset(2), subset_poset('ab')
        chunks = np.concatenate(list(monotone_blocks(Q, P, chunk=3)))
        self.assertEqual(chunks.tolist(), monotone_table(Q, P).tolist())

    def test_table_cap(self):
        with self.assertRaises(EnumerationCapExceeded):
            monotone_table(sd_poset(2), subset_poset('ab'), cap=10)

    def test_row_index_without_exact_codes(self):
        table = monotone_table(sd_poset(1), ordinal(3))
        exact, unique = RowIndex(table, 4), RowIndex(table, 2 ** 40)
        self.assertTrue(exact.exact)
        self.assertFalse(unique.exact)
        rows = np.concatenate([table[::-1], np.array([[2, 2, 0]], dtype=table.dtype)])
        found = unique.find(rows)
        self.assertEqual(found.tolist(), exact.find(rows).tolist())
        self.assertEqual(found.tolist(), list(range(len(table)))[::-1] + [-1])

    def test_matches_functor_enumeration(self):
        for P in (ordinal(1), subset_poset('ab'), small_posets(3)[2]):
            Ep = ex_nerve_poset(P, trunc=2)
            Ec = ex_nerve_category(P.as_category(), trunc=2)
            self.assertEqual(Ep.simplicial_set.counts(), Ec.simplicial_set.counts())
            for n in range(3):
                self.assertEqual(list(Ep.tabular.levels[n]), [objects for objects, _ in Ec.tabular.levels[n]])
            self.assertEqual(Ep.tabular.faces, Ec.tabular.faces)
            self.assertEqual(Ep.tabular.degeneracies, Ec.tabular.degeneracies)

    def test_labels_and_faces(self):
        E = ex_nerve_poset(ordinal(1), trunc=2)
        X = E.simplicial_set
        for label in X.generators[2]:
            key = E.key_of(label)
            self.assertEqual(E.ref(2, key), X.ref(label))
            self.assertEqual(E.names[key], label)
        self.assertNotIn(X.generators[0][0], X.faces)
        with self.assertRaises(DanglingReferenceError):
            E.index(1, (0, 0, 5))

    def test_cap_reports_level(self):
        with self.assertRaises(EnumerationCapExceeded) as ctx:
            poset_ex_complex(subset_poset('ab'), trunc=2, cap=10)
        self.assertEqual(ctx.exception.level, 1)


class LastVertexMapTests(SimpleTestCase):

    def test_point(self):
        b = last_vertex_map(standard_simplex(0))
        self.assertTrue(is_simplicial_map(b))
        self.assertTrue(is_generator_bijection(b))

    def test_interval_edge(self):
        X = standard_simplex(1)
        E = ex(X, trunc=1)
        b = last_vertex_map(X, target=E)
        edge = b.assignment[(0, 1)]
        self.assertEqual(edge.word, ())
        values = dict(zip(subdivision(1).chains, E.key_of(edge.generator)))
        self.assertEqual(values[((0,),)], X.ref((0,)))
        self.assertEqual(values[((1,),)], X.ref((1,)))
        self.assertEqual(values[((0, 1),)], X.ref((1,)))

    def test_valid_on_corpus(self):
        for X in (standard_simplex(1), boundary_simplex(2), horn(2, 1), standard_simplex(2)):
            self.assertTrue(is_simplicial_map(last_vertex_map(X, trunc=2)))

    def test_naturality_for_collapse(self):
        X = standard_simplex(1)
        f = collapse_map(X)
        EX, EY = ex(X, trunc=2), ex(f.target, trunc=2)
        left = compose_maps(ex_map(f, source=EX, target=EY), last_vertex_map(X, target=EX))
        right = compose_maps(last_vertex_map(f.target, target=EY), f)
        self.assertTrue(maps_equal(left, right))

    def test_naturality_for_inclusion(self):
        X, Y = boundary_simplex(2), standard_simplex(2)
        f = SimplicialMap(X, Y, {g: Y.ref(g) for g in X.dim_of})
        EX, EY = ex(X, trunc=2), ex(Y, trunc=2)
        Exf = ex_map(f, source=EX, target=EY)
        self.assertTrue(is_simplicial_map(Exf))
        left = compose_maps(Exf, last_vertex_map(X, target=EX))
        right = compose_maps(last_vertex_map(Y, target=EY), f)
        self.assertTrue(maps_equal(left, right))

    def test_weak_equivalence_certificates(self):
        for X, trunc in ((boundary_simplex(2), 2), (sd_simplex(2), 2), (boundary_simplex(3), 2)):
            b = last_vertex_map(X, trunc=trunc)
            self.assertTrue(weq_certificate(b), X.name)
            ex_groups = simplicial_homology(b.target).reliable_groups
            self.assertEqual(ex_groups, simplicial_homology(X, trunc).reliable_groups)


class PosetCommandTests(SimpleTestCase):

    def run_command(self, name, *args, **kwargs):
        out = StringIO()
        call_command(name, *args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()

    def test_nerve_command(self):
        payload = json.loads(self.run_command('nerve', 'walking_iso.json', trunc=2))
        self.assertEqual([len(g) for g in payload['generators']], [2, 2, 2])

    def test_ex_command(self):
        payload = json.loads(self.run_command('ex', 'boundary2.json', trunc=1, last_vertex=True))
        self.assertEqual(payload['ex']['counts'][0], 3)
        self.assertIn('assignment', payload['last_vertex'])
        self.assertEqual(
            self.run_command('ex', 'interval_category.json', trunc=1),
            self.run_command('ex', 'interval_category.json', trunc=1),
        )

    def test_ex_command_cap(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('ex', 'boundary2.json', trunc=2, cap=4)
        self.assertEqual(ctx.exception.returncode, EXIT_CAP)

    def test_bad_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('nerve', 'no_such_file.json')
        self.assertEqual(ctx.exception.returncode, EXIT_SCHEMA)
