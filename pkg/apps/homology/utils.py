import logging

import networkx as nx
import numpy as np

from apps.simplicial.structures import ArraySimplicialSet, SimplicialMap, SimplicialSet, TableAssignment
from apps.simplicial.utils import compose_maps, format_label
from core.exceptions import ChainComplexError, TruncationError
from .reduction import coreduce
from .smith import invariant_factors
from .structures import (
    ChainComplex,
    DegreeVerdict,
    HomologyGroup,
    HomologyResult,
    InducedMap,
    SparseMatrix,
    WeqCertificate,
)

logger = logging.getLogger(__name__)


def _resolve_trunc(X: SimplicialSet, trunc):
    trunc = X.d_max if trunc is None else trunc
    if trunc > X.d_max:
        raise TruncationError(
            f'Усечение {trunc} выше d_max={X.d_max} для {X.name or "множества"}',
            trunc=trunc, d_max=X.d_max,
        )
    return trunc


def _array_boundary(X: ArraySimplicialSet, k):
    faces = X.face_numbers[k]
    signs = np.broadcast_to((-1) ** np.arange(k + 1), faces.shape)
    cols = np.broadcast_to(np.arange(len(faces))[:, None], faces.shape)
    present = faces >= 0
    return SparseMatrix.from_coo(
        len(X.generators[k - 1]), len(faces), faces[present], cols[present], signs[present],
    )


def normalized_chains(X: SimplicialSet, trunc=None) -> ChainComplex:
    """Базис - невырожденные симплексы, ∂ = Σ (-1)^i d_i, вырожденные грани дают ноль"""
    trunc = _resolve_trunc(X, trunc)
    cached = isinstance(X, ArraySimplicialSet)
    if cached and ('chains', trunc) in X.cache:
        return X.cache[('chains', trunc)]
    bases = tuple(tuple(X.generators[k]) for k in range(trunc + 1))
    boundaries = [SparseMatrix.zero(0, len(bases[0]))]
    for k in range(1, trunc + 1):
        if cached:
            boundaries.append(_array_boundary(X, k))
            continue
        index = {g: idx for idx, g in enumerate(bases[k - 1])}
        columns = []
        for g in bases[k]:
            col = {}
            for i, r in enumerate(X.faces[g]):
                if r.word:
                    continue
                row = index[r.generator]
                col[row] = col.get(row, 0) + (-1) ** i
            columns.append(col)
        boundaries.append(SparseMatrix.from_columns(len(bases[k - 1]), len(bases[k]), columns))
    C = ChainComplex(trunc=trunc, bases=bases, boundaries=tuple(boundaries), name=X.name)
    logger.debug('Цепной комплекс %s: ранги %s', X.name, C.ranks)
    if cached:
        X.cache[('chains', trunc)] = C
    return C


def validate_chain_complex(C: ChainComplex):
    for k in range(2, C.trunc + 1):
        if not (C.boundaries[k - 1] @ C.boundaries[k]).is_zero():
            raise ChainComplexError(f'∂_{k - 1} ∘ ∂_{k} != 0', degree=k)
    return C


def homology(C: ChainComplex, validate=True, reduce=True) -> HomologyResult:
    """
    H_k = ker ∂_k / im ∂_{k+1} для k <= trunc.
    Степень trunc вычисляется без ∂_{trunc+1} и помечается ненадёжной.
    С reduce=True нормальная форма Смита считается после снятия пар (reduction.coreduce).
    """
    if validate and not C.cache.get('validated'):
        validate_chain_complex(C)
        C.cache['validated'] = True
    key = ('homology', reduce)
    if key in C.cache:
        return C.cache[key]
    if reduce:
        R = coreduce(C)
        boundaries, sizes, seeds = R.boundaries, R.sizes, R.seeds
    else:
        boundaries, sizes, seeds = C.boundaries, C.ranks, 0
    factors = [invariant_factors(M.nonzero_columns()) for M in boundaries]
    ranks = [len(f) for f in factors] + [0]
    groups = []
    for k in range(C.trunc + 1):
        betti = sizes[k] - ranks[k] - ranks[k + 1] + (seeds if k == 0 else 0)
        torsion = tuple(factors[k + 1]) if k + 1 <= C.trunc else ()
        groups.append(HomologyGroup(betti=betti, torsion=tuple(d for d in torsion if d > 1)))
    result = HomologyResult(groups=tuple(groups), reliable_through=C.trunc - 1, name=C.name)
    logger.info('Гомологии %s: %s', C.name or 'комплекса', result)
    C.cache[key] = result
    return result


def simplicial_homology(X: SimplicialSet, trunc=None) -> HomologyResult:
    return homology(normalized_chains(X, trunc))


def _generator_positions(Y: SimplicialSet, k, basis):
    if isinstance(Y, ArraySimplicialSet):
        return lambda g: Y.locate(g)[1]
    return {g: idx for idx, g in enumerate(basis)}.__getitem__


def chain_map(f: SimplicialMap, trunc=None):
    """Матрицы f_k: C_k(X) -> C_k(Y); вырожденные образы дают ноль"""
    trunc = min(_resolve_trunc(f.source, trunc), f.target.d_max)
    CX = normalized_chains(f.source, trunc)
    CY = normalized_chains(f.target, trunc)
    matrices = []
    for k in range(trunc + 1):
        n_rows, n_cols = len(CY.bases[k]), len(CX.bases[k])
        if isinstance(f.assignment, TableAssignment):
            image = np.asarray(f.assignment.generator_index[k], dtype=np.int64)
            cols = np.flatnonzero(image >= 0)
            rows = image[cols]
        else:
            position = _generator_positions(f.target, k, CY.bases[k])
            rows, cols = [], []
            for j, g in enumerate(CX.bases[k]):
                r = f.assignment[g]
                if not r.word:
                    rows.append(position(r.generator))
                    cols.append(j)
        matrices.append(SparseMatrix.from_coo(n_rows, n_cols, rows, cols, np.ones(len(cols))))
    for k in range(1, trunc + 1):
        if (CY.boundaries[k] @ matrices[k]) != (matrices[k - 1] @ CX.boundaries[k]):
            raise ChainComplexError(f'∂f != f∂ в степени {k}', degree=k, map=f.name)
    return CX, CY, tuple(matrices)


def _cone(CX: ChainComplex, CY: ChainComplex, F, name):
    trunc = CX.trunc
    bases = []
    for k in range(trunc + 1):
        shifted = tuple(('s', x) for x in CX.bases[k - 1]) if k >= 1 else ()
        bases.append(shifted + tuple(('t', y) for y in CY.bases[k]))
    boundaries = [SparseMatrix.zero(0, len(bases[0]))]
    for k in range(1, trunc + 1):
        offset = len(CX.bases[k - 2]) if k >= 2 else 0
        width = len(CX.bases[k - 1])
        parts = [
            (F[k - 1].rows + offset, F[k - 1].cols, F[k - 1].values),
            (CY.boundaries[k].rows + offset, CY.boundaries[k].cols + width, CY.boundaries[k].values),
        ]
        if k >= 2:
            D = CX.boundaries[k - 1]
            parts.append((D.rows, D.cols, -D.values))
        rows, cols, values = (np.concatenate(column) for column in zip(*parts))
        boundaries.append(SparseMatrix.from_coo(len(bases[k - 1]), len(bases[k]), rows, cols, values))
    return ChainComplex(trunc=trunc, bases=tuple(bases), boundaries=tuple(boundaries), name=name)


def mapping_cone(f: SimplicialMap, trunc=None) -> ChainComplex:
    """
    Конус: Cone_k = C_{k-1}(X) ⊕ C_k(Y), ∂(x, y) = (-∂x, f(x) + ∂y).
    Ацикличность конуса в степенях <= k вместе с равенством групп даёт изоморфизм.
    """
    CX, CY, F = chain_map(f, trunc)
    return _cone(CX, CY, F, f'Cone({f.name})')


def induced_map(f: SimplicialMap, trunc=None) -> InducedMap:
    CX, CY, F = chain_map(f, trunc)
    HX, HY = homology(CX), homology(CY)
    # ∂f = f∂ уже проверено в chain_map
    cone = homology(_cone(CX, CY, F, f'Cone({f.name})'), validate=False)
    verdicts = []
    ok = True
    for k in range(CX.trunc):
        ok = ok and HX.groups[k] == HY.groups[k] and cone.groups[k].is_trivial
        verdicts.append(ok)
    return InducedMap(matrices=F, verdicts=tuple(verdicts))


def components(X: SimplicialSet):
    """π0: компоненты связности по вершинам, в порядке первой вершины"""
    G = nx.Graph()
    G.add_nodes_from(X.generators[0])
    if X.d_max >= 1:
        for e in X.generators[1]:
            d0, d1 = X.faces[e]
            G.add_edge(d0.generator, d1.generator)
    order = {v: idx for idx, v in enumerate(X.generators[0])}
    comps = [tuple(sorted(c, key=order.__getitem__)) for c in nx.connected_components(G)]
    return sorted(comps, key=lambda c: order[c[0]])


def pi0_map(f: SimplicialMap):
    source = components(f.source)
    target = components(f.target)
    where = {v: idx for idx, comp in enumerate(target) for v in comp}
    return source, target, tuple(where[f.assignment[comp[0]].generator] for comp in source)


def weq_certificate(f: SimplicialMap, trunc=None) -> WeqCertificate:
    """
    Необходимое условие слабой эквивалентности: биекция на π0
    и изоморфизм гомологий в степенях <= trunc - 1.
    """
    if trunc is None:
        trunc = min(f.source.d_max, f.target.d_max)
    source, target, images = pi0_map(f)
    pi0_bijection = len(source) == len(target) and len(set(images)) == len(target)

    CX, CY, F = chain_map(f, trunc)
    HX, HY = homology(CX), homology(CY)
    cone = homology(_cone(CX, CY, F, f'Cone({f.name})'), validate=False)
    degrees = []
    first_failure = None if pi0_bijection else 'pi0'
    ok = True
    trunc = CX.trunc
    for k in range(trunc):
        acyclic = cone.groups[k].is_trivial
        ok = ok and HX.groups[k] == HY.groups[k] and acyclic
        degrees.append(DegreeVerdict(k, HX.groups[k], HY.groups[k], acyclic, ok))
        if not ok and first_failure is None:
            first_failure = k
    passed = pi0_bijection and ok
    log = logger.info if passed else logger.warning
    log(
        'Сертификат %s: π0 %s, степени %s',
        f.name or 'отображения',
        'биекция' if pi0_bijection else 'не биекция',
        [d.iso for d in degrees],
    )
    return WeqCertificate(
        passed=passed,
        pi0_bijection=pi0_bijection,
        degrees=tuple(degrees),
        trunc=trunc,
        first_failure=first_failure,
        name=f.name,
    )


def compose_certificate(g: SimplicialMap, f: SimplicialMap, trunc=None) -> WeqCertificate:
    return weq_certificate(compose_maps(g, f), trunc)


def basis_labels(C: ChainComplex):
    return [[format_label(g) for g in basis] for basis in C.bases]
