# apps/simplicial/structures.py
"""
Типы данных симплициальных множеств.

Порождающая форма (SimplicialSet) хранит только невырожденные симплексы и
таблицы граней, табличная форма (TabularSimplicialSet) хранит все симплексы
до размерности d_max вместе с таблицами граней и вырождений.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from collections.abc import Hashable, Mapping

logger = logging.getLogger(__name__)


def degeneracy_words(n: int, m: int):
    """
    Все слова вырождения в нормальной форме, переводящие размерность m в n.
    Слово длины n - m задаётся множеством индексов из {0, …, n-1},
    записанным по убыванию.
    """
    if m > n:
        return []
    return [tuple(reversed(c)) for c in combinations(range(n), n - m)]


@dataclass(frozen=True)
class SimplexRef:
    """Симплекс s_{j1}…s_{jr}(generator) размерности dim"""

    word: tuple
    generator: Hashable
    dim: int

    @property
    def is_degenerate(self):
        return bool(self.word)

    @property
    def generator_dim(self):
        return self.dim - len(self.word)


@dataclass(frozen=True)
class SimplicialSet:
    d_max: int
    generators: tuple
    faces: Mapping = field(default_factory=dict)
    labels: Mapping = field(default=None, compare=False)
    name: str = field(default='', compare=False)

    @cached_property
    def dim_of(self):
        result = {}
        for n, gens in enumerate(self.generators):
            for g in gens:
                result[g] = n
        return result

    def dim(self, generator):
        return self.dim_of[generator]

    def __contains__(self, generator):
        return generator in self.dim_of

    def count(self, n):
        if n < 0 or n >= len(self.generators):
            return 0
        return len(self.generators[n])

    def counts(self):
        """Число невырожденных симплексов по размерностям без хвостовых нулей"""
        values = [len(gens) for gens in self.generators]
        while values and values[-1] == 0:
            values.pop()
        return tuple(values)

    def euler_characteristic(self):
        return sum((-1) ** n * len(gens) for n, gens in enumerate(self.generators))

    def ref(self, generator):
        return SimplexRef((), generator, self.dim_of[generator])

    def simplices(self, n):
        """Все n-симплексы, включая вырожденные, в детерминированном порядке"""
        for m in range(min(n, self.d_max) + 1):
            words = degeneracy_words(n, m)
            for g in self.generators[m]:
                for word in words:
                    yield SimplexRef(word, g, n)

    def label(self, generator):
        if self.labels and generator in self.labels:
            return self.labels[generator]
        from .utils import format_label
        return format_label(generator)

    def validate(self):
        from .utils import validate_simplicial_set
        validate_simplicial_set(self)
        return self


@dataclass(frozen=True)
class TabularSimplicialSet:
    """
    Плотное представление: levels[n] - ключи всех n-симплексов,
    faces[n][x] - индексы граней в levels[n-1],
    degeneracies[n][x] - индексы вырождений в levels[n+1] (для n < d_max).
    """

    d_max: int
    levels: tuple
    faces: tuple
    degeneracies: tuple
    name: str = field(default='', compare=False)

    @cached_property
    def positions(self):
        return tuple({key: idx for idx, key in enumerate(level)} for level in self.levels)

    def index(self, n, key):
        return self.positions[n][key]

    def size(self, n):
        return len(self.levels[n])

    @cached_property
    def decompositions(self):
        """
        Разложение Эйленберга-Зильбера каждого симплекса:
        decompositions[n][x] = (слово, (размерность образующей, индекс образующей)).
        Симплекс x вырожден, если x = s_j d_j x для некоторого j.
        """
        from .utils import normalize_word

        result = []
        for n, level in enumerate(self.levels):
            row = []
            for x in range(len(level)):
                found = None
                if n > 0:
                    for j in range(n):
                        y = self.faces[n][x][j]
                        if self.degeneracies[n - 1][y][j] == x:
                            word, gen = result[n - 1][y]
                            found = (normalize_word((j,) + word), gen)
                            break
                row.append(found if found is not None else ((), (n, x)))
            result.append(row)
        return result

    def normal_form(self, n, key):
        word, (m, g) = self.decompositions[n][self.index(n, key)]
        return SimplexRef(word, self.levels[m][g], n)

    def normal_form_at(self, n, x):
        word, (m, g) = self.decompositions[n][x]
        return SimplexRef(word, self.levels[m][g], n)

    def to_generator_form(self, labels=None):
        generators = []
        faces = {}
        for n, level in enumerate(self.levels):
            gens = []
            for x, key in enumerate(level):
                word, _ = self.decompositions[n][x]
                if word:
                    continue
                gens.append(key)
                if n > 0:
                    faces[key] = tuple(
                        self.normal_form_at(n - 1, y) for y in self.faces[n][x]
                    )
            generators.append(tuple(gens))
        logger.debug(
            'Нормализация %s: %s невырожденных из %s',
            self.name or 'табличного множества',
            [len(g) for g in generators],
            [len(level) for level in self.levels],
        )
        return SimplicialSet(
            d_max=self.d_max,
            generators=tuple(generators),
            faces=faces,
            labels=labels,
            name=self.name,
        )


@dataclass(frozen=True)
class ArraySimplicialSet(SimplicialSet):
    """
    Порождающая форма большого множества. face_numbers[n] - массив
    (число образующих размерности n) x (n + 1) с номерами граней-образующих
    в generators[n - 1], -1 у вырожденных граней. faces отдаёт SimplexRef по запросу.
    """

    face_numbers: tuple = field(default=(), compare=False, repr=False)
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def locations(self):
        return {g: (n, j) for n, gens in enumerate(self.generators) for j, g in enumerate(gens)}

    @cached_property
    def dim_of(self):
        return {g: n for g, (n, _) in self.locations.items()}

    def locate(self, generator):
        """(размерность, номер) образующей"""
        return self.locations[generator]


class TableAssignment(Mapping):
    """
    Назначение отображения из ArraySimplicialSet. generator_index[n][j] - номер
    образа j-й образующей среди образующих цели той же размерности
    (-1, если образ вырожден); resolve(n, j) строит SimplexRef.
    """

    def __init__(self, source: ArraySimplicialSet, generator_index, resolve):
        self.source = source
        self.generator_index = tuple(generator_index)
        self.resolve = resolve

    def __getitem__(self, generator):
        n, j = self.source.locate(generator)
        return self.resolve(n, j)

    def __iter__(self):
        for gens in self.source.generators:
            yield from gens

    def __len__(self):
        return sum(len(gens) for gens in self.source.generators)


@dataclass(frozen=True)
class MapViolation:
    generator: Hashable
    index: int
    expected: SimplexRef
    actual: SimplexRef


@dataclass(frozen=True)
class MapReport:
    valid: bool
    violations: tuple = ()

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialSet
    target: SimplicialSet
    assignment: Mapping
    name: str = field(default='', compare=False)

    def __call__(self, generator):
        return self.assignment[generator]


@dataclass(frozen=True)
class BiSimplexRef:
    h_word: tuple
    v_word: tuple
    generator: Hashable
    bidegree: tuple


@dataclass(frozen=True)
class BisimplicialSet:
    """Бисимплициальное множество: образующие по бистепеням (m, n)"""

    d_max: tuple
    generators: Mapping
    h_faces: Mapping = field(default_factory=dict)
    v_faces: Mapping = field(default_factory=dict)
    name: str = field(default='', compare=False)

    @cached_property
    def bidegree_of(self):
        result = {}
        for bidegree, gens in self.generators.items():
            for g in gens:
                result[g] = bidegree
        return result

    def ref(self, generator):
        return BiSimplexRef((), (), generator, self.bidegree_of[generator])

    def bisimplices(self, m, n):
        """Все бисимплексы бистепени (m, n), включая вырожденные"""
        for (p, q), gens in self.generators.items():
            if p > m or q > n:
                continue
            h_words = degeneracy_words(m, p)
            v_words = degeneracy_words(n, q)
            for g in gens:
                for hw in h_words:
                    for vw in v_words:
                        yield BiSimplexRef(hw, vw, g, (m, n))
