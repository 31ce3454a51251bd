"""Contains graph products of cyclic groups, normal forms and ball builders."""

import collections
import collections.abc
import dataclasses
import itertools
import json
import logging
import os
import re
import typing

import networkx as nx

from gentlenet import graphcore, interfaces
from gentlenet.interfaces import CardinalityClass, VertexIndex

log = logging.getLogger(__name__)

SPEC_FORMAT = "gentlenet-graph-product"

_DESCRIPTOR = re.compile(r"^(?:c(?P<order>\d+)|z(?::window=(?P<window>\d+))?)$")
_TOKEN = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<exp>-?\d+))?$")


@dataclasses.dataclass(frozen=True, slots=True)
class CyclicGroup:
    """
    Finite cyclic group of a given order, or the integers when order is None.

    The integers are enumerated inside the window -W..W.
    """

    order: typing.Optional[int]
    window: typing.Optional[int] = None
    generators: tuple[int, ...] = (1,)

    def __post_init__(self) -> None:
        if self.order is not None:
            if self.order < 2:  # noqa: PLR2004
                raise ValueError("Finite vertex groups must have order >= 2.")
            if self.window is not None:
                raise ValueError("Finite vertex groups take no window.")
        elif self.window is None or self.window < 1:
            raise ValueError("Infinite cyclic groups need a window W >= 1.")
        if not self.generators:
            raise ValueError("Generating set must be non-empty.")
        if any(self.reduce(g) == 0 for g in self.generators):
            raise ValueError("Generators must be non-trivial.")

    @classmethod
    def parse(
        cls,
        descriptor: str,
        generators: typing.Optional[collections.abc.Sequence[int]] = None,
    ) -> "CyclicGroup":
        """Parse ``"c3"`` or ``"z:window=8"``."""
        match = _DESCRIPTOR.match(descriptor.strip())
        if match is None:
            raise ValueError(f"Unknown group descriptor {descriptor!r}.")
        gens = tuple(generators) if generators else (1,)
        if match.group("order") is not None:
            return cls(order=int(match.group("order")), generators=gens)
        window = match.group("window")
        return cls(
            order=None,
            window=int(window) if window is not None else 8,
            generators=gens,
        )

    @property
    def descriptor(self) -> str:
        if self.order is not None:
            return f"c{self.order}"
        return f"z:window={self.window}"

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def cardinality_class(self) -> CardinalityClass:
        if self.order == 2:  # noqa: PLR2004
            return CardinalityClass.TWO
        return CardinalityClass.MANY

    def reduce(self, element: int) -> int:
        if self.order is None:
            return element
        return element % self.order

    def in_window(self, element: int) -> bool:
        return self.order is not None or abs(element) <= typing.cast(
            int, self.window
        )

    def nontrivial_elements(self) -> tuple[int, ...]:
        """Non-identity elements, restricted to the window for the integers."""
        if self.order is not None:
            return tuple(range(1, self.order))
        w = typing.cast(int, self.window)
        return tuple(x for x in range(-w, w + 1) if x != 0)

    def symmetric_generators(self) -> tuple[int, ...]:
        gens = {self.reduce(g) for g in self.generators}
        gens |= {self.reduce(-g) for g in self.generators}
        return tuple(sorted(gens))


@dataclasses.dataclass(frozen=True, slots=True, order=True)
class Syllable:
    vertex: VertexIndex
    element: int


@dataclasses.dataclass(frozen=True, slots=True)
class ReducedWord:
    """Canonical graphically reduced word; hashable and used as a ball key."""

    syllables: tuple[Syllable, ...] = ()

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self) -> collections.abc.Iterator[Syllable]:
        return iter(self.syllables)

    @property
    def support(self) -> frozenset[VertexIndex]:
        return frozenset(s.vertex for s in self.syllables)


IDENTITY = ReducedWord()


@dataclasses.dataclass(frozen=True, slots=True)
class GraphProductSpec:
    """
    Presentation graph with one cyclic group per vertex.

    Vertex names are taken from ``gamma.names``.
    """

    gamma: graphcore.FiniteGraph
    groups: tuple[CyclicGroup, ...]

    def __post_init__(self) -> None:
        if len(self.groups) != len(self.gamma):
            raise ValueError("Need exactly one vertex group per vertex.")
        names = [self.name(v) for v in self.gamma.vertices]
        if len(set(names)) != len(names):
            raise ValueError("Vertex names of a graph product must be unique.")

    @classmethod
    def build(
        cls,
        names: collections.abc.Sequence[str],
        groups: collections.abc.Sequence[typing.Union[CyclicGroup, str]],
        edges: collections.abc.Iterable[tuple[str, str]] = (),
    ) -> "GraphProductSpec":
        """
        Construct a spec from vertex names, group descriptors and edges.

        Parameters
        ----------
        names : collections.abc.Sequence[str]
            Vertex names in id order.
        groups : collections.abc.Sequence[CyclicGroup | str]
            Group per vertex, as objects or descriptors like ``"c2"``.
        edges : collections.abc.Iterable[tuple[str, str]]
            Commuting pairs, given by name.
        """
        position = {name: i for i, name in enumerate(names)}
        try:
            edge_list = [(position[u], position[v]) for u, v in edges]
        except KeyError as err:
            raise interfaces.UnknownVertexError(err.args[0]) from err
        group_tuple = tuple(
            CyclicGroup.parse(g) if isinstance(g, str) else g for g in groups
        )
        gamma = graphcore.FiniteGraph.build(
            len(names),
            edge_list,
            payloads=list(names),
            names=list(names),
            classes=[g.cardinality_class for g in group_tuple],
        )
        return cls(gamma=gamma, groups=group_tuple)

    @classmethod
    def uniform(
        cls,
        gamma: typing.Union[graphcore.FiniteGraph, nx.Graph],
        group: typing.Union[CyclicGroup, str],
    ) -> "GraphProductSpec":
        """Use the same vertex group at every vertex of ``gamma``."""
        if isinstance(gamma, nx.Graph):
            gamma = graphcore.FiniteGraph.from_networkx(gamma)
        names = [gamma.name(v) for v in gamma.vertices]
        edges = [(names[u], names[v]) for u, v in gamma.edges()]
        return cls.build(names, [group] * len(names), edges)

    def __len__(self) -> int:
        return len(self.groups)

    def name(self, v: int) -> str:
        return self.gamma.name(v)

    def vertex(self, name: str) -> VertexIndex:
        for v in self.gamma.vertices:
            if self.gamma.name(v) == name:
                return VertexIndex(v)
        raise interfaces.UnknownVertexError(name)

    def commute(self, u: int, v: int) -> bool:
        return self.gamma.has_edge(u, v)

    def cardinality_classes(self) -> tuple[CardinalityClass, ...]:
        return tuple(g.cardinality_class for g in self.groups)

    def group(self, v: int) -> CyclicGroup:
        return self.groups[self.gamma.check_vertex(v)]


def right_angled_artin(
    gamma: typing.Union[graphcore.FiniteGraph, nx.Graph], window: int = 8
) -> GraphProductSpec:
    """Integers at every vertex."""
    return GraphProductSpec.uniform(gamma, CyclicGroup(None, window=window))


def right_angled_coxeter(
    gamma: typing.Union[graphcore.FiniteGraph, nx.Graph],
) -> GraphProductSpec:
    """Order-two groups at every vertex."""
    return GraphProductSpec.uniform(gamma, CyclicGroup(2))


def syllable(spec: GraphProductSpec, name: str, element: int = 1) -> Syllable:
    """Build a syllable, rejecting the identity."""
    v = spec.vertex(name)
    if spec.groups[v].reduce(element) == 0:
        raise ValueError(f"Syllable {name}^{element} is the identity.")
    return Syllable(v, element)


def parse_word(spec: GraphProductSpec, text: str) -> tuple[Syllable, ...]:
    """
    Parse whitespace separated tokens like ``"a^2 b a^-1"``.

    The empty string is the identity.
    """
    word = []
    for token in text.split():
        match = _TOKEN.match(token)
        if match is None:
            raise ValueError(f"Cannot parse syllable {token!r}.")
        exponent = match.group("exp")
        word.append(
            syllable(
                spec,
                match.group("name"),
                int(exponent) if exponent is not None else 1,
            )
        )
    return tuple(word)


def format_word(
    spec: GraphProductSpec, word: collections.abc.Iterable[Syllable]
) -> str:
    tokens = []
    for s in word:
        name = spec.name(s.vertex)
        tokens.append(name if s.element == 1 else f"{name}^{s.element}")
    return " ".join(tokens) if tokens else "1"


def _reduce_word(
    spec: GraphProductSpec, word: collections.abc.Iterable[Syllable]
) -> list[Syllable]:
    stack: list[Syllable] = []
    for s in word:
        group = spec.group(s.vertex)
        x = group.reduce(s.element)
        if x == 0:
            continue
        i = len(stack) - 1
        while i >= 0:
            t = stack[i]
            if t.vertex == s.vertex:
                merged = group.reduce(t.element + x)
                if merged == 0:
                    del stack[i]
                else:
                    stack[i] = Syllable(t.vertex, merged)
                break
            if not spec.commute(t.vertex, s.vertex):
                i = -1
                break
            i -= 1
        else:
            i = -1
        if i < 0:
            stack.append(Syllable(s.vertex, x))
    return stack


def _shuffle_canonical(
    spec: GraphProductSpec, syllables: list[Syllable]
) -> tuple[Syllable, ...]:
    remaining = list(syllables)
    out: list[Syllable] = []
    while remaining:
        best_index = -1
        for i, s in enumerate(remaining):
            if best_index >= 0 and s.vertex >= remaining[best_index].vertex:
                continue
            if all(spec.commute(t.vertex, s.vertex) for t in remaining[:i]):
                best_index = i
        out.append(remaining.pop(best_index))
    return tuple(out)


def normalize(
    spec: GraphProductSpec, word: collections.abc.Iterable[Syllable]
) -> ReducedWord:
    """
    Return the canonical graphically reduced form of a word.

    Syllables are inserted left to right; each new syllable travels left past
    commuting syllables and merges with (or cancels against) a syllable on the
    same vertex if it meets one.  The reduced result is then put in the
    shuffle order that is lexicographically least in vertex ids.

    Parameters
    ----------
    spec : GraphProductSpec
        The graph product.
    word : collections.abc.Iterable[Syllable]
        Any word; identity syllables are dropped.

    Returns
    -------
    ReducedWord
    """
    syllables = tuple(word)
    for s in syllables:
        spec.gamma.check_vertex(s.vertex)
    return ReducedWord(_shuffle_canonical(spec, _reduce_word(spec, syllables)))


def equal(
    spec: GraphProductSpec,
    w1: collections.abc.Iterable[Syllable],
    w2: collections.abc.Iterable[Syllable],
) -> bool:
    return normalize(spec, w1) == normalize(spec, w2)


def syllable_length(
    spec: GraphProductSpec, w: collections.abc.Iterable[Syllable]
) -> int:
    """Number of syllables of the reduced form, the QM distance to 1."""
    return len(normalize(spec, w))


def multiply(
    spec: GraphProductSpec,
    w1: collections.abc.Iterable[Syllable],
    w2: collections.abc.Iterable[Syllable],
) -> ReducedWord:
    return normalize(spec, itertools.chain(w1, w2))


def inverse(
    spec: GraphProductSpec, w: collections.abc.Iterable[Syllable]
) -> ReducedWord:
    return normalize(
        spec, [Syllable(s.vertex, -s.element) for s in reversed(tuple(w))]
    )


def _check_window(spec: GraphProductSpec, word: ReducedWord) -> bool:
    return all(spec.groups[s.vertex].in_window(s.element) for s in word)


def _finish_ball(
    spec: GraphProductSpec,
    words: list[ReducedWord],
    neighbor_steps: collections.abc.Sequence[Syllable],
    R: int,
) -> graphcore.FiniteGraph:
    position = {w: i for i, w in enumerate(words)}
    edges: dict[tuple[int, int], int] = {}
    for i, w in enumerate(words):
        for step in neighbor_steps:
            j = position.get(multiply(spec, w.syllables, (step,)))
            if j is not None and j != i:
                edges[graphcore.edge_key(i, j)] = step.vertex
    log.debug(
        "Ball of radius %s: %s vertices, %s edges", R, len(words), len(edges)
    )
    return graphcore.FiniteGraph.build(
        len(words),
        edges,
        payloads=words,
        names=[format_word(spec, w) for w in words],
        edge_labels=edges,
        origin=0,
        radius=R,
    )


def _bfs_words(
    spec: GraphProductSpec,
    steps: collections.abc.Sequence[Syllable],
    R: int,
    admit: collections.abc.Callable[[ReducedWord], bool],
) -> list[ReducedWord]:
    words = [IDENTITY]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    for depth in range(R):
        next_frontier = []
        for w in frontier:
            for step in steps:
                nw = multiply(spec, w.syllables, (step,))
                if nw in seen or not admit(nw):
                    continue
                seen.add(nw)
                next_frontier.append(nw)
        words.extend(next_frontier)
        frontier = next_frontier
        log.debug("Layer %s: %s new elements", depth + 1, len(next_frontier))
    return words


def qm_ball(spec: GraphProductSpec, R: int) -> graphcore.FiniteGraph:
    """
    Ball of radius R around 1 in the syllable-metric Cayley graph.

    Every non-trivial element of every vertex group is a generator; infinite
    cyclic vertex groups contribute the window -W..W.  Two ball elements are
    adjacent when they differ by one syllable on the right, so windowed cliques
    are complete.  Vertices carry their ReducedWord and edges the Gamma vertex
    of their generator.

    Parameters
    ----------
    spec : GraphProductSpec
        The graph product.
    R : int
        Radius in syllable length.

    Returns
    -------
    graphcore.FiniteGraph
        Ball with origin 0 (the identity) and radius metadata.
    """
    if R < 0:
        raise ValueError("Radius must be non-negative.")
    for v, group in enumerate(spec.groups):
        if not group.is_finite and typing.cast(int, group.window) < R:
            raise interfaces.WindowOverflowError(
                f"Window {group.window} of vertex {spec.name(v)} is smaller "
                f"than radius {R}."
            )
    generators = [
        Syllable(VertexIndex(v), x)
        for v, group in enumerate(spec.groups)
        for x in group.nontrivial_elements()
    ]
    words = _bfs_words(spec, generators, R, lambda w: _check_window(spec, w))
    neighbor_steps = [
        Syllable(VertexIndex(v), x)
        for v, group in enumerate(spec.groups)
        for x in (
            group.nontrivial_elements()
            if group.is_finite
            else range(
                -2 * typing.cast(int, group.window),
                2 * typing.cast(int, group.window) + 1,
            )
        )
        if x != 0
    ]
    return _finish_ball(spec, words, neighbor_steps, R)


def cayley_ball(spec: GraphProductSpec, R: int) -> graphcore.FiniteGraph:
    """
    Ball of radius R around 1 in the word metric of the union of the S_u.

    Raises
    ------
    interfaces.WindowOverflowError
        If an element of the ball leaves the window of an infinite cyclic
        vertex group.
    """
    if R < 0:
        raise ValueError("Radius must be non-negative.")
    steps = [
        Syllable(VertexIndex(v), g)
        for v, group in enumerate(spec.groups)
        for g in group.symmetric_generators()
    ]

    def admit(w: ReducedWord) -> bool:
        if not _check_window(spec, w):
            raise interfaces.WindowOverflowError(
                f"Element {format_word(spec, w)} leaves the enumeration window."
            )
        return True

    words = _bfs_words(spec, steps, R, admit)
    return _finish_ball(spec, words, steps, R)


def join_factors(
    spec: GraphProductSpec, subset: collections.abc.Iterable[int]
) -> list[frozenset[VertexIndex]]:
    """Maximal join decomposition of the subgraph induced on ``subset``."""
    sub, keep = spec.gamma.induced_subgraph(subset)
    complement = nx.complement(sub.to_networkx())
    return sorted(
        (
            frozenset(keep[i] for i in component)
            for component in nx.connected_components(complement)
        ),
        key=sorted,
    )


def parabolic_has_polynomial_growth(
    spec: GraphProductSpec, subset: collections.abc.Iterable[int]
) -> bool:
    """
    Decide graphically whether the parabolic subgroup on ``subset`` avoids F2.

    Every join factor must be a single vertex or a non-adjacent pair of
    order-two vertices.
    """
    vertices = [spec.gamma.check_vertex(v) for v in subset]
    if not vertices:
        return True
    for factor in join_factors(spec, vertices):
        if len(factor) == 1:
            continue
        if len(factor) == 2 and all(  # noqa: PLR2004
            spec.groups[v].cardinality_class is CardinalityClass.TWO
            for v in factor
        ):
            continue
        return False
    return True


def polynomial_parabolics(
    spec: GraphProductSpec,
) -> list[frozenset[VertexIndex]]:
    """All non-empty vertex subsets whose parabolic has polynomial growth."""
    found = []
    vertices = list(spec.gamma.vertices)
    for size in range(1, len(vertices) + 1):
        for subset in itertools.combinations(vertices, size):
            if parabolic_has_polynomial_growth(spec, subset):
                found.append(frozenset(VertexIndex(v) for v in subset))
    return found


def maximal_polynomial_parabolics(
    spec: GraphProductSpec,
) -> list[frozenset[VertexIndex]]:
    subsets = polynomial_parabolics(spec)
    return [s for s in subsets if not any(s < t for t in subsets)]


def _first_match(
    spec: GraphProductSpec,
    patterns: collections.abc.Iterable[graphcore.LabeledPattern],
) -> typing.Optional[tuple[str, dict[VertexIndex, VertexIndex]]]:
    labels = spec.cardinality_classes()
    for pat in patterns:
        embedding = graphcore.find_induced(spec.gamma, labels, pat)
        if embedding is not None:
            return pat.name, embedding
    return None


def contains_F2_witness(
    spec: GraphProductSpec,
) -> typing.Optional[tuple[str, dict[VertexIndex, VertexIndex]]]:
    return _first_match(spec, graphcore.no_free_patterns())


def contains_F2(spec: GraphProductSpec) -> bool:  # noqa: N802
    """Graphical test for a free subgroup of rank two."""
    return contains_F2_witness(spec) is not None


def contains_F2xF2_witness(  # noqa: N802
    spec: GraphProductSpec,
) -> typing.Optional[tuple[str, dict[VertexIndex, VertexIndex]]]:
    """Name and embedding of the first join pattern found in Gamma."""
    free = graphcore.no_free_patterns()
    joins = [
        graphcore.join_patterns(p, q) for p, q in itertools.product(free, free)
    ]
    return _first_match(spec, joins)


def contains_F2xF2(spec: GraphProductSpec) -> bool:  # noqa: N802
    return contains_F2xF2_witness(spec) is not None


def lin_polynomially_hyperbolic(spec: GraphProductSpec) -> bool:
    """
    Whether the group admits a lin-gentle Lipschitz map to a hyperbolic space.

    With cyclic vertex groups this happens exactly when Gamma has no induced
    join of two free-group patterns.
    """
    return not contains_F2xF2(spec)


def cubical_dimension(spec: GraphProductSpec) -> int:
    """Largest clique of Gamma, the dimension of the biggest prism."""
    if len(spec) == 0:
        return 0
    return max(len(c) for c in nx.find_cliques(spec.gamma.to_networkx()))


def spec_to_document(spec: GraphProductSpec) -> dict[str, typing.Any]:
    return {
        "format": SPEC_FORMAT,
        "version": 1,
        "vertices": [
            {
                "name": spec.name(v),
                "group": group.descriptor,
                "generators": list(group.generators),
            }
            for v, group in enumerate(spec.groups)
        ],
        "edges": [
            [spec.name(u), spec.name(v)] for u, v in spec.gamma.edges()
        ],
    }


def spec_from_document(document: collections.abc.Mapping) -> GraphProductSpec:
    version = document.get("version", 1)
    if version != 1:
        raise NotImplementedError(
            f"Graph product document version {version} is not supported."
        )
    try:
        entries = document["vertices"]
    except KeyError as err:
        raise ValueError("Graph product document has no vertices.") from err
    names = [entry["name"] for entry in entries]
    groups = [
        CyclicGroup.parse(entry["group"], entry.get("generators"))
        for entry in entries
    ]
    edges = [tuple(edge) for edge in document.get("edges", [])]
    return GraphProductSpec.build(names, groups, edges)


def write_spec(
    spec: GraphProductSpec, path: typing.Union[str, os.PathLike]
) -> None:
    with open(path, "w", encoding="utf-8") as fout:
        json.dump(spec_to_document(spec), fout, indent=1)
        fout.write("\n")


def read_spec(path: typing.Union[str, os.PathLike]) -> GraphProductSpec:
    with open(path, encoding="utf-8") as fin:
        return spec_from_document(json.load(fin))
