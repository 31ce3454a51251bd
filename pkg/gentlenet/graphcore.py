"""Contains the finite graph substrate, BFS metrics and pattern search."""

import bisect
import collections
import collections.abc
import dataclasses
import itertools
import json
import logging
import os
import typing

import networkx as nx
import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from gentlenet import interfaces
from gentlenet.interfaces import CardinalityClass, Constraint, VertexIndex

log = logging.getLogger(__name__)

Edge = tuple[VertexIndex, VertexIndex]

GRAPH_FORMAT = "gentlenet-graph"
GRAPH_FORMAT_VERSION = 1


def edge_key(u: int, v: int) -> Edge:
    """Return the canonical (smaller id first) key of an undirected edge."""
    if u < v:
        return (VertexIndex(u), VertexIndex(v))
    return (VertexIndex(v), VertexIndex(u))


@dataclasses.dataclass(frozen=True, slots=True)
class FiniteGraph:
    """
    Immutable simple undirected graph on dense vertex ids 0..n-1.

    Use :meth:`FiniteGraph.build` rather than the raw constructor; it checks
    the invariants (no self-loops, no multi-edges, symmetric sorted adjacency)
    and builds the payload index.

    Attributes
    ----------
    adjacency : tuple[tuple[VertexIndex, ...], ...]
        Sorted neighbor tuple per vertex.
    payloads : tuple[typing.Any, ...]
        Arbitrary per-vertex payload (group elements, lamp states, ...).
    names : tuple[typing.Optional[str], ...]
        Optional display label per vertex.
    classes : tuple[typing.Optional[CardinalityClass], ...]
        Optional group-cardinality class per vertex, read by pattern search.
    edge_labels : collections.abc.Mapping[Edge, collections.abc.Hashable]
        Optional labels keyed by canonical edge.
    origin : typing.Optional[VertexIndex]
        Center of the truncation when the graph is a ball.
    radius : typing.Optional[int]
        Radius of the truncation when the graph is a ball.
    """

    adjacency: tuple[tuple[VertexIndex, ...], ...]
    payloads: tuple[typing.Any, ...]
    names: tuple[typing.Optional[str], ...]
    classes: tuple[typing.Optional[CardinalityClass], ...]
    edge_labels: collections.abc.Mapping[Edge, collections.abc.Hashable]
    origin: typing.Optional[VertexIndex] = None
    radius: typing.Optional[int] = None
    index: collections.abc.Mapping[collections.abc.Hashable, VertexIndex] = (
        dataclasses.field(default_factory=dict, repr=False, compare=False)
    )

    @classmethod
    def build(
        cls,
        n: int,
        edges: collections.abc.Iterable[tuple[int, int]],
        *,
        payloads: typing.Optional[collections.abc.Sequence[typing.Any]] = None,
        names: typing.Optional[
            collections.abc.Sequence[typing.Optional[str]]
        ] = None,
        classes: typing.Optional[
            collections.abc.Sequence[typing.Optional[CardinalityClass]]
        ] = None,
        edge_labels: typing.Optional[
            collections.abc.Mapping[tuple[int, int], collections.abc.Hashable]
        ] = None,
        origin: typing.Optional[int] = None,
        radius: typing.Optional[int] = None,
    ) -> "FiniteGraph":
        """
        Validate and construct a graph.

        Parameters
        ----------
        n : int
            Number of vertices.
        edges : collections.abc.Iterable[tuple[int, int]]
            Unordered vertex pairs; repeated pairs are merged.
        payloads, names, classes : optional sequences of length n
            Per-vertex data.
        edge_labels : optional mapping
            Labels keyed by vertex pairs in either orientation.
        origin, radius : optional int
            Ball metadata; both or neither must be given.

        Returns
        -------
        FiniteGraph
        """
        if n < 0:
            raise ValueError("Number of vertices must be non-negative.")
        if (origin is None) != (radius is None):
            raise ValueError("Ball origin and radius must be given together.")
        neighbor_sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise interfaces.UnknownVertexError((u, v))
            if u == v:
                raise ValueError(f"Self-loop at vertex {u} is not allowed.")
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        adjacency = tuple(
            tuple(VertexIndex(v) for v in sorted(nbrs))
            for nbrs in neighbor_sets
        )
        payload_tuple = tuple(payloads) if payloads is not None else (None,) * n
        name_tuple = tuple(names) if names is not None else (None,) * n
        class_tuple = tuple(classes) if classes is not None else (None,) * n
        for label, seq in (
            ("payloads", payload_tuple),
            ("names", name_tuple),
            ("classes", class_tuple),
        ):
            if len(seq) != n:
                raise ValueError(f"Length of {label} must equal {n}.")
        labels: dict[Edge, collections.abc.Hashable] = {}
        if edge_labels is not None:
            for (u, v), value in edge_labels.items():
                if v not in neighbor_sets[u]:
                    raise ValueError(f"Edge label given for non-edge {(u, v)}.")
                labels[edge_key(u, v)] = value
        index: dict[collections.abc.Hashable, VertexIndex] = {}
        for i, payload in enumerate(payload_tuple):
            if payload is not None and isinstance(
                payload, collections.abc.Hashable
            ):
                index.setdefault(payload, VertexIndex(i))
        if origin is not None and not 0 <= origin < n:
            raise interfaces.UnknownVertexError(origin)
        return cls(
            adjacency=adjacency,
            payloads=payload_tuple,
            names=name_tuple,
            classes=class_tuple,
            edge_labels=labels,
            origin=VertexIndex(origin) if origin is not None else None,
            radius=radius,
            index=index,
        )

    @classmethod
    def from_networkx(
        cls,
        graph: nx.Graph,
        *,
        class_attr: str = "class",
        label_attr: str = "label",
    ) -> "FiniteGraph":
        """
        Convert a networkx graph; node keys become payloads and names.

        Vertex ids follow the node iteration order of ``graph``.
        """
        nodes = list(graph.nodes)
        position = {node: i for i, node in enumerate(nodes)}
        classes = []
        for node in nodes:
            value = graph.nodes[node].get(class_attr)
            if isinstance(value, str):
                value = CardinalityClass.parse(value)
            classes.append(value)
        edge_labels = {
            (position[u], position[v]): data[label_attr]
            for u, v, data in graph.edges(data=True)
            if label_attr in data
        }
        return cls.build(
            len(nodes),
            ((position[u], position[v]) for u, v in graph.edges),
            payloads=nodes,
            names=[str(node) for node in nodes],
            classes=classes,
            edge_labels=edge_labels,
        )

    def __len__(self) -> int:
        return len(self.adjacency)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, (int, np.integer)) and 0 <= v < len(self)

    @property
    def vertices(self) -> range:
        return range(len(self.adjacency))

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def check_vertex(self, v: int) -> VertexIndex:
        if v not in self:
            raise interfaces.UnknownVertexError(v)
        return VertexIndex(int(v))

    def neighbors(self, v: int) -> tuple[VertexIndex, ...]:
        return self.adjacency[self.check_vertex(v)]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = bisect.bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def edges(self) -> collections.abc.Iterator[Edge]:
        """Iterate canonical edges in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (VertexIndex(u), v)

    def edge_label(
        self, u: int, v: int
    ) -> typing.Optional[collections.abc.Hashable]:
        return self.edge_labels.get(edge_key(u, v))

    def vertex(self, payload: collections.abc.Hashable) -> VertexIndex:
        """Look up the vertex carrying ``payload``."""
        try:
            return self.index[payload]
        except KeyError as err:
            raise interfaces.UnknownVertexError(payload) from err

    def name(self, v: int) -> str:
        label = self.names[self.check_vertex(v)]
        return label if label is not None else str(v)

    def depths(self) -> tuple[int, ...]:
        """Distances from the ball origin; requires ball metadata."""
        if self.origin is None:
            raise ValueError("Graph carries no ball metadata.")
        dist = bfs_distances(self, self.origin)
        return tuple(dist.get(VertexIndex(v), -1) for v in self.vertices)

    def csr(self) -> scipy.sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        n = len(self)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum([len(nbrs) for nbrs in self.adjacency], out=indptr[1:])
        indices = np.fromiter(
            itertools.chain.from_iterable(self.adjacency),
            dtype=np.int64,
            count=int(indptr[-1]),
        )
        data = np.ones(len(indices), dtype=np.int8)
        return scipy.sparse.csr_matrix((data, indices, indptr), shape=(n, n))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for v in self.vertices:
            graph.add_node(
                v,
                payload=self.payloads[v],
                name=self.names[v],
                cls=self.classes[v],
            )
        for u, v in self.edges():
            label = self.edge_labels.get((u, v))
            if label is None:
                graph.add_edge(u, v)
            else:
                graph.add_edge(u, v, label=label)
        return graph

    def induced_subgraph(
        self, vertices: collections.abc.Iterable[int]
    ) -> tuple["FiniteGraph", tuple[VertexIndex, ...]]:
        """
        Return the induced subgraph and the host id of each new vertex.

        New ids follow increasing host id.
        """
        keep = tuple(sorted({self.check_vertex(v) for v in vertices}))
        position = {v: i for i, v in enumerate(keep)}
        edges = [
            (position[u], position[w])
            for u in keep
            for w in self.adjacency[u]
            if u < w and w in position
        ]
        labels = {
            (position[u], position[w]): label
            for (u, w), label in self.edge_labels.items()
            if u in position and w in position
        }
        sub = FiniteGraph.build(
            len(keep),
            edges,
            payloads=[self.payloads[v] for v in keep],
            names=[self.names[v] for v in keep],
            classes=[self.classes[v] for v in keep],
            edge_labels=labels,
        )
        return sub, keep

    def with_classes(
        self,
        classes: collections.abc.Sequence[typing.Optional[CardinalityClass]],
    ) -> "FiniteGraph":
        if len(classes) != len(self):
            raise ValueError(f"Length of classes must equal {len(self)}.")
        return dataclasses.replace(self, classes=tuple(classes))


@dataclasses.dataclass(frozen=True, slots=True)
class BallWithRadii:
    """
    Induced ball around a center with exact distances.

    ``graph`` uses its own dense ids; ``host_ids`` maps them back.
    """

    graph: FiniteGraph
    center: VertexIndex
    radius: int
    dist: tuple[int, ...]
    host_ids: tuple[VertexIndex, ...]

    def __post_init__(self) -> None:
        if self.dist[self.center] != 0:
            raise ValueError("Ball center must be at distance 0.")
        if any(d > self.radius for d in self.dist):
            raise ValueError("Ball contains a vertex beyond its radius.")

    @property
    def boundary(self) -> frozenset[VertexIndex]:
        return frozenset(
            VertexIndex(v) for v, d in enumerate(self.dist) if d == self.radius
        )


@dataclasses.dataclass(frozen=True, slots=True)
class LabeledPattern:
    name: str
    graph: FiniteGraph
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        if len(self.constraints) != len(self.graph):
            raise ValueError(
                f"Pattern {self.name} needs one constraint per vertex."
            )


def bfs_distances(
    g: FiniteGraph,
    source: int,
    *,
    limit: typing.Optional[int] = None,
    blocked: collections.abc.Container[int] = frozenset(),
) -> dict[VertexIndex, int]:
    """
    Breadth-first distances from ``source``.

    Parameters
    ----------
    g : FiniteGraph
        Host graph.
    source : int
        Start vertex; must not be blocked.
    limit : typing.Optional[int]
        Stop expanding beyond this depth.
    blocked : collections.abc.Container[int]
        Vertices the search may not enter.

    Returns
    -------
    dict[VertexIndex, int]
        Distance of every reached vertex.
    """
    start = g.check_vertex(source)
    dist = {start: 0}
    queue = collections.deque([start])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if limit is not None and du >= limit:
            continue
        for w in g.adjacency[u]:
            if w not in dist and w not in blocked:
                dist[w] = du + 1
                queue.append(w)
    return dist


def bfs_ball(g: FiniteGraph, p: int, R: int) -> BallWithRadii:
    """
    Induced subgraph on the vertices within distance R of p.

    Parameters
    ----------
    g : FiniteGraph
        Host graph.
    p : int
        Center vertex.
    R : int
        Radius.

    Returns
    -------
    BallWithRadii
    """
    if R < 0:
        raise ValueError("Radius must be non-negative.")
    dist = bfs_distances(g, p, limit=R)
    sub, keep = g.induced_subgraph(dist)
    center = VertexIndex(keep.index(VertexIndex(p)))
    sub = dataclasses.replace(sub, origin=center, radius=R)
    return BallWithRadii(
        graph=sub,
        center=center,
        radius=R,
        dist=tuple(dist[v] for v in keep),
        host_ids=keep,
    )


def sphere(g: FiniteGraph, p: int, R: int) -> frozenset[VertexIndex]:
    return frozenset(
        v for v, d in bfs_distances(g, p, limit=R).items() if d == R
    )


def distance(g: FiniteGraph, x: int, y: int) -> interfaces.Distance:
    """Shortest-path edge count, ``math.inf`` when disconnected."""
    target = g.check_vertex(y)
    start = g.check_vertex(x)
    if start == target:
        return 0
    dist = {start: 0}
    queue = collections.deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in dist:
                if w == target:
                    return dist[u] + 1
                dist[w] = dist[u] + 1
                queue.append(w)
    return interfaces.INFINITY


def distances_from(
    g: FiniteGraph,
    sources: collections.abc.Sequence[int],
    *,
    limit: typing.Optional[int] = None,
) -> np.ndarray:
    """
    Distance rows from several sources.

    Returns an integer array of shape (len(sources), n) with -1 for vertices
    that are unreachable or beyond ``limit``.
    """
    for v in sources:
        g.check_vertex(v)
    if len(sources) == 0 or len(g) == 0:
        return np.zeros((len(sources), len(g)), dtype=np.int64)
    rows = scipy.sparse.csgraph.dijkstra(
        g.csr(),
        directed=False,
        indices=np.asarray(sources, dtype=np.int64),
        unweighted=True,
        limit=np.inf if limit is None else limit + 0.5,
    )
    rows = np.atleast_2d(rows)
    out = np.full(rows.shape, -1, dtype=np.int64)
    finite = np.isfinite(rows)
    out[finite] = rows[finite].astype(np.int64)
    return out


def distance_matrix(g: FiniteGraph) -> np.ndarray:
    """All-pairs BFS distances; -1 marks disconnected pairs."""
    return distances_from(g, list(g.vertices))


def is_connected(g: FiniteGraph) -> bool:
    if len(g) == 0:
        return True
    n_components, _ = scipy.sparse.csgraph.connected_components(
        g.csr(), directed=False
    )
    return n_components == 1


def induces_connected(
    g: FiniteGraph, vertices: collections.abc.Collection[int]
) -> bool:
    """Check whether a non-empty vertex set induces a connected subgraph."""
    members = {g.check_vertex(v) for v in vertices}
    if not members:
        return False
    start = next(iter(members))
    seen = {start}
    queue = collections.deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w in members and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(members)


def eccentricity(g: FiniteGraph, v: int) -> interfaces.Distance:
    far = bfs_distances(g, v)
    if len(far) < len(g):
        return interfaces.INFINITY
    return max(far.values())


def diameter(g: FiniteGraph) -> interfaces.Distance:
    if len(g) == 0:
        return 0
    matrix = distance_matrix(g)
    if (matrix < 0).any():
        return interfaces.INFINITY
    return int(matrix.max())


def disjoint_union(a: FiniteGraph, b: FiniteGraph) -> FiniteGraph:
    """Place b after a; b's ids are shifted by len(a)."""
    shift = len(a)
    edges = list(a.edges()) + [(u + shift, v + shift) for u, v in b.edges()]
    return FiniteGraph.build(
        len(a) + len(b),
        edges,
        names=a.names + b.names,
        classes=a.classes + b.classes,
    )


def join(a: FiniteGraph, b: FiniteGraph) -> FiniteGraph:
    """Disjoint union of a and b plus every edge between them."""
    shift = len(a)
    union = disjoint_union(a, b)
    cross = [(u, v + shift) for u in a.vertices for v in b.vertices]
    return FiniteGraph.build(
        len(union),
        itertools.chain(union.edges(), cross),
        names=union.names,
        classes=union.classes,
    )


def rooted_binary_tree(depth: int) -> FiniteGraph:
    """
    Ball of radius ``depth`` around the root of the rooted binary tree.

    Vertices carry their address bit string as payload; the root is ``""``.
    """
    if depth < 0:
        raise ValueError("Depth must be non-negative.")
    words = [
        "".join(bits)
        for n in range(depth + 1)
        for bits in itertools.product("01", repeat=n)
    ]
    position = {w: i for i, w in enumerate(words)}
    edges = [(position[w[:-1]], position[w]) for w in words if w]
    return FiniteGraph.build(
        len(words),
        edges,
        payloads=words,
        names=[w or "o" for w in words],
        origin=0,
        radius=depth,
    )


def _search_order(pat: FiniteGraph) -> list[int]:
    remaining = set(pat.vertices)
    order: list[int] = []
    while remaining:
        best = max(
            remaining,
            key=lambda u: (
                sum(1 for w in pat.adjacency[u] if w in order),
                len(pat.adjacency[u]),
                -u,
            ),
        )
        order.append(best)
        remaining.remove(best)
    return order


def find_induced(
    g: FiniteGraph,
    labels: typing.Optional[
        collections.abc.Sequence[typing.Optional[CardinalityClass]]
    ],
    pat: LabeledPattern,
) -> typing.Optional[dict[VertexIndex, VertexIndex]]:
    """
    Search for an induced, label-consistent copy of a pattern.

    The search is exhaustive backtracking with degree and label pruning, so a
    None answer certifies that no embedding exists.

    Parameters
    ----------
    g : FiniteGraph
        Host graph.
    labels : typing.Optional[collections.abc.Sequence[CardinalityClass]]
        Cardinality class per host vertex; defaults to ``g.classes``.
    pat : LabeledPattern
        Pattern to embed.

    Returns
    -------
    typing.Optional[dict[VertexIndex, VertexIndex]]
        Map from pattern vertices to host vertices, or None.
    """
    host_labels = tuple(labels) if labels is not None else g.classes
    if len(host_labels) != len(g):
        raise ValueError("Labels must be defined on every host vertex.")
    k = len(pat.graph)
    if k == 0:
        return {}
    if k > len(g):
        return None
    host_sets = [frozenset(nbrs) for nbrs in g.adjacency]
    pat_sets = [frozenset(nbrs) for nbrs in pat.graph.adjacency]
    candidates = [
        [
            v
            for v in g.vertices
            if pat.constraints[u].admits(host_labels[v])
            and len(host_sets[v]) >= len(pat_sets[u])
        ]
        for u in pat.graph.vertices
    ]
    order = _search_order(pat.graph)
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == k:
            return True
        u = order[i]
        for v in candidates[u]:
            if v in used:
                continue
            if all(
                (assignment[w] in host_sets[v]) == (w in pat_sets[u])
                for w in order[:i]
            ):
                assignment[u] = v
                used.add(v)
                if extend(i + 1):
                    return True
                del assignment[u]
                used.discard(v)
        return False

    if not extend(0):
        return None
    return {
        VertexIndex(u): VertexIndex(v) for u, v in sorted(assignment.items())
    }


def _pattern(
    name: str,
    n: int,
    edges: collections.abc.Iterable[tuple[int, int]],
    constraints: collections.abc.Sequence[Constraint],
) -> LabeledPattern:
    return LabeledPattern(
        name=name,
        graph=FiniteGraph.build(n, edges),
        constraints=tuple(constraints),
    )


def join_patterns(p: LabeledPattern, q: LabeledPattern) -> LabeledPattern:
    return LabeledPattern(
        name=f"{p.name}*{q.name}",
        graph=join(p.graph, q.graph),
        constraints=p.constraints + q.constraints,
    )


def no_free_patterns() -> list[LabeledPattern]:
    """The three minimal configurations forcing a free subgroup."""
    two = Constraint.EXACTLY_TWO
    return [
        _pattern(
            "NF1", 2, [], [Constraint.NONTRIVIAL, Constraint.AT_LEAST_THREE]
        ),
        _pattern("NF2", 3, [], [two, two, two]),
        _pattern("NF3", 3, [(1, 2)], [two, two, two]),
    ]


def builtin_patterns() -> list[LabeledPattern]:
    """
    Return the fixed pattern library.

    The library holds NF1, NF2 and NF3, the nine ordered joins NFi*NFj, and
    the unlabeled graphs C4, K33, K33+ and K33++.
    """
    free = no_free_patterns()
    joins = [join_patterns(p, q) for p, q in itertools.product(free, free)]
    any_ = Constraint.UNCONSTRAINED
    triple = FiniteGraph.build(3, [])
    point_edge = FiniteGraph.build(3, [(1, 2)])
    unlabeled = [
        _pattern("C4", 4, [(0, 1), (1, 2), (2, 3), (3, 0)], [any_] * 4),
        LabeledPattern("K33", join(triple, triple), (any_,) * 6),
        LabeledPattern("K33+", join(triple, point_edge), (any_,) * 6),
        LabeledPattern("K33++", join(point_edge, point_edge), (any_,) * 6),
    ]
    return free + joins + unlabeled


def pattern(name: str) -> LabeledPattern:
    """Look up a builtin pattern by name."""
    for candidate in builtin_patterns():
        if candidate.name == name:
            return candidate
    raise KeyError(f"Unknown pattern {name!r}.")


def graph_to_document(
    g: FiniteGraph,
    *,
    edge_annotations: typing.Optional[
        collections.abc.Mapping[str, collections.abc.Mapping[Edge, int]]
    ] = None,
) -> dict[str, typing.Any]:
    """Encode a graph in the exchange format."""
    vertices = []
    for v in g.vertices:
        entry: dict[str, typing.Any] = {"id": v}
        if g.names[v] is not None:
            entry["label"] = g.names[v]
        if g.classes[v] is not None:
            entry["class"] = g.classes[v].value
        vertices.append(entry)
    document: dict[str, typing.Any] = {
        "format": GRAPH_FORMAT,
        "version": GRAPH_FORMAT_VERSION,
        "vertices": vertices,
        "edges": [[u, v] for u, v in g.edges()],
    }
    labels = [
        [u, v, label]
        for (u, v), label in sorted(g.edge_labels.items())
        if isinstance(label, (str, int))
    ]
    if labels:
        document["edge_labels"] = labels
    if g.origin is not None:
        document["origin"] = g.origin
        document["radius"] = g.radius
    if edge_annotations:
        document["edge_annotations"] = {
            key: [[u, v, value] for (u, v), value in sorted(values.items())]
            for key, values in edge_annotations.items()
        }
    return document


def graph_from_document(document: collections.abc.Mapping) -> FiniteGraph:
    """Decode a graph from the exchange format."""
    version = document.get("version", GRAPH_FORMAT_VERSION)
    if version != GRAPH_FORMAT_VERSION:
        raise NotImplementedError(
            f"Graph document version {version} is not supported."
        )
    try:
        entries = document["vertices"]
        edges = document["edges"]
    except KeyError as err:
        raise ValueError(f"Graph document is missing {err}.") from err
    position = {entry["id"]: i for i, entry in enumerate(entries)}
    if len(position) != len(entries):
        raise ValueError("Graph document repeats a vertex id.")
    try:
        edge_list = [(position[u], position[v]) for u, v in edges]
        labels = {
            (position[u], position[v]): label
            for u, v, label in document.get("edge_labels", [])
        }
    except KeyError as err:
        raise interfaces.UnknownVertexError(err.args[0]) from err
    classes = [
        CardinalityClass.parse(entry["class"]) if "class" in entry else None
        for entry in entries
    ]
    names = [entry.get("label") for entry in entries]
    origin = document.get("origin")
    return FiniteGraph.build(
        len(entries),
        edge_list,
        payloads=[entry["id"] for entry in entries],
        names=names,
        classes=classes,
        edge_labels=labels,
        origin=position[origin] if origin is not None else None,
        radius=document.get("radius") if origin is not None else None,
    )


def write_graph(
    g: FiniteGraph,
    path: typing.Union[str, os.PathLike],
    *,
    edge_annotations: typing.Optional[
        collections.abc.Mapping[str, collections.abc.Mapping[Edge, int]]
    ] = None,
) -> None:
    document = graph_to_document(g, edge_annotations=edge_annotations)
    with open(path, "w", encoding="utf-8") as fout:
        json.dump(document, fout, indent=1, sort_keys=True)
        fout.write("\n")
    log.debug("Wrote graph with %s vertices to %s", len(g), path)


def read_graph(path: typing.Union[str, os.PathLike]) -> FiniteGraph:
    with open(path, encoding="utf-8") as fin:
        document = json.load(fin)
    return graph_from_document(document)
