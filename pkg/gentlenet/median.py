"""Contains hyperplane machinery for median and quasi-median graphs."""

import collections.abc
import dataclasses
import itertools
import logging
import os
import typing

import numpy as np
import scipy.cluster.hierarchy
import scipy.sparse
import scipy.sparse.csgraph

from gentlenet import graphcore, interfaces
from gentlenet.graphcore import Edge, FiniteGraph
from gentlenet.interfaces import HostMode, HyperplaneIndex, VertexIndex

log = logging.getLogger(__name__)

Square = tuple[VertexIndex, VertexIndex, VertexIndex, VertexIndex]


@dataclasses.dataclass(frozen=True, slots=True)
class HyperplaneDecomposition:
    """
    Partition of a host's edges into hyperplane classes.

    Attributes
    ----------
    host : FiniteGraph
        The decomposed graph.
    mode : HostMode
        Median (squares only) or quasi-median (squares and triangles).
    edge_class : collections.abc.Mapping[Edge, HyperplaneIndex]
        Class of every canonical edge.
    classes : tuple[tuple[Edge, ...], ...]
        Member edges per class, classes ordered by their least edge.
    interior : tuple[bool, ...]
        False for classes with an edge touching the boundary sphere of a ball
        host; always True on hosts without ball metadata.
    squares : tuple[Square, ...]
        Induced 4-cycles (u, v, x, w) found while building the classes.
    """

    host: FiniteGraph
    mode: HostMode
    edge_class: collections.abc.Mapping[Edge, HyperplaneIndex]
    classes: tuple[tuple[Edge, ...], ...]
    interior: tuple[bool, ...]
    squares: tuple[Square, ...]
    _cache: dict = dataclasses.field(
        default_factory=dict, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, u: int, v: int) -> HyperplaneIndex:
        try:
            return self.edge_class[graphcore.edge_key(u, v)]
        except KeyError as err:
            raise ValueError(f"{(u, v)} is not an edge of the host.") from err

    def check_class(self, J: int) -> HyperplaneIndex:
        if not 0 <= J < len(self.classes):
            raise KeyError(f"Unknown hyperplane class {J}.")
        return HyperplaneIndex(J)

    def sector_labels(self, J: int) -> np.ndarray:
        """Sector index per host vertex after deleting the edges of J."""
        J = self.check_class(J)
        key = ("sector", J)
        if key not in self._cache:
            self._cache[key] = _sector_labels(self, J)
        return self._cache[key]

    def label_table(self) -> np.ndarray:
        """Array of shape (classes, vertices) holding every sector label."""
        if "table" not in self._cache:
            n = len(self.host)
            table = np.empty((len(self.classes), n), dtype=np.int32)
            for J in range(len(self.classes)):
                table[J] = self.sector_labels(J)
            self._cache["table"] = table
        return self._cache["table"]

    def transverse_pairs(self) -> frozenset[frozenset[HyperplaneIndex]]:
        if "transverse" not in self._cache:
            pairs = set()
            for u, v, _, w in self.squares:
                first = self.class_of(u, v)
                second = self.class_of(u, w)
                if first != second:
                    pairs.add(frozenset((first, second)))
            self._cache["transverse"] = frozenset(pairs)
        return self._cache["transverse"]

    def interior_mask(self) -> np.ndarray:
        return np.asarray(self.interior, dtype=bool)


@dataclasses.dataclass(frozen=True, slots=True)
class SectorPartition:
    hyperplane: HyperplaneIndex
    components: tuple[frozenset[VertexIndex], ...]


@dataclasses.dataclass(frozen=True, slots=True)
class FlatRectangle:
    """
    Grid [0, a] x [0, b] mapped into a host.

    ``embedding[(s, t)]`` is the host vertex of grid point (s, t).
    """

    a: int
    b: int
    embedding: collections.abc.Mapping[tuple[int, int], VertexIndex]

    def row(self, t: int) -> tuple[VertexIndex, ...]:
        """Horizontal line [0, a] x {t}."""
        return tuple(self.embedding[(s, t)] for s in range(self.a + 1))

    def column(self, s: int) -> tuple[VertexIndex, ...]:
        """Vertical line {s} x [0, b]."""
        return tuple(self.embedding[(s, t)] for t in range(self.b + 1))

    @property
    def vertices(self) -> frozenset[VertexIndex]:
        return frozenset(self.embedding.values())

    def transposed(self) -> "FlatRectangle":
        return FlatRectangle(
            a=self.b,
            b=self.a,
            embedding={(t, s): v for (s, t), v in self.embedding.items()},
        )


@dataclasses.dataclass(frozen=True, slots=True)
class Staircase:
    a: int
    b: int
    corner: VertexIndex
    broken_path: tuple[VertexIndex, ...]
    embedding: collections.abc.Mapping[tuple[int, int], VertexIndex]


@dataclasses.dataclass(frozen=True, slots=True)
class IdentityReport:
    pairs_checked: int
    violations: tuple[tuple[VertexIndex, VertexIndex, int, int], ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def _host(g: typing.Union[FiniteGraph, graphcore.BallWithRadii]) -> FiniteGraph:
    if isinstance(g, graphcore.BallWithRadii):
        return g.graph
    return g


def _induced_squares(g: FiniteGraph) -> list[Square]:
    sets = [frozenset(nbrs) for nbrs in g.adjacency]
    squares = []
    for u in g.vertices:
        nbrs = [v for v in g.adjacency[u] if v > u]
        for v, w in itertools.combinations(nbrs, 2):
            if w in sets[v]:
                continue
            for x in sets[v] & sets[w]:
                if x > u and x not in sets[u]:
                    squares.append(
                        (VertexIndex(u), VertexIndex(v), x, VertexIndex(w))
                    )
    return squares


def hyperplanes(
    g: typing.Union[FiniteGraph, graphcore.BallWithRadii],
    mode: HostMode = HostMode.MEDIAN,
) -> HyperplaneDecomposition:
    """
    Compute hyperplane classes by union-find over edges.

    Opposite edges of induced 4-cycles are merged; in quasi-median mode, edges
    sharing a triangle are merged as well.  When the host carries ball
    metadata, classes touching the boundary sphere are flagged non-interior.

    Parameters
    ----------
    g : FiniteGraph | graphcore.BallWithRadii
        Connected host.
    mode : HostMode
        Generating relations to use.

    Returns
    -------
    HyperplaneDecomposition
    """
    host = _host(g)
    if not graphcore.is_connected(host):
        raise interfaces.PreconditionError("Host graph must be connected.")
    edges = list(host.edges())
    disjoint = scipy.cluster.hierarchy.DisjointSet(edges)
    squares = _induced_squares(host)
    for u, v, x, w in squares:
        disjoint.merge(graphcore.edge_key(u, v), graphcore.edge_key(w, x))
        disjoint.merge(graphcore.edge_key(u, w), graphcore.edge_key(v, x))
    if mode is HostMode.QUASI_MEDIAN:
        sets = [frozenset(nbrs) for nbrs in host.adjacency]
        for u, v in edges:
            for w in sets[u] & sets[v]:
                disjoint.merge((u, v), graphcore.edge_key(u, w))
    groups: dict[Edge, list[Edge]] = {}
    for edge in edges:
        groups.setdefault(disjoint[edge], []).append(edge)
    classes = tuple(
        tuple(members) for members in sorted(groups.values(), key=min)
    )
    edge_class = {
        edge: HyperplaneIndex(J)
        for J, members in enumerate(classes)
        for edge in members
    }
    if host.origin is not None:
        depths = host.depths()
        boundary = {v for v in host.vertices if depths[v] == host.radius}
        interior = tuple(
            not any(u in boundary or v in boundary for u, v in members)
            for members in classes
        )
    else:
        interior = (True,) * len(classes)
    log.debug(
        "%s edges in %s classes (%s interior), %s squares",
        len(edges),
        len(classes),
        sum(interior),
        len(squares),
    )
    return HyperplaneDecomposition(
        host=host,
        mode=mode,
        edge_class=edge_class,
        classes=classes,
        interior=interior,
        squares=tuple(squares),
    )


def _edge_arrays(dec: HyperplaneDecomposition) -> tuple[np.ndarray, ...]:
    if "edges" not in dec._cache:
        items = sorted(dec.edge_class.items())
        us = np.fromiter((e[0] for e, _ in items), dtype=np.int64)
        vs = np.fromiter((e[1] for e, _ in items), dtype=np.int64)
        js = np.fromiter((j for _, j in items), dtype=np.int64)
        dec._cache["edges"] = (us, vs, js)
    return dec._cache["edges"]


def _sector_labels(dec: HyperplaneDecomposition, J: int) -> np.ndarray:
    us, vs, js = _edge_arrays(dec)
    keep = js != J
    n = len(dec.host)
    matrix = scipy.sparse.coo_matrix(
        (np.ones(int(keep.sum()), dtype=np.int8), (us[keep], vs[keep])),
        shape=(n, n),
    ).tocsr()
    _, labels = scipy.sparse.csgraph.connected_components(
        matrix, directed=False
    )
    uniq, first = np.unique(labels, return_index=True)
    rank = np.empty(len(uniq), dtype=np.int32)
    rank[np.argsort(first)] = np.arange(len(uniq), dtype=np.int32)
    return rank[np.searchsorted(uniq, labels)]


def sectors(dec: HyperplaneDecomposition, J: int) -> SectorPartition:
    """Connected components of the host after deleting the edges of J."""
    labels = dec.sector_labels(J)
    components = tuple(
        frozenset(VertexIndex(int(v)) for v in np.flatnonzero(labels == k))
        for k in range(int(labels.max()) + 1)
    )
    return SectorPartition(hyperplane=HyperplaneIndex(J), components=components)


def separating_hyperplanes(
    dec: HyperplaneDecomposition, x: int, y: int
) -> frozenset[HyperplaneIndex]:
    """Classes whose sector of x differs from the sector of y."""
    host = dec.host
    x, y = host.check_vertex(x), host.check_vertex(y)
    table = dec.label_table()
    separating = np.flatnonzero(table[:, x] != table[:, y])
    return frozenset(HyperplaneIndex(int(J)) for J in separating)


def _check_path(
    g: FiniteGraph, path: collections.abc.Sequence[int]
) -> tuple[VertexIndex, ...]:
    if len(path) == 0:
        raise ValueError("Path must contain at least one vertex.")
    checked = tuple(g.check_vertex(v) for v in path)
    for u, v in itertools.pairwise(checked):
        if not g.has_edge(u, v):
            raise ValueError(f"Path vertices {u} and {v} are not adjacent.")
    return checked


def is_geodesic(
    dec: HyperplaneDecomposition, path: collections.abc.Sequence[int]
) -> bool:
    """
    Check that a path crosses every hyperplane class at most once.

    The answer is compared with the BFS distance between the endpoints and a
    disagreement, which can only come from truncation, is logged.
    """
    checked = _check_path(dec.host, path)
    crossed = [dec.class_of(u, v) for u, v in itertools.pairwise(checked)]
    result = len(set(crossed)) == len(crossed)
    metric = graphcore.distance(dec.host, checked[0], checked[-1]) == len(
        crossed
    )
    if result != metric:
        log.warning(
            "Hyperplane count and BFS distance disagree on path %s", checked
        )
    return result


def median_vertex(
    g: FiniteGraph, x: int, y: int, z: int
) -> typing.Optional[VertexIndex]:
    """The unique vertex between all three pairs, or None."""
    rows = graphcore.distances_from(g, [x, y, z])
    if (rows[:, [x, y, z]] < 0).any():
        raise interfaces.PreconditionError("Host graph must be connected.")
    dxy, dyz, dxz = rows[0, y], rows[1, z], rows[0, z]
    mask = (
        (rows[0] + rows[1] == dxy)
        & (rows[1] + rows[2] == dyz)
        & (rows[0] + rows[2] == dxz)
    )
    found = np.flatnonzero(mask)
    if len(found) != 1:
        return None
    return VertexIndex(int(found[0]))


def median_triangle(
    g: FiniteGraph, x: int, y: int, z: int
) -> tuple[VertexIndex, VertexIndex, VertexIndex]:
    """
    Smallest median triangle of (x, y, z).

    Among triples (y1, y2, y3) with d(xi, xj) = d(xi, yi) + d(yi, yj) +
    d(yj, xj) for all pairs, return the one of least perimeter.

    Raises
    ------
    interfaces.NonUniqueError
        When several triples reach the least perimeter, which signals a host
        that is not quasi-median or a truncation artifact.
    """
    points = (x, y, z)
    rows = graphcore.distances_from(g, points)
    d = [[int(rows[i, points[j]]) for j in range(3)] for i in range(3)]
    if min(min(r) for r in d) < 0:
        raise interfaces.PreconditionError("Host graph must be connected.")

    def corner(i: int) -> np.ndarray:
        j, k = [m for m in range(3) if m != i]
        return np.flatnonzero(
            (rows[i] + rows[j] == d[i][j]) & (rows[i] + rows[k] == d[i][k])
        )

    candidates = [corner(i) for i in range(3)]
    pool = sorted(set(itertools.chain.from_iterable(candidates)))
    at = {int(v): i for i, v in enumerate(pool)}
    inner = graphcore.distances_from(g, pool)
    best: list[tuple[int, int, int]] = []
    best_perimeter = -1
    for y1 in candidates[0]:
        r1 = inner[at[int(y1)]]
        for y2 in candidates[1]:
            d12 = int(r1[y2])
            if rows[0, y1] + d12 + rows[1, y2] != d[0][1]:
                continue
            r2 = inner[at[int(y2)]]
            for y3 in candidates[2]:
                d13, d23 = int(r1[y3]), int(r2[y3])
                if rows[0, y1] + d13 + rows[2, y3] != d[0][2]:
                    continue
                if rows[1, y2] + d23 + rows[2, y3] != d[1][2]:
                    continue
                perimeter = d12 + d13 + d23
                if best_perimeter < 0 or perimeter < best_perimeter:
                    best_perimeter = perimeter
                    best = [(int(y1), int(y2), int(y3))]
                elif perimeter == best_perimeter:
                    best.append((int(y1), int(y2), int(y3)))
    if len(best) != 1:
        raise interfaces.NonUniqueError(
            f"{len(best)} median triangles of perimeter {best_perimeter}.",
            best,
        )
    y1, y2, y3 = best[0]
    return VertexIndex(y1), VertexIndex(y2), VertexIndex(y3)


def interval(g: FiniteGraph, x: int, y: int) -> frozenset[VertexIndex]:
    """Vertices on some geodesic from x to y."""
    rows = graphcore.distances_from(g, [x, y])
    dxy = rows[0, y]
    if dxy < 0:
        raise interfaces.PreconditionError(f"{x} and {y} are disconnected.")
    return frozenset(
        VertexIndex(int(v))
        for v in np.flatnonzero((rows[0] >= 0) & (rows[0] + rows[1] == dxy))
    )


def gate(
    g: FiniteGraph, x: int, Y: collections.abc.Collection[int]
) -> typing.Optional[VertexIndex]:
    """
    The gate of x in Y, or None when Y is not gated from x.

    Parameters
    ----------
    g : FiniteGraph
        Host graph.
    x : int
        Vertex to project.
    Y : collections.abc.Collection[int]
        Vertex set inducing a connected subgraph.
    """
    if not graphcore.induces_connected(g, Y):
        raise interfaces.PreconditionError(
            "Gate target must induce a connected subgraph."
        )
    members = np.fromiter(sorted(set(Y)), dtype=np.int64)
    dx = graphcore.distances_from(g, [x])[0]
    reach = dx[members]
    if (reach < 0).any():
        return None
    nearest = members[reach == reach.min()]
    if len(nearest) != 1:
        return None
    y = int(nearest[0])
    dy = graphcore.distances_from(g, [y])[0]
    if np.array_equal(dx[members], dx[y] + dy[members]):
        return VertexIndex(y)
    return None


def is_gated(g: FiniteGraph, Y: collections.abc.Collection[int]) -> bool:
    return all(gate(g, x, Y) is not None for x in g.vertices)


def pair_signature(
    dec: HyperplaneDecomposition, a: int, b: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Separating classes of (a, b) with the sector of a in each."""
    table = dec.label_table()
    separating = np.flatnonzero(table[:, a] != table[:, b])
    return tuple(separating.tolist()), tuple(table[separating, a].tolist())


def parallel_pairs(
    dec: HyperplaneDecomposition, a: int, b: int, x: int, y: int
) -> bool:
    """
    Check whether (a, b) and (x, y) are parallel.

    A sector contains a but not b exactly when it contains x but not y.
    """
    for v in (a, b, x, y):
        dec.host.check_vertex(v)
    return pair_signature(dec, a, b) == pair_signature(dec, x, y)


def transverse(dec: HyperplaneDecomposition, J: int, K: int) -> bool:
    """Some induced square has one edge in J and an adjacent edge in K."""
    pair = frozenset((dec.check_class(J), dec.check_class(K)))
    return pair in dec.transverse_pairs()


def transverse_collections(
    dec: HyperplaneDecomposition,
    first: collections.abc.Collection[int],
    second: collections.abc.Collection[int],
) -> bool:
    """Disjoint collections whose classes are pairwise transverse."""
    if set(first) & set(second):
        return False
    return all(transverse(dec, J, K) for J in first for K in second)


def carrier(dec: HyperplaneDecomposition, J: int) -> frozenset[VertexIndex]:
    return frozenset(
        itertools.chain.from_iterable(dec.classes[dec.check_class(J)])
    )


def paired_geodesic(
    dec: HyperplaneDecomposition,
    a: int,
    b: int,
    x: int,
    y: int,
    alpha: collections.abc.Sequence[int],
) -> typing.Optional[tuple[VertexIndex, ...]]:
    """
    Follow a geodesic from a to b with a geodesic from x to y.

    Each step from the current vertex crosses the class of the next edge of
    ``alpha`` into the sector of y while getting closer to y.  The result
    crosses the same classes in the same order, or is None when the host's
    truncation blocks the construction.
    """
    host = dec.host
    path = _check_path(host, alpha)
    if path[0] != a or path[-1] != b:
        raise ValueError("Geodesic must run from a to b.")
    if graphcore.distance(host, a, b) != len(path) - 1:
        raise interfaces.PreconditionError("alpha is not a geodesic.")
    if not parallel_pairs(dec, a, b, x, y):
        raise interfaces.PreconditionError("Pairs are not parallel.")
    table = dec.label_table()
    dy = graphcore.distances_from(host, [y])[0]
    current = host.check_vertex(x)
    xi = [current]
    for p, q in itertools.pairwise(path):
        J = dec.class_of(p, q)
        options = [
            w
            for w in host.adjacency[current]
            if dec.class_of(current, w) == J
            and table[J, w] == table[J, y]
            and dy[w] == dy[current] - 1
        ]
        if not options:
            return None
        current = min(options)
        xi.append(current)
    if current != y:
        return None
    return tuple(xi)


def distance_identity(
    dec: HyperplaneDecomposition, boundary: str = "interior"
) -> IdentityReport:
    """
    Compare d(x, y) with the number of separating classes.

    Parameters
    ----------
    dec : HyperplaneDecomposition
        Decomposition of the host.
    boundary : str
        ``"interior"`` checks only pairs whose separating classes are all
        interior; ``"all"`` checks every pair.

    Returns
    -------
    IdentityReport
    """
    if boundary not in ("interior", "all"):
        raise ValueError(f"Unknown boundary policy {boundary!r}.")
    table = dec.label_table()
    interior = dec.interior_mask()
    matrix = graphcore.distance_matrix(dec.host)
    n = len(dec.host)
    checked = 0
    violations = []
    for x in range(n - 1):
        differ = table[:, x : x + 1] != table[:, x + 1 :]
        counts = differ.sum(axis=0)
        keep = np.ones(n - x - 1, dtype=bool)
        if boundary == "interior":
            keep = ~(differ & ~interior[:, None]).any(axis=0)
        checked += int(keep.sum())
        bad = np.flatnonzero(keep & (matrix[x, x + 1 :] != counts))
        for offset in bad:
            y = x + 1 + int(offset)
            violations.append(
                (
                    VertexIndex(x),
                    VertexIndex(y),
                    int(matrix[x, y]),
                    int(counts[offset]),
                )
            )
    return IdentityReport(pairs_checked=checked, violations=tuple(violations))


def _staircase_shape(
    dz: np.ndarray, segment: collections.abc.Sequence[VertexIndex]
) -> typing.Optional[list[tuple[int, int]]]:
    s, t = int(dz[segment[0]]), 0
    shape = [(s, t)]
    for u, v in itertools.pairwise(segment):
        step = int(dz[v]) - int(dz[u])
        if step == -1:
            s -= 1
        elif step == 1:
            t += 1
        else:
            return None
        shape.append((s, t))
    if s != 0 or t != dz[segment[-1]]:
        return None
    return shape


def _fill_grid(
    g: FiniteGraph,
    matrix: np.ndarray,
    fixed: dict[tuple[int, int], int],
    points: list[tuple[int, int]],
    anchor: int,
) -> typing.Optional[dict[tuple[int, int], int]]:
    assignment = dict(fixed)

    def extend(i: int) -> bool:
        if i == len(points):
            return True
        s, t = points[i]
        above = ((s + 1, t), (s, t + 1))
        known = [assignment[q] for q in above if q in assignment]
        pool = set(g.adjacency[known[0]]) if known else set(g.vertices)
        for v in sorted(pool):
            if matrix[anchor, v] != s + t:
                continue
            if all(
                matrix[v, w] == abs(s - qs) + abs(t - qt)
                for (qs, qt), w in assignment.items()
            ):
                assignment[(s, t)] = v
                if extend(i + 1):
                    return True
                del assignment[(s, t)]
        return False

    return assignment if extend(0) else None


def staircase_witness(
    g: FiniteGraph, geodesic: collections.abc.Sequence[int], z: int
) -> Staircase:
    """
    Find an isometric staircase with corner z and broken path on a geodesic.

    Sub-segments of the geodesic are tried by increasing length; each one
    fixes the broken path, and the grid points under it are filled by
    backtracking with full isometry checks.

    Raises
    ------
    interfaces.SearchExhaustedError
        When no segment of length at most d(x, y) yields a staircase.
    """
    path = _check_path(g, geodesic)
    n = len(path) - 1
    if graphcore.distance(g, path[0], path[-1]) != n:
        raise interfaces.PreconditionError("Path is not a geodesic.")
    z = g.check_vertex(z)
    if z not in interval(g, path[0], path[-1]):
        raise interfaces.PreconditionError("Corner must lie in the interval.")
    matrix = graphcore.distance_matrix(g)
    dz = matrix[z]
    for span in range(n + 1):
        for i in range(n - span + 1):
            segment = path[i : i + span + 1]
            a, b = int(dz[segment[0]]), int(dz[segment[-1]])
            if a + b != span:
                continue
            shape = _staircase_shape(dz, segment)
            if shape is None:
                continue
            height: dict[int, int] = {}
            for s, t in shape:
                height[s] = max(height.get(s, 0), t)
            fixed = dict(zip(shape, segment))
            points = sorted(
                (
                    (s, t)
                    for s in range(a + 1)
                    for t in range(height[s] + 1)
                    if (s, t) not in fixed
                ),
                key=lambda p: (-(p[0] + p[1]), p),
            )
            filled = _fill_grid(g, matrix, fixed, points, z)
            if filled is not None:
                return Staircase(
                    a=a,
                    b=b,
                    corner=z,
                    broken_path=tuple(segment),
                    embedding={
                        p: VertexIndex(v) for p, v in sorted(filled.items())
                    },
                )
    raise interfaces.SearchExhaustedError(
        f"No staircase found with a + b <= {n}.", bound=n
    )


def _rectangles_of_shape(
    g: FiniteGraph, matrix: np.ndarray, a: int, b: int
) -> collections.abc.Iterator[dict[tuple[int, int], int]]:
    points = [(s, t) for t in range(b + 1) for s in range(a + 1)]
    assignment: dict[tuple[int, int], int] = {}

    def extend(i: int) -> collections.abc.Iterator[dict[tuple[int, int], int]]:
        if i == len(points):
            yield dict(assignment)
            return
        s, t = points[i]
        if s > 0:
            pool: collections.abc.Iterable[int] = g.adjacency[
                assignment[(s - 1, t)]
            ]
        elif t > 0:
            pool = g.adjacency[assignment[(s, t - 1)]]
        else:
            pool = g.vertices
        for v in pool:
            if all(
                matrix[v, w] == abs(s - qs) + abs(t - qt)
                for (qs, qt), w in assignment.items()
            ):
                assignment[(s, t)] = v
                yield from extend(i + 1)
                del assignment[(s, t)]

    yield from extend(0)


def flat_rectangles(
    g: FiniteGraph, a_max: int, b_max: int
) -> list[FlatRectangle]:
    """
    All isometric grids [0, a] x [0, b] with 1 <= a <= a_max, 1 <= b <= b_max.

    An isometric grid embedding is determined by its image up to a symmetry
    of the grid, so embeddings are deduplicated by image and each image is
    reported once, under the first shape in (min side, max side) order.
    """
    matrix = graphcore.distance_matrix(g)
    shapes = sorted(
        ((a, b) for a in range(1, a_max + 1) for b in range(1, b_max + 1)),
        key=lambda ab: (min(ab), max(ab), ab),
    )
    seen: set[frozenset[int]] = set()
    found = []
    for a, b in shapes:
        for embedding in _rectangles_of_shape(g, matrix, a, b):
            image = frozenset(embedding.values())
            if image in seen:
                continue
            seen.add(image)
            found.append(
                FlatRectangle(
                    a=a,
                    b=b,
                    embedding={
                        p: VertexIndex(v) for p, v in sorted(embedding.items())
                    },
                )
            )
    log.debug("Found %s flat rectangles", len(found))
    return found


def write_decomposition(
    dec: HyperplaneDecomposition, path: typing.Union[str, os.PathLike]
) -> None:
    """Write the host in the exchange format with per-edge class ids."""
    classes = {e: int(j) for e, j in dec.edge_class.items()}
    graphcore.write_graph(
        dec.host, path, edge_annotations={"hyperplane": classes}
    )
