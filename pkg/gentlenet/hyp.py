"""Contains hyperbolicity measurements and the finite hyperbolicity criteria."""

import collections.abc
import dataclasses
import enum
import itertools
import logging
import math
import typing

import networkx as nx
import numpy as np
import pandas as pd

from gentlenet import graphcore, interfaces, utils
from gentlenet.coneoff import VertexMap
from gentlenet.graphcore import FiniteGraph
from gentlenet.interfaces import VertexIndex
from gentlenet.median import FlatRectangle

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 200
DEFAULT_SAMPLES = 100_000

Eta = collections.abc.Callable[[int, int], collections.abc.Collection[int]]


@dataclasses.dataclass(frozen=True, slots=True)
class DeltaReport:
    """
    Four-point hyperbolicity constant of a finite graph.

    ``twice_delta`` is the exact integer 2 delta; ``witness`` is a quadruple
    realizing it, or None when 2 delta is 0 without a scan.
    """

    twice_delta: int
    witness: typing.Optional[tuple[VertexIndex, ...]]
    scanned: int
    sampled: bool

    @property
    def delta(self) -> float:
        return self.twice_delta / 2


class Thinness(enum.Enum):
    HORIZONTAL = "horizontal-thin"
    VERTICAL = "vertical-thin"
    BOTH = "both"
    NEITHER = "neither"

    def swapped(self) -> "Thinness":
        if self is Thinness.HORIZONTAL:
            return Thinness.VERTICAL
        if self is Thinness.VERTICAL:
            return Thinness.HORIZONTAL
        return self


@dataclasses.dataclass(frozen=True, slots=True)
class RectangleClass:
    rectangle: FlatRectangle
    kind: Thinness
    horizontal_hausdorff: int
    vertical_hausdorff: int
    K: int


@dataclasses.dataclass(frozen=True, slots=True)
class BowditchReport:
    holds: bool
    pairs_checked: int
    triples_checked: int
    violation: typing.Optional[tuple[VertexIndex, ...]] = None
    reason: str = ""


@dataclasses.dataclass(frozen=True, slots=True)
class SequenceFacts:
    """Values of r_n, R_n and sigma(n) with the two numeric facts."""

    n: float
    s: int
    r: float
    R: float
    sigma: float
    R_below_half_n: bool
    ratio: float


@dataclasses.dataclass(frozen=True, slots=True)
class SphereReport:
    levels: tuple[bool, ...]
    first_violation: typing.Optional[int]
    sphere_sizes_ok: bool

    @property
    def holds(self) -> bool:
        return self.first_violation is None


def _connected_matrix(g: FiniteGraph) -> np.ndarray:
    matrix = graphcore.distance_matrix(g)
    if (matrix < 0).any():
        raise interfaces.PreconditionError("Host graph must be connected.")
    return matrix


def _quadruple_defects(
    matrix: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    w: np.ndarray,
) -> np.ndarray:
    sums = np.sort(
        np.stack(
            [
                matrix[x, y] + matrix[z, w],
                matrix[x, z] + matrix[y, w],
                matrix[x, w] + matrix[y, z],
            ]
        ),
        axis=0,
    )
    return sums[2] - sums[1]


def _scan_block(
    matrix: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    start: int,
    stop: int,
) -> tuple[int, int, int, int]:
    """Best (2 delta, pair k, pair j) over pairs k in [start, stop)."""
    best = (-1, -1, -1)
    scanned = 0
    for k in range(max(start, 1), stop):
        defects = _quadruple_defects(
            matrix, np.full(k, xs[k]), np.full(k, ys[k]), xs[:k], ys[:k]
        )
        scanned += k
        j = int(np.argmax(defects))
        if defects[j] > best[0]:
            best = (int(defects[j]), k, j)
    return best[0], best[1], best[2], scanned


def _twin_classes(g: FiniteGraph) -> list[list[int]]:
    """Classes of vertices with the same closed neighborhood."""
    groups: dict[frozenset[int], list[int]] = {}
    for v in g.vertices:
        groups.setdefault(frozenset((v, *g.adjacency[v])), []).append(v)
    return list(groups.values())


def _block_graph_delta(g: FiniteGraph) -> typing.Optional[DeltaReport]:
    """
    Exact answer when the true-twin quotient of g is a block graph.

    A connected graph whose biconnected components are all cliques is
    0-hyperbolic. Blowing a vertex up into true twins keeps 2 delta at 0
    unless that vertex is a cut vertex, where it becomes 1. Returns None
    when the quotient is not a block graph.
    """
    classes = _twin_classes(g)
    owner = np.empty(len(g), dtype=np.int64)
    for i, members in enumerate(classes):
        owner[members] = i
    quotient = nx.Graph()
    quotient.add_nodes_from(range(len(classes)))
    quotient.add_edges_from(
        (int(owner[u]), int(owner[v]))
        for u, v in g.edges()
        if owner[u] != owner[v]
    )
    for component in nx.biconnected_components(quotient):
        size = len(component)
        edges = quotient.subgraph(component).number_of_edges()
        if edges != size * (size - 1) // 2:
            return None
    for cut in nx.articulation_points(quotient):
        if len(classes[cut]) < 2:  # noqa: PLR2004
            continue
        around = sorted(quotient.neighbors(cut))
        for i, j in itertools.combinations(around, 2):
            if not quotient.has_edge(i, j):
                x, y = classes[cut][:2]
                witness = (x, y, classes[i][0], classes[j][0])
                return DeltaReport(
                    twice_delta=1,
                    witness=tuple(VertexIndex(v) for v in witness),
                    scanned=0,
                    sampled=False,
                )
    return DeltaReport(twice_delta=0, witness=None, scanned=0, sampled=False)


def _hinted_delta(
    g: FiniteGraph, hint: tuple[int, int, int, int]
) -> typing.Optional[DeltaReport]:
    """
    Accept a quadruple whose defect meets the diameter bound.

    2 delta never exceeds the diameter, which is at most twice any
    eccentricity, so a quadruple reaching twice the smallest eccentricity
    among the rows computed here is optimal.
    """
    sources = list(dict.fromkeys(hint))
    if g.origin is not None and g.origin not in sources:
        sources.append(g.origin)
    rows = graphcore.distances_from(g, sources)
    row = {v: rows[i] for i, v in enumerate(sources)}
    x, y, z, w = hint
    sums = sorted(
        [
            row[x][y] + row[z][w],
            row[x][z] + row[y][w],
            row[x][w] + row[y][z],
        ]
    )
    defect = int(sums[2] - sums[1])
    bound = 2 * int(rows.max(axis=1).min())
    if defect < bound:
        log.debug("Hint reaches %s of the bound %s", defect, bound)
        return None
    return DeltaReport(
        twice_delta=defect,
        witness=tuple(VertexIndex(int(v)) for v in hint),
        scanned=1,
        sampled=False,
    )


def four_point_delta(
    g: FiniteGraph,
    sample: typing.Union[str, int] = "exhaustive",
    *,
    seed: int = 0,
    num_process: int = 1,
    block: int = 2048,
    hint: typing.Optional[tuple[int, int, int, int]] = None,
) -> DeltaReport:
    """
    Gromov four-point constant of a connected finite graph.

    Parameters
    ----------
    g : FiniteGraph
        Connected host.
    sample : str | int
        ``"exhaustive"``; ``"auto"``, which samples above 200 vertices; or a
        number of random quadruples.
    seed : int
        Seed of the quadruple sampler.
    num_process : int
        Worker processes for the exhaustive scan.
    block : int
        Leading pairs per worker task.
    hint : tuple of int, optional
        Candidate extremal quadruple. It is returned without a scan when its
        defect equals twice the smallest eccentricity among the hint and the
        origin.

    Returns
    -------
    DeltaReport

    Notes
    -----
    Exhaustive mode first tries two exact shortcuts: the hint, then the
    true-twin quotient, which settles 2 delta in {0, 1} whenever it is a
    block graph. Cone-offs of trees of pieces are of this kind. Otherwise
    the scan orders pairs by decreasing distance and pairs each one with
    all earlier pairs. A quadruple containing a pair at distance d has
    defect at most d, so the scan stops once the next distance is at most
    twice the best delta found.
    """
    utils.check_processes(num_process)
    if not graphcore.is_connected(g):
        raise interfaces.PreconditionError("Host graph must be connected.")
    n = len(g)
    if sample == "auto":
        sample = DEFAULT_SAMPLES if n > EXHAUSTIVE_LIMIT else "exhaustive"
        if sample != "exhaustive":
            log.warning(
                "Sampling %s quadruples of a %s-vertex graph", sample, n
            )
    if sample != "exhaustive":
        if isinstance(sample, str) or sample < 1:
            raise ValueError(f"Bad quadruple sample {sample!r}.")
        return _sampled_delta(graphcore.distance_matrix(g), int(sample), seed)
    if n < 2:  # noqa: PLR2004
        return DeltaReport(
            twice_delta=0, witness=None, scanned=0, sampled=False
        )
    if hint is not None:
        if len(hint) != 4:  # noqa: PLR2004
            raise ValueError(f"Bad quadruple hint {hint!r}.")
        for v in hint:
            g.check_vertex(v)
        report = _hinted_delta(g, tuple(hint))
        if report is not None:
            return report
    report = _block_graph_delta(g)
    if report is not None:
        log.debug("Block graph quotient, 2 delta = %s", report.twice_delta)
        return report
    matrix = graphcore.distance_matrix(g)
    xs, ys = np.triu_indices(n, k=1)
    order = np.argsort(-matrix[xs, ys], kind="stable")
    xs, ys = xs[order], ys[order]
    lengths = matrix[xs, ys]
    best = (0, 0, 0)
    scanned = 0
    start = 0
    while start < len(xs) and lengths[start] > best[0]:
        stop = min(len(xs), start + block * num_process)
        work = [
            (matrix, xs, ys, lo, min(lo + block, stop))
            for lo in range(start, stop, block)
        ]
        results = utils.pool_map(_scan_block, work, num_process)
        for value, k, j, count in results:
            scanned += count
            if value > best[0]:
                best = (value, k, j)
        start = stop
    value, k, j = best
    log.debug("Scanned %s quadruples, 2 delta = %s", scanned, value)
    return DeltaReport(
        twice_delta=value,
        witness=tuple(
            VertexIndex(int(v)) for v in (xs[k], ys[k], xs[j], ys[j])
        ),
        scanned=scanned,
        sampled=False,
    )


def _sampled_delta(matrix: np.ndarray, k: int, seed: int) -> DeltaReport:
    rng = np.random.default_rng(seed)
    quads = rng.integers(0, len(matrix), size=(k, 4))
    defects = _quadruple_defects(matrix, *quads.T)
    i = int(np.argmax(defects))
    return DeltaReport(
        twice_delta=int(defects[i]),
        witness=tuple(VertexIndex(int(v)) for v in quads[i]),
        scanned=k,
        sampled=True,
    )


def interval_eta(g: FiniteGraph) -> Eta:
    """Eta sending a pair to its interval."""
    matrix = _connected_matrix(g)

    def eta(x: int, y: int) -> frozenset[int]:
        row = matrix[x] + matrix[y]
        return frozenset(int(v) for v in np.flatnonzero(row == matrix[x, y]))

    return eta


def geodesic_eta(g: FiniteGraph) -> Eta:
    """Eta sending a pair to one geodesic, smallest next vertex first."""
    matrix = _connected_matrix(g)

    def eta(x: int, y: int) -> frozenset[int]:
        path = [x]
        while path[-1] != y:
            current = path[-1]
            path.append(
                min(
                    w
                    for w in g.adjacency[current]
                    if matrix[w, y] == matrix[current, y] - 1
                )
            )
        return frozenset(path)

    return eta


def bowditch_check(
    g: FiniteGraph,
    eta: Eta,
    D: int,
    *,
    triples: typing.Optional[
        collections.abc.Iterable[tuple[int, int, int]]
    ] = None,
) -> BowditchReport:
    """
    Check both hypotheses of the Bowditch criterion at level D.

    Adjacent pairs need diam(eta(x, y)) <= D, and every triple needs
    eta(x, y) inside the D-neighborhood of eta(x, z) with eta(z, y).
    ``triples`` defaults to all ordered triples.

    Raises
    ------
    ValueError
        If eta(x, y) misses x or y or does not induce a connected subgraph.
    """
    matrix = _connected_matrix(g)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def members(x: int, y: int) -> np.ndarray:
        if (x, y) not in cache:
            found = frozenset(eta(x, y))
            if x not in found or y not in found:
                raise ValueError(f"eta({x}, {y}) must contain {x} and {y}.")
            if not graphcore.induces_connected(g, found):
                raise ValueError(f"eta({x}, {y}) is not connected.")
            cache[(x, y)] = np.asarray(sorted(found), dtype=np.int64)
        return cache[(x, y)]

    pairs = 0
    for x, y in itertools.product(g.vertices, repeat=2):
        if matrix[x, y] > 1:
            continue
        pairs += 1
        found = members(x, y)
        if matrix[np.ix_(found, found)].max() > D:
            return BowditchReport(
                holds=False,
                pairs_checked=pairs,
                triples_checked=0,
                violation=(VertexIndex(x), VertexIndex(y)),
                reason="diameter",
            )
    if triples is None:
        triples = itertools.product(g.vertices, repeat=3)
    count = 0
    for x, y, z in triples:
        count += 1
        cover = np.concatenate([members(x, z), members(z, y)])
        spread = matrix[cover].min(axis=0)
        if (spread[members(x, y)] > D).any():
            return BowditchReport(
                holds=False,
                pairs_checked=pairs,
                triples_checked=count,
                violation=(VertexIndex(x), VertexIndex(y), VertexIndex(z)),
                reason="tripod",
            )
    return BowditchReport(
        holds=True, pairs_checked=pairs, triples_checked=count
    )


def _hausdorff(
    rows: np.ndarray,
    at: collections.abc.Mapping[int, int],
    first: collections.abc.Sequence[int],
    second: collections.abc.Sequence[int],
) -> int:
    block = rows[[at[u] for u in first]][:, list(second)]
    if (block < 0).any():
        raise interfaces.PreconditionError("Cone-off must be connected.")
    return int(max(block.min(axis=1).max(), block.min(axis=0).max()))


def _max_pairwise(
    rows: np.ndarray,
    at: collections.abc.Mapping[int, int],
    lines: list[tuple[VertexIndex, ...]],
) -> int:
    pairs = itertools.combinations(lines, 2)
    return max((_hausdorff(rows, at, p, q) for p, q in pairs), default=0)


def classify_rectangles(
    host: FiniteGraph,
    coned: FiniteGraph,
    rects: collections.abc.Iterable[FlatRectangle],
    K: int,
) -> list[RectangleClass]:
    """
    Classify flat rectangles by line thinness in the cone-off metric.

    Horizontal lines of a rectangle are its rows and vertical lines its
    columns; a family is thin when all its lines are pairwise within
    Hausdorff distance K.  Rectangles with a = 0 or b = 0 are thin both ways.
    """
    if len(coned) < len(host):
        raise interfaces.PreconditionError(
            "Cone-off must contain the host's vertices."
        )
    found = []
    for rect in rects:
        vertices = sorted(rect.vertices)
        rows = graphcore.distances_from(coned, vertices)
        at = {v: i for i, v in enumerate(vertices)}
        horizontal = _max_pairwise(
            rows, at, [rect.row(t) for t in range(rect.b + 1)]
        )
        vertical = _max_pairwise(
            rows, at, [rect.column(s) for s in range(rect.a + 1)]
        )
        if rect.a == 0 or rect.b == 0:
            kind = Thinness.BOTH
        elif horizontal <= K and vertical <= K:
            kind = Thinness.BOTH
        elif horizontal <= K:
            kind = Thinness.HORIZONTAL
        elif vertical <= K:
            kind = Thinness.VERTICAL
        else:
            kind = Thinness.NEITHER
        found.append(
            RectangleClass(
                rectangle=rect,
                kind=kind,
                horizontal_hausdorff=horizontal,
                vertical_hausdorff=vertical,
                K=K,
            )
        )
    return found


def detour_length(
    g: FiniteGraph, x: int, y: int, center: int, s: int
) -> interfaces.Distance:
    """
    Shortest x-y path avoiding the closed ball B(center, s).

    Raises
    ------
    interfaces.PreconditionError
        Unless center lies on a geodesic from x to y at distance more than s
        from both ends.
    """
    if s < 0:
        raise ValueError("Ball radius must be non-negative.")
    rows = graphcore.distances_from(g, [x, y, center])
    d = rows[0, y]
    if d < 0 or rows[0, center] + rows[1, center] != d:
        raise interfaces.PreconditionError(
            f"Center {center} is not on a geodesic from {x} to {y}."
        )
    if rows[0, center] <= s or rows[1, center] <= s:
        raise interfaces.PreconditionError(
            f"Center {center} is within {s} of an endpoint."
        )
    blocked = frozenset(
        int(v) for v in np.flatnonzero((rows[2] >= 0) & (rows[2] <= s))
    )
    reached = graphcore.bfs_distances(g, x, blocked=blocked)
    return reached.get(VertexIndex(y), interfaces.INFINITY)


def detour_profile(
    g: FiniteGraph,
    x: int,
    y: int,
    center: int,
    radii: collections.abc.Iterable[int],
) -> pd.DataFrame:
    """Detour lengths for several ball radii; columns s, d, detour."""
    d = graphcore.distance(g, x, y)
    rows = [
        {"s": s, "d": d, "detour": detour_length(g, x, y, center, s)}
        for s in radii
    ]
    return pd.DataFrame(rows, columns=["s", "d", "detour"])


def nogentle_sequences(n: float, s: int) -> SequenceFacts:
    """
    Evaluate r_n = ln(n)^2, R_n = ln(n)^(2(s+1)), sigma(n) = ln(n)^(2s+3).

    ``R_below_half_n`` reports R_n < n/2 and ``ratio`` is
    sigma(n) / (n / ln n)^(1/s), which tends to 0.
    """
    if n < 2 or s < 1:  # noqa: PLR2004
        raise ValueError("Need n >= 2 and s >= 1.")
    ln = math.log(n)
    r = ln**2
    R = ln ** (2 * (s + 1))
    sigma = ln ** (2 * s + 3)
    return SequenceFacts(
        n=n,
        s=s,
        r=r,
        R=R,
        sigma=sigma,
        R_below_half_n=R < n / 2,
        ratio=sigma / (n / ln) ** (1 / s),
    )


def sphere_growth_check(
    tree: FiniteGraph,
    sigma: collections.abc.Callable[[int], float],
    phi: VertexMap,
) -> SphereReport:
    """
    Look for far images on each sphere of a rooted binary tree ball.

    Level n >= 1 holds when some x with d(o, x) = n has
    d(phi(o), phi(x)) >= sigma(n).  Also checks |S(o, n)| = 2^n.
    """
    if tree.origin is None:
        raise interfaces.PreconditionError("Tree must carry a root.")
    if phi.domain is not tree:
        raise interfaces.PreconditionError("Map must be defined on the tree.")
    depths = np.asarray(tree.depths())
    radius = typing.cast(int, tree.radius)
    root_image = phi.image[tree.origin]
    spread = graphcore.distances_from(phi.codomain, [root_image])[0]
    images = np.asarray(phi.image, dtype=np.int64)
    levels = []
    sizes_ok = True
    for level in range(1, radius + 1):
        sphere = np.flatnonzero(depths == level)
        sizes_ok = sizes_ok and len(sphere) == 2**level
        far = spread[images[sphere]]
        levels.append(bool(((far >= 0) & (far >= sigma(level))).any()))
    first = next((i + 1 for i, ok in enumerate(levels) if not ok), None)
    return SphereReport(
        levels=tuple(levels), first_violation=first, sphere_sizes_ok=sizes_ok
    )
