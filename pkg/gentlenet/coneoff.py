"""Contains cone-offs, syllabic checks, horoballs and gentleness profiles."""

import collections.abc
import dataclasses
import itertools
import logging
import math
import typing

import numpy as np
import pandas as pd
import scipy.sparse
import scipy.sparse.csgraph

from gentlenet import gp, graphcore, interfaces, median, utils
from gentlenet.graphcore import FiniteGraph
from gentlenet.interfaces import BoundFamily, VertexIndex

log = logging.getLogger(__name__)

PROVENANCE_KINDS = ("parabolic", "vertex-group", "custom")
CONSTANT_SCAN_LIMIT = 2**16
QUASI_SYLLABIC_GRID = tuple(
    (A, B) for A in (1, 2, 3) for B in (0, 1, 2, 3)
)


@dataclasses.dataclass(frozen=True, slots=True)
class Provenance:
    kind: str = "custom"
    representative: typing.Optional[VertexIndex] = None
    parabolic: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in PROVENANCE_KINDS:
            raise ValueError(f"Unknown provenance kind {self.kind!r}.")


@dataclasses.dataclass(frozen=True, slots=True)
class Collection:
    """
    Distinct connected vertex sets of a host, each with its provenance.

    Build with :meth:`Collection.build`, which validates and deduplicates.
    """

    host: FiniteGraph
    members: tuple[frozenset[VertexIndex], ...]
    provenance: tuple[Provenance, ...]

    @classmethod
    def build(
        cls,
        host: FiniteGraph,
        members: collections.abc.Iterable[collections.abc.Iterable[int]],
        provenance: typing.Optional[
            collections.abc.Iterable[Provenance]
        ] = None,
    ) -> "Collection":
        member_list = [
            frozenset(host.check_vertex(v) for v in member)
            for member in members
        ]
        tags = (
            list(provenance)
            if provenance is not None
            else [Provenance()] * len(member_list)
        )
        if len(tags) != len(member_list):
            raise ValueError("Need one provenance tag per member.")
        kept: dict[frozenset[VertexIndex], Provenance] = {}
        for member, tag in zip(member_list, tags):
            if not member:
                raise ValueError("Collection members must be non-empty.")
            if not graphcore.induces_connected(host, member):
                raise ValueError(
                    f"Member {sorted(member)} does not induce a connected "
                    "subgraph."
                )
            kept.setdefault(member, tag)
        return cls(
            host=host,
            members=tuple(kept),
            provenance=tuple(kept.values()),
        )

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> collections.abc.Iterator[frozenset[VertexIndex]]:
        return iter(self.members)

    def memberships(self) -> list[set[int]]:
        """Member indices containing each host vertex."""
        owners: list[set[int]] = [set() for _ in self.host.vertices]
        for i, member in enumerate(self.members):
            for v in member:
                owners[v].add(i)
        return owners

    def local_finiteness(self) -> int:
        """Largest number of members sharing one vertex."""
        return max((len(o) for o in self.memberships()), default=0)


@dataclasses.dataclass(frozen=True, slots=True)
class VertexMap:
    """Vertex map between two finite hosts."""

    domain: FiniteGraph
    codomain: FiniteGraph
    image: tuple[VertexIndex, ...]

    def __post_init__(self) -> None:
        if len(self.image) != len(self.domain):
            raise ValueError("Map must assign an image to every vertex.")
        for v in self.image:
            self.codomain.check_vertex(v)

    @classmethod
    def identity(cls, g: FiniteGraph) -> "VertexMap":
        return cls(domain=g, codomain=g, image=tuple(g.vertices))

    @classmethod
    def constant(
        cls, domain: FiniteGraph, codomain: FiniteGraph, target: int
    ) -> "VertexMap":
        target = codomain.check_vertex(target)
        return cls(
            domain=domain, codomain=codomain, image=(target,) * len(domain)
        )

    @classmethod
    def canonical(cls, host: FiniteGraph, coned: FiniteGraph) -> "VertexMap":
        """The vertex-set identity from a host to one of its cone-offs."""
        if len(host) != len(coned):
            raise ValueError("Cone-off must share the host's vertex set.")
        return cls(domain=host, codomain=coned, image=tuple(host.vertices))

    @classmethod
    def by_payload(
        cls, domain: FiniteGraph, codomain: FiniteGraph
    ) -> "VertexMap":
        """Send each vertex to the codomain vertex with the same payload."""
        return cls(
            domain=domain,
            codomain=codomain,
            image=tuple(codomain.vertex(p) for p in domain.payloads),
        )

    def lipschitz(self) -> interfaces.Distance:
        """Largest codomain distance between images of adjacent vertices."""
        targets = sorted(set(self.image))
        rows = graphcore.distances_from(self.codomain, targets)
        at = {v: i for i, v in enumerate(targets)}
        worst: interfaces.Distance = 0
        for u, v in self.domain.edges():
            d = rows[at[self.image[u]], self.image[v]]
            if d < 0:
                return interfaces.INFINITY
            worst = max(worst, int(d))
        return worst


@dataclasses.dataclass(frozen=True, slots=True)
class GentlenessProfile:
    """
    Table G[R1][R2] of maximal fiber counts over the sampled centers.

    Attributes
    ----------
    table : np.ndarray
        Integer array of shape (r1_max + 1, r2_max + 1).
    sampling : str
        ``"inner-ball"``, ``"all"`` or ``"centers:<k>"``.
    n_centers : int
        Number of domain centers scanned.
    """

    table: np.ndarray
    sampling: str
    n_centers: int

    @property
    def r1_max(self) -> int:
        return self.table.shape[0] - 1

    @property
    def r2_max(self) -> int:
        return self.table.shape[1] - 1

    def __getitem__(self, cell: tuple[int, int]) -> int:
        return int(self.table[cell])

    def eta_hat(self, r2: int) -> float:
        """Exponent estimate log G[R1max][R2] / log R1max."""
        g = self.table[self.r1_max, r2]
        if self.r1_max < 2 or g <= 0:  # noqa: PLR2004
            return math.nan
        return math.log(g) / math.log(self.r1_max)

    def is_monotone(self) -> bool:
        return bool(
            (np.diff(self.table, axis=0) >= 0).all()
            and (np.diff(self.table, axis=1) >= 0).all()
        )

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "R1": r1,
                "R2": r2,
                "G": int(self.table[r1, r2]),
                "eta_hat": self.eta_hat(r2),
            }
            for r1 in range(self.r1_max + 1)
            for r2 in range(self.r2_max + 1)
        ]
        return pd.DataFrame(rows, columns=["R1", "R2", "G", "eta_hat"])


@dataclasses.dataclass(frozen=True, slots=True)
class PolynomialBound(BoundFamily):
    """F(x, y) = x^k."""

    degree: int

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("Polynomial degree must be non-negative.")

    @property
    def name(self) -> str:
        return f"pol:{self.degree}"

    def log_value(self, x: int, y: int) -> float:
        if x == 0:
            return 0.0 if self.degree == 0 else -math.inf
        return self.degree * math.log(x)

    def exact_value(self, x: int, y: int) -> typing.Optional[int]:
        return x**self.degree


@dataclasses.dataclass(frozen=True, slots=True)
class ExponentBound(BoundFamily):
    """F(x, y) = x^y."""

    @property
    def name(self) -> str:
        return "lin"

    def log_value(self, x: int, y: int) -> float:
        if x == 0:
            return 0.0 if y == 0 else -math.inf
        return y * math.log(x)

    def exact_value(self, x: int, y: int) -> typing.Optional[int]:
        return x**y


@dataclasses.dataclass(frozen=True, slots=True)
class ExponentialBound(BoundFamily):
    """F(x, y) = e^x."""

    @property
    def name(self) -> str:
        return "exp"

    def log_value(self, x: int, y: int) -> float:
        return float(x)


def parse_family(text: str) -> BoundFamily:
    """Parse ``"lin"``, ``"exp"`` or ``"pol:k"``."""
    text = text.strip()
    if text == "lin":
        return ExponentBound()
    if text == "exp":
        return ExponentialBound()
    if text.startswith("pol:"):
        try:
            return PolynomialBound(int(text[4:]))
        except ValueError as err:
            raise ValueError(f"Bad polynomial family {text!r}.") from err
    raise ValueError(f"Unknown bound family {text!r}.")


@dataclasses.dataclass(frozen=True, slots=True)
class FitResult:
    family: str
    constant: typing.Optional[int]

    @property
    def infinite(self) -> bool:
        return self.constant is None


@dataclasses.dataclass(frozen=True, slots=True)
class SyllabicWitness:
    cone_path: tuple[VertexIndex, ...]
    host_path: tuple[VertexIndex, ...]


@dataclasses.dataclass(frozen=True, slots=True)
class SyllabicReport:
    holds: bool
    pairs_checked: int
    counterexample: typing.Optional[tuple[VertexIndex, ...]] = None


@dataclasses.dataclass(frozen=True, slots=True)
class ClosureReport:
    holds: bool
    pairs_checked: int
    classes_checked: int
    counterexample: typing.Optional[
        tuple[VertexIndex, VertexIndex, VertexIndex, VertexIndex]
    ] = None


def cone_off(host: FiniteGraph, P: Collection) -> FiniteGraph:
    """Add an edge labelled ``"cone"`` between any two vertices of a member."""
    edges = set(host.edges())
    labels = dict(host.edge_labels)
    for member in P:
        for u, v in itertools.combinations(sorted(member), 2):
            key = graphcore.edge_key(u, v)
            if key not in edges:
                edges.add(key)
                labels[key] = "cone"
    log.debug(
        "Cone-off added %s edges to %s", len(edges) - host.n_edges, host.n_edges
    )
    return FiniteGraph.build(
        len(host),
        edges,
        payloads=host.payloads,
        names=host.names,
        classes=host.classes,
        edge_labels=labels,
    )


def _check_coverage(g: FiniteGraph, v: int, R: int, side: str) -> None:
    if g.origin is None:
        return
    depth = g.depths()[g.check_vertex(v)]
    if depth + R > typing.cast(int, g.radius):
        raise interfaces.CoverageError(
            f"{side} ball B({v}, {R}) leaves the generated radius "
            f"{g.radius} (vertex depth {depth})."
        )


def fiber_count(phi: VertexMap, p: int, q: int, R1: int, R2: int) -> int:
    """Size of B(p, R1) intersected with the preimage of B(q, R2)."""
    if R1 < 0 or R2 < 0:
        raise ValueError("Radii must be non-negative.")
    _check_coverage(phi.domain, p, R1, "Domain")
    _check_coverage(phi.codomain, q, R2, "Codomain")
    near_p = graphcore.distances_from(phi.domain, [p], limit=R1)[0] >= 0
    near_q = graphcore.distances_from(phi.codomain, [q], limit=R2)[0] >= 0
    image = np.asarray(phi.image, dtype=np.int64)
    return int(near_q[image[near_p]].sum())


def _center_table(
    domain: scipy.sparse.csr_matrix,
    codomain: scipy.sparse.csr_matrix,
    image: np.ndarray,
    p: int,
    r1_max: int,
    r2_max: int,
    targets: np.ndarray,
    batch: int,
) -> np.ndarray:
    near = scipy.sparse.csgraph.dijkstra(
        domain, directed=False, indices=p, unweighted=True, limit=r1_max + 0.5
    )
    inside = np.flatnonzero(np.isfinite(near))
    dh = near[inside].astype(np.int64)
    images = image[inside]
    reach = scipy.sparse.csgraph.dijkstra(
        codomain,
        directed=False,
        indices=np.unique(images),
        unweighted=True,
        limit=r2_max + 0.5,
        min_only=True,
    )
    live = targets[np.isfinite(reach[targets])]
    table = np.zeros((r1_max + 1, r2_max + 1), dtype=np.int64)
    for chunk in utils.chunked(live, batch):
        rows = np.atleast_2d(
            scipy.sparse.csgraph.dijkstra(
                codomain,
                directed=False,
                indices=chunk,
                unweighted=True,
                limit=r2_max + 0.5,
            )
        )
        dc = rows[:, images]
        qi, mi = np.nonzero(np.isfinite(dc))
        hist = np.zeros((len(chunk), r1_max + 1, r2_max + 1), dtype=np.int64)
        np.add.at(hist, (qi, dh[mi], dc[qi, mi].astype(np.int64)), 1)
        hist = hist.cumsum(axis=1).cumsum(axis=2)
        table = np.maximum(table, hist.max(axis=0))
    return table


def gentleness_profile(
    phi: VertexMap,
    r1_max: int,
    r2_max: int,
    *,
    centers: typing.Optional[collections.abc.Sequence[int]] = None,
    targets: typing.Optional[collections.abc.Sequence[int]] = None,
    num_process: int = 1,
    batch: int = 256,
) -> GentlenessProfile:
    """
    Measure G[R1][R2] = max |B(p, R1) intersected with phi^-1(B(q, R2))|.

    Parameters
    ----------
    phi : VertexMap
        The measured map.
    r1_max, r2_max : int
        Largest radii of the table.
    centers : optional sequence of int
        Domain centers p. Default: every vertex of the domain's inner ball of
        radius ``radius - r1_max`` when the domain is a ball, otherwise every
        domain vertex.
    targets : optional sequence of int
        Codomain centers q; default every codomain vertex. Targets whose
        ball B(q, r2_max) leaves a generated codomain ball are still scanned
        and counted in ``sampling``.
    num_process : int
        Worker processes; centers are reduced by elementwise maximum so the
        result does not depend on it.
    batch : int
        Codomain BFS rows computed per block.

    Returns
    -------
    GentlenessProfile
    """
    utils.check_processes(num_process)
    if r1_max < 0 or r2_max < 0:
        raise ValueError("Radii must be non-negative.")
    domain = phi.domain
    if centers is None:
        if domain.origin is not None:
            inner = typing.cast(int, domain.radius) - r1_max
            if inner < 0:
                raise interfaces.CoverageError(
                    f"Domain radius {domain.radius} is smaller than {r1_max}."
                )
            depths = domain.depths()
            centers = [v for v in domain.vertices if depths[v] <= inner]
            sampling = "inner-ball"
        else:
            centers = list(domain.vertices)
            sampling = "all"
    else:
        for p in centers:
            _check_coverage(domain, p, r1_max, "Domain")
        sampling = f"centers:{len(centers)}"
    if not centers:
        raise ValueError("No centers to sample.")
    if targets is None:
        target_array = np.arange(len(phi.codomain), dtype=np.int64)
    else:
        target_array = np.asarray(
            sorted({phi.codomain.check_vertex(q) for q in targets}),
            dtype=np.int64,
        )
    codomain = phi.codomain
    if codomain.origin is not None:
        target_depths = np.asarray(codomain.depths(), dtype=np.int64)
        radius = typing.cast(int, codomain.radius)
        under = int((target_depths[target_array] + r2_max > radius).sum())
        if under:
            log.info("%s targets have truncated codomain balls", under)
            sampling = f"{sampling};undercovered:{under}"
    domain_csr = domain.csr()
    codomain_csr = phi.codomain.csr()
    image = np.asarray(phi.image, dtype=np.int64)
    log.debug("Profiling %s centers (%s)", len(centers), sampling)
    work = [
        (
            domain_csr,
            codomain_csr,
            image,
            int(p),
            r1_max,
            r2_max,
            target_array,
            batch,
        )
        for p in centers
    ]
    table = utils.pool_max(_center_table, work, num_process)
    return GentlenessProfile(
        table=table, sampling=sampling, n_centers=len(centers)
    )


def _scored_cells(profile: GentlenessProfile) -> list[tuple[int, int, int]]:
    return [
        (int(profile.table[r1, r2]), r1, r2)
        for r1 in range(1, profile.r1_max + 1)
        for r2 in range(1, profile.r2_max + 1)
    ]


def fit_constant(
    profile: GentlenessProfile,
    family: typing.Union[BoundFamily, str],
    *,
    limit: int = CONSTANT_SCAN_LIMIT,
) -> FitResult:
    """
    Smallest integer C >= 1 with G[R1][R2] <= C F(C R1, C R2) on all cells.

    Cells with R1 = 0 or R2 = 0 are skipped. Admissibility is monotone in C
    for the packaged families, so the scan is a binary search; ``constant`` is
    None when no C up to ``limit`` works.
    """
    if isinstance(family, str):
        family = parse_family(family)
    cells = _scored_cells(profile)

    def admits(c: int) -> bool:
        return all(family.admits(g, c, r1, r2) for g, r1, r2 in cells)

    if not admits(limit):
        log.warning("No constant up to %s fits family %s", limit, family.name)
        return FitResult(family=family.name, constant=None)
    low, high = 1, limit
    while low < high:
        mid = (low + high) // 2
        if admits(mid):
            high = mid
        else:
            low = mid + 1
    return FitResult(family=family.name, constant=low)


def observed_degree(
    profile: GentlenessProfile, r2: typing.Optional[int] = None
) -> float:
    """
    Largest secant slope of log G against log R1 in one R2 column.

    A polynomial bound of degree k keeps the slope near k or below; growth
    outpacing every polynomial shows as a slope that keeps increasing.
    """
    column = profile.table[:, profile.r2_max if r2 is None else r2]
    slopes = [
        math.log(column[r + 1] / column[r]) / math.log((r + 1) / r)
        for r in range(1, profile.r1_max)
        if column[r] > 0 and column[r + 1] > 0
    ]
    return max(slopes, default=math.nan)


def collection_growth(
    host: FiniteGraph, P: Collection, r_max: int
) -> list[int]:
    """Growth gamma_P(R) for R = 0..r_max."""
    growth = [0] * (r_max + 1)
    for member in P:
        ordered = sorted(member)
        rows = graphcore.distances_from(host, ordered, limit=r_max)[:, ordered]
        for R in range(r_max + 1):
            within = ((rows >= 0) & (rows <= R)).sum(axis=1).max()
            growth[R] = max(growth[R], int(within))
    return growth


def counting_bound(
    N: int,
    gamma: collections.abc.Callable[[int], int],
    A: int,
    B: int,
    R1: int,
    R2: int,
) -> int:
    """(N gamma(A(R1 + B)))^(2 A R2 + B)."""
    return (N * gamma(A * (R1 + B))) ** (2 * A * R2 + B)


def check_counting_bound(
    profile: GentlenessProfile,
    N: int,
    growth: collections.abc.Sequence[int],
    A: int = 1,
    B: int = 0,
) -> list[tuple[int, int, int, int]]:
    """Cells (R1, R2, G, bound) where the profile exceeds the counting bound."""
    need = A * (profile.r1_max + B)
    if len(growth) <= need:
        raise ValueError(f"Growth table must reach radius {need}.")
    violations = []
    for r1 in range(profile.r1_max + 1):
        for r2 in range(profile.r2_max + 1):
            bound = counting_bound(N, growth.__getitem__, A, B, r1, r2)
            if profile.table[r1, r2] > bound:
                violations.append((r1, r2, int(profile.table[r1, r2]), bound))
    return violations


def _host_geodesic(
    g: FiniteGraph, start: int, end: int, dist_to_end: np.ndarray
) -> list[VertexIndex]:
    path = [VertexIndex(start)]
    current = start
    while current != end:
        step = dist_to_end[current] - 1
        current = min(w for w in g.adjacency[current] if dist_to_end[w] == step)
        path.append(current)
    return path


def _cone_layers(
    coned: FiniteGraph, x: int, y: int
) -> tuple[list[list[int]], int]:
    rows = graphcore.distances_from(coned, [x, y])
    total = int(rows[0, y])
    if total < 0:
        raise interfaces.PreconditionError(f"{x} and {y} are disconnected.")
    on = np.flatnonzero((rows[0] >= 0) & (rows[0] + rows[1] == total))
    layers: list[list[int]] = [[] for _ in range(total + 1)]
    for v in on:
        layers[int(rows[0, v])].append(int(v))
    return layers, total


def _layer_dp(
    host: FiniteGraph,
    coned: FiniteGraph,
    x: int,
    y: int,
    maximize: bool,
) -> tuple[int, list[int], int]:
    layers, _ = _cone_layers(coned, x, y)
    members = sorted(itertools.chain.from_iterable(layers))
    at = {v: i for i, v in enumerate(members)}
    host_rows = graphcore.distances_from(host, members)
    if (host_rows[:, members] < 0).any():
        raise interfaces.PreconditionError("Host graph must be connected.")
    score = {x: 0}
    parent: dict[int, int] = {}
    for previous, layer in itertools.pairwise(layers):
        allowed = set(previous)
        for v in layer:
            options = [
                (score[u] + int(host_rows[at[u], v]), u)
                for u in coned.adjacency[v]
                if u in allowed
            ]
            best = max(options) if maximize else min(options)
            score[v], parent[v] = best
    path = [y]
    while path[-1] != x:
        path.append(parent[path[-1]])
    path.reverse()
    return score[y], path, int(host_rows[at[x], y])


def is_syllabic_pair(
    host: FiniteGraph,
    P: Collection,
    x: int,
    y: int,
    *,
    coned: typing.Optional[FiniteGraph] = None,
) -> typing.Optional[SyllabicWitness]:
    """
    Find a cone-off geodesic from x to y that extends to a host geodesic.

    Over the layers of the cone-off interval, a min-plus pass computes the
    shortest concatenation of host geodesics between consecutive points; a
    witness exists exactly when that length equals d_host(x, y).
    """
    host.check_vertex(x)
    host.check_vertex(y)
    coned = coned if coned is not None else cone_off(host, P)
    if x == y:
        single = (VertexIndex(x),)
        return SyllabicWitness(cone_path=single, host_path=single)
    length, cone_path, target = _layer_dp(host, coned, x, y, maximize=False)
    if length != target:
        return None
    host_path: list[VertexIndex] = [VertexIndex(x)]
    for u, v in itertools.pairwise(cone_path):
        to_v = graphcore.distances_from(host, [v])[0]
        host_path.extend(_host_geodesic(host, u, v, to_v)[1:])
    return SyllabicWitness(
        cone_path=tuple(VertexIndex(v) for v in cone_path),
        host_path=tuple(host_path),
    )


def _pairs(
    g: FiniteGraph,
    pairs: typing.Optional[collections.abc.Iterable[tuple[int, int]]],
) -> list[tuple[int, int]]:
    if pairs is None:
        return list(itertools.combinations(g.vertices, 2))
    return [(g.check_vertex(x), g.check_vertex(y)) for x, y in pairs]


def is_strongly_syllabic_sample(
    host: FiniteGraph,
    P: Collection,
    pairs: typing.Optional[collections.abc.Iterable[tuple[int, int]]] = None,
) -> SyllabicReport:
    """
    Check that every cone-off geodesic between sampled pairs extends.

    A max-plus pass over the cone-off interval finds the longest
    concatenation; all geodesics extend exactly when it equals d_host(x, y).
    ``pairs`` defaults to every unordered pair.
    """
    coned = cone_off(host, P)
    checked = 0
    for x, y in _pairs(host, pairs):
        if x == y:
            continue
        checked += 1
        longest, cone_path, target = _layer_dp(host, coned, x, y, maximize=True)
        if longest != target:
            log.debug("Cone-off geodesic %s does not extend", cone_path)
            return SyllabicReport(
                holds=False,
                pairs_checked=checked,
                counterexample=tuple(VertexIndex(v) for v in cone_path),
            )
    return SyllabicReport(holds=True, pairs_checked=checked)


def _quasi_sums(
    host_matrix: np.ndarray,
    coned: FiniteGraph,
    x: int,
    steps: int,
) -> np.ndarray:
    """Least host length of cone-off walks from x, per step count and end."""
    edges = np.asarray(list(coned.edges()), dtype=np.int64).reshape(-1, 2)
    tails = np.concatenate([edges[:, 0], edges[:, 1]])
    heads = np.concatenate([edges[:, 1], edges[:, 0]])
    weights = host_matrix[tails, heads]
    best = np.full((steps + 1, len(coned)), np.iinfo(np.int64).max // 4)
    best[0, x] = 0
    for k in range(steps):
        row = best[k].copy()
        np.minimum.at(row, heads, best[k][tails] + weights)
        best[k + 1] = row
    return np.minimum.accumulate(best, axis=0)


def quasi_syllabic_constants(
    host: FiniteGraph,
    P: Collection,
    pairs: typing.Optional[collections.abc.Iterable[tuple[int, int]]] = None,
    grid: collections.abc.Sequence[tuple[int, int]] = QUASI_SYLLABIC_GRID,
) -> typing.Optional[tuple[int, int]]:
    """
    First (A, B) of ``grid`` certifying the sampled pairs, or None.

    A pair (x, y) is certified when some cone-off path of at most
    A d_cone(x, y) + B steps has host length at most A (d_host(x, y) + B).
    """
    coned = cone_off(host, P)
    host_matrix = graphcore.distance_matrix(host)
    cone_matrix = graphcore.distance_matrix(coned)
    if (host_matrix < 0).any():
        raise interfaces.PreconditionError("Host graph must be connected.")
    by_source: dict[int, list[int]] = {}
    for x, y in _pairs(host, pairs):
        by_source.setdefault(x, []).append(y)
    a_max = max(A for A, _ in grid)
    b_max = max(B for _, B in grid)
    passing = list(grid)
    for x, ys in sorted(by_source.items()):
        steps = a_max * int(cone_matrix[x, ys].max()) + b_max
        sums = _quasi_sums(host_matrix, coned, x, steps)
        passing = [
            (A, B)
            for A, B in passing
            if all(
                sums[A * int(cone_matrix[x, y]) + B, y]
                <= A * (int(host_matrix[x, y]) + B)
                for y in ys
            )
        ]
        if not passing:
            return None
    return min(passing) if passing else None


def check_parallel_closure(
    host: FiniteGraph,
    dec: median.HyperplaneDecomposition,
    P: Collection,
    *,
    reading: str = "ab",
    boundary: str = "interior",
) -> ClosureReport:
    """
    Check that pairs parallel to a pair inside a member also share a member.

    For every ordered pair (x, y) of distinct vertices in a common member and
    every pair (a, b) parallel to it, the ``"ab"`` reading requires a and b in
    a common member; the ``"ay"`` reading requires a and y instead.  With
    ``boundary="certified"`` only pairs whose separating-class count equals
    their distance take part; ``boundary="interior"`` also needs every
    separating class interior.
    """
    if reading not in ("ab", "ay"):
        raise ValueError(f"Unknown closure reading {reading!r}.")
    if boundary not in ("interior", "certified", "all"):
        raise ValueError(f"Unknown boundary policy {boundary!r}.")
    if dec.host is not host:
        raise interfaces.PreconditionError(
            "Decomposition must belong to the host."
        )
    owners = P.memberships()
    table = dec.label_table()
    interior = dec.interior_mask()
    matrix = graphcore.distance_matrix(host)

    def shared(u: int, v: int) -> bool:
        return bool(owners[u] & owners[v])

    groups: dict[tuple, list[tuple[int, int]]] = {}
    for a, b in itertools.permutations(host.vertices, 2):
        separating = table[:, a] != table[:, b]
        if boundary != "all" and int(separating.sum()) != matrix[a, b]:
            continue
        if boundary == "interior" and not interior[separating].all():
            continue
        groups.setdefault(median.pair_signature(dec, a, b), []).append((a, b))
    checked = 0
    signatures = 0
    for signature, group in groups.items():
        inside = [(x, y) for x, y in group if shared(x, y)]
        if not inside:
            continue
        signatures += 1
        for x, y in inside:
            for a, b in group:
                checked += 1
                if not shared(a, b if reading == "ab" else y):
                    return ClosureReport(
                        holds=False,
                        pairs_checked=checked,
                        classes_checked=signatures,
                        counterexample=(
                            VertexIndex(x),
                            VertexIndex(y),
                            VertexIndex(a),
                            VertexIndex(b),
                        ),
                    )
    log.debug("Closure checked %s parallel pairs", checked)
    return ClosureReport(
        holds=True, pairs_checked=checked, classes_checked=signatures
    )


def horoball(base: FiniteGraph, levels: int) -> FiniteGraph:
    """
    Combinatorial horoball over a base graph.

    Vertex (x, n) has id ``n * len(base) + x``. Vertical edges join (x, n) and
    (x, n + 1); on level n, distinct x and y are joined when
    d_base(x, y) <= 2^n.
    """
    if levels < 0:
        raise ValueError("Number of levels must be non-negative.")
    n = len(base)
    matrix = graphcore.distance_matrix(base)
    edges = []
    for level in range(levels + 1):
        reach = 2**level
        offset = level * n
        xs, ys = np.nonzero((matrix > 0) & (matrix <= reach))
        edges.extend(
            (offset + int(x), offset + int(y)) for x, y in zip(xs, ys) if x < y
        )
        if level < levels:
            edges.extend((offset + x, offset + n + x) for x in range(n))
    cells = [(x, level) for level in range(levels + 1) for x in range(n)]
    return FiniteGraph.build(
        len(cells),
        edges,
        payloads=[(base.payloads[x], level) for x, level in cells],
        names=[f"{base.name(x)}@{level}" for x, level in cells],
    )


def parabolic_collection(
    ball: FiniteGraph,
    spec: gp.GraphProductSpec,
    lambdas: collections.abc.Iterable[collections.abc.Iterable[int]],
) -> Collection:
    """
    Parabolic cosets g<Lambda> intersected with a ball of the graph product.

    The ball's edges must carry the Gamma vertex of their generator, as
    :func:`gentlenet.gp.qm_ball` and :func:`gentlenet.gp.cayley_ball` produce.
    Truncated cosets split into their connected pieces; pieces of one vertex
    are left out since they add no cone-off edge.
    """
    members = []
    tags = []
    n = len(ball)
    for subset in lambdas:
        Lambda = frozenset(spec.gamma.check_vertex(v) for v in subset)
        keep = [
            (u, v) for u, v in ball.edges() if ball.edge_label(u, v) in Lambda
        ]
        if not keep:
            continue
        matrix = scipy.sparse.coo_matrix(
            (np.ones(len(keep), dtype=np.int8), tuple(zip(*keep))),
            shape=(n, n),
        ).tocsr()
        _, labels = scipy.sparse.csgraph.connected_components(
            matrix, directed=False
        )
        pieces: dict[int, list[VertexIndex]] = {}
        for v in ball.vertices:
            pieces.setdefault(int(labels[v]), []).append(VertexIndex(v))
        names = tuple(sorted(spec.name(v) for v in Lambda))
        kind = "vertex-group" if len(Lambda) == 1 else "parabolic"
        for piece in pieces.values():
            if len(piece) < 2:  # noqa: PLR2004
                continue
            representative = min(
                piece, key=lambda v: (len(ball.payloads[v]), ball.name(v))
            )
            members.append(piece)
            tags.append(Provenance(kind, representative, names))
    return Collection.build(ball, members, tags)


def vertex_group_collection(
    ball: FiniteGraph, spec: gp.GraphProductSpec
) -> Collection:
    """Cosets gG_u of every vertex group, intersected with the ball."""
    return parabolic_collection(ball, spec, [[v] for v in spec.gamma.vertices])
