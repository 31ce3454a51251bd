"""Contains the lamplighter graph, its tree embedding and path families."""

import collections.abc
import dataclasses
import enum
import itertools
import logging
import os
import re
import typing

import numpy as np

from gentlenet import interfaces

log = logging.getLogger(__name__)

FAMILY_FORMAT = "gentlenet-lamp-family"
FAMILY_FORMAT_VERSION = 1
MAX_WINDOW = 20
WIDEN_STEP = 2

_MOVE = re.compile(r"([LRT])(\d*)")


class LampMoves(enum.Enum):
    """
    Edge rule of the lamplighter graph.

    ``TOGGLE_OR_STEP`` moves the lamplighter one step or toggles the lamp at
    its position. ``STEP_AND_TOGGLE`` moves one step and may toggle the lamp
    on the right end of the traversed unit segment.
    """

    TOGGLE_OR_STEP = "toggle-or-step"
    STEP_AND_TOGGLE = "step-and-toggle"


@dataclasses.dataclass(frozen=True, slots=True, order=True)
class LampVertex:
    lamps: frozenset[int]
    position: int

    @classmethod
    def of(
        cls, lamps: collections.abc.Iterable[int], position: int
    ) -> "LampVertex":
        return cls(lamps=frozenset(lamps), position=position)

    def format(self) -> str:
        lamps = ",".join(str(i) for i in sorted(self.lamps))
        return f"{lamps};{self.position}"

    @classmethod
    def parse(cls, text: str) -> "LampVertex":
        """Parse ``"0,1,2;3"``; the empty lamp set is ``";3"``."""
        try:
            lamps, position = text.strip().split(";")
            return cls.of(
                (int(i) for i in lamps.split(",") if i), int(position)
            )
        except ValueError as err:
            raise ValueError(f"Bad lamplighter state {text!r}.") from err

    def toggled(self, i: int) -> "LampVertex":
        return LampVertex(self.lamps ^ {i}, self.position)

    def moved(self, step: int) -> "LampVertex":
        return LampVertex(self.lamps, self.position + step)


ORIGIN = LampVertex(frozenset(), 0)


@dataclasses.dataclass(frozen=True, slots=True)
class PathFamily:
    """
    Paths from x to y indexed by pairs of lamp sets (A_i, B_i).

    A_i lies left of 0 and B_i right of the lamplighter's target position.
    """

    x: LampVertex
    y: LampVertex
    R: int
    paths: tuple[tuple[LampVertex, ...], ...]
    index: tuple[tuple[frozenset[int], frozenset[int]], ...]

    def __len__(self) -> int:
        return len(self.paths)


@dataclasses.dataclass(frozen=True, slots=True)
class ConnectivityReport:
    count_ok: bool
    paths_valid: bool
    lengths_ok: bool
    disjoint: bool
    max_length: int
    distance: int

    def __bool__(self) -> bool:
        return (
            self.count_ok
            and self.paths_valid
            and self.lengths_ok
            and self.disjoint
        )


def _in_window(v: LampVertex, window: tuple[int, int]) -> bool:
    lo, hi = window
    return lo <= v.position <= hi and all(lo <= i <= hi for i in v.lamps)


def _check_window(window: tuple[int, int]) -> tuple[int, int]:
    lo, hi = window
    if hi < lo:
        raise ValueError(f"Empty window {window}.")
    if hi - lo + 1 > MAX_WINDOW:
        raise interfaces.WindowOverflowError(
            f"Window {window} has more than {MAX_WINDOW} positions."
        )
    return lo, hi


def lamp_neighbors(
    v: LampVertex,
    window: typing.Optional[tuple[int, int]] = None,
    moves: LampMoves = LampMoves.TOGGLE_OR_STEP,
) -> list[LampVertex]:
    """Neighbors of v, clipped to the window when one is given."""
    if window is not None and not _in_window(v, window):
        raise interfaces.WindowOverflowError(
            f"{v.format()} lies outside window {window}."
        )
    p = v.position
    if moves is LampMoves.TOGGLE_OR_STEP:
        found = [v.moved(1), v.moved(-1), v.toggled(p)]
    else:
        found = [
            v.moved(1),
            v.toggled(p + 1).moved(1),
            v.moved(-1),
            v.toggled(p).moved(-1),
        ]
    if window is None:
        return found
    return [w for w in found if window[0] <= w.position <= window[1]]


def _mask(v: LampVertex, lo: int) -> int:
    return sum(1 << (i - lo) for i in v.lamps)


def _bfs_table(
    lo: int,
    hi: int,
    source: LampVertex,
    moves: LampMoves,
    target: typing.Optional[tuple[int, int]] = None,
) -> np.ndarray:
    """Distances over (lamp mask, window-relative position); -1 unreached."""
    width = hi - lo + 1
    size = 1 << width
    dist = np.full((size, width), -1, dtype=np.int32)
    frontier = np.zeros((size, width), dtype=bool)
    frontier[_mask(source, lo), source.position - lo] = True
    dist[frontier] = 0
    masks = np.arange(size)
    level = 0
    while frontier.any():
        if target is not None and dist[target] >= 0:
            break
        level += 1
        reached = np.zeros_like(frontier)
        reached[:, 1:] |= frontier[:, :-1]
        reached[:, :-1] |= frontier[:, 1:]
        if moves is LampMoves.TOGGLE_OR_STEP:
            for q in range(width):
                reached[:, q] |= frontier[masks ^ (1 << q), q]
        else:
            for q in range(1, width):
                reached[:, q] |= frontier[masks ^ (1 << q), q - 1]
            for q in range(width - 1):
                reached[:, q] |= frontier[masks ^ (1 << (q + 1)), q + 1]
        reached &= dist < 0
        dist[reached] = level
        frontier = reached
    return dist


def lamp_distance_table(
    window: tuple[int, int],
    source: LampVertex = ORIGIN,
    moves: LampMoves = LampMoves.TOGGLE_OR_STEP,
) -> np.ndarray:
    """
    BFS distances from ``source`` to every state of the windowed graph.

    Entry ``[mask, q]`` is the state whose lamps are the set bits of ``mask``
    (bit k stands for position lo + k) with the lamplighter at lo + q.
    """
    lo, hi = _check_window(window)
    if not _in_window(source, window):
        raise interfaces.WindowOverflowError(
            f"{source.format()} lies outside window {window}."
        )
    return _bfs_table(lo, hi, source, moves)


def state_index(v: LampVertex, window: tuple[int, int]) -> tuple[int, int]:
    """Index of v in a distance table over ``window``."""
    if not _in_window(v, window):
        raise interfaces.WindowOverflowError(
            f"{v.format()} lies outside window {window}."
        )
    return _mask(v, window[0]), v.position - window[0]


def _windowed_distance(
    x: LampVertex, y: LampVertex, window: tuple[int, int], moves: LampMoves
) -> int:
    lo, hi = _check_window(window)
    for v in (x, y):
        if not _in_window(v, window):
            raise interfaces.WindowOverflowError(
                f"{v.format()} lies outside window {window}."
            )
    target = state_index(y, window)
    return int(_bfs_table(lo, hi, x, moves, target=target)[target])


def _hull(*states: LampVertex) -> tuple[int, int]:
    points = [v.position for v in states]
    points.extend(itertools.chain.from_iterable(v.lamps for v in states))
    return min(points), max(points)


def lamp_distance(
    x: LampVertex,
    y: LampVertex,
    window: typing.Optional[tuple[int, int]] = None,
    moves: LampMoves = LampMoves.TOGGLE_OR_STEP,
) -> int:
    """
    BFS distance in the lamplighter graph.

    With an explicit window the BFS runs once inside it. Otherwise the window
    starts at the hull of both states padded by two positions and widens by
    two on each side until the distance is unchanged over two widenings.

    Raises
    ------
    interfaces.WindowOverflowError
        If a state lies outside the given window, or the window would exceed
        the enumeration limit before the distance stabilizes.
    """
    if window is not None:
        return _windowed_distance(x, y, window, moves)
    lo, hi = _hull(x, y)
    lo, hi = lo - WIDEN_STEP, hi + WIDEN_STEP
    history: list[int] = []
    while True:
        d = _windowed_distance(x, y, (lo, hi), moves)
        if history and d != history[-1]:
            log.warning(
                "Lamp distance changed from %s to %s on widening to %s",
                history[-1],
                d,
                (lo, hi),
            )
        history.append(d)
        stable = len(history) >= 3  # noqa: PLR2004
        if stable and history[-3] == history[-2] == d:
            return d
        lo, hi = lo - WIDEN_STEP, hi + WIDEN_STEP


def translate(x: LampVertex, y: LampVertex) -> LampVertex:
    """The state x^-1 y, so that d(x, y) = d(origin, x^-1 y)."""
    return LampVertex(
        frozenset(i - x.position for i in x.lamps ^ y.lamps),
        y.position - x.position,
    )


def lamp_distance_closed_form(
    y: LampVertex, x: LampVertex = ORIGIN
) -> int:
    """
    Distance under the toggle-or-step rule without search.

    From the origin to (S, p): |S| + 2 (hi - lo) - |p| where lo and hi bound
    S together with 0 and p.
    """
    target = translate(x, y)
    points = set(target.lamps) | {0, target.position}
    lo, hi = min(points), max(points)
    return len(target.lamps) + 2 * (hi - lo) - abs(target.position)


def tree_embedding(bits: str) -> LampVertex:
    """Send x1..xn to ({i : xi = 1}, n)."""
    if any(c not in "01" for c in bits):
        raise ValueError(f"Not a binary string: {bits!r}.")
    return LampVertex.of(
        (i + 1 for i, c in enumerate(bits) if c == "1"), len(bits)
    )


def tree_distance(u: str, v: str) -> int:
    common = 0
    for a, b in zip(u, v):
        if a != b:
            break
        common += 1
    return len(u) + len(v) - 2 * common


def sphere_image_size(n: int) -> int:
    """Number of distinct images of the strings of length n."""
    return len(
        {tree_embedding("".join(b)) for b in itertools.product("01", repeat=n)}
    )


def index_space_suffices(R: int) -> bool:
    """Exact check of (2^floor(R/2) - 1)^4 >= 2^R."""
    return (2 ** (R // 2) - 1) ** 4 >= 2**R


def _path_count(R: int, base: int = 2, root: int = 4) -> int:
    """Least N with N^root >= base^R."""
    need = base**R
    N = max(1, int(round(need ** (1 / root))))
    while N**root < need:
        N += 1
    while N > 1 and (N - 1) ** root >= need:
        N -= 1
    return N


def _sweep(
    walk: list[LampVertex],
    target: int,
    toggles: collections.abc.Container[int],
) -> None:
    current = walk[-1]
    step = 1 if target >= current.position else -1
    while True:
        if current.position in toggles:
            current = current.toggled(current.position)
            walk.append(current)
        if current.position == target:
            return
        current = current.moved(step)
        walk.append(current)


def _itinerary(
    y: LampVertex, A: frozenset[int], B: frozenset[int], m: int
) -> tuple[LampVertex, ...]:
    p = y.position
    walk = [ORIGIN]
    _sweep(walk, -m, A)
    _sweep(walk, p + m, y.lamps | B)
    _sweep(walk, -m, A)
    _sweep(walk, p + m, ())
    _sweep(walk, p, B)
    return tuple(walk)


def path_family(y: LampVertex, R: int) -> PathFamily:
    """
    Build lamp-indexed paths from the origin to y = (S, p), S in [0, p].

    With m = floor(R/2), path i uses A_i = {-k-1 : bit k of i} and
    B_i = {p+k+1 : bit k of i}, and makes five sweeps: left to -m switching
    on A_i; right to p+m switching on S and B_i; left to -m switching off A_i;
    right to p+m; left to p switching off B_i.

    Raises
    ------
    interfaces.PreconditionError
        If S is not inside [0, p] or R is outside [6, d/2).
    """
    p = y.position
    if p < 0 or any(not 0 <= i <= p for i in y.lamps):
        raise interfaces.PreconditionError("Lamps must lie in [0, p].")
    d = lamp_distance_closed_form(y)
    if R < 6 or 2 * R >= d:  # noqa: PLR2004
        raise interfaces.PreconditionError(
            f"Need 6 <= R < d/2 with d = {d}, got R = {R}."
        )
    m = R // 2
    N = _path_count(R)
    if N > 2**m - 1:
        raise interfaces.PreconditionError(
            f"Index space of {2**m - 1} sets cannot hold {N} paths."
        )
    paths = []
    index = []
    for i in range(1, N + 1):
        bits = [k for k in range(m) if i >> k & 1]
        A = frozenset(-k - 1 for k in bits)
        B = frozenset(p + k + 1 for k in bits)
        paths.append(_itinerary(y, A, B, m))
        index.append((A, B))
    log.debug("Built %s paths of lengths %s", N, [len(w) - 1 for w in paths])
    return PathFamily(
        x=ORIGIN, y=y, R=R, paths=tuple(paths), index=tuple(index)
    )


def _adjacent(u: LampVertex, v: LampVertex) -> bool:
    return v in lamp_neighbors(u)


def verify_exp_connected(
    x: LampVertex,
    y: LampVertex,
    family: PathFamily,
    R: int,
    L: int = 6,
    base: int = 2,
    root: int = 4,
) -> ConnectivityReport:
    """
    Certify exponential connectivity with a = base^(1/root) at scale R.

    Checks N^root >= base^R, that each path is a walk from x to y under the
    toggle-or-step rule of length at most L d(x, y), and that the paths are
    pairwise disjoint once the R-balls around x and y are removed.
    """
    if family.x != x or family.y != y:
        raise ValueError("Family endpoints do not match.")
    d = lamp_distance_closed_form(y, x)
    count_ok = len(family) ** root >= base**R
    valid = all(
        path[0] == x
        and path[-1] == y
        and all(_adjacent(u, v) for u, v in itertools.pairwise(path))
        for path in family.paths
    )
    lengths = [len(path) - 1 for path in family.paths]
    max_length = max(lengths, default=0)
    far = [
        {
            v
            for v in path
            if lamp_distance_closed_form(v, x) > R
            and lamp_distance_closed_form(v, y) > R
        }
        for path in family.paths
    ]
    disjoint = all(not (a & b) for a, b in itertools.combinations(far, 2))
    return ConnectivityReport(
        count_ok=count_ok,
        paths_valid=valid,
        lengths_ok=max_length <= L * d,
        disjoint=disjoint,
        max_length=max_length,
        distance=d,
    )


def encode_moves(path: collections.abc.Sequence[LampVertex]) -> str:
    """Run-length text of a toggle-or-step walk, e.g. ``"TL3R2"``."""
    letters = []
    for u, v in itertools.pairwise(path):
        if v.position == u.position + 1 and v.lamps == u.lamps:
            letters.append("R")
        elif v.position == u.position - 1 and v.lamps == u.lamps:
            letters.append("L")
        elif v == u.toggled(u.position):
            letters.append("T")
        else:
            raise ValueError(f"{u.format()} and {v.format()} are not adjacent.")
    runs = [(k, len(list(g))) for k, g in itertools.groupby(letters)]
    return "".join(k + (str(n) if n > 1 else "") for k, n in runs)


def decode_moves(start: LampVertex, text: str) -> tuple[LampVertex, ...]:
    if _MOVE.sub("", text):
        raise ValueError(f"Bad move string {text!r}.")
    walk = [start]
    for letter, count in _MOVE.findall(text):
        for _ in range(int(count) if count else 1):
            current = walk[-1]
            if letter == "R":
                walk.append(current.moved(1))
            elif letter == "L":
                walk.append(current.moved(-1))
            else:
                walk.append(current.toggled(current.position))
    return tuple(walk)


def _format_set(values: collections.abc.Iterable[int]) -> str:
    return ",".join(str(i) for i in sorted(values)) or "-"


def _parse_set(text: str) -> frozenset[int]:
    if text == "-":
        return frozenset()
    return frozenset(int(i) for i in text.split(","))


def write_family(
    family: PathFamily,
    path: typing.Union[str, os.PathLike],
    header: typing.Optional[collections.abc.Mapping[str, object]] = None,
) -> None:
    """
    Write a family as text: ``# key=value`` headers, then one path per line.

    Each path line holds A, B and the run-length moves, tab separated.
    """
    lines = [
        f"# format={FAMILY_FORMAT}",
        f"# version={FAMILY_FORMAT_VERSION}",
    ]
    lines.extend(f"# {k}={v}" for k, v in (header or {}).items())
    lines.append(f"# x={family.x.format()}")
    lines.append(f"# y={family.y.format()}")
    lines.append(f"# R={family.R}")
    for (A, B), walk in zip(family.index, family.paths):
        moves = encode_moves(walk)
        lines.append(f"{_format_set(A)}\t{_format_set(B)}\t{moves}")
    with open(path, "w", encoding="utf-8") as fout:
        fout.write("\n".join(lines) + "\n")


def read_family(path: typing.Union[str, os.PathLike]) -> PathFamily:
    meta: dict[str, str] = {}
    index = []
    paths = []
    with open(path, encoding="utf-8") as fin:
        rows = [line.rstrip("\n") for line in fin if line.strip()]
    for line in rows:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
    if int(meta.get("version", FAMILY_FORMAT_VERSION)) != FAMILY_FORMAT_VERSION:
        raise NotImplementedError(
            f"Family file version {meta['version']} is not supported."
        )
    try:
        x = LampVertex.parse(meta["x"])
        y = LampVertex.parse(meta["y"])
        R = int(meta["R"])
    except KeyError as err:
        raise ValueError(f"Family file is missing {err}.") from err
    for line in rows:
        if line.startswith("#"):
            continue
        A, B, moves = line.split("\t")
        index.append((_parse_set(A), _parse_set(B)))
        paths.append(decode_moves(x, moves))
    return PathFamily(x=x, y=y, R=R, paths=tuple(paths), index=tuple(index))
