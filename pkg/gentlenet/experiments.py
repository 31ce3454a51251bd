"""Contains the experiment configuration, runners and table writers."""

import collections.abc
import dataclasses
import hashlib
import json
import logging
import os
import time
import typing
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from gentlenet import coneoff, gp, graphcore, hyp, lamp, median
from gentlenet.interfaces import HostMode, VertexIndex

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENT_KINDS = (
    "ball",
    "hyperplanes",
    "patterns",
    "profile",
    "delta",
    "detour",
    "lamp-witness",
    "sequences",
    "closure",
)
FLOAT_FORMAT = "%.10g"

_Z = "z:window={window}"


def _z(window: int) -> str:
    return _Z.format(window=window)


PRESETS: dict[str, collections.abc.Callable[[int], gp.GraphProductSpec]] = {
    "F2": lambda w: gp.GraphProductSpec.build(["a", "b"], [_z(w)] * 2),
    "Z": lambda w: gp.GraphProductSpec.build(["a"], [_z(w)]),
    "Z2": lambda w: gp.GraphProductSpec.build(
        ["a", "b"], [_z(w)] * 2, [("a", "b")]
    ),
    "A(P3)": lambda w: gp.GraphProductSpec.build(
        ["a", "b", "c"], [_z(w)] * 3, [("a", "b"), ("b", "c")]
    ),
    "A(C4)": lambda w: gp.GraphProductSpec.build(
        ["a", "b", "c", "d"],
        [_z(w)] * 4,
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
    ),
    "C(C5)": lambda w: gp.GraphProductSpec.build(
        ["a", "b", "c", "d", "e"],
        ["c2"] * 5,
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")],
    ),
    "C(K3,3)": lambda w: gp.GraphProductSpec.build(
        ["a", "b", "c", "x", "y", "z"],
        ["c2"] * 6,
        [(u, v) for u in "abc" for v in "xyz"],
    ),
    "D_inf": lambda w: gp.GraphProductSpec.build(["a", "b"], ["c2"] * 2),
    "Z2^3": lambda w: gp.GraphProductSpec.build(
        ["a", "b", "c"], ["c2"] * 3, [("a", "b"), ("b", "c"), ("a", "c")]
    ),
    "Z4xZ4": lambda w: gp.GraphProductSpec.build(
        ["a", "b"], ["c4"] * 2, [("a", "b")]
    ),
}


@dataclasses.dataclass(frozen=True, slots=True)
class ExperimentEntry:
    """
    One experiment of a configuration.

    ``params`` holds the kind-specific settings; every runner documents the
    keys it reads and their defaults.
    """

    name: str
    kind: str
    params: collections.abc.Mapping[str, typing.Any] = dataclasses.field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        if not self.name or os.sep in self.name:
            raise ValueError(f"Bad experiment name {self.name!r}.")
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(
                f"Unknown experiment kind {self.kind!r}; "
                f"expected one of {', '.join(EXPERIMENT_KINDS)}."
            )

    def get(self, key: str, default: typing.Any = None) -> typing.Any:
        return self.params.get(key, default)

    def to_document(self) -> dict[str, typing.Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": dict(self.params),
        }


@dataclasses.dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """
    A versioned list of experiments with the run-wide settings.

    The output directory and the process count do not enter the config hash,
    so outputs are identical wherever and however parallel they are produced.
    """

    experiments: tuple[ExperimentEntry, ...] = ()
    seed: int = 0
    out: Path = Path("results")
    num_process: int = 1
    base_dir: Path = Path(".")

    def __post_init__(self) -> None:
        if self.num_process < 1:
            raise ValueError("Must have number of processes greater than 0.")
        names = [entry.name for entry in self.experiments]
        if len(set(names)) != len(names):
            raise ValueError("Experiment names must be unique.")

    def to_document(self) -> dict[str, typing.Any]:
        return {
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "experiments": [e.to_document() for e in self.experiments],
        }

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the configuration."""
        text = json.dumps(
            self.to_document(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_from_document(
    document: collections.abc.Mapping,
    *,
    base_dir: typing.Union[str, os.PathLike] = ".",
    seed: typing.Optional[int] = None,
    out: typing.Optional[typing.Union[str, os.PathLike]] = None,
    num_process: typing.Optional[int] = None,
) -> ExperimentConfig:
    """
    Parse a configuration document; keyword arguments override its settings.

    Raises
    ------
    NotImplementedError
        If the document declares an unsupported schema version.
    ValueError
        If the document is malformed.
    """
    schema = document.get("schema")
    if schema != SCHEMA_VERSION:
        raise NotImplementedError(
            f"Config schema {schema!r} is not supported, "
            f"expected {SCHEMA_VERSION}."
        )
    try:
        entries = tuple(
            ExperimentEntry(
                name=item["name"],
                kind=item["kind"],
                params=dict(item.get("params", {})),
            )
            for item in document.get("experiments", [])
        )
    except (KeyError, TypeError) as err:
        raise ValueError(f"Malformed experiment entry: {err}") from err
    return ExperimentConfig(
        experiments=entries,
        seed=int(document.get("seed", 0) if seed is None else seed),
        out=Path(out if out is not None else document.get("out", "results")),
        num_process=int(
            document.get("processes", 1) if num_process is None else num_process
        ),
        base_dir=Path(base_dir),
    )


def load_config(
    path: typing.Union[str, os.PathLike], **overrides: typing.Any
) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fin:
            document = json.load(fin)
    except json.JSONDecodeError as err:
        raise ValueError(f"Config {path} is not valid JSON: {err}") from err
    return config_from_document(document, base_dir=path.parent, **overrides)


def write_table(
    frame: pd.DataFrame,
    path: typing.Union[str, os.PathLike],
    header: collections.abc.Mapping[str, typing.Any],
) -> Path:
    """Write a CSV preceded by ``# key=value`` lines."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fout:
        for key, value in header.items():
            fout.write(f"# {key}={value}\n")
        frame.to_csv(
            fout, index=False, lineterminator="\n", float_format=FLOAT_FORMAT
        )
    log.debug("Wrote %s rows to %s", len(frame), path)
    return path


def read_table(
    path: typing.Union[str, os.PathLike],
) -> tuple[dict[str, str], pd.DataFrame]:
    """Read a table written by :func:`write_table`."""
    header = {}
    with open(path, encoding="utf-8") as fin:
        for line in fin:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
    return header, pd.read_csv(path, comment="#")


@dataclasses.dataclass(frozen=True, slots=True)
class _Context:
    config: ExperimentConfig
    entry: ExperimentEntry
    config_hash: str

    def header(self, **extra: typing.Any) -> dict[str, typing.Any]:
        return {
            "experiment": self.entry.name,
            "kind": self.entry.kind,
            "seed": self.config.seed,
            "config_hash": self.config_hash,
            **extra,
        }

    def path(self, suffix: str) -> Path:
        return self.config.out / f"{self.entry.name}{suffix}"


def load_spec(
    value: typing.Union[str, collections.abc.Mapping],
    *,
    window: int = 8,
    base_dir: typing.Union[str, os.PathLike] = ".",
) -> gp.GraphProductSpec:
    """Resolve a preset name, an inline spec document or a spec file path."""
    if isinstance(value, collections.abc.Mapping):
        return gp.spec_from_document(value)
    if value in PRESETS:
        return PRESETS[value](window)
    path = Path(base_dir) / value
    if not path.exists():
        raise ValueError(
            f"{value!r} is neither a preset ({', '.join(PRESETS)}) nor a file."
        )
    return gp.read_spec(path)


def _spec(ctx: _Context) -> gp.GraphProductSpec:
    try:
        value = ctx.entry.params["spec"]
    except KeyError as err:
        raise ValueError(f"Experiment {ctx.entry.name} needs a spec.") from err
    return load_spec(
        value,
        window=int(ctx.entry.get("window", 8)),
        base_dir=ctx.config.base_dir,
    )


def _ball(
    spec: gp.GraphProductSpec, host: str, R: int
) -> graphcore.FiniteGraph:
    if host == "qm":
        return gp.qm_ball(spec, R)
    if host == "cayley":
        return gp.cayley_ball(spec, R)
    raise ValueError(f"Unknown host {host!r}; expected 'qm' or 'cayley'.")


def _lambdas(
    spec: gp.GraphProductSpec, value: typing.Any
) -> list[frozenset[VertexIndex]]:
    if value == "vertex-groups":
        return [frozenset([VertexIndex(v)]) for v in spec.gamma.vertices]
    if value == "polynomial":
        return gp.maximal_polynomial_parabolics(spec)
    if isinstance(value, list):
        return [frozenset(spec.vertex(n) for n in names) for names in value]
    raise ValueError(
        f"Unknown collection {value!r}; use 'vertex-groups', 'polynomial' "
        "or a list of vertex-name lists."
    )


def _collection(
    ball: graphcore.FiniteGraph, spec: gp.GraphProductSpec, value: typing.Any
) -> coneoff.Collection:
    return coneoff.parabolic_collection(ball, spec, _lambdas(spec, value))


def _word_vertex(
    spec: gp.GraphProductSpec, g: graphcore.FiniteGraph, text: str
) -> VertexIndex:
    return g.vertex(gp.normalize(spec, gp.parse_word(spec, text)))


def run_ball(ctx: _Context) -> list[Path]:
    """Params: spec, radius (3), host ("qm")."""
    spec = _spec(ctx)
    R = int(ctx.entry.get("radius", 3))
    host = ctx.entry.get("host", "qm")
    g = _ball(spec, host, R)
    document = graphcore.graph_to_document(g)
    document["meta"] = ctx.header(host=host, radius=R)
    path = ctx.path(".json")
    with open(path, "w", encoding="utf-8") as fout:
        json.dump(document, fout, indent=1, sort_keys=True)
        fout.write("\n")
    frame = pd.DataFrame(
        [{"radius": R, "vertices": len(g), "edges": g.n_edges}]
    )
    return [path, write_table(frame, ctx.path(".csv"), ctx.header(host=host))]


def run_hyperplanes(ctx: _Context) -> list[Path]:
    """Params: spec, radius (2), host ("qm"), boundary ("interior")."""
    spec = _spec(ctx)
    R = int(ctx.entry.get("radius", 2))
    host = ctx.entry.get("host", "qm")
    g = _ball(spec, host, R)
    mode = HostMode.QUASI_MEDIAN if host == "qm" else HostMode.MEDIAN
    dec = median.hyperplanes(g, mode=mode)
    boundary = ctx.entry.get("boundary", "interior")
    identity = median.distance_identity(dec, boundary)
    path = ctx.path(".json")
    median.write_decomposition(dec, path)
    frame = pd.DataFrame(
        [
            {
                "radius": R,
                "vertices": len(g),
                "classes": len(dec),
                "interior_classes": int(dec.interior_mask().sum()),
                "transverse_pairs": len(dec.transverse_pairs()),
                "pairs_checked": identity.pairs_checked,
                "violations": len(identity.violations),
            }
        ]
    )
    header = ctx.header(host=host, mode=mode.value, boundary=boundary)
    return [path, write_table(frame, ctx.path(".csv"), header)]


def run_patterns(ctx: _Context) -> list[Path]:
    """Params: spec."""
    spec = _spec(ctx)

    def witness(found: typing.Optional[tuple[str, dict]]) -> str:
        if found is None:
            return ""
        name, embedding = found
        images = " ".join(
            f"{k}->{spec.name(v)}" for k, v in sorted(embedding.items())
        )
        return f"{name}: {images}"

    rows = [
        {
            "check": "contains F2",
            "value": gp.contains_F2(spec),
            "witness": witness(gp.contains_F2_witness(spec)),
        },
        {
            "check": "contains F2xF2",
            "value": gp.contains_F2xF2(spec),
            "witness": witness(gp.contains_F2xF2_witness(spec)),
        },
        {
            "check": "lin-polynomially hyperbolic",
            "value": gp.lin_polynomially_hyperbolic(spec),
            "witness": "",
        },
        {
            "check": "cubical dimension",
            "value": gp.cubical_dimension(spec),
            "witness": "",
        },
    ]
    for row in rows:
        value = row["value"]
        shown = str(value).lower() if isinstance(value, bool) else value
        print(f"{row['check']}: {shown}")
    frame = pd.DataFrame(rows, columns=["check", "value", "witness"])
    return [write_table(frame, ctx.path(".csv"), ctx.header())]


def _profile_map(
    ctx: _Context, spec: gp.GraphProductSpec, host: graphcore.FiniteGraph
) -> coneoff.VertexMap:
    kind = ctx.entry.get("map", "cone-off")
    if kind == "cone-off":
        collection = ctx.entry.get("collection", "vertex-groups")
        P = _collection(host, spec, collection)
        return coneoff.VertexMap.canonical(host, coneoff.cone_off(host, P))
    if kind == "identity":
        return coneoff.VertexMap.identity(host)
    if kind == "constant":
        origin = typing.cast(int, host.origin)
        return coneoff.VertexMap.constant(host, host, origin)
    raise ValueError(f"Unknown map {kind!r}.")


def run_profile(ctx: _Context) -> list[Path]:
    """
    Params: spec, radius (6), host ("cayley"), map ("cone-off", "identity" or
    "constant"), collection ("vertex-groups"), r1_max (3), r2_max (2),
    centers ("inner-ball" or "origin"), target_depth (none), family ("lin").

    With ``target_depth`` only images of host vertices at most that deep are
    used as codomain centers.
    """
    spec = _spec(ctx)
    R = int(ctx.entry.get("radius", 6))
    host = _ball(spec, ctx.entry.get("host", "cayley"), R)
    phi = _profile_map(ctx, spec, host)
    centers = ctx.entry.get("centers", "inner-ball")
    if centers not in ("inner-ball", "origin"):
        raise ValueError(f"Unknown centers {centers!r}.")
    target_depth = ctx.entry.get("target_depth")
    targets = None
    if target_depth is not None:
        depths = host.depths()
        targets = sorted(
            {
                phi.image[v]
                for v in host.vertices
                if depths[v] <= int(target_depth)
            }
        )
    profile = coneoff.gentleness_profile(
        phi,
        int(ctx.entry.get("r1_max", 3)),
        int(ctx.entry.get("r2_max", 2)),
        centers=[host.origin] if centers == "origin" else None,
        targets=targets,
        num_process=ctx.config.num_process,
    )
    family = ctx.entry.get("family", "lin")
    fit = coneoff.fit_constant(profile, family)
    header = ctx.header(
        sampling=profile.sampling,
        family=fit.family,
        constant="inf" if fit.infinite else fit.constant,
        observed_degree=f"{coneoff.observed_degree(profile):.6g}",
        monotone=profile.is_monotone(),
    )
    return [write_table(profile.to_frame(), ctx.path(".csv"), header)]


def run_delta(ctx: _Context) -> list[Path]:
    """
    Params: spec, radii ([2, 3]), host ("cayley"), coned (false), collection
    ("polynomial"), sample ("exhaustive"), hint (none).

    ``hint`` lists four words; ``{h}`` in a word stands for half the radius.
    """
    spec = _spec(ctx)
    host_kind = ctx.entry.get("host", "cayley")
    coned = bool(ctx.entry.get("coned", False))
    sample = ctx.entry.get("sample", "exhaustive")
    words = ctx.entry.get("hint")
    rows = []
    for R in ctx.entry.get("radii", [2, 3]):
        g = _ball(spec, host_kind, int(R))
        hint = None
        if words is not None:
            try:
                hint = tuple(
                    _word_vertex(spec, g, word.format(h=int(R) // 2))
                    for word in words
                )
            except KeyError as err:
                raise ValueError(f"Hint word outside the ball: {err}") from err
        if coned:
            P = _collection(g, spec, ctx.entry.get("collection", "polynomial"))
            g = coneoff.cone_off(g, P)
        report = hyp.four_point_delta(
            g,
            sample,
            seed=ctx.config.seed,
            num_process=ctx.config.num_process,
            hint=hint,
        )
        rows.append(
            {
                "radius": int(R),
                "vertices": len(g),
                "twice_delta": report.twice_delta,
                "delta": report.delta,
                "sampled": report.sampled,
                "scanned": report.scanned,
            }
        )
    frame = pd.DataFrame(rows)
    header = ctx.header(host=host_kind, coned=coned)
    return [write_table(frame, ctx.path(".csv"), header)]


def _midpoint(g: graphcore.FiniteGraph, x: int, y: int) -> VertexIndex:
    rows = graphcore.distances_from(g, [x, y])
    d = int(rows[0, y])
    on_geodesic = np.flatnonzero(
        (rows[0] == d // 2) & (rows[0] + rows[1] == d)
    )
    return VertexIndex(int(on_geodesic[0]))


def run_detour(ctx: _Context) -> list[Path]:
    """Params: spec, radius (6), x, y, center (midpoint), s ([1, 2])."""
    spec = _spec(ctx)
    R = int(ctx.entry.get("radius", 6))
    g = _ball(spec, ctx.entry.get("host", "cayley"), R)
    try:
        x = _word_vertex(spec, g, ctx.entry.params["x"])
        y = _word_vertex(spec, g, ctx.entry.params["y"])
    except KeyError as err:
        raise ValueError(f"Detour needs x and y in the ball: {err}") from err
    center_text = ctx.entry.get("center")
    center = (
        _midpoint(g, x, y)
        if center_text is None
        else _word_vertex(spec, g, center_text)
    )
    frame = hyp.detour_profile(g, x, y, center, ctx.entry.get("s", [1, 2]))
    header = ctx.header(x=g.name(x), y=g.name(y), center=g.name(center))
    return [write_table(frame, ctx.path(".csv"), header)]


def run_lamp_witness(ctx: _Context) -> list[Path]:
    """Params: y ("0,...,13;13"), R ([6]); writes one family file per R."""
    default_y = ",".join(str(i) for i in range(14)) + ";13"
    y = lamp.LampVertex.parse(ctx.entry.get("y", default_y))
    paths = []
    rows = []
    for R in ctx.entry.get("R", [6]):
        family = lamp.path_family(y, int(R))
        report = lamp.verify_exp_connected(family.x, y, family, int(R))
        target = ctx.path(f"_R{R}.family")
        lamp.write_family(family, target, header=ctx.header())
        paths.append(target)
        rows.append(
            {
                "R": int(R),
                "paths": len(family),
                "distance": report.distance,
                "max_length": report.max_length,
                "count_ok": report.count_ok,
                "paths_valid": report.paths_valid,
                "lengths_ok": report.lengths_ok,
                "disjoint": report.disjoint,
                "holds": bool(report),
            }
        )
    frame = pd.DataFrame(rows)
    paths.append(write_table(frame, ctx.path(".csv"), ctx.header(y=y.format())))
    return paths


def run_sequences(ctx: _Context) -> list[Path]:
    """Params: s (1), exponents (4 to 9 in half steps) giving n = 10^e."""
    s = int(ctx.entry.get("s", 1))
    exponents = ctx.entry.get("exponents", [e / 2 for e in range(8, 19)])
    rows = [
        dataclasses.asdict(hyp.nogentle_sequences(10.0**e, s))
        for e in exponents
    ]
    frame = pd.DataFrame(rows)
    return [write_table(frame, ctx.path(".csv"), ctx.header(s=s))]


def run_closure(ctx: _Context) -> list[Path]:
    """
    Params: spec, radius (2), collection ("polynomial"), reading ("ab"),
    boundary ("certified"), syllabic (true).
    """
    spec = _spec(ctx)
    R = int(ctx.entry.get("radius", 2))
    host = gp.qm_ball(spec, R)
    P = _collection(host, spec, ctx.entry.get("collection", "polynomial"))
    dec = median.hyperplanes(host, mode=HostMode.QUASI_MEDIAN)
    report = coneoff.check_parallel_closure(
        host,
        dec,
        P,
        reading=ctx.entry.get("reading", "ab"),
        boundary=ctx.entry.get("boundary", "certified"),
    )
    row = {
        "radius": R,
        "vertices": len(host),
        "members": len(P),
        "closure_holds": report.holds,
        "closure_pairs": report.pairs_checked,
        "closure_classes": report.classes_checked,
    }
    if ctx.entry.get("syllabic", True):
        coned = coneoff.cone_off(host, P)
        failures = sum(
            coneoff.is_syllabic_pair(host, P, x, y, coned=coned) is None
            for x in host.vertices
            for y in host.vertices
            if x < y
        )
        row["syllabic_failures"] = failures
    frame = pd.DataFrame([row])
    return [write_table(frame, ctx.path(".csv"), ctx.header())]


RUNNERS: dict[str, collections.abc.Callable[[_Context], list[Path]]] = {
    "ball": run_ball,
    "hyperplanes": run_hyperplanes,
    "patterns": run_patterns,
    "profile": run_profile,
    "delta": run_delta,
    "detour": run_detour,
    "lamp-witness": run_lamp_witness,
    "sequences": run_sequences,
    "closure": run_closure,
}


def run_entry(config: ExperimentConfig, entry: ExperimentEntry) -> list[Path]:
    print(f"Job name: {entry.name}")
    print(f"Job type: {entry.kind}")
    print("Job started on:", datetime.now())
    start_time = time.time()
    ctx = _Context(config=config, entry=entry, config_hash=config.config_hash())
    outputs = RUNNERS[entry.kind](ctx)
    elapsed_time = time.time() - start_time
    print("Outputs:", ", ".join(str(p) for p in outputs))
    print("Time used:", "{:.2f}".format(elapsed_time), "seconds")
    print()
    return outputs


def run(config: ExperimentConfig) -> list[Path]:
    """Run every experiment in order and return the files written."""
    if not config.experiments:
        log.info("No experiments to run")
        return []
    config.out.mkdir(parents=True, exist_ok=True)
    outputs = []
    for entry in config.experiments:
        outputs.extend(run_entry(config, entry))
    return outputs


def acceptance_suite(seed: int = 0) -> ExperimentConfig:
    """The packaged acceptance experiments."""
    entries = [
        ExperimentEntry("patterns_A_C4", "patterns", {"spec": "A(C4)"}),
        ExperimentEntry("patterns_A_P3", "patterns", {"spec": "A(P3)"}),
        ExperimentEntry(
            "profile_F2_cosets",
            "profile",
            {
                "spec": "F2",
                "radius": 8,
                "r1_max": 6,
                "r2_max": 3,
                "centers": "origin",
                "target_depth": 4,
                "family": "lin",
            },
        ),
        ExperimentEntry(
            "profile_F2_constant",
            "profile",
            {
                "spec": "F2",
                "map": "constant",
                "radius": 8,
                "r1_max": 8,
                "r2_max": 1,
                "centers": "origin",
                "family": "exp",
            },
        ),
        ExperimentEntry(
            "delta_A_P3_raw",
            "delta",
            {
                "spec": "A(P3)",
                "radii": [4, 6, 8],
                "hint": [
                    "a^{h} b^-{h}",
                    "a^-{h} b^-{h}",
                    "a^{h} b^{h}",
                    "a^-{h} b^{h}",
                ],
            },
        ),
        ExperimentEntry(
            "delta_A_P3_coned",
            "delta",
            {
                "spec": "A(P3)",
                "radii": [4, 6, 8],
                "coned": True,
            },
        ),
        ExperimentEntry(
            "detour_Z2",
            "detour",
            {"spec": "Z2", "radius": 6, "x": "a^-4", "y": "a^4", "s": [1, 2]},
        ),
        ExperimentEntry("lamp_witness", "lamp-witness", {"R": [6, 7, 8]}),
        ExperimentEntry("sequences", "sequences", {"s": 1}),
        ExperimentEntry(
            "closure_C_C5",
            "closure",
            {"spec": "C(C5)", "radius": 4},
        ),
        ExperimentEntry(
            "closure_A_P3",
            "closure",
            {"spec": "A(P3)", "window": 2, "radius": 2},
        ),
    ]
    return ExperimentConfig(experiments=tuple(entries), seed=seed)
