"""Contains the gentlenet command line interface."""

import argparse
import logging
import sys
import typing
from pathlib import Path

from gentlenet import experiments

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _entry(
    args: argparse.Namespace, kind: str, **params: typing.Any
) -> experiments.ExperimentEntry:
    """Build an entry, leaving unset options to the runner's defaults."""
    if params.get("spec") is not None:
        window = params.get("window") or 8
        experiments.load_spec(params["spec"], window=window)
    return experiments.ExperimentEntry(
        name=args.name or kind,
        kind=kind,
        params={k: v for k, v in params.items() if v is not None},
    )


def _config(
    args: argparse.Namespace, *entries: experiments.ExperimentEntry
) -> experiments.ExperimentConfig:
    return experiments.ExperimentConfig(
        experiments=entries,
        seed=args.seed,
        out=args.out,
        num_process=args.threads,
    )


def _run(config: experiments.ExperimentConfig) -> int:
    try:
        outputs = experiments.run(config)
    except (ValueError, KeyError, RuntimeError, NotImplementedError) as err:
        log.error("Experiment failed: %s", err)
        return EXIT_FAILURE
    log.info("Wrote %s files", len(outputs))
    return EXIT_OK


def _gp_ball_command(args: argparse.Namespace) -> int:
    entry = _entry(
        args,
        "ball",
        spec=args.spec,
        window=args.window,
        radius=args.radius,
        host=args.host,
    )
    return _run(_config(args, entry))


def _gp_patterns_command(args: argparse.Namespace) -> int:
    entry = _entry(args, "patterns", spec=args.spec, window=args.window)
    return _run(_config(args, entry))


def _median_command(args: argparse.Namespace) -> int:
    entry = _entry(
        args,
        "hyperplanes",
        spec=args.spec,
        window=args.window,
        radius=args.radius,
        host=args.host,
        boundary=args.boundary,
    )
    return _run(_config(args, entry))


def _profile_command(args: argparse.Namespace) -> int:
    entry = _entry(
        args,
        "profile",
        spec=args.spec,
        window=args.window,
        radius=args.radius,
        host=args.host,
        map=args.map,
        collection=args.collection,
        r1_max=args.r1_max,
        r2_max=args.r2_max,
        centers=args.centers,
        family=args.family,
    )
    return _run(_config(args, entry))


def _closure_command(args: argparse.Namespace) -> int:
    entry = _entry(
        args,
        "closure",
        spec=args.spec,
        window=args.window,
        radius=args.radius,
        collection=args.collection,
        reading=args.reading,
        boundary=args.boundary,
        syllabic=args.syllabic,
    )
    return _run(_config(args, entry))


def _delta_command(args: argparse.Namespace) -> int:
    sample = args.sample
    if sample is not None and sample not in ("exhaustive", "auto"):
        try:
            sample = int(sample)
        except ValueError:
            log.error("Bad --sample value %r", sample)
            return EXIT_CONFIG
    entry = _entry(
        args,
        "delta",
        spec=args.spec,
        window=args.window,
        radii=args.radii,
        host=args.host,
        coned=args.coned or None,
        collection=args.collection,
        sample=sample,
    )
    return _run(_config(args, entry))


def _detour_command(args: argparse.Namespace) -> int:
    entry = _entry(
        args,
        "detour",
        spec=args.spec,
        window=args.window,
        radius=args.radius,
        host=args.host,
        x=args.x,
        y=args.y,
        center=args.center,
        s=args.s,
    )
    return _run(_config(args, entry))


def _sequences_command(args: argparse.Namespace) -> int:
    entry = _entry(args, "sequences", s=args.s, exponents=args.exponents)
    return _run(_config(args, entry))


def _lamp_witness_command(args: argparse.Namespace) -> int:
    entry = _entry(args, "lamp-witness", y=args.y, R=args.R)
    return _run(_config(args, entry))


def _suite_command(args: argparse.Namespace) -> int:
    if args.config is None:
        config = experiments.acceptance_suite(seed=args.seed)
        config = experiments.ExperimentConfig(
            experiments=config.experiments,
            seed=config.seed,
            out=args.out,
            num_process=args.threads,
        )
    else:
        try:
            config = experiments.load_config(
                args.config,
                seed=args.seed_override,
                out=args.out if args.out_given else None,
                num_process=args.threads,
            )
        except (OSError, ValueError, NotImplementedError) as err:
            log.error("Cannot load config %s: %s", args.config, err)
            return EXIT_CONFIG
    return _run(config)


def _add_spec_args(
    parser: argparse.ArgumentParser, *, required: bool = True
) -> None:
    parser.add_argument(
        "--spec",
        required=required,
        help=(
            "Graph product: a preset name "
            f"({', '.join(experiments.PRESETS)}) or a spec JSON file."
        ),
    )
    parser.add_argument(
        "--window", type=int, help="Window W of infinite cyclic groups."
    )
    parser.add_argument("--name", help="Experiment name used for outputs.")


def _add_gp_args(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest="gp_command", required=True)
    ball = sub.add_parser("ball", help="Enumerate a ball of a graph product.")
    _add_spec_args(ball)
    ball.add_argument("--radius", type=int)
    ball.add_argument("--host", choices=("qm", "cayley"))
    ball.set_defaults(func=_gp_ball_command)
    patterns = sub.add_parser(
        "patterns", help="Graphical criteria on the presentation graph."
    )
    _add_spec_args(patterns)
    patterns.set_defaults(func=_gp_patterns_command)


def _add_median_args(parser: argparse.ArgumentParser) -> None:
    _add_spec_args(parser)
    parser.add_argument("--radius", type=int)
    parser.add_argument("--host", choices=("qm", "cayley"))
    parser.add_argument("--boundary", choices=("interior", "all"))
    parser.set_defaults(func=_median_command)


def _add_coneoff_args(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest="coneoff_command", required=True)
    profile = sub.add_parser("profile", help="Measure a gentleness profile.")
    _add_spec_args(profile)
    profile.add_argument("--radius", type=int)
    profile.add_argument("--host", choices=("qm", "cayley"))
    profile.add_argument("--map", choices=("cone-off", "identity", "constant"))
    profile.add_argument(
        "--collection", help="'vertex-groups' or 'polynomial'."
    )
    profile.add_argument("--r1-max", type=int)
    profile.add_argument("--r2-max", type=int)
    profile.add_argument("--centers", choices=("inner-ball", "origin"))
    profile.add_argument("--family", help="'lin', 'exp' or 'pol:<k>'.")
    profile.set_defaults(func=_profile_command)
    closure = sub.add_parser(
        "closure", help="Parallel-closure and syllabic checks."
    )
    _add_spec_args(closure)
    closure.add_argument("--radius", type=int)
    closure.add_argument("--collection")
    closure.add_argument("--reading", choices=("ab", "ay"))
    closure.add_argument("--boundary", choices=("interior", "all"))
    closure.add_argument(
        "--no-syllabic",
        dest="syllabic",
        action="store_const",
        const=False,
        help="Skip the per-pair syllabic check.",
    )
    closure.set_defaults(func=_closure_command)


def _add_hyp_args(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest="hyp_command", required=True)
    delta = sub.add_parser("delta", help="Four-point delta across radii.")
    _add_spec_args(delta)
    delta.add_argument("--radii", type=int, nargs="+")
    delta.add_argument("--host", choices=("qm", "cayley"))
    delta.add_argument("--coned", action="store_true")
    delta.add_argument("--collection")
    delta.add_argument(
        "--sample", help="'exhaustive', 'auto' or a number of quadruples."
    )
    delta.set_defaults(func=_delta_command)
    detour = sub.add_parser("detour", help="Detours around a ball.")
    _add_spec_args(detour)
    detour.add_argument("--radius", type=int)
    detour.add_argument("--host", choices=("qm", "cayley"))
    detour.add_argument("--x", required=True, help="Word, e.g. 'a^-4'.")
    detour.add_argument("--y", required=True)
    detour.add_argument("--center")
    detour.add_argument("--s", type=int, nargs="+")
    detour.set_defaults(func=_detour_command)
    sequences = sub.add_parser(
        "sequences", help="Numeric facts of the scale sequences."
    )
    sequences.add_argument("--name")
    sequences.add_argument("--s", type=int)
    sequences.add_argument("--exponents", type=float, nargs="+")
    sequences.set_defaults(func=_sequences_command)


def _add_lamp_args(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest="lamp_command", required=True)
    witness = sub.add_parser(
        "witness", help="Build and verify disjoint lamplighter path families."
    )
    witness.add_argument("--name")
    witness.add_argument("--y", help="Target state, e.g. '0,1,2;3'.")
    witness.add_argument("--R", type=int, nargs="+")
    witness.set_defaults(func=_lamp_witness_command)


def _add_suite_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        help="Experiment config JSON; defaults to the packaged suite.",
    )
    parser.set_defaults(func=_suite_command)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gentlenet",
        description="Finite experiments on graph products, cone-offs and "
        "lamplighter graphs.",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument(
        "--threads", type=int, default=1, help="Worker processes."
    )
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_gp_args(subparsers.add_parser("gp", help="Graph products."))
    _add_median_args(
        subparsers.add_parser("median", help="Hyperplanes of a ball.")
    )
    _add_coneoff_args(subparsers.add_parser("coneoff", help="Cone-offs."))
    _add_hyp_args(subparsers.add_parser("hyp", help="Hyperbolicity."))
    _add_lamp_args(subparsers.add_parser("lamp", help="Lamplighter graph."))
    _add_suite_args(
        subparsers.add_parser("suite", help="Run a list of experiments.")
    )
    return parser


def main(argv: typing.Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args.seed_override = args.seed
    args.out_given = args.out is not None
    if args.seed is None:
        args.seed = 0
    if args.out is None:
        args.out = Path("results")
    if args.threads < 1:
        log.error("Must have number of processes greater than 0.")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ValueError, KeyError, NotImplementedError) as err:
        log.error("Bad configuration: %s", err)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
