"""Finite experiments on graph products, cone-offs and lamplighter graphs."""

__all__ = [
    "cli",
    "coneoff",
    "experiments",
    "gp",
    "graphcore",
    "hyp",
    "interfaces",
    "lamp",
    "median",
    "utils",
]

from . import (
    cli,
    coneoff,
    experiments,
    gp,
    graphcore,
    hyp,
    interfaces,
    lamp,
    median,
    utils,
)
