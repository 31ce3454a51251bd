"""Contains shared index types, enumerations and exceptions for gentlenet."""

import abc
import enum
import math
import typing

VertexIndex = typing.NewType("VertexIndex", int)
HyperplaneIndex = typing.NewType("HyperplaneIndex", int)

Distance = typing.Union[int, float]
"""Edge count, or ``math.inf`` when two vertices are disconnected."""

INFINITY: float = math.inf


class CardinalityClass(enum.Enum):
    """Size class of a vertex group as seen by the graphical criteria."""

    TWO = "2"
    MANY = "3+"

    @classmethod
    def parse(cls, text: str) -> "CardinalityClass":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"Unknown cardinality class {text!r}.")


class Constraint(enum.Enum):
    """Per-vertex requirement of a labeled pattern."""

    EXACTLY_TWO = "=2"
    AT_LEAST_THREE = ">=3"
    NONTRIVIAL = ">=2"
    UNCONSTRAINED = "*"

    def admits(self, label: typing.Optional[CardinalityClass]) -> bool:
        """
        Check whether a host vertex label satisfies this constraint.

        Parameters
        ----------
        label : typing.Optional[CardinalityClass]
            Label of the host vertex; None means the host carries no group.

        Returns
        -------
        bool
            True if the host vertex may be used for a pattern vertex with this
            constraint.
        """
        if self is Constraint.UNCONSTRAINED:
            return True
        if label is None:
            return False
        if self is Constraint.EXACTLY_TWO:
            return label is CardinalityClass.TWO
        if self is Constraint.AT_LEAST_THREE:
            return label is CardinalityClass.MANY
        return True


class HostMode(enum.Enum):
    MEDIAN = "median"
    QUASI_MEDIAN = "quasi-median"


class BoundFamily(abc.ABC):
    """
    Named family of bound functions F(x, y) used to fit gentleness constants.

    Implementations decide whether ``g <= C * F(C * r1, C * r2)`` holds for a
    measured cell value ``g``.
    """

    __slots__ = ()

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """Identifier of the family, e.g. ``"pol:2"``."""

    @abc.abstractmethod
    def log_value(self, x: int, y: int) -> float:
        """Natural logarithm of F(x, y); ``-math.inf`` when F(x, y) = 0."""

    def exact_value(self, x: int, y: int) -> typing.Optional[int]:
        """Exact integer value of F(x, y) if the family is integral."""
        return None

    def admits(self, g: int, c: int, r1: int, r2: int) -> bool:
        """
        Decide ``g <= c * F(c * r1, c * r2)``.

        Logarithms decide clear cases; integral families fall back to exact
        arithmetic when both sides are within rounding distance.
        """
        if g <= 0:
            return True
        lhs = math.log(g)
        rhs = math.log(c) + self.log_value(c * r1, c * r2)
        margin = 1e-9 * max(1.0, abs(lhs), abs(rhs) if rhs > -math.inf else 1)
        if rhs - lhs > margin:
            return True
        if lhs - rhs > margin:
            return False
        exact = self.exact_value(c * r1, c * r2)
        if exact is None:
            return lhs <= rhs
        return g <= c * exact


class WindowOverflowError(ValueError):
    """An enumeration window of an infinite group or lamp line was exceeded."""


class UnknownVertexError(KeyError):
    """A vertex id or name is not present in the graph."""


class CoverageError(ValueError):
    """A truncated host does not cover the requested radius around a center."""


class PreconditionError(ValueError):
    """A documented operation precondition does not hold."""


class SearchExhaustedError(RuntimeError):
    """A bounded search finished without producing a witness."""

    def __init__(self, message: str, bound: int) -> None:
        super().__init__(message)
        self.bound = bound


class NonUniqueError(RuntimeError):
    """An object expected to be unique has several minimal candidates."""

    def __init__(self, message: str, candidates: typing.Sequence) -> None:
        super().__init__(message)
        self.candidates = tuple(candidates)
