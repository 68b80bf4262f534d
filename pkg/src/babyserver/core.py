"""Geometry, configurations, request sequences and cost records.

Three points A, B, C sit on a line at coordinates 0, 1 and 1 + d.  Two
servers start on A and C.  Everything here is exact: distances are
``fractions.Fraction`` values and never floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]

DEFAULT_SEQUENCE_CAP = 10**6


class SequenceSyntaxError(ValueError):
    """Raised when a request-sequence string does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SequenceTooLong(ValueError):
    """Raised when an expanded sequence exceeds the configured cap."""


class Point(str, Enum):
    A = "A"
    B = "B"
    C = "C"

    def __str__(self) -> str:
        return self.value


POINTS = (Point.A, Point.B, Point.C)


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a number into an exact Fraction.

    Floats are refused: a float has usually already lost the value the
    caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a 'p/q' string")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    text = str(value).strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not a rational of the form p or p/q: {value!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ProblemParams:
    """Line geometry.  ``d`` is the B-C distance and must exceed 1."""

    d: Fraction

    def __init__(self, d: RationalLike):
        d = parse_rational(d)
        if d <= 1:
            raise ValueError(f"distance d must be > 1, got {format_rational(d)}")
        object.__setattr__(self, "d", d)

    def position(self, p: Point) -> Fraction:
        return point_position(p, self)


def point_position(p: Point, params: ProblemParams) -> Fraction:
    if p is Point.A:
        return Fraction(0)
    if p is Point.B:
        return Fraction(1)
    return 1 + params.d


@dataclass(frozen=True)
class Configuration:
    """Real server placement; ``left`` is strictly left of ``right``."""

    left: Point
    right: Point

    def __post_init__(self):
        if POINTS.index(self.left) >= POINTS.index(self.right):
            raise ValueError(f"invalid configuration {self.left}{self.right}")

    def covers(self, p: Point) -> bool:
        return p is self.left or p is self.right

    def uncovered(self) -> Point:
        (missing,) = [p for p in POINTS if not self.covers(p)]
        return missing

    def __str__(self) -> str:
        return f"{{{self.left},{self.right}}}"


INITIAL = Configuration(Point.A, Point.C)
CONFIGURATIONS = (
    Configuration(Point.A, Point.B),
    Configuration(Point.A, Point.C),
    Configuration(Point.B, Point.C),
)


def config_move_cost(src: Configuration, dst: Configuration, params: ProblemParams) -> Fraction:
    """Cost of moving from ``src`` to ``dst`` keeping left/right order."""
    pos = params.position
    return abs(pos(src.left) - pos(dst.left)) + abs(pos(src.right) - pos(dst.right))


# ---------------------------------------------------------------------------
# Request sequences
# ---------------------------------------------------------------------------

RequestSequence = tuple  # tuple[Point, ...]


def _expand(text: str, pos: int, cap: int, depth: int) -> tuple[list[Point], int]:
    out: list[Point] = []
    while pos < len(text):
        ch = text[pos]
        if ch in "ABC":
            out.append(Point(ch))
            pos += 1
        elif ch.isspace():
            pos += 1
        elif ch == "(":
            inner, pos = _expand(text, pos + 1, cap, depth + 1)
            if pos >= len(text) or text[pos] != ")":
                raise SequenceSyntaxError("unclosed group", pos)
            pos += 1
            m = re.compile(r"\^(\d+)").match(text, pos)
            if m is None:
                raise SequenceSyntaxError("group must be followed by ^k", pos)
            k = int(m.group(1))
            pos = m.end()
            if len(out) + len(inner) * k > cap:
                raise SequenceTooLong(f"expanded sequence exceeds cap of {cap} requests")
            out.extend(inner * k)
        elif ch == ")":
            if depth == 0:
                raise SequenceSyntaxError("unmatched ')'", pos)
            return out, pos
        else:
            raise SequenceSyntaxError(f"unexpected character {ch!r}", pos)
        if len(out) > cap:
            raise SequenceTooLong(f"expanded sequence exceeds cap of {cap} requests")
    if depth:
        raise SequenceSyntaxError("unclosed group", pos)
    return out, pos


def parse_sequence(text: str, cap: int = DEFAULT_SEQUENCE_CAP) -> tuple[Point, ...]:
    """Expand a request string such as ``"BABC(BA)^3"`` into points.

    Groups nest; ``(X)^0`` is empty.  Whitespace is ignored.
    """
    points, _ = _expand(text, 0, cap, 0)
    return tuple(points)


def format_sequence(seq: Iterable[Point]) -> str:
    return "".join(p.value for p in seq)


def as_sequence(seq: Union[str, Iterable[Point]]) -> tuple[Point, ...]:
    if isinstance(seq, str):
        return parse_sequence(seq)
    return tuple(Point(p) for p in seq)


@dataclass(frozen=True)
class RequestMultiset:
    n_A: int = 0
    n_B: int = 0
    n_C: int = 0

    def __post_init__(self):
        if min(self.n_A, self.n_B, self.n_C) < 0:
            raise ValueError("multiset counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.n_A + self.n_B + self.n_C

    def count(self, p: Point) -> int:
        return (self.n_A, self.n_B, self.n_C)[POINTS.index(p)]

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_A, self.n_B, self.n_C)

    @classmethod
    def of(cls, seq: Union[str, Iterable[Point]]) -> "RequestMultiset":
        seq = as_sequence(seq)
        return cls(seq.count(Point.A), seq.count(Point.B), seq.count(Point.C))

    @classmethod
    def parse(cls, text: str) -> "RequestMultiset":
        """Parse ``"A:4,B:6,C:2"``; omitted points count zero."""
        counts = {"A": 0, "B": 0, "C": 0}
        for part in filter(None, (s.strip() for s in text.split(","))):
            m = re.fullmatch(r"([ABC])\s*:\s*(\d+)", part)
            if m is None:
                raise ValueError(f"bad multiset term {part!r}; expected e.g. A:4")
            counts[m.group(1)] = int(m.group(2))
        return cls(counts["A"], counts["B"], counts["C"])

    def __str__(self) -> str:
        return f"A:{self.n_A},B:{self.n_B},C:{self.n_C}"


# ---------------------------------------------------------------------------
# Costs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """One served request.  ``server`` is ``"left"``, ``"right"``,
    ``"both"`` (only in offline transitions) or ``None`` when nothing moved."""

    request: Point
    server: str | None
    distance: Fraction


@dataclass(frozen=True)
class CostReport:
    total: Fraction
    trace: tuple[Move, ...] = field(default=())

    def __post_init__(self):
        assert all(m.distance >= 0 for m in self.trace), "negative move distance"
        assert self.total == sum((m.distance for m in self.trace), Fraction(0)), \
            "total does not match the trace"

    @classmethod
    def from_trace(cls, trace: Sequence[Move]) -> "CostReport":
        trace = tuple(trace)
        return cls(sum((m.distance for m in trace), Fraction(0)), trace)
