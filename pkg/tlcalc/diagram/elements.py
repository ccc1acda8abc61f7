"""
Building blocks of a diagram: endpoints, decorations, strands and loops
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class EndpointKind(Enum):
    """Where a strand ends; the declaration order is the canonical endpoint order"""
    TOP = "T"
    BOTTOM = "B"
    KET = "K"
    BRA = "R"

    @property
    def rank(self) -> int:
        return _KIND_RANK[self]

    @property
    def is_source(self) -> bool:
        """Information flows away from top points and kets, into bottom points and bras"""
        return self in (EndpointKind.TOP, EndpointKind.KET)

    @property
    def is_terminal(self) -> bool:
        return self in (EndpointKind.KET, EndpointKind.BRA)

    def flipped(self) -> "EndpointKind":
        return _FLIPPED[self]


_KIND_RANK = {EndpointKind.TOP: 0, EndpointKind.BOTTOM: 1, EndpointKind.KET: 2, EndpointKind.BRA: 3}
_FLIPPED = {
    EndpointKind.TOP: EndpointKind.BOTTOM,
    EndpointKind.BOTTOM: EndpointKind.TOP,
    EndpointKind.KET: EndpointKind.BRA,
    EndpointKind.BRA: EndpointKind.KET,
}


@dataclass(frozen=True)
class Endpoint:
    """
    One end of a strand

    Boundary points are numbered left to right per side. Terminals are numbered
    densely per kind within a diagram and carry the registry label of their vector.
    """
    kind: EndpointKind
    index: int
    label: Optional[str] = None

    def sort_key(self) -> Tuple[int, int]:
        return (self.kind.rank, self.index)

    def __lt__(self, other: "Endpoint") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def is_boundary(self) -> bool:
        return not self.kind.is_terminal

    def shifted(self, offset: int) -> "Endpoint":
        return replace(self, index=self.index + offset)

    def flipped(self) -> "Endpoint":
        return replace(self, kind=self.kind.flipped())

    def __str__(self) -> str:
        if self.label is None:
            return f"{self.kind.value}{self.index}"
        return f"{self.kind.value}{self.index}:{self.label}"


def top(index: int) -> Endpoint:
    return Endpoint(EndpointKind.TOP, index)


def bottom(index: int) -> Endpoint:
    return Endpoint(EndpointKind.BOTTOM, index)


def ket_terminal(label: str, index: int = 0) -> Endpoint:
    return Endpoint(EndpointKind.KET, index, label)


def bra_terminal(label: str, index: int = 0) -> Endpoint:
    return Endpoint(EndpointKind.BRA, index, label)


class Flavor(Enum):
    """Which of M, M†, M^T, M* a marked point stands for"""
    PLAIN = "plain"
    ADJOINT = "adjoint"
    TRANSPOSE = "transpose"
    CONJUGATE = "conjugate"

    def transposed(self) -> "Flavor":
        """Flavor seen after reading the strand in the opposite direction"""
        return _TRANSPOSED[self]

    def conjugated(self) -> "Flavor":
        return _CONJUGATED[self]

    def adjointed(self) -> "Flavor":
        return self.transposed().conjugated()

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        if self is Flavor.PLAIN:
            return matrix
        if self is Flavor.ADJOINT:
            return matrix.conj().T
        if self is Flavor.TRANSPOSE:
            return matrix.T
        return matrix.conj()


_TRANSPOSED = {
    Flavor.PLAIN: Flavor.TRANSPOSE,
    Flavor.TRANSPOSE: Flavor.PLAIN,
    Flavor.ADJOINT: Flavor.CONJUGATE,
    Flavor.CONJUGATE: Flavor.ADJOINT,
}
_CONJUGATED = {
    Flavor.PLAIN: Flavor.CONJUGATE,
    Flavor.CONJUGATE: Flavor.PLAIN,
    Flavor.ADJOINT: Flavor.TRANSPOSE,
    Flavor.TRANSPOSE: Flavor.ADJOINT,
}


@dataclass(frozen=True)
class Decoration:
    """An operator label with its flavor, stored relative to the strand's traversal direction"""
    label: str
    flavor: Flavor = Flavor.PLAIN

    def transposed(self) -> "Decoration":
        return Decoration(self.label, self.flavor.transposed())

    def conjugated(self) -> "Decoration":
        return Decoration(self.label, self.flavor.conjugated())

    def to_list(self):
        return [self.label, self.flavor.value]


def reversed_word(decorations: Tuple[Decoration, ...]) -> Tuple[Decoration, ...]:
    """Read a decoration word backwards; every flavor toggles its transpose"""
    return tuple(d.transposed() for d in reversed(decorations))


@dataclass(frozen=True)
class Strand:
    """
    A path between two endpoints

    ``decorations`` are ordered from ``start`` to ``end``. ``bend`` is set exactly
    when both endpoints have the same polarity (a cup, a cap, or a bent terminal
    line): decorations[:bend] sit on the start leg, decorations[bend:] on the end leg.
    """
    start: Endpoint
    end: Endpoint
    decorations: Tuple[Decoration, ...] = ()
    bend: Optional[int] = None

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError(f"Strand cannot start and end at the same point {self.start}")
        same_polarity = self.start.kind.is_source == self.end.kind.is_source
        if same_polarity and self.bend is None:
            object.__setattr__(self, "bend", 0)
        if not same_polarity and self.bend is not None:
            raise ValueError(f"Straight strand {self.start}-{self.end} cannot carry a bend")
        if self.bend is not None and not 0 <= self.bend <= len(self.decorations):
            raise ValueError(f"Bend {self.bend} outside decoration word of length {len(self.decorations)}")

    @property
    def is_bent(self) -> bool:
        return self.bend is not None

    @property
    def is_cup(self) -> bool:
        return self.start.kind is EndpointKind.BOTTOM and self.end.kind is EndpointKind.BOTTOM

    @property
    def is_cap(self) -> bool:
        return self.start.kind is EndpointKind.TOP and self.end.kind is EndpointKind.TOP

    @property
    def is_through(self) -> bool:
        return {self.start.kind, self.end.kind} == {EndpointKind.TOP, EndpointKind.BOTTOM}

    def endpoints(self) -> Tuple[Endpoint, Endpoint]:
        return (self.start, self.end)

    def reversed(self) -> "Strand":
        """The same strand read from its end"""
        bend = None if self.bend is None else len(self.decorations) - self.bend
        return Strand(self.end, self.start, reversed_word(self.decorations), bend)

    def canonical(self) -> "Strand":
        return self.reversed() if self.end < self.start else self

    def flows_forward(self, position: int, leg: str = "start") -> bool:
        """
        Whether information flows from start to end at an insertion point

        Args:
            position: Insertion index into the decoration word
            leg: 'start' or 'end'; only consulted on bent strands

        Returns:
            True when the flow agrees with the stored reading direction
        """
        if self.bend is None:
            return self.start.kind.is_source
        on_start_leg = position < self.bend or (position == self.bend and leg == "start")
        return self.start.kind.is_source if on_start_leg else not self.start.kind.is_source

    def leg_of(self, position: int) -> str:
        """Leg that holds the decoration at ``position``"""
        if self.bend is None:
            return "start"
        return "start" if position < self.bend else "end"

    def leg_view(self):
        """Decorations as drawn: (leg, label, flavor acting along the flow on that leg)"""
        view = []
        for i, decoration in enumerate(self.decorations):
            leg = self.leg_of(i)
            flavor = decoration.flavor
            if not self.flows_forward(i, leg):
                flavor = flavor.transposed()
            view.append((leg, decoration.label, flavor))
        return view

    def to_dict(self):
        return {
            "start": str(self.start),
            "end": str(self.end),
            "bend": self.bend,
            "decorations": [d.to_list() for d in self.decorations],
        }


@dataclass(frozen=True)
class Loop:
    """
    A closed strand

    The word is read cyclically. ``bend`` marks the second of two turning
    points when the loop came from cups and caps (the first sits before
    decorations[0]); loops that flow one way round, as closures do, have no bend.
    """
    decorations: Tuple[Decoration, ...] = ()
    bend: Optional[int] = None

    def to_dict(self):
        return {"bend": self.bend, "decorations": [d.to_list() for d in self.decorations]}


@dataclass(frozen=True)
class DecorationRef:
    """Points at one decoration: container index into strands (or loops) plus word position"""
    container: int
    position: int
    on_loop: bool = False

    def __str__(self) -> str:
        kind = "loop" if self.on_loop else "strand"
        return f"{kind}[{self.container}].decorations[{self.position}]"
