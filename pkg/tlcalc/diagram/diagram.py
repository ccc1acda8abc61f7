"""
Diagrams, formal sums of diagrams, and the structural operations on them

A diagram with ``upper_arity`` points on top and ``lower_arity`` at the bottom
stands for a map from the top space to the bottom space. The overall factor in
front of the picture is ``scalar * d**d_power``, which keeps every structural
result independent of the loop value d.
"""

import cmath
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import (
    ArityMismatchError,
    InvalidReferenceError,
    TerminalPresentError,
)
from .elements import (
    Decoration,
    Endpoint,
    EndpointKind,
    Flavor,
    Loop,
    Strand,
    bottom,
    bra_terminal,
    ket_terminal,
    top,
)
from .rethread import rethread

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagram:
    """
    A planar picture of strands and loops with a scalar prefactor

    Strands are kept canonical (start before end) and sorted by start endpoint,
    so two diagrams built along different routes compare equal when they match.
    """
    upper_arity: int
    lower_arity: int
    strands: Tuple[Strand, ...] = ()
    loops: Tuple[Loop, ...] = ()
    scalar: complex = 1 + 0j
    d_power: int = 0

    def __post_init__(self):
        if self.upper_arity < 0 or self.lower_arity < 0:
            raise ValueError(f"Arities must be non-negative, got {self.upper_arity}/{self.lower_arity}")
        scalar = complex(self.scalar)
        if not cmath.isfinite(scalar):
            raise ValueError(f"Diagram scalar must be finite, got {scalar}")
        strands = tuple(sorted((s.canonical() for s in self.strands), key=lambda s: s.start.sort_key()))
        object.__setattr__(self, "scalar", scalar)
        object.__setattr__(self, "strands", strands)
        object.__setattr__(self, "loops", tuple(self.loops))
        self._validate()

    def _validate(self):
        seen: Dict[Tuple[int, int], Endpoint] = {}
        for strand in self.strands:
            for endpoint in strand.endpoints():
                key = endpoint.sort_key()
                if key in seen:
                    raise ValueError(f"Endpoint {endpoint} is used by more than one strand")
                seen[key] = endpoint
        for kind, arity in ((EndpointKind.TOP, self.upper_arity), (EndpointKind.BOTTOM, self.lower_arity)):
            indices = sorted(k[1] for k in seen if k[0] == kind.rank)
            if indices != list(range(arity)):
                raise ValueError(
                    f"Boundary {kind.name.lower()} points {indices} do not cover 0..{arity - 1} exactly once"
                )
        for kind in (EndpointKind.KET, EndpointKind.BRA):
            indices = sorted(k[1] for k in seen if k[0] == kind.rank)
            if indices != list(range(len(indices))):
                raise ValueError(f"{kind.name.title()} terminals must be numbered densely, got {indices}")

    def terminals(self, kind: EndpointKind) -> List[Endpoint]:
        found = [e for s in self.strands for e in s.endpoints() if e.kind is kind]
        return sorted(found)

    @property
    def n_kets(self) -> int:
        return len(self.terminals(EndpointKind.KET))

    @property
    def n_bras(self) -> int:
        return len(self.terminals(EndpointKind.BRA))

    @property
    def has_terminals(self) -> bool:
        return any(e.kind.is_terminal for s in self.strands for e in s.endpoints())

    def strand_at(self, endpoint: Endpoint) -> int:
        """Index of the strand touching ``endpoint`` (label ignored)"""
        for i, strand in enumerate(self.strands):
            if any(e.sort_key() == endpoint.sort_key() for e in strand.endpoints()):
                return i
        raise InvalidReferenceError(f"No strand touches {endpoint}")

    def labels(self) -> List[str]:
        """Operator and vector labels the diagram refers to, in first-seen order"""
        found: List[str] = []
        for strand in self.strands:
            for endpoint in strand.endpoints():
                if endpoint.label is not None and endpoint.label not in found:
                    found.append(endpoint.label)
            for decoration in strand.decorations:
                if decoration.label not in found:
                    found.append(decoration.label)
        for loop in self.loops:
            for decoration in loop.decorations:
                if decoration.label not in found:
                    found.append(decoration.label)
        return found

    def scaled(self, factor: complex, d_power: int = 0) -> "Diagram":
        return replace(self, scalar=self.scalar * factor, d_power=self.d_power + d_power)

    def with_strands(self, strands: Iterable[Strand], loops: Optional[Iterable[Loop]] = None) -> "Diagram":
        return replace(self, strands=tuple(strands), loops=self.loops if loops is None else tuple(loops))

    def to_dict(self) -> dict:
        return {
            "upper_arity": self.upper_arity,
            "lower_arity": self.lower_arity,
            "scalar": [self.scalar.real, self.scalar.imag],
            "d_power": self.d_power,
            "strands": [s.to_dict() for s in self.strands],
            "loops": [l.to_dict() for l in self.loops],
        }

    def digest(self) -> str:
        """Stable content hash used to identify rewrite states"""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return tensor(self, other)

    def __str__(self) -> str:
        parts = []
        for strand in self.strands:
            word = " ".join(f"{d.label}:{d.flavor.value}" for d in strand.decorations)
            parts.append(f"{strand.start}-{strand.end}" + (f"[{word}]" if word else ""))
        loops = f" +{len(self.loops)} loops" if self.loops else ""
        return f"Diagram({self.upper_arity}->{self.lower_arity}: {', '.join(parts)}{loops}; {self.scalar}*d^{self.d_power})"


@dataclass(frozen=True)
class DiagramSum:
    """A formal linear combination of diagrams that all share one arity"""
    upper_arity: int
    lower_arity: int
    terms: Tuple[Tuple[complex, Diagram], ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((complex(c), d) for c, d in self.terms)
        for _, term in terms:
            if (term.upper_arity, term.lower_arity) != (self.upper_arity, self.lower_arity):
                raise ArityMismatchError(
                    f"Sum of arity {self.upper_arity}->{self.lower_arity} cannot hold a "
                    f"{term.upper_arity}->{term.lower_arity} term",
                    left=(self.upper_arity, self.lower_arity),
                    right=(term.upper_arity, term.lower_arity),
                )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, terms: Sequence[Tuple[complex, Diagram]],
           upper_arity: Optional[int] = None, lower_arity: Optional[int] = None) -> "DiagramSum":
        if not terms and (upper_arity is None or lower_arity is None):
            raise ValueError("An empty sum needs explicit arities")
        if upper_arity is None:
            upper_arity = terms[0][1].upper_arity
        if lower_arity is None:
            lower_arity = terms[0][1].lower_arity
        return cls(upper_arity, lower_arity, tuple(terms))

    def __add__(self, other: "DiagramSum") -> "DiagramSum":
        return DiagramSum(self.upper_arity, self.lower_arity, self.terms + as_sum(other).terms)

    def scaled(self, factor: complex) -> "DiagramSum":
        return DiagramSum(self.upper_arity, self.lower_arity, tuple((c * factor, d) for c, d in self.terms))

    def to_dict(self) -> dict:
        return {
            "upper_arity": self.upper_arity,
            "lower_arity": self.lower_arity,
            "terms": [{"coefficient": [c.real, c.imag], "diagram": d.to_dict()} for c, d in self.terms],
        }


DiagramLike = Union[Diagram, DiagramSum]


def as_sum(value: DiagramLike) -> DiagramSum:
    if isinstance(value, DiagramSum):
        return value
    return DiagramSum(value.upper_arity, value.lower_arity, ((1 + 0j, value),))


# Constructors

def identity(n: int) -> Diagram:
    """n vertical through-strands"""
    if n < 0:
        raise ValueError(f"Identity arity must be non-negative, got {n}")
    return Diagram(n, n, tuple(Strand(top(i), bottom(i)) for i in range(n)))


def ket_cup() -> Diagram:
    """The normalized maximally entangled ket |Ω⟩: nothing on top, a cup below"""
    return Diagram(0, 2, (Strand(bottom(0), bottom(1)),))


def bra_cap() -> Diagram:
    """The normalized maximally entangled bra ⟨Ω|: a cap on top, nothing below"""
    return Diagram(2, 0, (Strand(top(0), top(1)),))


def projector() -> Diagram:
    """The 2->2 generator ω = |Ω⟩⟨Ω|"""
    return Diagram(2, 2, (Strand(top(0), top(1)), Strand(bottom(0), bottom(1))))


def ket(label: str) -> Diagram:
    """A 0->1 diagram: a ket terminal feeding bottom point 0"""
    return Diagram(0, 1, (Strand(bottom(0), ket_terminal(label)),))


def bra(label: str) -> Diagram:
    """A 1->0 diagram: top point 0 running into a bra terminal"""
    return Diagram(1, 0, (Strand(top(0), bra_terminal(label)),))


def scalar(value: complex, d_power: int = 0) -> Diagram:
    """The empty 0->0 diagram carrying a number"""
    return Diagram(0, 0, (), (), complex(value), d_power)


def permutation(perm: Sequence[int]) -> Diagram:
    """
    Wire top point i to bottom point perm[i]

    Crossing wires are allowed; such diagrams fall outside the planar algebra
    and are rejected by ``is_tl_planar``.
    """
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"Not a permutation of 0..{len(perm) - 1}: {list(perm)}")
    n = len(perm)
    return Diagram(n, n, tuple(Strand(top(i), bottom(j)) for i, j in enumerate(perm)))


# Operations

def _shift(endpoint: Endpoint, offsets: Dict[EndpointKind, int]) -> Endpoint:
    return endpoint.shifted(offsets.get(endpoint.kind, 0))


def tensor(left: DiagramLike, right: DiagramLike) -> DiagramLike:
    """
    Place ``right`` to the right of ``left``

    Boundary points and terminals of ``right`` are renumbered after those of
    ``left``; scalars multiply and loops are carried over.
    """
    if isinstance(left, DiagramSum) or isinstance(right, DiagramSum):
        a, b = as_sum(left), as_sum(right)
        terms = tuple((c1 * c2, tensor(d1, d2)) for c1, d1 in a.terms for c2, d2 in b.terms)
        return DiagramSum(a.upper_arity + b.upper_arity, a.lower_arity + b.lower_arity, terms)
    offsets = {
        EndpointKind.TOP: left.upper_arity,
        EndpointKind.BOTTOM: left.lower_arity,
        EndpointKind.KET: left.n_kets,
        EndpointKind.BRA: left.n_bras,
    }
    moved = tuple(
        Strand(_shift(s.start, offsets), _shift(s.end, offsets), s.decorations, s.bend)
        for s in right.strands
    )
    return Diagram(
        left.upper_arity + right.upper_arity,
        left.lower_arity + right.lower_arity,
        left.strands + moved,
        left.loops + right.loops,
        left.scalar * right.scalar,
        left.d_power + right.d_power,
    )


def tensor_all(diagrams: Sequence[DiagramLike]) -> DiagramLike:
    if not diagrams:
        return scalar(1)
    result = diagrams[0]
    for diagram in diagrams[1:]:
        result = tensor(result, diagram)
    return result


def compose(first: DiagramLike, second: DiagramLike) -> DiagramLike:
    """
    Stack ``second`` below ``first``: apply ``first``, then ``second``

    Bottom point i of ``first`` is glued to top point i of ``second``. Closed
    chains become loops; cups meeting caps are straightened and the change in
    normalization is booked in ``d_power``.

    Raises:
        ArityMismatchError: first.lower_arity != second.upper_arity
    """
    if first.lower_arity != second.upper_arity:
        raise ArityMismatchError(
            f"Cannot compose: first has {first.lower_arity} bottom points, "
            f"second has {second.upper_arity} top points",
            left=first.lower_arity,
            right=second.upper_arity,
        )
    if isinstance(first, DiagramSum) or isinstance(second, DiagramSum):
        a, b = as_sum(first), as_sum(second)
        terms = tuple((c1 * c2, compose(d1, d2)) for c1, d1 in a.terms for c2, d2 in b.terms)
        return DiagramSum(a.upper_arity, b.lower_arity, terms)

    glue = {}
    for i in range(first.lower_arity):
        glue[(0, bottom(i))] = (1, top(i))
        glue[(1, top(i))] = (0, bottom(i))
    relabel = {}
    ket_offset, bra_offset = first.n_kets, first.n_bras
    for strand in first.strands:
        for e in strand.endpoints():
            if e.kind is not EndpointKind.BOTTOM:
                relabel[(0, e)] = e
    for strand in second.strands:
        for e in strand.endpoints():
            if e.kind is EndpointKind.BOTTOM:
                relabel[(1, e)] = e
            elif e.kind is EndpointKind.KET:
                relabel[(1, e)] = e.shifted(ket_offset)
            elif e.kind is EndpointKind.BRA:
                relabel[(1, e)] = e.shifted(bra_offset)

    threaded = rethread([first.strands, second.strands], glue, relabel)
    return Diagram(
        first.upper_arity,
        second.lower_arity,
        tuple(threaded.strands),
        first.loops + second.loops + tuple(threaded.loops),
        first.scalar * second.scalar,
        first.d_power + second.d_power + threaded.d_power,
    )


def compose_all(diagrams: Sequence[DiagramLike]) -> DiagramLike:
    result = diagrams[0]
    for diagram in diagrams[1:]:
        result = compose(result, diagram)
    return result


def _dagger_strand(strand: Strand) -> Strand:
    word = tuple(d.conjugated() for d in strand.decorations)
    return Strand(strand.start.flipped(), strand.end.flipped(), word, strand.bend)


def dagger(diagram: DiagramLike) -> DiagramLike:
    """
    Mirror top to bottom

    Kets become bras and vice versa, every marked operator is conjugated and
    so is the scalar. Evaluating the result gives the conjugate transpose.
    """
    if isinstance(diagram, DiagramSum):
        terms = tuple((c.conjugate(), dagger(d)) for c, d in diagram.terms)
        return DiagramSum(diagram.lower_arity, diagram.upper_arity, terms)
    loops = tuple(Loop(tuple(d.conjugated() for d in l.decorations), l.bend) for l in diagram.loops)
    return Diagram(
        diagram.lower_arity,
        diagram.upper_arity,
        tuple(_dagger_strand(s) for s in diagram.strands),
        loops,
        diagram.scalar.conjugate(),
        diagram.d_power,
    )


def decorate(diagram: Diagram, strand_ref: int, label: str,
             flavor: Union[Flavor, str] = Flavor.PLAIN,
             leg: str = "start", position: Optional[int] = None) -> Diagram:
    """
    Mark an operator on a strand

    Args:
        diagram: Diagram to decorate
        strand_ref: Index into ``diagram.strands``
        label: Registry label of the operator
        flavor: How the operator acts along the direction information flows on that leg
        leg: 'start' or 'end' leg of a bent strand; ignored on straight strands
        position: Insertion index into the decoration word; by default the
            operator acts after everything already on that leg

    Returns:
        New diagram; the input is unchanged

    Raises:
        InvalidReferenceError: strand_ref, leg or position out of range
    """
    if not 0 <= strand_ref < len(diagram.strands):
        raise InvalidReferenceError(
            f"Strand {strand_ref} out of range; diagram has {len(diagram.strands)} strands"
        )
    if leg not in ("start", "end"):
        raise InvalidReferenceError(f"Leg must be 'start' or 'end', got {leg!r}")
    flavor = Flavor(flavor) if isinstance(flavor, str) else flavor
    strand = diagram.strands[strand_ref]
    length = len(strand.decorations)

    if strand.bend is None:
        low, high = 0, length
    elif leg == "start":
        low, high = 0, strand.bend
    else:
        low, high = strand.bend, length

    if position is None:
        position = high if strand.flows_forward(high, leg) else low
    if not low <= position <= high:
        raise InvalidReferenceError(
            f"Position {position} outside the {leg} leg [{low}, {high}] of strand {strand_ref}"
        )

    stored = flavor if strand.flows_forward(position, leg) else flavor.transposed()
    word = strand.decorations[:position] + (Decoration(label, stored),) + strand.decorations[position:]
    bend = strand.bend
    if bend is not None and (position < bend or (position == bend and leg == "start")):
        bend += 1
    strands = list(diagram.strands)
    strands[strand_ref] = Strand(strand.start, strand.end, word, bend)
    return replace(diagram, strands=tuple(strands))


def decorate_at(diagram: Diagram, endpoint: Endpoint, label: str,
                flavor: Union[Flavor, str] = Flavor.PLAIN) -> Diagram:
    """Mark an operator on the leg that touches a boundary point or terminal"""
    index = diagram.strand_at(endpoint)
    strand = diagram.strands[index]
    leg = "start" if strand.start.sort_key() == endpoint.sort_key() else "end"
    return decorate(diagram, index, label, flavor, leg)


def is_tl_planar(diagram: Diagram) -> bool:
    """
    Whether the underlying matching can be drawn without crossings

    Boundary points are read once around the rectangle (top left to right,
    then bottom right to left) and must pair like balanced brackets.

    Raises:
        TerminalPresentError: the diagram has kets or bras
    """
    if diagram.has_terminals:
        raise TerminalPresentError("Planarity is only defined for diagrams without terminals")
    u, l = diagram.upper_arity, diagram.lower_arity

    def around(endpoint: Endpoint) -> int:
        if endpoint.kind is EndpointKind.TOP:
            return endpoint.index
        return u + (l - 1 - endpoint.index)

    partner = {}
    for strand in diagram.strands:
        a, b = around(strand.start), around(strand.end)
        partner[a], partner[b] = b, a
    stack: List[int] = []
    for point in range(u + l):
        if stack and partner[point] == stack[-1]:
            stack.pop()
        else:
            stack.append(point)
    return not stack
