"""
Topological rewrite rules on diagrams

Each rule returns a new diagram that evaluates to the same matrix as its input:
sliding an operator round a bend, fusing neighbouring operators, removing
closed loops, and closing boundary points into traces.
"""

import hashlib
import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..diagram.diagram import Diagram
from ..diagram.elements import Decoration, DecorationRef, Loop, Strand, bottom, top
from ..diagram.registry import OperatorRegistry
from ..diagram.rethread import rethread
from ..errors import (
    ArityMismatchError,
    InvalidReferenceError,
    ParameterRangeError,
    SlideError,
    TerminalPresentError,
)
from ..numeric.evaluator import loop_value

logger = logging.getLogger(__name__)

FUSED_PREFIX = "fused:"


def _strand(diagram: Diagram, index: int) -> Strand:
    if not 0 <= index < len(diagram.strands):
        raise InvalidReferenceError(f"Strand {index} out of range; diagram has {len(diagram.strands)} strands")
    return diagram.strands[index]


def _loop(diagram: Diagram, index: int) -> Loop:
    if not 0 <= index < len(diagram.loops):
        raise InvalidReferenceError(f"Loop {index} out of range; diagram has {len(diagram.loops)} loops")
    return diagram.loops[index]


def _replace_strand(diagram: Diagram, index: int, strand: Strand) -> Diagram:
    strands = list(diagram.strands)
    strands[index] = strand
    return replace(diagram, strands=tuple(strands))


def _replace_loop(diagram: Diagram, index: int, loop: Loop) -> Diagram:
    loops = list(diagram.loops)
    loops[index] = loop
    return replace(diagram, loops=tuple(loops))


def slide(diagram: Diagram, ref: DecorationRef) -> Diagram:
    """
    Move a decoration round the bend next to it onto the other leg

    Stored flavors do not change; seen from the new leg the operator reads
    transposed (M on one branch of a cup is M^T on the other).

    Raises:
        InvalidReferenceError: ref points nowhere
        SlideError: no bend directly next to the decoration
    """
    if ref.on_loop:
        return _slide_on_loop(diagram, ref)
    strand = _strand(diagram, ref.container)
    length = len(strand.decorations)
    if not 0 <= ref.position < length:
        raise InvalidReferenceError(f"No decoration at {ref}")
    if strand.bend is None:
        raise SlideError(f"{ref} sits on a straight strand {strand.start}-{strand.end} with no bend to cross")
    if ref.position == strand.bend - 1:
        bend = strand.bend - 1
    elif ref.position == strand.bend:
        bend = strand.bend + 1
    else:
        raise SlideError(f"{ref} is blocked from the bend at {strand.bend} by other decorations")
    return _replace_strand(diagram, ref.container, replace(strand, bend=bend))


def _slide_on_loop(diagram: Diagram, ref: DecorationRef) -> Diagram:
    loop = _loop(diagram, ref.container)
    length = len(loop.decorations)
    if not 0 <= ref.position < length:
        raise InvalidReferenceError(f"No decoration at {ref}")
    if loop.bend is None:
        raise SlideError(f"{ref} sits on a loop without turning points")
    word, bend, p = loop.decorations, loop.bend, ref.position
    if p == bend - 1:
        return _replace_loop(diagram, ref.container, Loop(word, bend - 1))
    if p == bend:
        return _replace_loop(diagram, ref.container, Loop(word, bend + 1))
    # across the turning point in front of decorations[0]
    if p == 0:
        return _replace_loop(diagram, ref.container, Loop(word[1:] + word[:1], bend - 1))
    if p == length - 1:
        return _replace_loop(diagram, ref.container, Loop(word[-1:] + word[:-1], bend + 1))
    raise SlideError(f"{ref} is blocked from both turning points by other decorations")


def fused_label(matrix: np.ndarray) -> str:
    """Content-addressed label, stable under repeated fusion of equal products"""
    rounded = np.round(np.asarray(matrix, dtype=complex), 10) + 0.0
    return FUSED_PREFIX + hashlib.sha1(np.ascontiguousarray(rounded).tobytes()).hexdigest()[:16]


def fuse(diagram: Diagram, strand_ref: int, registry: OperatorRegistry,
         position: int = 0, on_loop: bool = False) -> Tuple[Diagram, OperatorRegistry]:
    """
    Replace decorations[position] and decorations[position + 1] by their product

    Args:
        diagram: Diagram to rewrite
        strand_ref: Strand (or loop) index
        registry: Resolves both labels
        position: Index of the first decoration of the pair
        on_loop: Address a loop instead of a strand

    Returns:
        The rewritten diagram and a registry extended with the fused label;
        the registry passed in is not modified

    Raises:
        InvalidReferenceError: no such adjacent pair
        UnresolvedLabelError: a label is missing from the registry
    """
    container = _loop(diagram, strand_ref) if on_loop else _strand(diagram, strand_ref)
    word = container.decorations
    if not 0 <= position < len(word) - 1:
        raise InvalidReferenceError(
            f"No adjacent pair at {position} on {'loop' if on_loop else 'strand'} {strand_ref} "
            f"with {len(word)} decorations"
        )
    product = registry.flavored(word[position + 1]) @ registry.flavored(word[position])
    label = fused_label(product)
    if not registry.has_matrix(label):
        registry = registry.with_matrix(label, product)
    fused = word[:position] + (Decoration(label),) + word[position + 2:]

    bend = container.bend
    if bend is not None and position + 1 < bend:
        bend -= 1
    if on_loop:
        return _replace_loop(diagram, strand_ref, Loop(fused, bend)), registry
    return _replace_strand(diagram, strand_ref, replace(container, decorations=fused, bend=bend)), registry


def loop_eliminate(diagram: Diagram, registry: OperatorRegistry, d: int,
                   loop: Optional[int] = None) -> Diagram:
    """
    Remove loops into the scalar, each worth tr(W)/d

    Also folds d**d_power into the scalar, so the result no longer depends on
    a symbolic d.

    Args:
        diagram: Diagram to rewrite
        registry: Resolves loop decorations
        d: Loop value
        loop: Index of a single loop to remove; all loops when None
    """
    registry.check_dimension(d)
    indices = set(range(len(diagram.loops))) if loop is None else {loop}
    factor = complex(float(d) ** diagram.d_power)
    for index in indices:
        factor *= loop_value(_loop(diagram, index).decorations, registry, d)
    kept = tuple(l for i, l in enumerate(diagram.loops) if i not in indices)
    return replace(diagram, loops=kept, scalar=diagram.scalar * factor, d_power=0)


def close(diagram: Diagram) -> Diagram:
    """
    Join every top point to the bottom point with the same index

    The closing wires carry no normalization, so after loop elimination the
    scalar equals the trace of the diagram's matrix.

    Raises:
        ArityMismatchError: upper and lower arity differ
        TerminalPresentError: the diagram has kets or bras
    """
    if diagram.upper_arity != diagram.lower_arity:
        raise ArityMismatchError(
            f"Cannot close a {diagram.upper_arity}->{diagram.lower_arity} diagram",
            left=diagram.upper_arity,
            right=diagram.lower_arity,
        )
    if diagram.has_terminals:
        raise TerminalPresentError("Cannot close a diagram that carries kets or bras")
    return _close_pairs(diagram, [(i, i) for i in range(diagram.upper_arity)])


def partial_close(diagram: Diagram, pairs: Sequence[Tuple[int, int]]) -> Diagram:
    """
    Join each listed top point to its bottom partner, tracing those wires out

    Remaining boundary points are renumbered keeping their order.

    Raises:
        ParameterRangeError: an index is out of range or used twice
    """
    tops = [t for t, _ in pairs]
    bottoms = [b for _, b in pairs]
    if len(set(tops)) != len(tops) or len(set(bottoms)) != len(bottoms):
        raise ParameterRangeError(f"Duplicate index in partial closure pairs {list(pairs)}")
    for t, b in pairs:
        if not 0 <= t < diagram.upper_arity or not 0 <= b < diagram.lower_arity:
            raise ParameterRangeError(
                f"Pair ({t}, {b}) out of range for a {diagram.upper_arity}->{diagram.lower_arity} diagram"
            )
    return _close_pairs(diagram, list(pairs))


def _close_pairs(diagram: Diagram, pairs: List[Tuple[int, int]]) -> Diagram:
    glue = {}
    for t, b in pairs:
        glue[(0, top(t))] = (0, bottom(b))
        glue[(0, bottom(b))] = (0, top(t))
    closed_tops = {t for t, _ in pairs}
    closed_bottoms = {b for _, b in pairs}
    kept_tops = [i for i in range(diagram.upper_arity) if i not in closed_tops]
    kept_bottoms = [j for j in range(diagram.lower_arity) if j not in closed_bottoms]

    relabel = {}
    for new, old in enumerate(kept_tops):
        relabel[(0, top(old))] = top(new)
    for new, old in enumerate(kept_bottoms):
        relabel[(0, bottom(old))] = bottom(new)
    for strand in diagram.strands:
        for e in strand.endpoints():
            if e.kind.is_terminal:
                relabel[(0, e)] = e

    threaded = rethread([diagram.strands], glue, relabel)
    logger.debug(f"Closed {len(pairs)} wire pairs into {len(threaded.loops)} loops")
    return Diagram(
        len(kept_tops),
        len(kept_bottoms),
        tuple(threaded.strands),
        diagram.loops + tuple(threaded.loops),
        diagram.scalar,
        diagram.d_power + threaded.d_power,
    )
