"""
Chain following for gluing strands end to end

Composition, closure and partial closure all glue some endpoints together and
then read off the resulting strands and loops. Every glued pair joins a point
information flows into with a point it flows out of, so the merged path keeps a
single reading; only cups and caps along the way turn it around.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .elements import Decoration, Endpoint, Loop, Strand

logger = logging.getLogger(__name__)

Node = Tuple[int, Endpoint]


@dataclass
class RethreadResult:
    """Strands and loops produced by gluing, plus the loop-parameter exponent they absorbed"""
    strands: List[Strand] = field(default_factory=list)
    loops: List[Loop] = field(default_factory=list)
    d_power: int = 0


def _node_key(node: Node):
    part, endpoint = node
    return (part, endpoint.sort_key())


def rethread(parts: Sequence[Sequence[Strand]],
             glue: Dict[Node, Node],
             relabel: Dict[Node, Endpoint]) -> RethreadResult:
    """
    Glue strands from several parts into new strands and loops

    Args:
        parts: Strand lists; a node is addressed as (part index, endpoint)
        glue: Symmetric pairing of the internal nodes that get joined
        relabel: Endpoint in the result for every node that stays external

    Returns:
        RethreadResult with canonical strands, new loops and the d exponent
        compensating for cups and caps that were straightened away
    """
    where: Dict[Node, Tuple[int, int]] = {}
    for p, strands in enumerate(parts):
        for i, strand in enumerate(strands):
            where[(p, strand.start)] = (p, i)
            where[(p, strand.end)] = (p, i)

    visited = set()
    result = RethreadResult()

    def read_from(node: Node) -> Strand:
        p, i = where[node]
        visited.add((p, i))
        strand = parts[p][i]
        return strand if strand.start == node[1] else strand.reversed()

    for node in sorted(relabel, key=lambda n: relabel[n].sort_key()):
        if where[node] in visited:
            continue
        word: List[Decoration] = []
        turns = 0
        first_turn = None
        current = node
        while True:
            segment = read_from(current)
            if segment.bend is not None:
                turns += 1
                if first_turn is None:
                    first_turn = len(word) + segment.bend
            word.extend(segment.decorations)
            far = (current[0], segment.end)
            if far in glue:
                current = glue[far]
                continue
            break
        start, end = relabel[node], relabel[far]
        bent = start.kind.is_source == end.kind.is_source
        result.d_power += ((1 if bent else 0) - turns) // 2
        strand = Strand(start, end, tuple(word), first_turn if bent else None)
        result.strands.append(strand.canonical())

    for node in sorted(glue, key=_node_key):
        if where[node] in visited:
            continue
        word = []
        turns_at: List[int] = []
        current = node
        while True:
            segment = read_from(current)
            if segment.bend is not None:
                turns_at.append(len(word) + segment.bend)
            word.extend(segment.decorations)
            following = glue[(current[0], segment.end)]
            if following == node:
                break
            current = following
        result.d_power += 1 - len(turns_at) // 2
        if turns_at:
            k = turns_at[0]
            word = word[k:] + word[:k]
            result.loops.append(Loop(tuple(word), turns_at[1] - k))
        else:
            result.loops.append(Loop(tuple(word), None))

    logger.debug(
        f"Rethreaded {sum(len(s) for s in parts)} strands into "
        f"{len(result.strands)} strands and {len(result.loops)} loops (d^{result.d_power})"
    )
    return result
