"""
Normal forms by rewriting

``normalize`` drives the rules to a canonical diagram: every decoration slid
onto its strand's start leg, every word fused to at most one decoration, every
loop eliminated. A full or partial closure can run first. The applied steps
are recorded so the run can be replayed.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..diagram.diagram import Diagram
from ..diagram.elements import DecorationRef
from ..diagram.registry import OperatorRegistry
from ..errors import TLCalcError
from ..models import RewriteStep, RewriteTrace
from .rules import close, fuse, loop_eliminate, partial_close, slide

logger = logging.getLogger(__name__)

Move = Tuple[str, int, int]
Closure = Union[str, Sequence[Tuple[int, int]]]


class Stats:
    """Counts rule applications during one normalization"""

    def __init__(self):
        self.num_rewrites = {}

    def count(self, rule_id: str) -> None:
        self.num_rewrites[rule_id] = self.num_rewrites.get(rule_id, 0) + 1

    def __str__(self) -> str:
        total = sum(self.num_rewrites.values())
        parts = ", ".join(f"{rule}={n}" for rule, n in sorted(self.num_rewrites.items()))
        return f"{total} rewrites ({parts})" if parts else "no rewrites"


class Normalizer:
    """
    Applies rewrite rules to one diagram, recording each step

    Args:
        registry: Resolves labels; fusion extends a private copy
        d: Loop value used when eliminating loops
    """

    def __init__(self, registry: OperatorRegistry, d: int):
        registry.check_dimension(d)
        self.registry = registry
        self.d = d
        self.steps: List[RewriteStep] = []
        self.stats = Stats()

    def _record(self, rule_id: str, target: str, before: Diagram, after: Diagram, **arguments) -> Diagram:
        step = RewriteStep(rule_id, target, before.digest(), after.digest(), arguments)
        self.steps.append(step)
        self.stats.count(rule_id)
        logger.debug(f"{rule_id} on {target}: {step.before_hash[:12]} -> {step.after_hash[:12]}")
        return after

    def slide(self, diagram: Diagram, strand: int, position: int) -> Diagram:
        ref = DecorationRef(strand, position)
        return self._record("slide", str(ref), diagram, slide(diagram, ref), strand=strand, position=position)

    def fuse(self, diagram: Diagram, strand: int, position: int) -> Diagram:
        after, self.registry = fuse(diagram, strand, self.registry, position)
        target = f"strand[{strand}].decorations[{position}:{position + 2}]"
        return self._record("fuse", target, diagram, after, strand=strand, position=position)

    def eliminate(self, diagram: Diagram, loop: Optional[int] = None) -> Diagram:
        after = loop_eliminate(diagram, self.registry, self.d, loop)
        target = "loops" if loop is None else f"loop[{loop}]"
        return self._record("loop_eliminate", target, diagram, after, loop=loop)

    def close(self, diagram: Diagram) -> Diagram:
        return self._record("close", "boundary", diagram, close(diagram))

    def partial_close(self, diagram: Diagram, pairs: Sequence[Tuple[int, int]]) -> Diagram:
        pairs = [(int(t), int(b)) for t, b in pairs]
        target = ", ".join(f"top[{t}]-bottom[{b}]" for t, b in pairs)
        return self._record("partial_close", target, diagram, partial_close(diagram, pairs),
                            pairs=[list(p) for p in pairs])

    def legal_moves(self, diagram: Diagram) -> List[Move]:
        """Every rule application that still brings the diagram closer to normal form"""
        moves: List[Move] = []
        for i, strand in enumerate(diagram.strands):
            if strand.bend is not None and strand.bend < len(strand.decorations):
                moves.append(("slide", i, strand.bend))
            for p in range(len(strand.decorations) - 1):
                moves.append(("fuse", i, p))
        for k in range(len(diagram.loops)):
            moves.append(("loop_eliminate", k, 0))
        return moves

    def apply(self, diagram: Diagram, move: Move) -> Diagram:
        rule_id, index, position = move
        if rule_id == "slide":
            return self.slide(diagram, index, position)
        if rule_id == "fuse":
            return self.fuse(diagram, index, position)
        return self.eliminate(diagram, index)

    def run(self, diagram: Diagram) -> Diagram:
        """Canonical order: strands by start endpoint, slides before fusion, then loops"""
        for i in range(len(diagram.strands)):
            strand = diagram.strands[i]
            while strand.bend is not None and strand.bend < len(strand.decorations):
                diagram = self.slide(diagram, i, strand.bend)
                strand = diagram.strands[i]
        for i in range(len(diagram.strands)):
            while len(diagram.strands[i].decorations) > 1:
                diagram = self.fuse(diagram, i, 0)
        if diagram.loops or diagram.d_power:
            diagram = self.eliminate(diagram)
        return diagram

    def run_shuffled(self, diagram: Diagram, seed: int) -> Diagram:
        """Pick uniformly among the legal moves until none is left"""
        rng = np.random.default_rng(seed)
        moves = self.legal_moves(diagram)
        while moves:
            diagram = self.apply(diagram, moves[rng.integers(len(moves))])
            moves = self.legal_moves(diagram)
        if diagram.d_power:
            diagram = self.eliminate(diagram)
        return diagram


def normalize(diagram: Diagram, registry: OperatorRegistry, d: int,
              order_seed: Optional[int] = None,
              closure: Optional[Closure] = None) -> Tuple[Diagram, RewriteTrace]:
    """
    Rewrite a diagram to its normal form

    Args:
        diagram: Diagram to normalize
        registry: Resolves every decoration label
        d: Loop value
        order_seed: Apply the rules in a random legal order drawn from this
            seed instead of the canonical order; the result is the same
        closure: "full" to close the diagram, or (top, bottom) pairs to close
            partially, as the first recorded step

    Returns:
        (normal form, trace); trace.registry resolves the fused labels of the
        normal form

    Raises:
        UnresolvedLabelError: a label is missing from the registry
        ArityMismatchError, TerminalPresentError, ParameterRangeError: the
            closure does not apply
    """
    normalizer = Normalizer(registry, d)
    initial = diagram
    if closure == "full":
        diagram = normalizer.close(diagram)
    elif closure is not None:
        diagram = normalizer.partial_close(diagram, closure)
    if order_seed is None:
        final = normalizer.run(diagram)
    else:
        final = normalizer.run_shuffled(diagram, order_seed)
    logger.debug(f"Normalized {initial.digest()[:12]} with {normalizer.stats}")
    return final, RewriteTrace(initial, final, normalizer.steps, normalizer.registry)


def replay(trace: RewriteTrace, d: int, registry: Optional[OperatorRegistry] = None) -> Diagram:
    """
    Apply a trace's steps to its initial diagram again

    Raises:
        TLCalcError: a step no longer applies or lands on a different diagram
    """
    normalizer = Normalizer(registry or trace.registry, d)
    diagram = trace.initial
    appliers: dict = {
        "slide": lambda D, a: normalizer.slide(D, a["strand"], a["position"]),
        "fuse": lambda D, a: normalizer.fuse(D, a["strand"], a["position"]),
        "loop_eliminate": lambda D, a: normalizer.eliminate(D, a["loop"]),
        "close": lambda D, a: normalizer.close(D),
        "partial_close": lambda D, a: normalizer.partial_close(D, a["pairs"]),
    }
    for step in trace.steps:
        apply: Callable = appliers.get(step.rule_id)
        if apply is None:
            raise TLCalcError(f"Cannot replay rule {step.rule_id!r}")
        if diagram.digest() != step.before_hash:
            raise TLCalcError(f"Replay diverged before {step.rule_id} on {step.target}")
        diagram = apply(diagram, step.arguments)
        if diagram.digest() != step.after_hash:
            raise TLCalcError(f"Replay of {step.rule_id} on {step.target} produced a different diagram")
    return diagram
