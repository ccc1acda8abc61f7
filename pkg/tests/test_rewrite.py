"""
Tests for the rewrite rules and the normalizer
"""

import sys
import unittest
from pathlib import Path

import numpy as np

# Add the parent directory to path so we can import modules
sys.path.append(str(Path(__file__).parent.parent))

from diagram_factory import random_diagram, random_registry
from tlcalc.diagram.diagram import (
    Diagram,
    bra,
    bra_cap,
    compose,
    decorate_at,
    identity,
    ket,
    ket_cup,
    projector,
    tensor,
)
from tlcalc.diagram.elements import Decoration, DecorationRef, Flavor, Strand, bottom, top
from tlcalc.errors import (
    ArityMismatchError,
    InvalidReferenceError,
    ParameterRangeError,
    SlideError,
    TerminalPresentError,
    TLCalcError,
)
from tlcalc.models import RewriteTrace
from tlcalc.numeric.evaluator import evaluate
from tlcalc.numeric.linalg import max_abs_diff, partial_trace
from tlcalc.rewrite.normalizer import Normalizer, normalize, replay
from tlcalc.rewrite.rules import (
    FUSED_PREFIX,
    close,
    fuse,
    fused_label,
    loop_eliminate,
    partial_close,
    slide,
)


def wire(label, flavor=Flavor.PLAIN):
    return decorate_at(identity(1), top(0), label, flavor)


def relative_residual(a, b):
    scale = max(1.0, float(np.max(np.abs(a))))
    return max_abs_diff(a, b) / scale


class TestSlide(unittest.TestCase):
    """Moving decorations round bends"""

    def setUp(self):
        self.registry = random_registry(3)

    def test_slide_across_cup(self):
        cup = decorate_at(ket_cup(), bottom(0), "A")
        self.assertEqual(cup.strands[0].bend, 1)
        slid = slide(cup, DecorationRef(0, 0))
        self.assertEqual(slid.strands[0].bend, 0)
        self.assertEqual(slid.strands[0].decorations, cup.strands[0].decorations)
        self.assertEqual(slid.strands[0].leg_view()[0][0], "end")
        self.assertLess(max_abs_diff(evaluate(cup, 3, self.registry).matrix,
                                     evaluate(slid, 3, self.registry).matrix), 1e-12)
        self.assertEqual(slide(slid, DecorationRef(0, 0)), cup)

    def test_straight_strand(self):
        with self.assertRaises(SlideError):
            slide(wire("A"), DecorationRef(0, 0))

    def test_blocked(self):
        word = (Decoration("A"), Decoration("B"), Decoration("C"))
        cup = Diagram(0, 2, (Strand(bottom(0), bottom(1), word, 3),))
        with self.assertRaises(SlideError):
            slide(cup, DecorationRef(0, 0))
        self.assertEqual(slide(cup, DecorationRef(0, 2)).strands[0].bend, 2)

    def test_bad_reference(self):
        cup = decorate_at(ket_cup(), bottom(0), "A")
        with self.assertRaises(InvalidReferenceError):
            slide(cup, DecorationRef(3, 0))
        with self.assertRaises(InvalidReferenceError):
            slide(cup, DecorationRef(0, 4))
        with self.assertRaises(InvalidReferenceError):
            slide(cup, DecorationRef(0, 0, on_loop=True))


class TestFuse(unittest.TestCase):
    """Multiplying neighbouring decorations"""

    def setUp(self):
        self.registry = random_registry(2, seed=4)

    def test_fuse_wire(self):
        diagram = compose(wire("A"), wire("B", Flavor.ADJOINT))
        fused, registry = fuse(diagram, 0, self.registry)
        decorations = fused.strands[0].decorations
        self.assertEqual(len(decorations), 1)
        self.assertTrue(decorations[0].label.startswith(FUSED_PREFIX))
        self.assertTrue(registry.has_matrix(decorations[0].label))
        self.assertFalse(self.registry.has_matrix(decorations[0].label))
        expected = self.registry.matrix("B").conj().T @ self.registry.matrix("A")
        self.assertLess(max_abs_diff(evaluate(fused, 2, registry).matrix, expected), 1e-12)

    def test_fuse_keeps_bend_in_range(self):
        word = (Decoration("A"), Decoration("B"), Decoration("C", Flavor.TRANSPOSE))
        cup = Diagram(0, 2, (Strand(bottom(0), bottom(1), word, 3),))
        fused, registry = fuse(cup, 0, self.registry, position=1)
        self.assertEqual(fused.strands[0].bend, 2)
        self.assertLess(max_abs_diff(evaluate(cup, 2, self.registry).matrix,
                                     evaluate(fused, 2, registry).matrix), 1e-12)

    def test_label_is_content_addressed(self):
        m = self.registry.matrix("A") @ self.registry.matrix("B")
        self.assertEqual(fused_label(m), fused_label(m.copy()))
        self.assertNotEqual(fused_label(m), fused_label(2 * m))

    def test_no_pair(self):
        with self.assertRaises(InvalidReferenceError):
            fuse(wire("A"), 0, self.registry)
        with self.assertRaises(InvalidReferenceError):
            fuse(wire("A"), 1, self.registry)


class TestLoopsAndClosure(unittest.TestCase):
    """Loop elimination, closure and partial closure"""

    def setUp(self):
        self.registry = random_registry(3, seed=2)

    def test_decorated_circle(self):
        circle = compose(decorate_at(ket_cup(), bottom(0), "A"), bra_cap())
        self.assertEqual(len(circle.loops), 1)
        value = loop_eliminate(circle, self.registry, 3)
        self.assertEqual(value.loops, ())
        self.assertEqual(value.d_power, 0)
        self.assertAlmostEqual(value.scalar, np.trace(self.registry.matrix("A")) / 3)

    def test_eliminate_one_loop(self):
        two = tensor(compose(ket_cup(), bra_cap()), compose(ket_cup(), bra_cap()))
        one = loop_eliminate(two, self.registry, 3, loop=0)
        self.assertEqual(len(one.loops), 1)
        with self.assertRaises(InvalidReferenceError):
            loop_eliminate(two, self.registry, 3, loop=2)

    def test_close_gives_trace(self):
        for seed in range(30):
            diagram = random_diagram(seed, max_wires=3)
            closed = loop_eliminate(close(diagram), self.registry, 3)
            self.assertEqual((closed.upper_arity, closed.lower_arity), (0, 0))
            self.assertEqual(closed.loops, ())
            trace = np.trace(evaluate(diagram, 3, self.registry).matrix)
            self.assertLess(abs(closed.scalar - trace) / max(1.0, abs(trace)), 1e-9, f"seed {seed}")

    def test_close_errors(self):
        with self.assertRaises(ArityMismatchError):
            close(ket_cup())
        with self.assertRaises(TerminalPresentError):
            close(compose(ket("v"), bra("v")))

    def test_partial_close(self):
        pair = tensor(wire("A"), wire("B"))
        reduced = loop_eliminate(partial_close(pair, [(1, 1)]), self.registry, 3)
        self.assertEqual((reduced.upper_arity, reduced.lower_arity), (1, 1))
        expected = partial_trace(evaluate(pair, 3, self.registry).matrix, 3, [1])
        self.assertLess(max_abs_diff(evaluate(reduced, 3, self.registry).matrix, expected), 1e-10)

    def test_partial_close_errors(self):
        pair = tensor(wire("A"), wire("B"))
        with self.assertRaises(ParameterRangeError):
            partial_close(pair, [(0, 0), (0, 1)])
        with self.assertRaises(ParameterRangeError):
            partial_close(pair, [(2, 0)])


class TestNormalize(unittest.TestCase):
    """Normal forms: soundness, shape, idempotence, confluence, replay"""

    def _case(self, seed):
        d = 2 + seed % 3
        registry = random_registry(d, seed)
        diagram = random_diagram(seed, terminals=seed % 4 == 0)
        return d, registry, diagram

    def test_sound(self):
        for seed in range(200):
            d, registry, diagram = self._case(seed)
            final, trace = normalize(diagram, registry, d)
            before = evaluate(diagram, d, registry).matrix
            after = evaluate(final, d, trace.registry).matrix
            self.assertLess(relative_residual(before, after), 1e-9, f"seed {seed}")
            self.assertLess(max_abs_diff(before, after), 1e-9, f"seed {seed}")

    def test_every_step_is_sound(self):
        for seed in range(40):
            d, registry, diagram = self._case(seed)
            normalizer = Normalizer(registry, d)
            expected = evaluate(diagram, d, registry).matrix
            current = diagram
            while normalizer.legal_moves(current):
                current = normalizer.apply(current, normalizer.legal_moves(current)[0])
                after = evaluate(current, d, normalizer.registry).matrix
                self.assertLess(relative_residual(expected, after), 1e-9, f"seed {seed}")
                self.assertLess(max_abs_diff(expected, after), 1e-9, f"seed {seed}")

    def test_normal_form_shape(self):
        for seed in range(50):
            d, registry, diagram = self._case(seed)
            final, _ = normalize(diagram, registry, d)
            self.assertEqual(final.loops, ())
            self.assertEqual(final.d_power, 0)
            self.assertEqual((final.upper_arity, final.lower_arity), (diagram.upper_arity, diagram.lower_arity))
            for strand in final.strands:
                self.assertLessEqual(len(strand.decorations), 1)
                if strand.bend is not None:
                    self.assertEqual(strand.bend, len(strand.decorations))

    def test_idempotent(self):
        for seed in range(30):
            d, registry, diagram = self._case(seed)
            final, trace = normalize(diagram, registry, d)
            again, second = normalize(final, trace.registry, d)
            self.assertEqual(again, final)
            self.assertEqual(second.steps, [])

    def test_order_independent(self):
        for seed in range(20):
            d, registry, diagram = self._case(seed)
            reference, trace = normalize(diagram, registry, d)
            for order_seed in range(10):
                shuffled, other = normalize(diagram, registry, d, order_seed=order_seed)
                self.assertEqual(len(shuffled.strands), len(reference.strands))
                self.assertEqual(shuffled.loops, ())
                self.assertAlmostEqual(abs(shuffled.scalar - reference.scalar) / max(1.0, abs(reference.scalar)),
                                       0.0, places=9)
                for mine, theirs in zip(shuffled.strands, reference.strands):
                    self.assertEqual((mine.start, mine.end, mine.bend), (theirs.start, theirs.end, theirs.bend))
                    self.assertEqual(len(mine.decorations), len(theirs.decorations))
                    for a, b in zip(mine.decorations, theirs.decorations):
                        mine_matrix, theirs_matrix = other.registry.flavored(a), trace.registry.flavored(b)
                        self.assertLess(relative_residual(mine_matrix, theirs_matrix), 1e-9)
                        self.assertLess(max_abs_diff(mine_matrix, theirs_matrix), 1e-9)

    def test_projector_squares_to_itself(self):
        final, trace = normalize(compose(projector(), projector()), random_registry(2), 2)
        self.assertEqual(final, projector())
        self.assertEqual(trace.rule_counts(), {"loop_eliminate": 1})

    def test_replay(self):
        for seed in range(20):
            d, registry, diagram = self._case(seed)
            final, trace = normalize(diagram, registry, d, order_seed=seed)
            self.assertEqual(replay(trace, d), final)

    def test_closure_is_recorded(self):
        registry = random_registry(3, seed=2)
        pair = tensor(wire("A"), wire("B"))
        reduced, trace = normalize(pair, registry, 3, closure=[(1, 1)])
        self.assertEqual(trace.initial, pair)
        self.assertEqual(trace.steps[0].rule_id, "partial_close")
        self.assertEqual(trace.steps[0].arguments, {"pairs": [[1, 1]]})
        self.assertEqual(replay(trace, 3), reduced)
        expected = partial_trace(evaluate(pair, 3, registry).matrix, 3, [1])
        self.assertLess(max_abs_diff(evaluate(reduced, 3, trace.registry).matrix, expected), 1e-9)

        closed, trace = normalize(pair, registry, 3, closure="full")
        self.assertEqual(trace.rule_counts()["close"], 1)
        self.assertEqual(trace.steps[0].rule_id, "close")
        self.assertEqual(replay(trace, 3), closed)
        value = np.trace(evaluate(pair, 3, registry).matrix)
        self.assertLess(abs(closed.scalar - value), 1e-9)

    def test_replay_detects_divergence(self):
        _, trace = normalize(compose(projector(), projector()), random_registry(2), 2)
        tampered = RewriteTrace(projector(), trace.final, trace.steps, trace.registry)
        with self.assertRaises(TLCalcError):
            replay(tampered, 2)


if __name__ == "__main__":
    unittest.main()
