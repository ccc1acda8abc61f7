"""
Tests for diagrams: constructors, tensor, compose, dagger, decorate, planarity
"""

import sys
import unittest
from pathlib import Path

import numpy as np

# Add the parent directory to path so we can import modules
sys.path.append(str(Path(__file__).parent.parent))

from tlcalc.diagram.diagram import (
    Diagram,
    DiagramSum,
    bra,
    bra_cap,
    compose,
    dagger,
    decorate,
    decorate_at,
    identity,
    is_tl_planar,
    ket,
    ket_cup,
    permutation,
    projector,
    scalar,
    tensor,
    tensor_all,
)
from tlcalc.diagram.elements import Endpoint, EndpointKind, Flavor, Strand, bottom, ket_terminal, top
from tlcalc.errors import ArityMismatchError, InvalidReferenceError, TerminalPresentError
from tlcalc.numeric.evaluator import evaluate
from tlcalc.numeric.linalg import max_abs_diff, omega_vec
from tlcalc.protocols.circuits import snake_left, snake_right, tl_generator

from diagram_factory import random_diagram, random_pair, random_registry

TOLERANCE = 1e-9


def matrix(diagram, d, registry=None):
    return evaluate(diagram, d, registry).matrix


class TestConstructors(unittest.TestCase):
    """Shapes and strands of the basic diagrams"""

    def test_identity(self):
        wires = identity(3)
        self.assertEqual((wires.upper_arity, wires.lower_arity), (3, 3))
        self.assertEqual([(str(s.start), str(s.end)) for s in wires.strands],
                         [("T0", "B0"), ("T1", "B1"), ("T2", "B2")])
        self.assertTrue(all(s.bend is None for s in wires.strands))

    def test_cup_and_cap(self):
        cup, cap = ket_cup(), bra_cap()
        self.assertEqual((cup.upper_arity, cup.lower_arity), (0, 2))
        self.assertEqual((cap.upper_arity, cap.lower_arity), (2, 0))
        self.assertTrue(cup.strands[0].is_cup)
        self.assertTrue(cap.strands[0].is_cap)
        self.assertEqual(cup.strands[0].bend, 0)

    def test_cup_is_omega(self):
        for d in (2, 3, 5):
            self.assertLess(max_abs_diff(matrix(ket_cup(), d), omega_vec(d)), TOLERANCE)
            self.assertLess(max_abs_diff(matrix(bra_cap(), d), omega_vec(d).conj().T), TOLERANCE)

    def test_projector_equals_cap_then_cup(self):
        self.assertEqual(compose(bra_cap(), ket_cup()), projector())
        self.assertEqual(tensor(ket_cup(), bra_cap()), projector())

    def test_scalar(self):
        value = scalar(2.5 - 1j)
        self.assertEqual((value.upper_arity, value.lower_arity), (0, 0))
        self.assertAlmostEqual(matrix(value, 2)[0, 0], 2.5 - 1j)

    def test_ket_and_bra(self):
        registry = random_registry(3)
        v = registry.vector("v")
        self.assertLess(max_abs_diff(matrix(ket("v"), 3, registry).reshape(-1), v), TOLERANCE)
        self.assertLess(max_abs_diff(matrix(bra("v"), 3, registry).reshape(-1), v.conj()), TOLERANCE)

    def test_permutation_wires(self):
        crossing = permutation([1, 0])
        d = 3
        expected = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
        self.assertLess(max_abs_diff(matrix(crossing, d), expected), TOLERANCE)
        with self.assertRaises(ValueError):
            permutation([0, 0])

    def test_rejects_incomplete_boundary(self):
        with self.assertRaises(ValueError):
            Diagram(1, 1, ())
        with self.assertRaises(ValueError):
            Diagram(0, 2, (Strand(bottom(0), bottom(1)), Strand(bottom(1), ket_terminal("v"))))

    def test_strands_are_canonical(self):
        reversed_cup = Diagram(0, 2, (Strand(bottom(1), bottom(0)),))
        self.assertEqual(reversed_cup, ket_cup())

    def test_digest_is_stable(self):
        self.assertEqual(projector().digest(), compose(bra_cap(), ket_cup()).digest())
        self.assertNotEqual(projector().digest(), identity(2).digest())


class TestCompose(unittest.TestCase):
    """Gluing diagrams top to bottom"""

    def test_arity_mismatch(self):
        with self.assertRaises(ArityMismatchError) as ctx:
            compose(ket_cup(), identity(1))
        self.assertEqual(ctx.exception.left, 2)
        self.assertEqual(ctx.exception.right, 1)

    def test_cup_then_cap_is_a_loop_worth_one(self):
        circle = compose(ket_cup(), bra_cap())
        self.assertEqual((circle.upper_arity, circle.lower_arity), (0, 0))
        self.assertEqual(len(circle.loops), 1)
        self.assertEqual(circle.d_power, 0)
        for d in (2, 3, 4, 5):
            self.assertAlmostEqual(matrix(circle, d)[0, 0], 1.0)

    def test_snakes_straighten_with_one_over_d(self):
        expected = identity(1).scaled(1, d_power=-1)
        self.assertEqual(snake_left(), expected)
        self.assertEqual(snake_right(), expected)
        for d in (2, 3, 4):
            self.assertLess(max_abs_diff(matrix(snake_left(), d), np.eye(d) / d), TOLERANCE)

    def test_idempotent_generator_makes_a_loop(self):
        e1 = tl_generator(2, 1)
        squared = compose(e1, e1)
        self.assertEqual(len(squared.loops), 1)
        self.assertEqual(squared.strands, e1.strands)

    def test_terminals_are_renumbered(self):
        both = compose(tensor(ket("v"), ket("w")), identity(2))
        kets = both.terminals(EndpointKind.KET)
        self.assertEqual([(e.index, e.label) for e in kets], [(0, "v"), (1, "w")])

    def test_functoriality(self):
        for seed in range(100):
            first, second = random_pair(seed)
            d = 2 + seed % 2
            registry = random_registry(d, seed)
            composed = matrix(compose(first, second), d, registry)
            expected = matrix(second, d, registry) @ matrix(first, d, registry)
            scale = max(1.0, float(np.max(np.abs(expected))))
            self.assertLess(max_abs_diff(composed, expected), TOLERANCE * scale, f"seed {seed}")

    def test_sum_composition_is_bilinear(self):
        d = 2
        registry = random_registry(d)
        left = DiagramSum.of([(0.5, identity(1)), (2j, decorate_at(identity(1), top(0), "A"))])
        right = decorate_at(identity(1), top(0), "B")
        composed = matrix(compose(left, right), d, registry)
        expected = matrix(right, d, registry) @ matrix(left, d, registry)
        self.assertLess(max_abs_diff(composed, expected), TOLERANCE)


class TestTensor(unittest.TestCase):
    """Placing diagrams side by side"""

    def test_arities_add(self):
        combined = tensor(identity(2), ket_cup())
        self.assertEqual((combined.upper_arity, combined.lower_arity), (2, 4))
        self.assertEqual(tensor(identity(1), identity(1)), identity(2))

    def test_empty_tensor_is_unit(self):
        self.assertEqual(tensor_all([]), scalar(1))

    def test_kronecker_order(self):
        for seed in range(30):
            a, b = random_diagram(seed, max_wires=2), random_diagram(seed + 500, max_wires=2)
            d = 2
            registry = random_registry(d, seed)
            product = matrix(tensor(a, b), d, registry)
            expected = np.kron(matrix(a, d, registry), matrix(b, d, registry))
            self.assertLess(max_abs_diff(product, expected), TOLERANCE * max(1.0, np.max(np.abs(expected))))

    def test_interchange_law(self):
        for seed in range(20):
            a, c = random_pair(seed, max_wires=2)
            b, e = random_pair(seed + 100, max_wires=2)
            d = 2
            registry = random_registry(d, seed)
            lhs = matrix(compose(tensor(a, b), tensor(c, e)), d, registry)
            rhs = matrix(tensor(compose(a, c), compose(b, e)), d, registry)
            self.assertLess(max_abs_diff(lhs, rhs), TOLERANCE * max(1.0, np.max(np.abs(rhs))))


class TestDagger(unittest.TestCase):
    """Mirroring top to bottom"""

    def test_cup_and_cap_swap(self):
        self.assertEqual(dagger(ket_cup()), bra_cap())
        self.assertEqual(dagger(projector()), projector())

    def test_involution(self):
        for seed in range(50):
            diagram = random_diagram(seed, terminals=seed % 3 == 0)
            self.assertEqual(dagger(dagger(diagram)), diagram)

    def test_conjugate_transpose(self):
        for seed in range(100):
            diagram = random_diagram(seed, terminals=seed % 4 == 0)
            d = 2 + seed % 2
            registry = random_registry(d, seed)
            value = matrix(diagram, d, registry)
            mirrored = matrix(dagger(diagram), d, registry)
            self.assertLess(max_abs_diff(mirrored, value.conj().T), TOLERANCE * max(1.0, np.max(np.abs(value))))

    def test_reverses_composition(self):
        for seed in range(30):
            first, second = random_pair(seed)
            lhs = dagger(compose(first, second))
            rhs = compose(dagger(second), dagger(first))
            registry = random_registry(2, seed)
            self.assertLess(max_abs_diff(matrix(lhs, 2, registry), matrix(rhs, 2, registry)),
                            TOLERANCE * max(1.0, np.max(np.abs(matrix(rhs, 2, registry)))))


class TestDecorate(unittest.TestCase):
    """Marking operators on strands"""

    def setUp(self):
        self.d = 3
        self.registry = random_registry(self.d)
        self.m = self.registry.matrix("A")
        self.identity = np.eye(self.d)

    def test_wire_carries_operator(self):
        wire = decorate_at(identity(1), top(0), "A")
        self.assertLess(max_abs_diff(matrix(wire, self.d, self.registry), self.m), TOLERANCE)

    def test_operators_act_in_order(self):
        wire = decorate_at(decorate_at(identity(1), top(0), "A"), top(0), "B")
        expected = self.registry.matrix("B") @ self.m
        self.assertLess(max_abs_diff(matrix(wire, self.d, self.registry), expected), TOLERANCE)

    def test_flavors(self):
        for flavor, expected in ((Flavor.ADJOINT, self.m.conj().T), (Flavor.TRANSPOSE, self.m.T),
                                 (Flavor.CONJUGATE, self.m.conj())):
            wire = decorate_at(identity(1), top(0), "A", flavor)
            self.assertLess(max_abs_diff(matrix(wire, self.d, self.registry), expected), TOLERANCE)

    def test_cup_legs(self):
        omega = omega_vec(self.d)
        left = decorate_at(ket_cup(), bottom(0), "A")
        right = decorate_at(ket_cup(), bottom(1), "A")
        self.assertLess(max_abs_diff(matrix(left, self.d, self.registry), np.kron(self.m, self.identity) @ omega),
                        TOLERANCE)
        self.assertLess(max_abs_diff(matrix(right, self.d, self.registry), np.kron(self.identity, self.m) @ omega),
                        TOLERANCE)

    def test_cap_legs(self):
        omega = omega_vec(self.d)
        cap = decorate_at(bra_cap(), top(1), "A")
        expected = omega.conj().T @ np.kron(self.identity, self.m)
        self.assertLess(max_abs_diff(matrix(cap, self.d, self.registry), expected), TOLERANCE)

    def test_both_legs_of_a_cup(self):
        omega = omega_vec(self.d)
        cup = decorate_at(decorate_at(ket_cup(), bottom(0), "A"), bottom(1), "B")
        expected = np.kron(self.m, self.registry.matrix("B")) @ omega
        self.assertLess(max_abs_diff(matrix(cup, self.d, self.registry), expected), TOLERANCE)

    def test_input_is_unchanged(self):
        cup = ket_cup()
        decorate_at(cup, bottom(0), "A")
        self.assertEqual(cup.strands[0].decorations, ())

    def test_bad_references(self):
        with self.assertRaises(InvalidReferenceError):
            decorate(identity(1), 3, "A")
        with self.assertRaises(InvalidReferenceError):
            decorate(ket_cup(), 0, "A", leg="middle")
        with self.assertRaises(InvalidReferenceError):
            decorate_at(identity(1), Endpoint(EndpointKind.TOP, 4), "A")


class TestPlanarity(unittest.TestCase):
    """TL diagrams are the non-crossing matchings"""

    def test_tl_diagrams_are_planar(self):
        self.assertTrue(is_tl_planar(identity(3)))
        self.assertTrue(is_tl_planar(projector()))
        for n in range(2, 6):
            for i in range(1, n):
                self.assertTrue(is_tl_planar(tl_generator(n, i)))
        self.assertTrue(is_tl_planar(compose(tl_generator(3, 1), tl_generator(3, 2))))

    def test_crossings_are_not(self):
        self.assertFalse(is_tl_planar(permutation([1, 0])))
        self.assertFalse(is_tl_planar(permutation([2, 0, 1])))
        self.assertTrue(is_tl_planar(permutation([0, 1, 2])))

    def test_terminals_rejected(self):
        with self.assertRaises(TerminalPresentError):
            is_tl_planar(ket("v"))


if __name__ == "__main__":
    unittest.main()
