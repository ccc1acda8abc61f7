"""
Elaborate expression trees into diagrams
"""

import logging

from ..diagram.diagram import (
    DiagramLike,
    bra,
    bra_cap,
    compose,
    decorate_at,
    identity,
    ket,
    ket_cup,
    projector,
    scalar,
    tensor,
)
from ..diagram.elements import Flavor, top
from ..errors import ElaborationError
from .nodes import FLAVOR_NAMES, DiagramExpr
from .parser import parse

logger = logging.getLogger(__name__)


class Elaborator:
    """Visitor turning each node into a Diagram or DiagramSum, bottom up"""

    def visit(self, node: DiagramExpr) -> DiagramLike:
        method = getattr(self, f"visit_{type(node).__name__}", None)
        if method is None:
            raise TypeError(f"No elaboration for {type(node).__name__}")
        return method(node)

    def visit_Id(self, node) -> DiagramLike:
        return identity(node.n)

    def visit_Cup(self, node) -> DiagramLike:
        return ket_cup()

    def visit_Cap(self, node) -> DiagramLike:
        return bra_cap()

    def visit_Proj(self, node) -> DiagramLike:
        return projector()

    def visit_Op(self, node) -> DiagramLike:
        flavor = Flavor(FLAVOR_NAMES[node.flavor]) if node.flavor else Flavor.PLAIN
        return decorate_at(identity(1), top(0), node.label, flavor)

    def visit_Ket(self, node) -> DiagramLike:
        return ket(node.label)

    def visit_Bra(self, node) -> DiagramLike:
        return bra(node.label)

    def visit_Scalar(self, node) -> DiagramLike:
        return scalar(node.value)

    def visit_Tensor(self, node) -> DiagramLike:
        return tensor(self.visit(node.left), self.visit(node.right))

    def visit_Compose(self, node) -> DiagramLike:
        first, second = self.visit(node.first), self.visit(node.second)
        if first.lower_arity != second.upper_arity:
            raise ElaborationError(
                "Cannot stack diagrams whose arities do not meet",
                node.line,
                node.column,
                (first.upper_arity, first.lower_arity),
                (second.upper_arity, second.lower_arity),
            )
        return compose(first, second)


def elaborate(node: DiagramExpr) -> DiagramLike:
    """
    Build the diagram an expression denotes

    Raises:
        ElaborationError: a ";" joins diagrams whose inner arities differ
    """
    return Elaborator().visit(node)


def compile_expression(text: str) -> DiagramLike:
    """Parse and elaborate in one go"""
    diagram = elaborate(parse(text))
    logger.debug(f"Elaborated expression to a {diagram.upper_arity}->{diagram.lower_arity} diagram")
    return diagram
