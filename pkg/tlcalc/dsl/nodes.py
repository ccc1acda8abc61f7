"""
Syntax tree of the diagram expression language

Nodes remember where they started in the source; positions do not take part
in equality, so a reparsed expression compares equal to the original.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

# flavor spelling in the language -> Flavor value
FLAVOR_NAMES = {"dag": "adjoint", "T": "transpose", "conj": "conjugate"}


@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False, kw_only=True)
    column: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Id(Node):
    n: int


@dataclass(frozen=True)
class Cup(Node):
    pass


@dataclass(frozen=True)
class Cap(Node):
    pass


@dataclass(frozen=True)
class Proj(Node):
    pass


@dataclass(frozen=True)
class Op(Node):
    label: str
    flavor: Optional[str] = None


@dataclass(frozen=True)
class Ket(Node):
    label: str


@dataclass(frozen=True)
class Bra(Node):
    label: str


@dataclass(frozen=True)
class Scalar(Node):
    value: complex


@dataclass(frozen=True)
class Tensor(Node):
    left: "DiagramExpr"
    right: "DiagramExpr"


@dataclass(frozen=True)
class Compose(Node):
    first: "DiagramExpr"
    second: "DiagramExpr"


DiagramExpr = Union[Id, Cup, Cap, Proj, Op, Ket, Bra, Scalar, Tensor, Compose]


def format_number(value: complex) -> str:
    """Shortest text that parses back to exactly ``value``"""
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    sign = "-" if value.imag < 0 else "+"
    return f"{value.real!r}{sign}{abs(value.imag)!r}i"


def serialize(node: DiagramExpr) -> str:
    """
    Print an expression in the concrete syntax

    Parentheses are added only where the grammar needs them: ";" binds
    weaker than "*", and both associate to the left.
    """
    if isinstance(node, Compose):
        second = serialize(node.second)
        if isinstance(node.second, Compose):
            second = f"({second})"
        return f"{serialize(node.first)} ; {second}"
    if isinstance(node, Tensor):
        left, right = serialize(node.left), serialize(node.right)
        if isinstance(node.left, Compose):
            left = f"({left})"
        if isinstance(node.right, (Compose, Tensor)):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(node, Id):
        return f"id({node.n})"
    if isinstance(node, Cup):
        return "cup"
    if isinstance(node, Cap):
        return "cap"
    if isinstance(node, Proj):
        return "proj"
    if isinstance(node, Op):
        return f"op({node.label}, {node.flavor})" if node.flavor else f"op({node.label})"
    if isinstance(node, Ket):
        return f"ket({node.label})"
    if isinstance(node, Bra):
        return f"bra({node.label})"
    if isinstance(node, Scalar):
        return format_number(node.value)
    raise TypeError(f"Not an expression node: {node!r}")
