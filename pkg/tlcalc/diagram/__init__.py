"""
Diagrams of the extended Temperley-Lieb calculus

Strands, loops and decorations, the structural operations (tensor, compose,
dagger, decorate) and the operator registry that gives labels their matrices.
"""

from .elements import (
    Decoration,
    DecorationRef,
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
from .diagram import (
    Diagram,
    DiagramLike,
    DiagramSum,
    bra,
    bra_cap,
    compose,
    compose_all,
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
# registry pulls in numeric, which needs the diagram module loaded first
from .registry import OperatorEntry, OperatorRegistry, standard_registry

__all__ = [
    'Decoration',
    'DecorationRef',
    'Endpoint',
    'EndpointKind',
    'Flavor',
    'Loop',
    'Strand',
    'bottom',
    'bra_terminal',
    'ket_terminal',
    'top',
    'Diagram',
    'DiagramLike',
    'DiagramSum',
    'bra',
    'bra_cap',
    'compose',
    'compose_all',
    'dagger',
    'decorate',
    'decorate_at',
    'identity',
    'is_tl_planar',
    'ket',
    'ket_cup',
    'permutation',
    'projector',
    'scalar',
    'tensor',
    'tensor_all',
    'OperatorEntry',
    'OperatorRegistry',
    'standard_registry',
]
