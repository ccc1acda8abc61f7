"""
Lowering pass: contract a diagram to a dense matrix

Every strand becomes a d×d tensor, cups and caps carrying 1/√d, with kets and
bras (conjugated) contracted into its ends. np.einsum joins the strands;
the output axes are the bottom points followed by the top points, which
reshapes to a d^lower × d^upper matrix in Kronecker order.
"""

import logging
from functools import reduce
from typing import TYPE_CHECKING, List, Optional, Tuple, Union

import numpy as np

from ..config import get_settings
from ..diagram.diagram import Diagram, DiagramSum
from ..diagram.elements import Endpoint, EndpointKind
from ..errors import ProblemTooLargeError
from ..models import EvalResult

if TYPE_CHECKING:
    from ..diagram.registry import OperatorRegistry

logger = logging.getLogger(__name__)

# Output rank one einsum call can produce (numpy 1.x array rank limit)
MAX_EINSUM_AXES = 32


def word_matrix(decorations, registry: "OperatorRegistry", d: int) -> np.ndarray:
    """
    Product of flavored matrices along a decoration word

    The first decoration acts first, so the word [w1, w2, w3] gives w3 @ w2 @ w1.
    """
    matrices: List[np.ndarray] = [registry.flavored(dec) for dec in decorations]
    if not matrices:
        return np.eye(d, dtype=complex)
    return reduce(lambda acc, m: m @ acc, matrices[1:], matrices[0].astype(complex))


def loop_value(decorations, registry: "OperatorRegistry", d: int) -> complex:
    """tr(W)/d for the word read once around the loop"""
    return complex(np.trace(word_matrix(decorations, registry, d))) / d


def check_size(upper_arity: int, lower_arity: int, d: int) -> None:
    """Refuse matrices larger than the configured limit"""
    limit = get_settings().max_entries
    entries = d ** (upper_arity + lower_arity)
    if entries > limit:
        raise ProblemTooLargeError(
            f"Evaluating a {upper_arity}->{lower_arity} diagram at d={d} needs {entries} entries, "
            f"limit is {limit}"
        )


def evaluate(diagram: Union[Diagram, DiagramSum], d: int,
             registry: Optional["OperatorRegistry"] = None,
             optimize: Union[str, bool] = "greedy") -> EvalResult:
    """
    Lower a diagram or sum to its matrix

    Args:
        diagram: Diagram or DiagramSum
        d: Local dimension
        registry: Resolves decoration and terminal labels; the standard
            registry at d when omitted
        optimize: Contraction path strategy passed to np.einsum

    Returns:
        EvalResult with a d^lower × d^upper matrix

    Raises:
        UnresolvedLabelError: a label is missing from the registry
        DimensionMismatchError: the registry is not d-dimensional
        ProblemTooLargeError: the result exceeds Settings.max_entries
    """
    if registry is None:
        from ..diagram.registry import standard_registry
        registry = standard_registry(d)
    registry.check_dimension(d)
    check_size(diagram.upper_arity, diagram.lower_arity, d)

    if isinstance(diagram, DiagramSum):
        matrix = np.zeros((d ** diagram.lower_arity, d ** diagram.upper_arity), dtype=complex)
        for coefficient, term in diagram.terms:
            matrix = matrix + coefficient * _contract(term, d, registry, optimize)
        return EvalResult(matrix, d, diagram.upper_arity, diagram.lower_arity)

    matrix = _contract(diagram, d, registry, optimize)
    return EvalResult(matrix, d, diagram.upper_arity, diagram.lower_arity,
                      diagram.scalar * float(d) ** diagram.d_power)


def _terminal_vector(endpoint: Endpoint, registry: "OperatorRegistry") -> np.ndarray:
    vector = registry.vector(endpoint.label)
    return vector if endpoint.kind.is_source else vector.conj()


def _strand_piece(strand, u: int, d: int, registry: "OperatorRegistry") -> Tuple[np.ndarray, List[int]]:
    """Strand tensor with its kets and bras contracted in, and the boundary axes it still carries"""
    tensor = word_matrix(strand.decorations, registry, d).T
    if strand.is_bent:
        tensor = tensor / np.sqrt(d)
    axes = []
    for endpoint in (strand.start, strand.end):
        if endpoint.kind is EndpointKind.TOP:
            axes.append(endpoint.index)
        elif endpoint.kind is EndpointKind.BOTTOM:
            axes.append(u + endpoint.index)
    if strand.end.kind.is_terminal:
        tensor = tensor @ _terminal_vector(strand.end, registry)
    if strand.start.kind.is_terminal:
        tensor = _terminal_vector(strand.start, registry) @ tensor
    return tensor, axes


def _contract(diagram: Diagram, d: int, registry: "OperatorRegistry",
              optimize: Union[str, bool]) -> np.ndarray:
    u, l = diagram.upper_arity, diagram.lower_arity
    factor = diagram.scalar * float(d) ** diagram.d_power
    for loop in diagram.loops:
        factor *= loop_value(loop.decorations, registry, d)

    # Strands share no indices: terminal lines fold into the factor and only
    # boundary axes reach einsum.
    operands = []
    for strand in diagram.strands:
        tensor, axes = _strand_piece(strand, u, d, registry)
        if not axes:
            factor *= complex(tensor)
        elif d == 1:
            factor *= complex(tensor.reshape(-1)[0])
        else:
            operands.extend([tensor, axes])

    if not operands:
        network = np.ones((), dtype=complex)
    elif u + l > MAX_EINSUM_AXES:
        raise ProblemTooLargeError(
            f"A {u}->{l} diagram has {u + l} open axes, einsum takes at most {MAX_EINSUM_AXES}"
        )
    else:
        output = [u + j for j in range(l)] + list(range(u))
        network = np.einsum(*operands, output, optimize=optimize)
    logger.debug(f"Contracted {len(diagram.strands)} strands and {len(diagram.loops)} loops at d={d}")
    return factor * np.asarray(network, dtype=complex).reshape(d ** l, d ** u)
