"""
tlcalc: an extended Temperley-Lieb diagram calculus engine

Builds planar diagrams of cups, caps and decorated strands, rewrites them to
normal form, lowers them to matrices, and checks the protocol identities of
teleportation, dense coding and entanglement swapping against direct linear
algebra.
"""

__version__ = '1.0.0'

from .errors import TLCalcError
from .config import Settings, get_settings, load_settings
from .diagram import Diagram, DiagramSum, OperatorRegistry, compose, dagger, standard_registry, tensor
from .numeric import evaluate
from .rewrite import normalize
from .protocols import list_identities, verify_all, verify_identity
from .dsl import compile_expression, parse, serialize

__all__ = [
    'TLCalcError',
    'Settings',
    'get_settings',
    'load_settings',
    'Diagram',
    'DiagramSum',
    'OperatorRegistry',
    'compose',
    'dagger',
    'standard_registry',
    'tensor',
    'evaluate',
    'normalize',
    'list_identities',
    'verify_all',
    'verify_identity',
    'compile_expression',
    'parse',
    'serialize',
]
