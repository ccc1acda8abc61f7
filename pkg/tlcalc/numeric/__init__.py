"""
Dense-matrix side of the calculus: shift-clock bases, random operators and
the einsum lowering of diagrams
"""

from .linalg import (
    omega_n,
    omega_projector,
    omega_vec,
    partial_trace,
    transfer_matrix,
    weyl_basis,
    weyl_unitary,
)
from .evaluator import evaluate, loop_value

__all__ = [
    'omega_n',
    'omega_projector',
    'omega_vec',
    'partial_trace',
    'transfer_matrix',
    'weyl_basis',
    'weyl_unitary',
    'evaluate',
    'loop_value',
]
