"""
A small expression language for diagrams
"""

from .nodes import DiagramExpr, serialize
from .parser import parse
from .elaborator import compile_expression, elaborate

__all__ = [
    'DiagramExpr',
    'serialize',
    'parse',
    'compile_expression',
    'elaborate',
]
