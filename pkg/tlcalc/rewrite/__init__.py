"""
Topological rewriting and normal forms
"""

from .rules import close, fuse, loop_eliminate, partial_close, slide
from .normalizer import Normalizer, normalize, replay

__all__ = [
    'close',
    'fuse',
    'loop_eliminate',
    'partial_close',
    'slide',
    'Normalizer',
    'normalize',
    'replay',
]
