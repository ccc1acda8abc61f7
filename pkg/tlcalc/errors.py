"""
Exception hierarchy for the diagram calculus engine
"""

from typing import Optional, Tuple, Union


class TLCalcError(ValueError):
    """Base class for every error raised by tlcalc"""


class ArityMismatchError(TLCalcError):
    """Two diagrams (or a diagram and an operation) disagree on boundary arities"""

    def __init__(self, message: str, left: Optional[Union[int, Tuple[int, int]]] = None,
                 right: Optional[Union[int, Tuple[int, int]]] = None):
        super().__init__(message)
        self.left = left
        self.right = right


class InvalidReferenceError(TLCalcError):
    """A strand, loop or decoration reference does not exist"""


class TerminalPresentError(TLCalcError):
    """The operation is undefined on diagrams carrying ket/bra terminals"""


class SlideError(TLCalcError):
    """A decoration cannot be moved across a bend"""


class UnresolvedLabelError(TLCalcError):
    """A decoration or terminal label is missing from the operator registry"""

    def __init__(self, label: str, kind: str = "matrix"):
        super().__init__(f"Unresolved {kind} label: {label!r}")
        self.label = label
        self.kind = kind


class DimensionMismatchError(TLCalcError):
    """Registry entries or requested dimension disagree"""


class RegistryError(TLCalcError):
    """Registry content violates its declared flags or file format"""


class ProblemTooLargeError(TLCalcError):
    """Evaluating the diagram would exceed the configured matrix size"""


class ParameterRangeError(TLCalcError):
    """An integer parameter (generator index, channel index, wire index) is out of range"""


class UnknownIdentityError(TLCalcError):
    """verify_identity was asked for an identity outside the catalog"""


class ConfigError(TLCalcError):
    """Malformed settings file or environment override"""


class ParseError(TLCalcError):
    """Syntax error in a diagram expression"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownFlavorError(ParseError):
    """op(...) was given a flavor other than dag, T or conj"""


class ElaborationError(ArityMismatchError):
    """A well-formed expression composes diagrams of incompatible arities"""

    def __init__(self, message: str, line: int, column: int,
                 left: Tuple[int, int], right: Tuple[int, int]):
        super().__init__(
            f"{message}: {left} vs {right} (line {line}, column {column})", left, right
        )
        self.line = line
        self.column = column
