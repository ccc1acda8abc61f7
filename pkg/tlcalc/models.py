"""
Result models shared by the evaluator, the rewriter, the verifiers and the CLI
"""

import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional

import numpy as np

if TYPE_CHECKING:
    from .diagram.diagram import Diagram
    from .diagram.registry import OperatorRegistry

SIGNIFICANT_DIGITS = 12


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round to significant digits; negative zero comes out as 0.0"""
    return float(f"{value:.{digits}g}") + 0.0


def encode_matrix(matrix: np.ndarray, digits: int = SIGNIFICANT_DIGITS) -> List[List[List[float]]]:
    """Row-major nested lists of [re, im] pairs"""
    return [
        [[round_significant(z.real, digits), round_significant(z.imag, digits)] for z in row]
        for row in np.atleast_2d(matrix)
    ]


@dataclass
class EvalResult:
    """A diagram lowered to a d^lower × d^upper complex matrix"""
    matrix: np.ndarray
    d: int
    upper_arity: int
    lower_arity: int
    prefactor: complex = 1 + 0j

    @property
    def shape(self):
        return self.matrix.shape

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "upper_arity": self.upper_arity,
            "lower_arity": self.lower_arity,
            "shape": list(self.matrix.shape),
            "matrix": encode_matrix(self.matrix),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class IdentityReport:
    """Outcome of checking one identity at one dimension and seed"""
    identity_id: str
    d: int
    seed: Optional[int]
    residual: float
    passed: bool
    tolerance: float
    parameters: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, identity_id: str, d: int, seed: Optional[int], residual: float,
                      tolerance: float, parameters: Optional[Dict[str, Any]] = None) -> "IdentityReport":
        residual = float(residual)
        passed = not math.isnan(residual) and residual < tolerance
        return cls(identity_id, d, seed, residual, passed, tolerance, dict(parameters or {}))

    @property
    def sort_key(self):
        return (self.identity_id, self.d, -1 if self.seed is None else self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "d": self.d,
            "seed": self.seed,
            "residual": self.residual,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "parameters": self.parameters,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class RewriteStep:
    """
    One application of a rewrite rule

    ``target`` names what the rule acted on; ``arguments`` holds what replay
    needs to apply the rule again.
    """
    rule_id: str
    target: str
    before_hash: str
    after_hash: str
    arguments: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rule_id": self.rule_id,
            "target": self.target,
            "before_hash": self.before_hash,
            "after_hash": self.after_hash,
            "arguments": self.arguments,
        }


@dataclass
class RewriteTrace:
    """The steps taken from ``initial`` to ``final``, with the registry the final form needs"""
    initial: "Diagram"
    final: "Diagram"
    steps: List[RewriteStep] = field(default_factory=list)
    registry: Optional["OperatorRegistry"] = None

    def rule_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for step in self.steps:
            counts[step.rule_id] = counts.get(step.rule_id, 0) + 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "initial": self.initial.to_dict(),
            "final": self.final.to_dict(),
            "initial_hash": self.initial.digest(),
            "final_hash": self.final.digest(),
            "rule_counts": self.rule_counts(),
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
