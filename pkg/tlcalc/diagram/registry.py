"""
Operator registry: the named matrices and vectors decoration labels resolve to
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..config import get_settings
from ..errors import DimensionMismatchError, RegistryError, UnresolvedLabelError
from ..numeric.linalg import pauli, weyl_basis, weyl_labels
from .elements import Decoration

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorEntry:
    """A d×d matrix with the properties it was registered with"""
    label: str
    matrix: np.ndarray
    unitary: bool = False
    hermitian: bool = False


def _complex_array(raw: Any, what: str) -> np.ndarray:
    """Decode nested [re, im] pairs from the registry file format"""
    try:
        array = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise RegistryError(f"{what} is not a nested list of [re, im] pairs: {e}") from e
    if array.ndim == 0 or array.shape[-1] != 2:
        raise RegistryError(f"{what} entries must be [re, im] pairs")
    return array[..., 0] + 1j * array[..., 1]


def _encode(array: np.ndarray) -> list:
    return np.stack([array.real, array.imag], axis=-1).tolist()


class OperatorRegistry:
    """
    Immutable map from labels to d×d matrices and d-vectors

    ``with_matrix`` and friends return a new registry sharing the untouched
    entries, so fused labels never leak into the registry a caller passed in.
    """

    def __init__(self, d: int, matrices: Optional[Mapping[str, OperatorEntry]] = None,
                 vectors: Optional[Mapping[str, np.ndarray]] = None,
                 tolerance: Optional[float] = None):
        if d < 1:
            raise DimensionMismatchError(f"Registry dimension must be positive, got {d}")
        self._d = d
        self._tolerance = get_settings().tolerance if tolerance is None else tolerance
        self._matrices: Dict[str, OperatorEntry] = {}
        self._vectors: Dict[str, np.ndarray] = {}
        for label, entry in (matrices or {}).items():
            self._matrices[label] = self._validated_entry(entry)
        for label, vector in (vectors or {}).items():
            self._vectors[label] = self._validated_vector(label, vector)

    @property
    def d(self) -> int:
        return self._d

    @property
    def matrices(self) -> Mapping[str, OperatorEntry]:
        return MappingProxyType(self._matrices)

    @property
    def vectors(self) -> Mapping[str, np.ndarray]:
        return MappingProxyType(self._vectors)

    def _validated_entry(self, entry: OperatorEntry) -> OperatorEntry:
        matrix = np.array(entry.matrix, dtype=complex)
        if matrix.shape != (self._d, self._d):
            raise DimensionMismatchError(
                f"Matrix {entry.label!r} has shape {matrix.shape}, registry dimension is {self._d}"
            )
        if not np.all(np.isfinite(matrix)):
            raise RegistryError(f"Matrix {entry.label!r} has non-finite entries")
        if entry.unitary:
            error = np.max(np.abs(matrix.conj().T @ matrix - np.eye(self._d)))
            if error > self._tolerance:
                raise RegistryError(f"Matrix {entry.label!r} is flagged unitary but U†U deviates by {error:.3g}")
        if entry.hermitian:
            error = np.max(np.abs(matrix - matrix.conj().T))
            if error > self._tolerance:
                raise RegistryError(f"Matrix {entry.label!r} is flagged hermitian but M-M† is {error:.3g}")
        matrix.setflags(write=False)
        return OperatorEntry(entry.label, matrix, entry.unitary, entry.hermitian)

    def _validated_vector(self, label: str, vector: Any) -> np.ndarray:
        vector = np.array(vector, dtype=complex).reshape(-1)
        if vector.shape != (self._d,):
            raise DimensionMismatchError(
                f"Vector {label!r} has {vector.shape[0]} components, registry dimension is {self._d}"
            )
        if not np.all(np.isfinite(vector)):
            raise RegistryError(f"Vector {label!r} has non-finite entries")
        vector.setflags(write=False)
        return vector

    def check_dimension(self, d: int) -> None:
        if d != self._d:
            raise DimensionMismatchError(f"Registry holds {self._d}-dimensional entries, evaluation asked for d={d}")

    def has_matrix(self, label: str) -> bool:
        return label in self._matrices

    def has_vector(self, label: str) -> bool:
        return label in self._vectors

    def matrix(self, label: str) -> np.ndarray:
        try:
            return self._matrices[label].matrix
        except KeyError:
            raise UnresolvedLabelError(label, "matrix") from None

    def vector(self, label: str) -> np.ndarray:
        try:
            return self._vectors[label]
        except KeyError:
            raise UnresolvedLabelError(label, "vector") from None

    def flavored(self, decoration: Decoration) -> np.ndarray:
        """The matrix a decoration stands for, flavor applied"""
        return decoration.flavor.apply(self.matrix(decoration.label))

    def with_matrix(self, label: str, matrix: np.ndarray,
                    unitary: bool = False, hermitian: bool = False) -> "OperatorRegistry":
        registry = self._copy()
        registry._matrices[label] = registry._validated_entry(OperatorEntry(label, matrix, unitary, hermitian))
        return registry

    def with_vector(self, label: str, vector: np.ndarray) -> "OperatorRegistry":
        registry = self._copy()
        registry._vectors[label] = registry._validated_vector(label, vector)
        return registry

    def merged(self, other: "OperatorRegistry") -> "OperatorRegistry":
        """Entries of ``other`` added to (and overriding) this registry's"""
        if other.d != self._d:
            raise DimensionMismatchError(f"Cannot merge registries of dimension {self._d} and {other.d}")
        registry = self._copy()
        registry._matrices.update(other._matrices)
        registry._vectors.update(other._vectors)
        return registry

    def _copy(self) -> "OperatorRegistry":
        registry = OperatorRegistry.__new__(OperatorRegistry)
        registry._d = self._d
        registry._tolerance = self._tolerance
        registry._matrices = dict(self._matrices)
        registry._vectors = dict(self._vectors)
        return registry

    def to_dict(self) -> Dict[str, Any]:
        """The registry file format: {"d", "matrices", "vectors"} with [re, im] entries"""
        return {
            "d": self._d,
            "matrices": {label: _encode(entry.matrix) for label, entry in self._matrices.items()},
            "vectors": {label: _encode(vector) for label, vector in self._vectors.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Optional["OperatorRegistry"] = None) -> "OperatorRegistry":
        """
        Build a registry from the JSON file format

        Matrices may be given as a bare [[[re, im], ...], ...] array or as an
        object {"entries": ..., "unitary": bool, "hermitian": bool}.

        Args:
            data: Parsed JSON document
            base: Registry whose entries the document extends

        Returns:
            New registry
        """
        if not isinstance(data, Mapping) or "d" not in data:
            raise RegistryError("Registry document must be an object with a 'd' field")
        d = data["d"]
        if not isinstance(d, int) or isinstance(d, bool):
            raise RegistryError(f"Registry dimension must be an integer, got {d!r}")
        if base is not None and base.d != d:
            raise DimensionMismatchError(f"Registry file has d={d}, expected d={base.d}")

        matrices = {}
        for label, raw in (data.get("matrices") or {}).items():
            flags = {}
            if isinstance(raw, Mapping):
                flags = {"unitary": bool(raw.get("unitary", False)),
                         "hermitian": bool(raw.get("hermitian", False))}
                raw = raw.get("entries")
            matrices[label] = OperatorEntry(label, _complex_array(raw, f"Matrix {label!r}"), **flags)
        vectors = {
            label: _complex_array(raw, f"Vector {label!r}")
            for label, raw in (data.get("vectors") or {}).items()
        }
        registry = cls(d, matrices, vectors)
        if base is not None:
            registry = base.merged(registry)
        logger.debug(f"Loaded registry with {len(matrices)} matrices and {len(vectors)} vectors at d={d}")
        return registry

    @classmethod
    def from_json(cls, path: str, base: Optional["OperatorRegistry"] = None) -> "OperatorRegistry":
        registry_path = Path(path)
        try:
            with open(registry_path, "r") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise RegistryError(f"Registry file not found: {registry_path}") from None
        except json.JSONDecodeError as e:
            raise RegistryError(f"Registry file {registry_path} is not valid JSON: {e}") from e
        return cls.from_dict(data, base)

    def __repr__(self) -> str:
        return f"OperatorRegistry(d={self._d}, matrices={len(self._matrices)}, vectors={len(self._vectors)})"


def standard_registry(d: int) -> OperatorRegistry:
    """
    Built-in labels at dimension d

    "1" is the identity, "U1".."U{d²}" the shift-clock basis (U1 = 1) and at
    d=2 also "s1", "s2", "s3" for the Pauli matrices. Computational basis
    vectors are available as "e0".."e{d-1}".
    """
    matrices = {"1": OperatorEntry("1", np.eye(d), unitary=True, hermitian=True)}
    for label, unitary in zip(weyl_labels(d), weyl_basis(d)):
        matrices[label] = OperatorEntry(label, unitary, unitary=True)
    if d == 2:
        for label, sigma in zip(("s1", "s2", "s3"), pauli()):
            matrices[label] = OperatorEntry(label, sigma, unitary=True, hermitian=True)
    vectors = {f"e{i}": np.eye(d)[i] for i in range(d)}
    return OperatorRegistry(d, matrices, vectors, tolerance=get_settings().exact_tolerance)
