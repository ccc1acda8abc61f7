"""
Dense complex linear algebra on (C^d)^⊗k

Maximally entangled vectors, the shift-clock unitary error basis, Pauli
matrices, seeded random operators and the small matrix oracles the verifiers
compare diagrams against. Tensor factors are always ordered left to right,
which is numpy's Kronecker order.
"""

from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ParameterRangeError

# Streams for np.random.default_rng([seed, stream]) so that one seed yields
# independent states, densities and observables
_STATE_STREAM = 0
_DENSITY_STREAM = 1
_OBSERVABLE_STREAM = 2
_UNITARY_STREAM = 3
_MATRIX_STREAM = 4


def _check_dimension(d: int) -> None:
    if d < 1:
        raise ParameterRangeError(f"Dimension must be at least 1, got {d}")


def omega_vec(d: int) -> np.ndarray:
    """|Ω⟩ = (1/√d) Σ_i e_i ⊗ e_i as a d²×1 column"""
    _check_dimension(d)
    return np.eye(d, dtype=complex).reshape(d * d, 1) / np.sqrt(d)


def omega_projector(d: int) -> np.ndarray:
    """ω = |Ω⟩⟨Ω|"""
    omega = omega_vec(d)
    return omega @ omega.conj().T


def shift_matrix(d: int) -> np.ndarray:
    """X e_j = e_(j+1 mod d)"""
    _check_dimension(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_matrix(d: int) -> np.ndarray:
    """Z e_j = exp(2πij/d) e_j"""
    _check_dimension(d)
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def weyl_basis(d: int) -> List[np.ndarray]:
    """
    The d² unitaries X^a Z^b, ordered by n = a*d + b so the identity comes first

    They satisfy tr(U_n† U_m) = d δ_nm. At d=2 this is {1, σ3, σ1, σ1σ3}.
    """
    x, z = shift_matrix(d), clock_matrix(d)
    return [
        np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
        for a in range(d)
        for b in range(d)
    ]


def weyl_labels(d: int) -> List[str]:
    """Registry labels U1..U{d²}, matching the order of weyl_basis"""
    return [f"U{n}" for n in range(1, d * d + 1)]


def weyl_unitary(d: int, n: int) -> np.ndarray:
    """U_n for a 1-based channel index n in 1..d²"""
    if not 1 <= n <= d * d:
        raise ParameterRangeError(f"Channel index {n} outside 1..{d * d} for d={d}")
    a, b = divmod(n - 1, d)
    return np.linalg.matrix_power(shift_matrix(d), a) @ np.linalg.matrix_power(clock_matrix(d), b)


def omega_n(d: int, n: int) -> np.ndarray:
    """|Ω_n⟩ = (U_n ⊗ 1)|Ω⟩"""
    return np.kron(weyl_unitary(d, n), np.eye(d)) @ omega_vec(d)


def pauli() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """σ1, σ2, σ3"""
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return s1, s2, s3


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Unitary from the QR decomposition of a seeded complex Gaussian matrix, phases fixed"""
    _check_dimension(d)
    rng = np.random.default_rng([seed, _UNITARY_STREAM])
    gaussian = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(gaussian)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def _unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_state(d: int, seed: int) -> np.ndarray:
    """A normalized d-vector"""
    _check_dimension(d)
    return _unit_vector(np.random.default_rng([seed, _STATE_STREAM]), d)


def random_density(d: int, seed: int) -> np.ndarray:
    """ρ = |φ1⟩⟨φ2| for two seeded unit vectors; rank one but not hermitian in general"""
    _check_dimension(d)
    rng = np.random.default_rng([seed, _DENSITY_STREAM])
    phi1, phi2 = _unit_vector(rng, d), _unit_vector(rng, d)
    return np.outer(phi1, phi2.conj())


def random_rank1_observable(d: int, seed: int) -> np.ndarray:
    """O = |ψ1⟩⟨ψ2|, drawn from a stream independent of random_density"""
    _check_dimension(d)
    rng = np.random.default_rng([seed, _OBSERVABLE_STREAM])
    psi1, psi2 = _unit_vector(rng, d), _unit_vector(rng, d)
    return np.outer(psi1, psi2.conj())


def random_matrix(d: int, seed: int, stream: int = 0) -> np.ndarray:
    """An arbitrary complex d×d matrix"""
    _check_dimension(d)
    rng = np.random.default_rng([seed, _MATRIX_STREAM, stream])
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def kron_all(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of the factors, left to right"""
    if not factors:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, factors)


def transfer_matrix(d: int) -> np.ndarray:
    """
    d·(⟨Ω|_CA ⊗ 1_B)(1_C ⊗ |Ω⟩_AB): the map that hands a state on C over to B

    Computed from the entangled vectors rather than written down, so it serves
    as an independent oracle for the straightened snake.
    """
    identity = np.eye(d, dtype=complex)
    cap = np.kron(omega_vec(d).conj().T, identity)
    cup = np.kron(identity, omega_vec(d))
    return d * (cap @ cup)


def partial_trace(matrix: np.ndarray, d: int, traced: Sequence[int]) -> np.ndarray:
    """
    Trace out tensor factors of a square operator on (C^d)^⊗k

    Args:
        matrix: d^k × d^k operator
        d: Local dimension
        traced: Factor positions (0-based, left to right) to trace over

    Returns:
        Operator on the remaining factors, in their original order
    """
    k = int(round(np.log(matrix.shape[0]) / np.log(d))) if matrix.shape[0] > 1 else 0
    if matrix.shape != (d ** k, d ** k):
        raise ParameterRangeError(f"Matrix of shape {matrix.shape} is not an operator on (C^{d})^⊗k")
    if len(set(traced)) != len(traced) or any(not 0 <= t < k for t in traced):
        raise ParameterRangeError(f"Invalid factors to trace {list(traced)} for {k} factors")
    tensor = matrix.reshape((d,) * (2 * k))
    out_axes = list(range(k))
    in_axes = list(range(k, 2 * k))
    for t in traced:
        in_axes[t] = out_axes[t]
    kept = [i for i in range(k) if i not in traced]
    result_axes = [out_axes[i] for i in kept] + [in_axes[i] for i in kept]
    reduced = np.einsum(tensor, out_axes + in_axes, result_axes)
    m = d ** len(kept)
    return reduced.reshape(m, m)


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Max-abs residual between two arrays of equal shape"""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"Cannot compare arrays of shape {a.shape} and {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))
