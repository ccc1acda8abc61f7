"""
Protocol verifiers

Each verifier builds both sides of a protocol equation as diagrams, lowers
them, and also recomputes them directly from Kronecker products. The reported
residual is the worst of the diagram-vs-expected and oracle-vs-expected
differences; the diagram-vs-oracle gap is listed as ``oracle_residual``.
"""

import logging
from typing import List, Optional

import numpy as np

from ..config import get_settings
from ..diagram.diagram import Diagram, DiagramLike, compose, dagger, identity, is_tl_planar, ket, tensor
from ..diagram.registry import OperatorRegistry, standard_registry
from ..errors import ParameterRangeError, ProblemTooLargeError
from ..models import IdentityReport
from ..numeric.evaluator import evaluate
from ..numeric.linalg import (
    kron_all,
    max_abs_diff,
    omega_n,
    omega_projector,
    omega_vec,
    random_density,
    random_rank1_observable,
    random_state,
    weyl_unitary,
)
from ..rewrite.normalizer import normalize
from .circuits import (
    bob_state,
    channel_projector,
    check_channel,
    cnot_diagram,
    crossing,
    entangled_bra,
    entangled_ket,
    swap_gate_sum,
    swap_lhs,
    swap_rhs,
    teleport_lhs,
    teleport_rhs,
    tight_swap_term,
    tight_teleport_term,
    tl_generator,
)

logger = logging.getLogger(__name__)

# Largest matrix (in entries) the TL relations are checked on numerically;
# bigger instances are compared on their normal forms
NUMERIC_TL_LIMIT = 4 ** 9


def tolerance(exact: bool = False) -> float:
    settings = get_settings()
    return min(settings.exact_tolerance, settings.tolerance) if exact else settings.tolerance


def report(identity_id: str, d: int, seed: Optional[int], residual: float,
           exact: bool = False, **parameters) -> IdentityReport:
    result = IdentityReport.from_residual(identity_id, d, seed, residual, tolerance(exact), parameters)
    logger.debug(f"{identity_id} d={d} seed={seed}: residual {result.residual:.3e} passed={result.passed}")
    return result


def matrix_of(diagram: DiagramLike, d: int, registry: OperatorRegistry) -> np.ndarray:
    return evaluate(diagram, d, registry).matrix


def closed_value(diagram: Diagram, registry: OperatorRegistry, d: int) -> complex:
    """Trace of a square diagram, by closing it and normalizing to a bare scalar"""
    final, _ = normalize(diagram, registry, d, closure="full")
    return final.scalar


def structural_residual(lhs: Diagram, rhs: Diagram, registry: OperatorRegistry, d: int) -> float:
    """Scalar gap between two normal forms, or 1.0 when their pictures differ"""
    a, _ = normalize(lhs, registry, d)
    b, _ = normalize(rhs, registry, d)
    if (a.upper_arity, a.lower_arity, a.strands, a.loops) != (b.upper_arity, b.lower_arity, b.strands, b.loops):
        return 1.0
    return abs(a.scalar - b.scalar)


def check_tl_relations(n_strands: int, d: int, channel: Optional[int] = None) -> List[IdentityReport]:
    """
    Check the Temperley-Lieb relations for E_1..E_{n-1}

    Idempotence E_i² = E_i, hermiticity E_i† = E_i, E_i E_{i±1} E_i = E_i/d²
    and E_i E_j = E_j E_i for |i-j| > 1. Each relation family yields one report
    carrying the worst residual over its instances.

    Args:
        n_strands: Number of strands, at least 2
        d: Local dimension
        channel: Use the dressed generators (U_k ⊗ 1) ω (U_k† ⊗ 1)

    Returns:
        Reports for every relation family that has instances at this n
    """
    if n_strands < 2:
        raise ParameterRangeError(f"TL relations need at least 2 strands, got {n_strands}")
    if channel is not None:
        check_channel(d, channel)
    identity_id = "tl_relations" if channel is None else "extended_tl"
    registry = standard_registry(d)
    numeric = d ** (2 * n_strands) <= NUMERIC_TL_LIMIT
    if not numeric and channel is not None:
        raise ProblemTooLargeError(f"Dressed TL relations on {n_strands} strands at d={d} exceed the numeric limit")
    generators = {i: tl_generator(n_strands, i, channel) for i in range(1, n_strands)}
    cache = {}

    def value(diagram: Diagram) -> np.ndarray:
        key = diagram.digest()
        if key not in cache:
            cache[key] = matrix_of(diagram, d, registry)
        return cache[key]

    def gap(lhs: Diagram, rhs: Diagram) -> float:
        if numeric:
            return max_abs_diff(value(lhs), value(rhs))
        return structural_residual(lhs, rhs, registry, d)

    families = {"idempotence": [], "hermiticity": [], "braid": [], "commutation": []}
    for i, e_i in generators.items():
        families["idempotence"].append(gap(compose(e_i, e_i), e_i))
        families["hermiticity"].append(gap(dagger(e_i), e_i))
        if numeric:
            families["hermiticity"].append(max_abs_diff(value(e_i).conj().T, value(e_i)))
        for j in (i - 1, i + 1):
            if j in generators:
                e_j = generators[j]
                families["braid"].append(gap(compose(compose(e_i, e_j), e_i), e_i.scaled(1, d_power=-2)))
        for j in range(i + 2, n_strands):
            e_j = generators[j]
            families["commutation"].append(gap(compose(e_i, e_j), compose(e_j, e_i)))

    reports = []
    for relation, residuals in families.items():
        if not residuals:
            continue
        reports.append(report(
            identity_id, d, None, max(residuals), exact=True,
            relation=relation, n_strands=n_strands, instances=len(residuals),
            method="numeric" if numeric else "structural", channel=channel,
        ))
    return reports


def _psi_registry(d: int, psi_seed: int) -> OperatorRegistry:
    return standard_registry(d).with_vector("psi", random_state(d, psi_seed))


def teleport_verify(d: int, n: int, psi_seed: int) -> IdentityReport:
    """
    (ω_n ⊗ 1)(|ψ⟩ ⊗ ω) = (1/d)(|Ω_n⟩ ⊗ U_n†|ψ⟩)⟨Ω| as maps from AB to CAB

    Raises:
        ParameterRangeError: n outside 1..d²
    """
    check_channel(d, n)
    registry = _psi_registry(d, psi_seed)
    lhs = matrix_of(teleport_lhs(n), d, registry)
    rhs = matrix_of(teleport_rhs(n), d, registry)

    psi = registry.vector("psi").reshape(d, 1)
    omega_n_vec = omega_n(d, n)
    direct_lhs = np.kron(omega_n_vec @ omega_n_vec.conj().T, np.eye(d)) @ np.kron(psi, omega_projector(d))
    received = weyl_unitary(d, n).conj().T @ psi
    direct_rhs = np.kron(omega_n_vec, received) @ omega_vec(d).conj().T / d

    oracle = max(max_abs_diff(lhs, direct_lhs), max_abs_diff(rhs, direct_rhs))
    residual = max(max_abs_diff(lhs, rhs), max_abs_diff(direct_lhs, direct_rhs), oracle)
    return report("teleport", d, psi_seed, residual, n=n, oracle_residual=oracle)


def teleport_all_verify(d: int, psi_seed: int) -> IdentityReport:
    """teleport_verify over every channel n = 1..d², worst residual"""
    reports = [teleport_verify(d, n, psi_seed) for n in range(1, d * d + 1)]
    worst = max(reports, key=lambda r: r.residual)
    return report("teleport", d, psi_seed, worst.residual, channels=d * d, worst_n=worst.parameters["n"],
                  oracle_residual=max(r.parameters["oracle_residual"] for r in reports))


def teleport_outcomes_verify(d: int, seed: int) -> IdentityReport:
    """
    Outcome statistics of teleportation

    Every outcome n has probability 1/d², Bob's state corrected by U_n has
    fidelity 1 with |ψ⟩, so Σ_n p_n F_n = 1.
    """
    registry = _psi_registry(d, seed)
    psi = registry.vector("psi")
    residual = 0.0
    weighted = 0.0
    for n in range(1, d * d + 1):
        state = matrix_of(bob_state(n), d, registry).reshape(-1)
        probability = float(np.vdot(state, state).real)
        corrected = matrix_of(bob_state(n, corrected=True), d, registry).reshape(-1)
        fidelity = float(abs(np.vdot(psi, corrected)) ** 2 / np.vdot(corrected, corrected).real)
        residual = max(residual, abs(probability - 1 / d ** 2), abs(fidelity - 1))
        weighted += probability * fidelity
    residual = max(residual, abs(weighted - 1))
    return report("teleport_outcomes", d, seed, residual, outcomes=d * d, weighted_fidelity=weighted)


def swap_verify(d: int, l: int, n: int, m: int) -> IdentityReport:
    """
    (1 ⊗ ω_n ⊗ 1)(|Ω_l⟩ ⊗ |Ω_m⟩) = (1/d)|Ω_n⟩_bc ⊗ |Ω_lnm⟩_ad

    Raises:
        ParameterRangeError: l, n or m outside 1..d²
    """
    for index in (l, n, m):
        check_channel(d, index)
    registry = standard_registry(d)
    lhs = matrix_of(swap_lhs(l, n, m), d, registry)
    rhs = matrix_of(swap_rhs(l, n, m), d, registry)

    identity = np.eye(d)
    direct_lhs = kron_all(identity, omega_n(d, n) @ omega_n(d, n).conj().T, identity) @ np.kron(omega_n(d, l), omega_n(d, m))
    corrected = weyl_unitary(d, l) @ weyl_unitary(d, n).conj() @ weyl_unitary(d, m)
    omega_lnm = (np.kron(corrected, identity) @ omega_vec(d)).reshape(d, d)
    direct_rhs = np.einsum("ad,bc->abcd", omega_lnm, omega_n(d, n).reshape(d, d)).reshape(-1, 1) / d

    oracle = max(max_abs_diff(lhs, direct_lhs), max_abs_diff(rhs, direct_rhs))
    residual = max(max_abs_diff(lhs, rhs), max_abs_diff(direct_lhs, direct_rhs), oracle)
    return report("swap", d, None, residual, l=l, n=n, m=m, oracle_residual=oracle)


def swap_triples_verify(d: int, seed: int, samples: int = 20) -> IdentityReport:
    """Every (l, n, m) at d=2, otherwise ``samples`` triples drawn from the seed"""
    if d <= 2:
        triples = [(l, n, m) for l in range(1, d * d + 1) for n in range(1, d * d + 1) for m in range(1, d * d + 1)]
    else:
        rng = np.random.default_rng(seed)
        triples = [tuple(int(x) for x in rng.integers(1, d * d + 1, size=3)) for _ in range(samples)]
    reports = [swap_verify(d, *triple) for triple in triples]
    worst = max(reports, key=lambda r: r.residual)
    return report("swap", d, seed, worst.residual, triples=len(triples),
                  worst=[worst.parameters[k] for k in ("l", "n", "m")],
                  oracle_residual=max(r.parameters["oracle_residual"] for r in reports))


def _rho_o_registry(d: int, seed: int) -> OperatorRegistry:
    registry = standard_registry(d)
    registry = registry.with_matrix("rho", random_density(d, seed))
    return registry.with_matrix("O", random_rank1_observable(d, seed))


def _corrected_observable(observable: np.ndarray, d: int, n: int) -> np.ndarray:
    """T_n(O) = U_n† O U_n"""
    unitary = weyl_unitary(d, n)
    return unitary.conj().T @ observable @ unitary


def tight_teleport_verify(d: int, seed: int) -> IdentityReport:
    """Σ_n tr((ρ ⊗ ω)(ω_n ⊗ T_n(O))) = tr(ρO)"""
    registry = _rho_o_registry(d, seed)
    rho, observable = registry.matrix("rho"), registry.matrix("O")
    expected = complex(np.trace(rho @ observable))

    by_diagram = sum(closed_value(tight_teleport_term(n), registry, d) for n in range(1, d * d + 1))
    prepared = np.kron(rho, omega_projector(d))
    direct = sum(
        complex(np.trace(prepared @ np.kron(omega_n(d, n) @ omega_n(d, n).conj().T,
                                           _corrected_observable(observable, d, n))))
        for n in range(1, d * d + 1)
    )
    oracle = abs(by_diagram - direct)
    residual = max(abs(by_diagram - expected), abs(direct - expected), oracle)
    return report("tight_teleport", d, seed, residual, oracle_residual=oracle,
                  expected=[expected.real, expected.imag])


def _densecode_row(d: int, n: int, registry: OperatorRegistry):
    """Row n of P by closing |Ω_m⟩ ω_n ⟨Ω_m| diagrams, and the same row from the vectors"""
    size = d * d
    by_diagram = np.zeros(size, dtype=complex)
    direct = np.zeros(size, dtype=complex)
    for m in range(1, size + 1):
        circuit = compose(compose(entangled_ket(m), channel_projector(n)), entangled_bra(m))
        by_diagram[m - 1] = matrix_of(circuit, d, registry)[0, 0]
        direct[m - 1] = abs(np.vdot(omega_n(d, m), omega_n(d, n))) ** 2
    return by_diagram, direct


def densecode_message_verify(d: int, n: int) -> IdentityReport:
    """Message n is decoded as n with certainty and never as anything else"""
    check_channel(d, n)
    by_diagram, direct = _densecode_row(d, n, standard_registry(d))
    expected = np.eye(d * d)[n - 1]
    oracle = max_abs_diff(by_diagram, direct)
    residual = max(max_abs_diff(by_diagram, expected), max_abs_diff(direct, expected), oracle)
    return report("tight_densecode", d, None, residual, n=n, oracle_residual=oracle)


def tight_densecode_verify(d: int) -> IdentityReport:
    """P[n, m] = ⟨Ω_m| ω_n |Ω_m⟩ is the d²×d² identity"""
    registry = standard_registry(d)
    size = d * d
    rows = [_densecode_row(d, n, registry) for n in range(1, size + 1)]
    by_diagram = np.array([row for row, _ in rows])
    direct = np.array([row for _, row in rows])
    oracle = max_abs_diff(by_diagram, direct)
    residual = max(max_abs_diff(by_diagram, np.eye(size)), max_abs_diff(direct, np.eye(size)), oracle)
    return report("tight_densecode", d, None, residual, messages=size, oracle_residual=oracle)


def tight_swap_verify(d: int, seed: int) -> IdentityReport:
    """Σ_n tr((ρ ⊗ ω_n ⊗ T_n(O))(ω ⊗ ω)) = (1/d) tr(ρ O^T)"""
    registry = _rho_o_registry(d, seed)
    rho, observable = registry.matrix("rho"), registry.matrix("O")
    expected = complex(np.trace(rho @ observable.T)) / d

    by_diagram = sum(closed_value(tight_swap_term(n), registry, d) for n in range(1, d * d + 1))
    pairs = np.kron(omega_projector(d), omega_projector(d))
    direct = sum(
        complex(np.trace(kron_all(rho, omega_n(d, n) @ omega_n(d, n).conj().T,
                                  _corrected_observable(observable, d, n)) @ pairs))
        for n in range(1, d * d + 1)
    )
    oracle = abs(by_diagram - direct)
    residual = max(abs(by_diagram - expected), abs(direct - expected), oracle)
    return report("tight_swap", d, seed, residual, oracle_residual=oracle,
                  expected=[expected.real, expected.imag])


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def cnot_verify() -> IdentityReport:
    """Truth table, C² = 1 and C†C = 1 for the four-term Pauli sum at d=2"""
    d = 2
    registry = standard_registry(d)
    gate = cnot_diagram()
    residual = max_abs_diff(matrix_of(gate, d, registry), CNOT)
    for control in range(2):
        for target in range(2):
            basis = tensor(ket(f"e{control}"), ket(f"e{target}"))
            output = matrix_of(compose(basis, gate), d, registry)
            expected = np.zeros((4, 1))
            expected[2 * control + (target ^ control), 0] = 1
            residual = max(residual, max_abs_diff(output, expected))
    residual = max(residual, max_abs_diff(matrix_of(compose(gate, gate), d, registry), np.eye(4)))
    residual = max(residual, max_abs_diff(matrix_of(compose(gate, dagger(gate)), d, registry), np.eye(4)))
    return report("cnot", d, None, residual, exact=True, terms=len(gate.terms))


def swap_gate_verify(d: int) -> IdentityReport:
    """(1/d) Σ_n U_n ⊗ U_n† equals the crossing, which is Brauer but not TL"""
    registry = standard_registry(d)
    summed = matrix_of(swap_gate_sum(d), d, registry)
    crossed = matrix_of(crossing(), d, registry)
    direct = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    oracle = max_abs_diff(crossed, direct)
    residual = max(max_abs_diff(summed, crossed), oracle)
    classified = (not is_tl_planar(crossing())) and is_tl_planar(identity(2))
    if not classified:
        residual = max(residual, 1.0)
    return report("swap_gate", d, None, residual, terms=d * d, crossing_is_planar=not classified,
                  oracle_residual=oracle)
