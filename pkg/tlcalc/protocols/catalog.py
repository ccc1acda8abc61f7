"""
Identity catalog

Every identity the engine can check, by id. The local identities (sliding,
traces, transfer, fusion, partial traces, circles, snakes) live here; the
protocol-level checks come from verifiers. ``verify_all`` fans the catalog out
over dimensions and seeds.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..diagram.diagram import (
    DiagramSum,
    bra_cap,
    compose,
    decorate_at,
    identity,
    ket,
    ket_cup,
    permutation,
    projector,
    tensor_all,
)
from ..diagram.elements import DecorationRef, Flavor, bottom, top
from ..diagram.registry import OperatorRegistry, standard_registry
from ..errors import ParameterRangeError, UnknownIdentityError
from ..models import IdentityReport
from ..numeric.linalg import (
    max_abs_diff,
    omega_n,
    omega_vec,
    partial_trace,
    random_density,
    random_matrix,
    random_rank1_observable,
    random_state,
    transfer_matrix,
    weyl_basis,
)
from ..rewrite.normalizer import normalize
from ..rewrite.rules import partial_close, slide
from . import verifiers
from .circuits import channel_projector, snake_left, snake_right
from .verifiers import closed_value, matrix_of, report

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CatalogEntry:
    """One checkable identity"""
    identity_id: str
    description: str
    check: Callable[[int, Optional[int]], IdentityReport]
    seeded: bool = True
    dimensions: Optional[Tuple[int, ...]] = None

    def supports(self, d: int) -> bool:
        return self.dimensions is None or d in self.dimensions


def _operators(d: int, seed: int) -> OperatorRegistry:
    registry = standard_registry(d)
    registry = registry.with_matrix("M", random_matrix(d, seed, 0))
    registry = registry.with_matrix("N", random_matrix(d, seed, 1))
    registry = registry.with_matrix("rho", random_density(d, seed))
    registry = registry.with_matrix("O", random_rank1_observable(d, seed))
    return registry.with_vector("psi", random_state(d, seed))


def check_op_slide(d: int, seed: Optional[int]) -> IdentityReport:
    """(M ⊗ 1)|Ω⟩ = (1 ⊗ M^T)|Ω⟩, by sliding M round the cup"""
    registry = _operators(d, seed)
    m = registry.matrix("M")
    left = decorate_at(ket_cup(), bottom(0), "M")
    right = decorate_at(ket_cup(), bottom(1), "M", Flavor.TRANSPOSE)
    slid = slide(left, DecorationRef(0, 0))
    leg, _, flavor = slid.strands[0].leg_view()[0]
    moved = 0.0 if (leg, flavor) == ("end", Flavor.TRANSPOSE) else 1.0

    direct = np.kron(m, np.eye(d)) @ omega_vec(d)
    residual = max(
        max_abs_diff(matrix_of(left, d, registry), direct),
        max_abs_diff(matrix_of(right, d, registry), np.kron(np.eye(d), m.T) @ omega_vec(d)),
        max_abs_diff(matrix_of(slid, d, registry), direct),
        moved,
    )
    return report("op_slide", d, seed, residual, structural_match=slid == right)


def check_trace_pair(d: int, seed: Optional[int]) -> IdentityReport:
    """tr(MN) = d⟨Ω|(M ⊗ 1)(N ⊗ 1)|Ω⟩"""
    registry = _operators(d, seed)
    m, n = registry.matrix("M"), registry.matrix("N")
    cup = decorate_at(decorate_at(ket_cup(), bottom(0), "N"), bottom(0), "M")
    circle = compose(cup, bra_cap()).scaled(d)
    by_evaluation = matrix_of(circle, d, registry)[0, 0]
    by_rewriting = normalize(circle, registry, d)[0].scalar
    expected = complex(np.trace(m @ n))
    residual = max(abs(by_evaluation - expected), abs(by_rewriting - expected))
    return report("trace_pair", d, seed, residual)


def check_transfer(d: int, seed: Optional[int]) -> IdentityReport:
    """d(⟨Ω|_CA ⊗ 1_B)(1_C ⊗ |Ω⟩_AB) hands |ψ⟩ from C to B unchanged"""
    registry = _operators(d, seed)
    transfer = snake_right().scaled(d)
    matrix = matrix_of(transfer, d, registry)
    sent = matrix_of(compose(ket("psi"), transfer), d, registry).reshape(-1)
    residual = max(
        max_abs_diff(matrix, transfer_matrix(d)),
        max_abs_diff(matrix, np.eye(d)),
        max_abs_diff(sent, registry.vector("psi")),
    )
    return report("transfer", d, seed, residual)


def check_weyl_orthogonality(d: int, seed: Optional[int]) -> IdentityReport:
    """tr(U_n† U_m) = d δ_nm, each trace taken by closing a decorated wire"""
    registry = standard_registry(d)
    basis = weyl_basis(d)
    residual = 0.0
    for n in range(1, d * d + 1):
        for m in range(1, d * d + 1):
            wire = decorate_at(decorate_at(identity(1), top(0), f"U{m}"), top(0), f"U{n}", Flavor.ADJOINT)
            expected = d if n == m else 0
            direct = complex(np.trace(basis[n - 1].conj().T @ basis[m - 1]))
            residual = max(residual, abs(closed_value(wire, registry, d) - expected), abs(direct - expected))
    return report("weyl_orthogonality", d, None, residual, basis_size=d * d)


def check_completeness(d: int, seed: Optional[int]) -> IdentityReport:
    """Σ_n |Ω_n⟩⟨Ω_n| is the identity on the d²-dimensional composite space"""
    registry = standard_registry(d)
    total = DiagramSum.of([(1, channel_projector(n)) for n in range(1, d * d + 1)])
    direct = sum(omega_n(d, n) @ omega_n(d, n).conj().T for n in range(1, d * d + 1))
    residual = max(max_abs_diff(matrix_of(total, d, registry), np.eye(d * d)),
                   max_abs_diff(direct, np.eye(d * d)))
    return report("completeness", d, None, residual, terms=d * d)


def _normal_form_residual(diagram, expected, registry: OperatorRegistry, d: int) -> float:
    """Evaluation gap, or 1.0 when the normal forms differ as pictures"""
    got, _ = normalize(diagram, registry, d)
    want, _ = normalize(expected, registry, d)
    if got.strands != want.strands or got.loops != want.loops:
        return 1.0
    return max(abs(got.scalar - want.scalar),
               max_abs_diff(matrix_of(diagram, d, registry), matrix_of(expected, d, registry)))


def check_cup_fusion(d: int, seed: Optional[int]) -> IdentityReport:
    """A cap joining two cups leaves (1/d) times a cup on the outer wires"""
    registry = standard_registry(d)
    fused = compose(tensor_all([ket_cup(), ket_cup()]), tensor_all([identity(1), bra_cap(), identity(1)]))
    residual = _normal_form_residual(fused, ket_cup().scaled(1, d_power=-1), registry, d)
    return report("cup_fusion", d, None, residual)


def check_cap_fusion(d: int, seed: Optional[int]) -> IdentityReport:
    """Two caps on either side of a cup leave (1/d) times a cap"""
    registry = standard_registry(d)
    fused = compose(tensor_all([identity(1), ket_cup(), identity(1)]), tensor_all([bra_cap(), bra_cap()]))
    residual = _normal_form_residual(fused, bra_cap().scaled(1, d_power=-1), registry, d)
    return report("cap_fusion", d, None, residual)


def check_ptrace_projector(d: int, seed: Optional[int]) -> IdentityReport:
    """Tracing one wire of ω leaves a straight line (1/d)·1; decorated ω matches the numeric partial trace"""
    registry = _operators(d, seed)
    straight = partial_close(projector(), [(1, 1)])
    residual = _normal_form_residual(straight, identity(1).scaled(1, d_power=-1), registry, d)
    decorated = decorate_at(projector(), bottom(0), "M")
    reduced = matrix_of(partial_close(decorated, [(1, 1)]), d, registry)
    oracle = partial_trace(matrix_of(decorated, d, registry), d, [1])
    residual = max(residual, max_abs_diff(reduced, oracle), max_abs_diff(matrix_of(straight, d, registry), np.eye(d) / d))
    return report("ptrace_projector", d, seed, residual)


def check_ptrace_transfer(d: int, seed: Optional[int]) -> IdentityReport:
    """Joining the left input of ω to its right output leaves an oblique line (1/d)·T"""
    registry = _operators(d, seed)
    oblique = partial_close(projector(), [(0, 1)])
    residual = _normal_form_residual(oblique, identity(1).scaled(1, d_power=-1), registry, d)
    residual = max(residual, max_abs_diff(matrix_of(oblique, d, registry), transfer_matrix(d) / d))

    decorated = decorate_at(projector(), bottom(0), "M")
    tensor = matrix_of(decorated, d, registry).reshape(d, d, d, d)
    # axes are (bottom 0, bottom 1, top 0, top 1); trace bottom 1 against top 0
    oracle = np.einsum("abbc->ac", tensor)
    residual = max(residual, max_abs_diff(matrix_of(partial_close(decorated, [(0, 1)]), d, registry), oracle))
    return report("ptrace_transfer", d, seed, residual)


def check_circle_two_ways(d: int, seed: Optional[int]) -> IdentityReport:
    """A ρ-cup under an O^T-cap closes to the same circle as the closure of ω decorated the same way"""
    registry = _operators(d, seed)
    rho, observable = registry.matrix("rho"), registry.matrix("O")
    cup = decorate_at(ket_cup(), bottom(0), "rho")
    cap = decorate_at(bra_cap(), top(0), "O", Flavor.TRANSPOSE)
    top_cup = compose(cup, cap)
    omega = decorate_at(decorate_at(projector(), top(0), "O", Flavor.TRANSPOSE), bottom(0), "rho")
    first = normalize(top_cup, registry, d)[0].scalar
    second = normalize(omega, registry, d, closure="full")[0].scalar
    direct = (omega_vec(d).conj().T @ np.kron(observable.T @ rho, np.eye(d)) @ omega_vec(d))[0, 0]
    residual = max(abs(first - second), abs(first - direct), abs(second - complex(np.trace(rho @ observable.T)) / d))
    return report("circle_two_ways", d, seed, residual)


def check_circle_oblique(d: int, seed: Optional[int]) -> IdentityReport:
    """Two crossing oblique lines carrying ρ and O close to tr(ρO) = d⟨Ω|(ρ ⊗ 1)(1 ⊗ O^T)|Ω⟩"""
    registry = _operators(d, seed)
    rho, observable = registry.matrix("rho"), registry.matrix("O")
    crossed = decorate_at(decorate_at(permutation([1, 0]), top(0), "rho"), top(1), "O")
    oblique = normalize(crossed, registry, d, closure="full")[0].scalar
    cup = decorate_at(decorate_at(ket_cup(), bottom(0), "rho"), bottom(1), "O", Flavor.TRANSPOSE)
    cup_cap = matrix_of(compose(cup, bra_cap()).scaled(d), d, registry)[0, 0]
    expected = complex(np.trace(rho @ observable))
    residual = max(abs(oblique - expected), abs(cup_cap - expected))
    return report("circle_oblique", d, seed, residual)


def _check_snake(identity_id: str, snake) -> Callable[[int, Optional[int]], IdentityReport]:
    def check(d: int, seed: Optional[int]) -> IdentityReport:
        registry = standard_registry(d)
        residual = max(
            max_abs_diff(matrix_of(snake, d, registry), np.eye(d) / d),
            _normal_form_residual(snake, identity(1).scaled(1, d_power=-1), registry, d),
        )
        return report(identity_id, d, None, residual)
    return check


def _check_tl_relations(d: int, seed: Optional[int]) -> IdentityReport:
    reports = [r for n in range(2, 7) for r in verifiers.check_tl_relations(n, d)]
    worst = max(reports, key=lambda r: r.residual)
    return report("tl_relations", d, None, worst.residual, exact=True, checks=len(reports),
                  worst_relation=worst.parameters["relation"], worst_n=worst.parameters["n_strands"])


def _check_extended_tl(d: int, seed: Optional[int]) -> IdentityReport:
    channel = 1 + seed % (d * d)
    sizes = [3] if d ** 8 > verifiers.NUMERIC_TL_LIMIT else [3, 4]
    reports = [r for n in sizes for r in verifiers.check_tl_relations(n, d, channel)]
    worst = max(reports, key=lambda r: r.residual)
    return report("extended_tl", d, seed, worst.residual, exact=True, channel=channel, checks=len(reports),
                  worst_relation=worst.parameters["relation"])


CATALOG: Dict[str, CatalogEntry] = {
    entry.identity_id: entry
    for entry in [
        CatalogEntry("op_slide", "An operator slides round a cup, turning into its transpose", check_op_slide),
        CatalogEntry("trace_pair", "tr(MN) as a decorated circle", check_trace_pair),
        CatalogEntry("transfer", "A zig-zag hands a state from one system to another", check_transfer),
        CatalogEntry("weyl_orthogonality", "tr(U_n† U_m) = d δ_nm", check_weyl_orthogonality, seeded=False),
        CatalogEntry("completeness", "Σ_n ω_n = 1 on the composite space", check_completeness, seeded=False),
        CatalogEntry("cup_fusion", "Cap between two cups gives (1/d) cup", check_cup_fusion, seeded=False),
        CatalogEntry("cap_fusion", "Cup between two caps gives (1/d) cap", check_cap_fusion, seeded=False),
        CatalogEntry("ptrace_projector", "Partial trace of ω is a straight line", check_ptrace_projector),
        CatalogEntry("ptrace_transfer", "Partial trace across ω is an oblique transfer line", check_ptrace_transfer),
        CatalogEntry("circle_two_ways", "Top cup with bottom cap forms the same circle", check_circle_two_ways),
        CatalogEntry("circle_oblique", "Two oblique lines close to tr(ρO)", check_circle_oblique),
        CatalogEntry("snake_left", "Left zig-zag is (1/d)·1", _check_snake("snake_left", snake_left()), seeded=False),
        CatalogEntry("snake_right", "Right zig-zag is (1/d)·1", _check_snake("snake_right", snake_right()), seeded=False),
        CatalogEntry("tl_relations", "Temperley-Lieb relations on 2..6 strands", _check_tl_relations, seeded=False),
        CatalogEntry("extended_tl", "TL relations for generators dressed by a channel", _check_extended_tl),
        CatalogEntry("teleport", "Teleportation equation for every channel",
                     lambda d, seed: verifiers.teleport_all_verify(d, seed)),
        CatalogEntry("teleport_outcomes", "Outcome probabilities 1/d² and unit fidelity",
                     lambda d, seed: verifiers.teleport_outcomes_verify(d, seed)),
        CatalogEntry("swap", "Entanglement swapping", lambda d, seed: verifiers.swap_triples_verify(d, seed)),
        CatalogEntry("tight_teleport", "Characteristic equation of tight teleportation",
                     lambda d, seed: verifiers.tight_teleport_verify(d, seed)),
        CatalogEntry("tight_densecode", "Dense coding decodes every message",
                     lambda d, seed: verifiers.tight_densecode_verify(d), seeded=False),
        CatalogEntry("tight_swap", "Characteristic equation of tight swapping",
                     lambda d, seed: verifiers.tight_swap_verify(d, seed)),
        CatalogEntry("cnot", "CNOT as a sum of Pauli products", lambda d, seed: verifiers.cnot_verify(),
                     seeded=False, dimensions=(2,)),
        CatalogEntry("swap_gate", "Wire swap as (1/d) Σ U_n ⊗ U_n†",
                     lambda d, seed: verifiers.swap_gate_verify(d), seeded=False),
    ]
}


def list_identities() -> List[str]:
    return sorted(CATALOG)


def get_entry(identity_id: str) -> CatalogEntry:
    try:
        return CATALOG[identity_id]
    except KeyError:
        raise UnknownIdentityError(
            f"Unknown identity {identity_id!r}; known: {', '.join(list_identities())}"
        ) from None


def verify_identity(identity_id: str, d: int, seed: Optional[int] = None) -> IdentityReport:
    """
    Check one catalog identity

    Args:
        identity_id: Catalog key
        d: Local dimension, at least 2
        seed: Seed for the random operators; seeded identities default to 0,
            unseeded ones ignore it

    Returns:
        IdentityReport

    Raises:
        UnknownIdentityError: identity_id is not in the catalog
        ParameterRangeError: the identity is not defined at this dimension
    """
    entry = get_entry(identity_id)
    if d < 2:
        raise ParameterRangeError(f"Identities are checked for d >= 2, got {d}")
    if not entry.supports(d):
        raise ParameterRangeError(f"{identity_id} is only defined for d in {entry.dimensions}")
    if entry.seeded and seed is None:
        seed = 0
    logger.debug(f"Verifying {identity_id} at d={d}, seed={seed}")
    return entry.check(d, seed if entry.seeded else None)


def verify_all(dimensions: Optional[Sequence[int]] = None, seeds: Optional[Sequence[int]] = None,
               identity_ids: Optional[Sequence[str]] = None,
               workers: Optional[int] = None) -> List[IdentityReport]:
    """
    Run the catalog over dimensions and seeds

    Unseeded identities run once per dimension. Identities not defined at a
    dimension are skipped with a warning. Reports come back sorted by
    (identity_id, d, seed) whatever order the workers finish in.
    """
    settings = get_settings()
    dimensions = list(dimensions or settings.dimensions)
    seeds = list(seeds if seeds is not None else range(settings.seeds_per_identity))
    entries = [get_entry(i) for i in identity_ids] if identity_ids else [CATALOG[i] for i in list_identities()]

    jobs = []
    for entry in entries:
        for d in dimensions:
            if not entry.supports(d):
                logger.warning(f"Skipping {entry.identity_id} at d={d}; defined only for d in {entry.dimensions}")
                continue
            for seed in (seeds if entry.seeded else [None]):
                jobs.append((entry.identity_id, d, seed))

    logger.info(f"Verifying {len(jobs)} identity instances with {workers or settings.workers} workers")
    with ThreadPoolExecutor(max_workers=workers or settings.workers) as pool:
        reports = list(pool.map(lambda job: verify_identity(*job), jobs))
    return sorted(reports, key=lambda r: r.sort_key)
