"""
Named circuits built from cups, caps and decorated wires

Channel indices n are 1-based and select U_n from the registry's shift-clock
basis ("U1" is the identity). Wires are numbered left to right in the order a
protocol names its systems.
"""

from typing import Optional

from ..diagram.diagram import (
    Diagram,
    DiagramSum,
    bra_cap,
    compose,
    dagger,
    decorate_at,
    identity,
    ket,
    ket_cup,
    permutation,
    projector,
    tensor_all,
)
from ..diagram.elements import Flavor, Strand, bottom, top
from ..errors import ParameterRangeError


def weyl_label(n: int) -> str:
    return f"U{n}"


def check_channel(d: int, n: int) -> None:
    if not 1 <= n <= d * d:
        raise ParameterRangeError(f"Channel index {n} outside 1..{d * d} for d={d}")


def decorated_wire(*labels: str, flavors: Optional[list] = None) -> Diagram:
    """A single through wire carrying operators in the order they act"""
    wire = identity(1)
    for i, label in enumerate(labels):
        flavor = flavors[i] if flavors else Flavor.PLAIN
        wire = decorate_at(wire, top(0), label, flavor)
    return wire


def entangled_ket(n: int = 1) -> Diagram:
    """|Ω_n⟩ = (U_n ⊗ 1)|Ω⟩"""
    return decorate_at(ket_cup(), bottom(0), weyl_label(n))


def entangled_bra(n: int = 1) -> Diagram:
    """⟨Ω_n| = ⟨Ω|(U_n† ⊗ 1)"""
    return dagger(entangled_ket(n))


def channel_projector(n: int = 1) -> Diagram:
    """ω_n = (U_n ⊗ 1) ω (U_n† ⊗ 1); n = 1 gives the bare projector ω"""
    if n == 1:
        return projector()
    omega = decorate_at(projector(), top(0), weyl_label(n), Flavor.ADJOINT)
    return decorate_at(omega, bottom(0), weyl_label(n))


def tl_generator(n_strands: int, i: int, channel: Optional[int] = None) -> Diagram:
    """
    E_i = Id^(i-1) ⊗ ω ⊗ Id^(n-i-1) on n strands

    Args:
        n_strands: Number of strands
        i: 1-based generator index, 1 <= i <= n_strands - 1
        channel: Dress ω as ω_k = (U_k ⊗ 1) ω (U_k† ⊗ 1)

    Raises:
        ParameterRangeError: i out of range
    """
    if not 1 <= i <= n_strands - 1:
        raise ParameterRangeError(f"Generator index {i} outside 1..{n_strands - 1}")
    middle = projector() if channel is None else channel_projector(channel)
    return tensor_all([identity(i - 1), middle, identity(n_strands - i - 1)])


def crossing() -> Diagram:
    """The swap of two wires, a Brauer diagram outside TL"""
    return permutation([1, 0])


def cnot_diagram() -> DiagramSum:
    """C = ½(1⊗1 + 1⊗σ1 + σ3⊗1 − σ3⊗σ1), control on the left wire; needs d=2 labels"""
    plain = identity(2)
    target_flip = decorate_at(plain, top(1), "s1")
    control_phase = decorate_at(plain, top(0), "s3")
    both = decorate_at(control_phase, top(1), "s1")
    return DiagramSum.of([(0.5, plain), (0.5, target_flip), (0.5, control_phase), (-0.5, both)])


def swap_gate_sum(d: int) -> DiagramSum:
    """The wire swap as (1/d) Σ_n U_n ⊗ U_n†"""
    terms = []
    for n in range(1, d * d + 1):
        term = decorate_at(identity(2), top(0), weyl_label(n))
        term = decorate_at(term, top(1), weyl_label(n), Flavor.ADJOINT)
        terms.append((1 / d, term))
    return DiagramSum.of(terms)


def teleport_lhs(n: int, psi: str = "psi") -> Diagram:
    """(ω_n,CA ⊗ 1_B)(|ψ⟩_C ⊗ ω_AB), a map from AB to CAB"""
    prepare = tensor_all([ket(psi), projector()])
    measure = tensor_all([channel_projector(n), identity(1)])
    return compose(prepare, measure)


def teleport_rhs(n: int, psi: str = "psi") -> Diagram:
    """(1/d)(|Ω_n⟩_CA ⊗ U_n†|ψ⟩_B)⟨Ω|_AB; the 1/d is carried as d^-1"""
    received = decorate_at(ket(psi), bottom(0), weyl_label(n), Flavor.ADJOINT)
    return compose(bra_cap(), tensor_all([entangled_ket(n), received])).scaled(1, d_power=-1)


def bob_state(n: int, psi: str = "psi", corrected: bool = False) -> Diagram:
    """
    Bob's unnormalized state after Alice projects C,A onto |Ω_n⟩

    With ``corrected`` Bob also applies U_n, which turns the result into |ψ⟩/d.
    """
    shared = tensor_all([ket(psi), ket_cup()])
    measured = compose(shared, tensor_all([entangled_bra(n), identity(1)]))
    if corrected:
        return compose(measured, decorated_wire(weyl_label(n)))
    return measured


def swap_lhs(l: int, n: int, m: int) -> Diagram:
    """(1_a ⊗ ω_n,bc ⊗ 1_d)(|Ω_l⟩_ab ⊗ |Ω_m⟩_cd)"""
    pairs = tensor_all([entangled_ket(l), entangled_ket(m)])
    return compose(pairs, tensor_all([identity(1), channel_projector(n), identity(1)]))


def swap_rhs(l: int, n: int, m: int) -> Diagram:
    """(1/d)|Ω_n⟩_bc ⊗ |Ω_lnm⟩_ad with |Ω_lnm⟩ = (U_l U_n* U_m ⊗ 1)|Ω⟩, wires in order a, b, c, d"""
    nested = Diagram(0, 4, (Strand(bottom(0), bottom(3)), Strand(bottom(1), bottom(2))))
    nested = decorate_at(nested, bottom(0), weyl_label(m))
    nested = decorate_at(nested, bottom(0), weyl_label(n), Flavor.CONJUGATE)
    nested = decorate_at(nested, bottom(0), weyl_label(l))
    nested = decorate_at(nested, bottom(1), weyl_label(n))
    return nested.scaled(1, d_power=-1)


def tight_teleport_term(n: int, rho: str = "rho", observable: str = "O") -> Diagram:
    """(ρ_C ⊗ ω_AB)(ω_n,CA ⊗ T_n(O)_B) with T_n(O) = U_n† O U_n, ready to be closed"""
    corrected = decorated_wire(weyl_label(n), observable, weyl_label(n),
                               flavors=[Flavor.PLAIN, Flavor.PLAIN, Flavor.ADJOINT])
    measure = tensor_all([channel_projector(n), corrected])
    prepare = tensor_all([decorated_wire(rho), projector()])
    return compose(measure, prepare)


def tight_swap_term(n: int, rho: str = "rho", observable: str = "O") -> Diagram:
    """(ρ_a ⊗ ω_n,bc ⊗ T_n(O)_d)(ω_ab ⊗ ω_cd), ready to be closed"""
    corrected = decorated_wire(weyl_label(n), observable, weyl_label(n),
                               flavors=[Flavor.PLAIN, Flavor.PLAIN, Flavor.ADJOINT])
    prepare = tensor_all([projector(), projector()])
    measure = tensor_all([decorated_wire(rho), channel_projector(n), corrected])
    return compose(prepare, measure)


def snake_left() -> Diagram:
    """Zig-zag with the cup on the left: (1 ⊗ ⟨Ω|)(|Ω⟩ ⊗ 1)"""
    return compose(tensor_all([ket_cup(), identity(1)]), tensor_all([identity(1), bra_cap()]))


def snake_right() -> Diagram:
    """Mirror image of snake_left: (⟨Ω| ⊗ 1)(1 ⊗ |Ω⟩)"""
    return compose(tensor_all([identity(1), ket_cup()]), tensor_all([bra_cap(), identity(1)]))
