"""Gates, Bell outcomes and projective measurement on temporal registers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .qlinalg import (
    TOL,
    DensityOperator,
    dagger,
    embed_operator,
    is_unitary,
    partial_trace,
)
from .temporal import TemporalLabel, TemporalRegister

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Control is the leftmost qubit: |c t> -> |c, t xor c>.
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rotation_y(theta: float) -> np.ndarray:
    """Single-qubit rotation about the y axis by ``theta`` radians."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


class BellTag(str, Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @classmethod
    def from_string(cls, text: str) -> "BellTag":
        for tag in cls:
            if tag.value == text:
                return tag
        raise ValueError(f"unknown Bell outcome tag {text!r}")


@dataclass(frozen=True, eq=False)
class BellOutcome:
    """One Bell-measurement outcome: state vector, projector, correction.

    The correction is the single-qubit Pauli that turns the uncorrected
    teleportation output for this outcome back into the input state.
    """

    tag: BellTag
    vector: np.ndarray
    correction: np.ndarray
    correction_label: str

    def __post_init__(self) -> None:
        vec = np.asarray(self.vector, dtype=complex).reshape(-1).copy()
        if abs(np.linalg.norm(vec) - 1.0) > TOL.norm:
            raise ValueError("Bell outcome vector is not normalized")
        vec.setflags(write=False)
        corr = np.asarray(self.correction, dtype=complex).copy()
        corr.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "correction", corr)

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


def bell_basis() -> tuple[BellOutcome, BellOutcome, BellOutcome, BellOutcome]:
    """The four Bell outcomes with their teleportation corrections."""
    s = 1.0 / np.sqrt(2.0)
    return (
        BellOutcome(BellTag.PHI_PLUS, s * np.array([1, 0, 0, 1]), PAULI_I, "I"),
        BellOutcome(BellTag.PHI_MINUS, s * np.array([1, 0, 0, -1]), PAULI_Z, "Z"),
        BellOutcome(BellTag.PSI_PLUS, s * np.array([0, 1, 1, 0]), PAULI_X, "X"),
        BellOutcome(BellTag.PSI_MINUS, s * np.array([0, 1, -1, 0]), PAULI_X @ PAULI_Z, "XZ"),
    )


def bell_outcome(tag: BellTag | str) -> BellOutcome:
    tag = BellTag.from_string(tag) if isinstance(tag, str) else tag
    for outcome in bell_basis():
        if outcome.tag is tag:
            return outcome
    raise ValueError(f"unknown Bell tag {tag}")


def perturbed_bell_basis(
    epsilon: float,
) -> tuple[BellOutcome, BellOutcome, BellOutcome, BellOutcome]:
    """Bell basis rotated by ``R_y(epsilon)`` on the first measured qubit.

    The rotation is a local unitary, so the perturbed vectors stay
    orthonormal, complete and maximally entangled.
    """
    if abs(epsilon) >= 0.5:
        raise ValueError("epsilon must satisfy |epsilon| < 0.5")
    u = np.kron(rotation_y(epsilon), PAULI_I)
    return tuple(
        BellOutcome(b.tag, u @ b.vector, b.correction, b.correction_label)
        for b in bell_basis()
    )


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary bound to the register slots it acts on."""

    unitary: np.ndarray
    acts_on: tuple[TemporalLabel, ...]

    def __post_init__(self) -> None:
        u = np.asarray(self.unitary, dtype=complex).copy()
        if not is_unitary(u, TOL.unitarity):
            raise ValueError("gate matrix is not unitary")
        if u.shape[0] != 2 ** len(self.acts_on):
            raise ValueError("gate dimension does not match its label count")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "acts_on", tuple(TemporalLabel(*l) for l in self.acts_on))


def apply_unitary(reg: TemporalRegister, unitary: np.ndarray, on: Sequence[TemporalLabel]) -> TemporalRegister:
    """Apply a unitary to the named slots of a register."""
    if not is_unitary(unitary, TOL.unitarity):
        raise ValueError("operator is not unitary")
    positions = [reg.slot_of(lbl) for lbl in on]
    full = embed_operator(unitary, positions, reg.num_slots)
    rho = reg.density()
    return TemporalRegister(
        reg.labels,
        DensityOperator(full @ rho.matrix @ dagger(full), rho.slot_dims, rho.normalized),
    )


def apply_gate(reg: TemporalRegister, gate: Gate) -> TemporalRegister:
    return apply_unitary(reg, gate.unitary, gate.acts_on)


def cnot(reg: TemporalRegister, control: TemporalLabel, target: TemporalLabel) -> TemporalRegister:
    """CNOT with basis action |c t> -> |c, t xor c> on the named slots."""
    if TemporalLabel(*control) == TemporalLabel(*target):
        raise ValueError("control and target must be distinct labels")
    return apply_unitary(reg, CNOT, [control, target])


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    """One outcome branch: probability and renormalized post-state.

    ``post_state`` covers the unmeasured slots, in register order.  It is
    None when the branch probability is negligible or nothing remains.
    """

    outcome: BellOutcome | int
    probability: float
    post_state: DensityOperator | None


def _resolve_projectors(basis) -> tuple[list[np.ndarray], list[BellOutcome | int]]:
    projectors: list[np.ndarray] = []
    tags: list[BellOutcome | int] = []
    for idx, entry in enumerate(basis):
        if isinstance(entry, BellOutcome):
            projectors.append(entry.projector)
            tags.append(entry)
        else:
            projectors.append(np.asarray(entry, dtype=complex))
            tags.append(idx)
    return projectors, tags


def projective_measure(
    reg: TemporalRegister, basis, on: Sequence[TemporalLabel]
) -> list[MeasurementResult]:
    """Measure the named slots in a complete orthogonal projector basis.

    Args:
        reg: register holding the pre-measurement state.
        basis: projector matrices or ``BellOutcome`` values.
        on: measured slot labels; the first label is the first qubit of
            each projector.

    Returns:
        One ``MeasurementResult`` per basis element, in basis order.
    """
    positions = [reg.slot_of(lbl) for lbl in on]
    measured_dim = 2 ** len(positions)
    projectors, tags = _resolve_projectors(basis)

    for i, p in enumerate(projectors):
        if p.shape != (measured_dim, measured_dim):
            raise ValueError(f"projector {i} has shape {p.shape}, expected {(measured_dim,) * 2}")
        for j in range(i, len(projectors)):
            expect = projectors[i] if i == j else np.zeros_like(p)
            if np.max(np.abs(projectors[i] @ projectors[j] - expect)) > 1e-10:
                raise ValueError("measurement projectors are not orthogonal idempotents")
    if np.max(np.abs(sum(projectors) - np.eye(measured_dim))) > 1e-10:
        raise ValueError("measurement basis is not complete")

    rho = reg.density()
    remaining = [s for s in range(reg.num_slots) if s not in positions]
    results: list[MeasurementResult] = []
    for tag, proj in zip(tags, projectors):
        full = embed_operator(proj, positions, reg.num_slots)
        prob = float(np.trace(full @ rho.matrix).real)
        prob = max(prob, 0.0)
        if prob < TOL.null_probability or not remaining:
            post = None
        else:
            conditional = full @ rho.matrix @ full / prob
            post = DensityOperator(
                partial_trace(conditional, remaining, rho.slot_dims),
                tuple(rho.slot_dims[s] for s in remaining),
            )
        results.append(MeasurementResult(tag, prob, post))
    return results
