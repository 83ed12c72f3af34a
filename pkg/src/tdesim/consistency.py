"""Self-consistency analysis for measurements that close a time loop.

Once a Bell measurement couples a qubit to its own past through a
time-displaced pair, the state entering the loop must equal the state
the measurement projects back out of it.  This module expresses that
requirement as an explicit linear map ``L`` on the unknown density
matrix ``gamma``; self-consistent states are fixed points
``L(gamma) = lambda * gamma`` where ``lambda`` absorbs the outcome
probability.  Fixed points are found by eigenanalysis of ``L``
restricted to Hermitian operators, degenerate solution families are
reported rather than collapsed, and the degeneracy of the ideal
measurement is resolved through the limit of a slightly imperfect
measurement.  A brute-force iteration oracle for the standard
closed-timelike-curve fixed-point model provides an independent check.

Measurement imperfection model: the ideal rank-1 Bell projector cannot
be deformed into a projective basis that singles out a unique mixed
fixed point (any rotated Bell vector keeps the consistency map a
conjugation, and any rank-1 vector yields only pure or degenerate fixed
sets).  The stability analysis therefore perturbs the measurement
itself, mixing the selected projector with the uniform outcome:
``E = (1 - eps) * P + (eps / 4) * I``.  For every ``eps > 0`` this
leaves a unique admissible fixed point, and the ideal projector is
recovered as ``eps -> 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .gates import CNOT, SWAP, BellOutcome, BellTag, bell_outcome
from .qlinalg import (
    TOL,
    DensityOperator,
    dagger,
    embed_operator,
    is_unitary,
    partial_trace,
    trace_distance,
)

__all__ = [
    "BellOnTde",
    "TimeLoopTeleport",
    "ConsistencyProblem",
    "SolutionReport",
    "StabilityResult",
    "ConsistencyError",
    "ConvergenceError",
    "build_consistency_map",
    "solve_fixed_point",
    "stability_limit",
    "deutsch_ctc_oracle",
    "cnot_swap_interaction",
]


class ConsistencyError(Exception):
    """No admissible self-consistent state, or an unexpected degeneracy."""


class ConvergenceError(ConsistencyError):
    """The fixed-point iteration did not converge within its cap."""


@dataclass(frozen=True)
class BellOnTde:
    """Bell measurement on a time-displaced pair; one unknown qubit."""

    tau_cycles: int = 1

    def __post_init__(self) -> None:
        if self.tau_cycles < 1:
            raise ValueError("tau_cycles must be at least 1")

    @property
    def matrix_side(self) -> int:
        return 2

    @property
    def name(self) -> str:
        return "tde-bell"


@dataclass(frozen=True)
class TimeLoopTeleport:
    """Teleportation whose qubit interacts with its own past via CNOT.

    The unknown is the joint state of the input qubit and the free
    qubit just before the Bell measurement (a 4x4 matrix).  The loop
    spans two clock cycles so the interaction fits in the middle one.
    """

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > TOL.norm:
            raise ValueError("input amplitudes are not normalized")

    @property
    def matrix_side(self) -> int:
        return 4

    @property
    def name(self) -> str:
        return "time-loop"


Scenario = BellOnTde | TimeLoopTeleport


@dataclass(frozen=True, eq=False)
class ConsistencyProblem:
    """The linear self-consistency map on vectorized gamma.

    ``map_matrix`` is ``gamma_dim x gamma_dim`` complex and acts on the
    row-major vectorization of the ``matrix_side x matrix_side`` unknown.
    It maps Hermitian operators to Hermitian operators.
    """

    gamma_dim: int
    matrix_side: int
    map_matrix: np.ndarray
    outcome: BellTag
    description: str

    def apply(self, gamma: np.ndarray) -> np.ndarray:
        d = self.matrix_side
        return (self.map_matrix @ np.asarray(gamma, dtype=complex).reshape(-1)).reshape(d, d)


@dataclass(frozen=True, eq=False)
class SolutionReport:
    """A fixed-point branch: state, scale, degeneracy and residual."""

    gamma: np.ndarray
    eigenvalue: float
    nullspace_dim: int
    residual: float
    unique: bool
    scenario: str
    outcome: BellTag

    def to_json_dict(self, alpha2: float | None = None) -> dict:
        return {
            "scenario": self.scenario,
            "outcome": self.outcome.value,
            "alpha2": alpha2,
            "eigenvalue": self.eigenvalue,
            "nullspace_dim": self.nullspace_dim,
            "residual": self.residual,
            "gamma_real": self.gamma.real.tolist(),
            "gamma_imag": self.gamma.imag.tolist(),
        }


@dataclass(frozen=True, eq=False)
class StabilityResult:
    """Outcome of the small-imperfection limit."""

    gamma: np.ndarray
    reports: tuple[SolutionReport, ...]
    successive_distances: tuple[float, ...]


_BELL_PHI_PLUS = np.zeros((4, 4), dtype=complex)
_BELL_PHI_PLUS[0, 0] = _BELL_PHI_PLUS[0, 3] = 0.5
_BELL_PHI_PLUS[3, 0] = _BELL_PHI_PLUS[3, 3] = 0.5


def _measurement_operator(outcome: BellOutcome, noise: float) -> np.ndarray:
    if not 0.0 <= noise < 1.0:
        raise ValueError("measurement noise must lie in [0, 1)")
    proj = outcome.projector
    if noise == 0.0:
        return proj
    return (1.0 - noise) * proj + (noise / 4.0) * np.eye(4, dtype=complex)


def _bell_on_tde_pipeline(e_op: np.ndarray):
    # Slots: [pair half at the measured cycle, its past partner, unknown qubit].
    # Measure slots 0 and 2, trace them out, and the past partner remains;
    # free evolution carries that state back to the unknown slot.
    e_full = embed_operator(e_op, (0, 2), 3)

    def apply(gamma: np.ndarray) -> np.ndarray:
        rho = np.kron(_BELL_PHI_PLUS, gamma)
        return partial_trace(e_full @ rho, keep=(1,), dims=(2, 2, 2))

    return apply


def _time_loop_pipeline(e_op: np.ndarray, alpha: complex, beta: complex):
    # Stage 1 slots: [pair half, past partner, input qubit, free qubit];
    # measure slots 0 and 2 against the unknown joint state of slots 2, 3.
    # Stage 2 slots: [fresh input, teleported past qubit, future free qubit];
    # CNOT acts with the fresh input as control, then the future slot is
    # traced out, closing the map back onto [input qubit, free qubit].
    e_full = embed_operator(e_op, (0, 2), 4)
    cnot_full = embed_operator(CNOT, (0, 1), 3)
    chi = np.array([alpha, beta], dtype=complex)
    chi_rho = np.outer(chi, chi.conj())

    def apply(gamma: np.ndarray) -> np.ndarray:
        rho = np.kron(_BELL_PHI_PLUS, gamma)
        two_time = partial_trace(e_full @ rho, keep=(1, 3), dims=(2, 2, 2, 2))
        staged = np.kron(chi_rho, two_time)
        staged = cnot_full @ staged @ dagger(cnot_full)
        return partial_trace(staged, keep=(0, 1), dims=(2, 2, 2))

    return apply


def hermitian_basis(side: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of Hermitian ``side x side`` matrices."""
    mats = []
    for i in range(side):
        m = np.zeros((side, side), dtype=complex)
        m[i, i] = 1.0
        mats.append(m)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(side):
        for j in range(i + 1, side):
            m = np.zeros((side, side), dtype=complex)
            m[i, j] = m[j, i] = inv_sqrt2
            mats.append(m)
            m = np.zeros((side, side), dtype=complex)
            m[i, j] = -1j * inv_sqrt2
            m[j, i] = 1j * inv_sqrt2
            mats.append(m)
    return np.stack(mats)


def build_consistency_map(
    scenario: Scenario,
    outcome: BellOutcome | BellTag | str,
    *,
    noise: float = 0.0,
    measurement: np.ndarray | None = None,
) -> ConsistencyProblem:
    """Assemble the linear self-consistency map for a scenario and outcome.

    The map is built by running the physical pipeline (projection,
    tensoring with fixed states, the loop CNOT, partial traces) on every
    matrix unit of the unknown, so linearity is exact by construction.

    Args:
        scenario: ``BellOnTde`` or ``TimeLoopTeleport``.
        outcome: the post-selected Bell outcome.
        noise: mixes the outcome projector with the uniform outcome,
            ``E = (1 - noise) P + noise/4 I``; used by the stability
            analysis.
        measurement: explicit 4x4 measurement operator overriding the
            outcome projector (for perturbation experiments).
    """
    if not isinstance(outcome, BellOutcome):
        outcome = bell_outcome(outcome)
    if measurement is not None:
        e_op = np.asarray(measurement, dtype=complex)
        if e_op.shape != (4, 4):
            raise ValueError("measurement operator must be 4x4")
        if np.max(np.abs(e_op - dagger(e_op))) > TOL.eig_input:
            raise ValueError("measurement operator must be Hermitian")
    else:
        e_op = _measurement_operator(outcome, noise)

    if isinstance(scenario, BellOnTde):
        apply = _bell_on_tde_pipeline(e_op)
    elif isinstance(scenario, TimeLoopTeleport):
        apply = _time_loop_pipeline(e_op, scenario.alpha, scenario.beta)
    else:
        raise TypeError(f"unsupported scenario {scenario!r}")

    side = scenario.matrix_side
    dim = side * side
    map_matrix = np.zeros((dim, dim), dtype=complex)
    for r, c in product(range(side), repeat=2):
        unit = np.zeros((side, side), dtype=complex)
        unit[r, c] = 1.0
        map_matrix[:, r * side + c] = apply(unit).reshape(-1)

    problem = ConsistencyProblem(
        gamma_dim=dim,
        matrix_side=side,
        map_matrix=map_matrix,
        outcome=outcome.tag,
        description=scenario.name,
    )
    for h in hermitian_basis(side):
        image = problem.apply(h)
        if np.max(np.abs(image - dagger(image))) > 1e-10:
            raise ConsistencyError("consistency map does not preserve Hermiticity")
    return problem


def _nullspace(matrix: np.ndarray, atol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(matrix)
    count = int(np.sum(s <= atol))
    if count == 0:
        return np.zeros((matrix.shape[1], 0))
    return vh[-count:].conj().T


def _admissible_representative(family: list[np.ndarray]) -> np.ndarray | None:
    """Pick a PSD, trace-normalizable member of a fixed-point family.

    Preference order: the projection of the maximally mixed state onto
    the family (so degenerate families report their most uniform
    member), then the family basis elements with either sign.
    """
    side = family[0].shape[0]
    mixed = np.eye(side, dtype=complex) / side
    proj = sum(np.trace(dagger(f) @ mixed) * f for f in family)
    candidates = [proj] + list(family) + [-f for f in family]
    for cand in candidates:
        tr = np.trace(cand).real
        if abs(tr) <= 1e-12:
            continue
        g = cand / tr
        g = (g + dagger(g)) / 2.0
        if np.min(np.linalg.eigvalsh(g)) >= TOL.admissible_psd:
            return g
    return None


def solve_fixed_point(problem: ConsistencyProblem) -> SolutionReport:
    """Find the self-consistent states of a consistency problem.

    Works in the real vector space of Hermitian matrices (the map
    preserves it), scans real eigenvalues above 1e-12 from the largest
    down, and returns the first branch containing a PSD,
    trace-normalizable state.  ``nullspace_dim`` is the dimension of the
    Hermitian eigenspace at the selected eigenvalue; eigenvalues closer
    than the degeneracy tolerance are treated as one branch.
    """
    side = problem.matrix_side
    basis = hermitian_basis(side)
    images = np.stack([problem.apply(h) for h in basis])
    # real representation: rep[m, n] = <H_m, L(H_n)>
    rep = np.einsum("mij,nij->mn", basis.conj(), images).real

    eigenvalues = np.linalg.eigvals(rep)
    candidates: list[float] = []
    for val in eigenvalues:
        if abs(val.imag) > TOL.degeneracy or val.real <= 1e-12:
            continue
        if all(abs(val.real - c) > TOL.degeneracy for c in candidates):
            candidates.append(float(val.real))
    candidates.sort(reverse=True)

    for lam in candidates:
        null = _nullspace(rep - lam * np.eye(rep.shape[0]), atol=TOL.degeneracy)
        dim = null.shape[1]
        if dim == 0:
            continue
        family = [np.tensordot(null[:, k], basis, axes=(0, 0)) for k in range(dim)]
        gamma = _admissible_representative(family)
        if gamma is None:
            continue
        residual = float(np.linalg.norm(problem.apply(gamma) - lam * gamma))
        return SolutionReport(
            gamma=gamma,
            eigenvalue=lam,
            nullspace_dim=dim,
            residual=residual,
            unique=(dim == 1),
            scenario=problem.description,
            outcome=problem.outcome,
        )
    raise ConsistencyError(
        f"no admissible fixed point for {problem.description}/{problem.outcome.value}"
    )


def stability_limit(
    scenario: Scenario,
    outcome: BellOutcome | BellTag | str,
    epsilons,
) -> StabilityResult:
    """Resolve a degenerate problem via the small-imperfection limit.

    Solves the noise-perturbed problem at each epsilon (strictly
    descending, all in (0, 0.5)), requires a unique solution at every
    step, and takes the last solution as the limit.  The trace distances
    between successive solutions serve as a convergence diagnostic.
    Raises ``ConsistencyError`` if any perturbed problem is degenerate.
    """
    eps_list = [float(e) for e in epsilons]
    if not eps_list:
        raise ValueError("epsilons must be non-empty")
    if any(not 0.0 < e < 0.5 for e in eps_list):
        raise ValueError("each epsilon must lie in (0, 0.5)")
    if any(later >= earlier for earlier, later in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilons must be strictly descending")

    reports: list[SolutionReport] = []
    distances: list[float] = []
    previous: np.ndarray | None = None
    for eps in eps_list:
        report = solve_fixed_point(build_consistency_map(scenario, outcome, noise=eps))
        if not report.unique:
            raise ConsistencyError(
                f"degenerate solution family (dim {report.nullspace_dim}) at epsilon={eps}"
            )
        if previous is not None:
            distances.append(trace_distance(previous, report.gamma))
        previous = report.gamma
        reports.append(report)
    assert previous is not None
    return StabilityResult(previous, tuple(reports), tuple(distances))


def cnot_swap_interaction() -> np.ndarray:
    """CNOT (free qubit as control) followed by SWAP, as one unitary.

    This is the two-qubit interaction whose closed-timelike-curve fixed
    point reproduces the time-loop output map; the ordering was fixed by
    comparing the iteration oracle against the consistency solver.
    """
    return SWAP @ CNOT


def deutsch_ctc_oracle(
    interaction,
    rho_in,
    *,
    tol: float = 1e-12,
    max_iterations: int = 10**5,
) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force fixed point of a qubit interacting with a looped qubit.

    Iterates ``rho_ctc <- Tr_sys[U (rho_in x rho_ctc) U+]`` from the
    maximally mixed seed until successive iterates are closer than
    ``tol`` in trace distance.  Returns ``(rho_ctc, rho_out)`` where
    ``rho_out`` traces out the loop instead.  Raises
    ``ConvergenceError`` with the last residual if the cap is hit.
    """
    u = interaction.unitary if hasattr(interaction, "unitary") else np.asarray(interaction, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u):
        raise ValueError("interaction must be a 4x4 unitary")
    rho = rho_in.matrix if isinstance(rho_in, DensityOperator) else np.asarray(rho_in, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("input state must be a single-qubit density matrix")

    rho_ctc = np.eye(2, dtype=complex) / 2.0
    residual = np.inf
    for _ in range(max_iterations):
        joint = u @ np.kron(rho, rho_ctc) @ dagger(u)
        candidate = partial_trace(joint, keep=(1,), dims=(2, 2))
        residual = trace_distance(candidate, rho_ctc)
        rho_ctc = candidate
        if residual < tol:
            joint = u @ np.kron(rho, rho_ctc) @ dagger(u)
            rho_out = partial_trace(joint, keep=(0,), dims=(2, 2))
            return rho_ctc, rho_out
    raise ConvergenceError(
        f"loop state did not converge in {max_iterations} iterations"
        f" (last residual {residual:.3e})"
    )
