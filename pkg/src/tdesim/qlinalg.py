"""Dense complex linear algebra over small multi-qubit Hilbert spaces.

Everything in the package runs through this layer: tensor products,
partial traces, Hermitian eigendecomposition and the trace-distance
metric.  Operators are plain numpy arrays in the computational basis
with the leftmost tensor factor as the most significant bit of the
basis index.  The trace distance follows the convention
``D = Tr|rho_a - rho_b|`` without a factor 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hilbert-space dimensions stay tiny (at most 5 qubits); reject anything bigger.
MAX_DIM = 1024


@dataclass(frozen=True)
class Tolerances:
    """Single source of truth for the package's numerical tolerances."""

    hermiticity: float = 1e-12
    trace: float = 1e-12
    psd: float = -1e-10
    norm: float = 1e-12
    unitarity: float = 1e-12
    eig_input: float = 1e-10
    eig_residual: float = 1e-10
    degeneracy: float = 1e-9
    admissible_psd: float = -1e-8
    probability: float = 1e-10
    null_probability: float = 1e-14


TOL = Tolerances()


def _as_matrix(m: np.ndarray) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D matrix, got shape {arr.shape}")
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("matrix contains non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def is_hermitian(m: np.ndarray, tol: float = TOL.hermiticity) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m))) <= tol


def is_unitary(m: np.ndarray, tol: float = TOL.unitarity) -> bool:
    m = np.asarray(m)
    if m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol


def tensor(*operators: np.ndarray) -> np.ndarray:
    """Kronecker product with the first operator's slots leftmost.

    The result dimension is capped at ``MAX_DIM``; the scenarios in this
    package never exceed 5 qubits.
    """
    if not operators:
        raise ValueError("tensor requires at least one operator")
    out = _as_matrix(operators[0])
    for op in operators[1:]:
        out = np.kron(out, _as_matrix(op))
        if out.shape[0] > MAX_DIM or out.shape[1] > MAX_DIM:
            raise ValueError(f"tensor result exceeds maximum dimension {MAX_DIM}")
    return out


def partial_trace(rho: np.ndarray, keep, dims) -> np.ndarray:
    """Trace out every slot not listed in ``keep``.

    Args:
        rho: square operator over the tensor product of ``dims``.
        keep: iterable of slot indices to retain, any order.
        dims: per-slot dimensions, leftmost slot first.

    Returns:
        The reduced operator on the kept slots, in their original order.
        The total trace is preserved.
    """
    rho = _as_matrix(rho)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"operator shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one slot")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"slot indices {keep} out of range for {n} slots")

    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many slots for partial trace")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for ax in range(n):
        if ax not in keep:
            col[ax] = row[ax]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    reduced = np.einsum(spec, rho.reshape(dims + dims))
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d_keep, d_keep)


def embed_operator(op: np.ndarray, positions, num_slots: int) -> np.ndarray:
    """Lift an operator acting on ``positions`` to the full qubit register."""
    op = _as_matrix(op)
    positions = [int(p) for p in positions]
    if len(set(positions)) != len(positions):
        raise ValueError("positions must be distinct")
    if any(p < 0 or p >= num_slots for p in positions):
        raise ValueError(f"positions {positions} out of range for {num_slots} slots")
    k = len(positions)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not act on {k} qubits")

    dim = 2**num_slots
    rest = [s for s in range(num_slots) if s not in positions]

    def bit(index: int, slot: int) -> int:
        # leftmost slot is the most significant bit
        return (index >> (num_slots - 1 - slot)) & 1

    def sub_index(index: int) -> int:
        sub = 0
        for p in positions:
            sub = (sub << 1) | bit(index, p)
        return sub

    full = np.zeros((dim, dim), dtype=complex)
    for r in range(dim):
        for c in range(dim):
            if all(bit(r, s) == bit(c, s) for s in rest):
                full[r, c] = op[sub_index(r), sub_index(c)]
    return full


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns real eigenvalues in ascending order and the matching
    orthonormal eigenvector columns.  Raises ``ValueError`` when the
    input is not Hermitian within ``TOL.eig_input``.
    """
    m = _as_matrix(m)
    if not is_hermitian(m, TOL.eig_input):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh(m)
    return w, v


def trace_distance(a, b) -> float:
    """Trace distance ``Tr|a - b|`` (no factor 1/2)."""
    ma = a.matrix if isinstance(a, DensityOperator) else _as_matrix(a)
    mb = b.matrix if isinstance(b, DensityOperator) else _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    w = np.linalg.eigvalsh(ma - mb)
    return float(np.sum(np.abs(w)))


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over labeled qubit slots."""

    vector: np.ndarray
    slot_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        if not (np.all(np.isfinite(vec.real)) and np.all(np.isfinite(vec.imag))):
            raise ValueError("state vector contains non-finite entries")
        dims = tuple(int(d) for d in self.slot_dims)
        if vec.size != int(np.prod(dims)):
            raise ValueError(f"vector length {vec.size} does not match slots {dims}")
        if abs(np.linalg.norm(vec) - 1.0) > TOL.norm:
            raise ValueError("state vector is not normalized")
        vec = vec.copy()
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "slot_dims", dims)

    @property
    def dim(self) -> int:
        return self.vector.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.slot_dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, PSD operator over labeled qubit slots.

    ``normalized=False`` marks unnormalized intermediates (conditional
    states carrying their outcome weight); those skip the trace check.
    """

    matrix: np.ndarray
    slot_dims: tuple[int, ...]
    normalized: bool = True

    def __post_init__(self) -> None:
        mat = _as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.slot_dims)
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise ValueError(f"matrix shape {mat.shape} does not match slots {dims}")
        if np.max(np.abs(mat - dagger(mat))) > TOL.hermiticity:
            raise ValueError("density operator is not Hermitian")
        if np.min(np.linalg.eigvalsh(mat)) < TOL.psd:
            raise ValueError("density operator is not positive semidefinite")
        if self.normalized and abs(np.trace(mat).real - 1.0) > TOL.trace:
            raise ValueError("density operator trace is not 1")
        object.__setattr__(self, "matrix", _frozen(mat))
        object.__setattr__(self, "slot_dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def reduced(self, keep) -> "DensityOperator":
        keep = sorted(set(int(k) for k in keep))
        sub = partial_trace(self.matrix, keep, self.slot_dims)
        return DensityOperator(sub, tuple(self.slot_dims[k] for k in keep), self.normalized)
