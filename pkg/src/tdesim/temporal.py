"""Clock-cycle bookkeeping for qubits that carry a time label.

A qubit slot is identified by ``(location, cycle)``.  Physical time and
wave-packet widths are never represented; a relativistic round trip is
an integer shift of the cycle index, which leaves all amplitudes
untouched.  Slots with different labels live in distinct Hilbert-space
factors, so a register may hold the same physical qubit at two times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qlinalg import DensityOperator, PureState, tensor


class TemporalLabel(NamedTuple):
    """A qubit slot: spatial location plus integer clock cycle."""

    location: int
    cycle: int


@dataclass(frozen=True, eq=False)
class TemporalRegister:
    """Ordered qubit slots and the state living on them.

    Slot order equals label order; the leftmost label is the most
    significant bit of the computational-basis index.
    """

    labels: tuple[TemporalLabel, ...]
    state: PureState | DensityOperator

    def __post_init__(self) -> None:
        labels = tuple(TemporalLabel(*lbl) for lbl in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate (location, cycle) labels in {labels}")
        if len(labels) != len(self.state.slot_dims):
            raise ValueError(
                f"{len(labels)} labels for {len(self.state.slot_dims)} state slots"
            )
        object.__setattr__(self, "labels", labels)

    @property
    def num_slots(self) -> int:
        return len(self.labels)

    def slot_of(self, label: TemporalLabel) -> int:
        try:
            return self.labels.index(TemporalLabel(*label))
        except ValueError:
            raise ValueError(f"label {label} not present in register {self.labels}") from None

    def density(self) -> DensityOperator:
        if isinstance(self.state, PureState):
            return self.state.density()
        return self.state

    def reduced(self, labels) -> DensityOperator:
        return self.density().reduced([self.slot_of(lbl) for lbl in labels])


def merge(a: TemporalRegister, b: TemporalRegister) -> TemporalRegister:
    """Tensor two registers; ``a``'s slots come first."""
    if isinstance(a.state, PureState) and isinstance(b.state, PureState):
        state: PureState | DensityOperator = PureState(
            np.kron(a.state.vector, b.state.vector), a.state.slot_dims + b.state.slot_dims
        )
    else:
        da, db = a.density(), b.density()
        state = DensityOperator(
            tensor(da.matrix, db.matrix),
            da.slot_dims + db.slot_dims,
            da.normalized and db.normalized,
        )
    return TemporalRegister(a.labels + b.labels, state)


def time_translate(reg: TemporalRegister, location: int, d: int) -> TemporalRegister:
    """Shift every cycle index at ``location`` by ``d`` cycles.

    Amplitudes are reused unchanged; only labels move.
    """
    if not any(lbl.location == location for lbl in reg.labels):
        raise ValueError(f"no slot at location {location} in register {reg.labels}")
    shifted = tuple(
        TemporalLabel(lbl.location, lbl.cycle + d) if lbl.location == location else lbl
        for lbl in reg.labels
    )
    return TemporalRegister(shifted, reg.state)


def make_bell_pair(cycle: int) -> TemporalRegister:
    """Maximally entangled pair (|00> + |11>)/sqrt(2) at one clock cycle."""
    vec = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)
    labels = (TemporalLabel(1, cycle), TemporalLabel(2, cycle))
    return TemporalRegister(labels, PureState(vec, (2, 2)))


def make_tde(cycle: int, tau_cycles: int) -> TemporalRegister:
    """Time-displaced pair: location 2 lags location 1 by ``tau_cycles``."""
    if tau_cycles < 1:
        raise ValueError("tau_cycles must be at least 1")
    return time_translate(make_bell_pair(cycle), location=2, d=-tau_cycles)
