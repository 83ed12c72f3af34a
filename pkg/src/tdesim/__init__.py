"""Exact density-matrix simulator for time-displaced entanglement.

Builds the clock-cycle-labeled states of a qubit pair separated in time
by a relativistic round trip, solves the self-consistency conditions
that Bell measurements impose on such states, and reproduces the
resulting non-linear, non-unitary evolution of time-loop teleportation
together with its trace-distance consequences.
"""

from .analysis import SweepRow, SweepTable, great_circle_average, trace_distance_curve
from .consistency import (
    BellOnTde,
    ConsistencyError,
    ConsistencyProblem,
    ConvergenceError,
    SolutionReport,
    StabilityResult,
    TimeLoopTeleport,
    build_consistency_map,
    cnot_swap_interaction,
    deutsch_ctc_oracle,
    solve_fixed_point,
    stability_limit,
)
from .gates import (
    BellOutcome,
    BellTag,
    Gate,
    MeasurementResult,
    apply_gate,
    apply_unitary,
    bell_basis,
    bell_outcome,
    cnot,
    perturbed_bell_basis,
    projective_measure,
)
from .protocols import (
    AverageAll,
    OutcomeReport,
    PostSelect,
    ProtocolResult,
    ScenarioKind,
    ScenarioSpec,
    run_bell_on_tde,
    run_scenario,
    teleport_to_past,
    time_loop_teleport,
)
from .qlinalg import (
    TOL,
    DensityOperator,
    PureState,
    Tolerances,
    hermitian_eig,
    partial_trace,
    tensor,
    trace_distance,
)
from .temporal import (
    TemporalLabel,
    TemporalRegister,
    make_bell_pair,
    make_tde,
    merge,
    time_translate,
)

__version__ = "0.1.0"
