"""Derived tables: trace-distance curves and the great-circle average.

The sweep compares the analytic distinguishability curves with the same
quantities computed from solved density operators.  Two input columns
are reported side by side on purpose: the analytic input curve
``2 * beta^2`` and the directly computed trace distance between the two
pure input states (which evaluates to ``2 * |beta|``); they disagree,
and the table keeps both rather than guessing which was intended.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .consistency import TimeLoopTeleport, build_consistency_map, solve_fixed_point
from .gates import BellTag
from .qlinalg import partial_trace, trace_distance

CSV_HEADER = ("beta2", "d_input_paper", "d_after_paper", "d_after_numeric", "d_input_numeric")


def _sig12(x: float) -> float:
    # emit distances with 12 significant digits
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class SweepRow:
    beta2: float
    d_input_paper: float
    d_after_paper: float
    d_after_numeric: float
    d_input_numeric: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        b = [row.beta2 for row in self.rows]
        if any(y <= x for x, y in zip(b, b[1:])):
            raise ValueError("beta2 grid must be strictly increasing")
        for row in self.rows:
            for value in (row.d_input_paper, row.d_after_paper, row.d_after_numeric, row.d_input_numeric):
                if not 0.0 <= value <= 2.0 + 1e-12:
                    raise ValueError(f"distance {value} outside [0, 2]")

    def to_json_rows(self) -> list[dict]:
        return [
            {
                "beta2": _sig12(row.beta2),
                "d_input_paper": _sig12(row.d_input_paper),
                "d_after_paper": _sig12(row.d_after_paper),
                "d_after_numeric": _sig12(row.d_after_numeric),
                "d_input_numeric": _sig12(row.d_input_numeric),
            }
            for row in self.rows
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_rows(), indent=2)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(
                f"{value:.12g}"
                for value in (
                    row.beta2,
                    row.d_input_paper,
                    row.d_after_paper,
                    row.d_after_numeric,
                    row.d_input_numeric,
                )
            )
        return buffer.getvalue()


def _loop_output(alpha: float, beta: float) -> np.ndarray:
    problem = build_consistency_map(TimeLoopTeleport(alpha, beta), BellTag.PHI_PLUS)
    report = solve_fixed_point(problem)
    return partial_trace(report.gamma, keep=(1,), dims=(2, 2))


def trace_distance_curve(grid_points: int = 101, jobs: int = 1) -> SweepTable:
    """Distinguishability from the logical zero state across beta^2.

    For each grid point the time-loop output (phi+ branch) of the
    superposition input is solved numerically and compared against the
    solved output for the zero input; the analytic curves ``2 beta^2``
    and ``4 (beta^2 - beta^4)`` sit alongside.  Grid points are
    independent; ``jobs > 1`` solves them in a worker pool while keeping
    the row order fixed by the grid index.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    zero_state = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    zero_output = _loop_output(1.0, 0.0)

    def solve_row(beta2: float) -> SweepRow:
        beta = float(np.sqrt(beta2))
        alpha = float(np.sqrt(1.0 - beta2))
        superposition = np.array([alpha, beta], dtype=complex)
        rho_in = np.outer(superposition, superposition.conj())
        return SweepRow(
            beta2=float(beta2),
            d_input_paper=2.0 * beta2,
            d_after_paper=4.0 * (beta2 - beta2**2),
            d_after_numeric=trace_distance(zero_output, _loop_output(alpha, beta)),
            d_input_numeric=trace_distance(zero_state, rho_in),
        )

    grid = [float(b) for b in np.linspace(0.0, 1.0, grid_points)]
    if jobs == 1:
        rows = [solve_row(b) for b in grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(solve_row, grid))
    return SweepTable(tuple(rows))


def great_circle_average(grid_points: int = 360) -> dict[str, float]:
    """Average the analytic curves around the real great circle.

    Uses a uniform angle grid with ``alpha = cos(theta)``,
    ``beta = sin(theta)`` over one full turn and checks that the
    post-evolution mean is below the input mean.
    """
    if grid_points < 360:
        raise ValueError("grid_points must be at least 360")
    theta = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    beta2 = np.sin(theta) ** 2
    mean_input = float(np.mean(2.0 * beta2))
    mean_after = float(np.mean(4.0 * (beta2 - beta2**2)))
    if not mean_after < mean_input:
        raise AssertionError("great-circle average did not reduce distinguishability")
    return {"mean_d_input": mean_input, "mean_d_after": mean_after}
