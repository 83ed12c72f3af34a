"""Command-line front end.

Commands: tde-bell, teleport, time-loop, sweep, stability, ctc-compare.
All output is deterministic; measurement outcomes are enumerated with
their probabilities, never sampled.  Exit codes: 0 success, 1 solver
failure, 2 bad flags.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis
from .consistency import (
    BellOnTde,
    ConsistencyError,
    TimeLoopTeleport,
    cnot_swap_interaction,
    deutsch_ctc_oracle,
    stability_limit,
)
from .gates import BellTag
from .protocols import (
    AverageAll,
    OutcomePolicy,
    PostSelect,
    ScenarioKind,
    ScenarioSpec,
    run_scenario,
)
from .qlinalg import partial_trace, trace_distance

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)
DEFAULT_GRID = 101


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: complex = 1.0
    beta: complex = 0.0
    alpha2: float | None = None
    tau: int = 1
    outcome: BellTag | None = None
    correct: bool = False
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    grid: int = DEFAULT_GRID
    jobs: int = 1
    output_path: str | None = None
    format: str = "json"
    scenario: str = "tde-bell"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdesim",
        description="Deterministic simulator for time-displaced entanglement scenarios",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_amplitudes(p: argparse.ArgumentParser, require: bool) -> None:
        p.add_argument("--alpha2", type=float, default=None, required=require,
                       help="squared amplitude of |0>; beta = +sqrt(1 - alpha2)")
        p.add_argument("--alpha-re", type=float, default=None)
        p.add_argument("--alpha-im", type=float, default=None)
        p.add_argument("--beta-re", type=float, default=None)
        p.add_argument("--beta-im", type=float, default=None)

    p = sub.add_parser("tde-bell", help="Bell measurement on a time-displaced pair")
    p.add_argument("--tau", type=int, default=1)

    p = sub.add_parser("teleport", help="teleport a qubit into the past")
    add_amplitudes(p, require=False)
    p.add_argument("--outcome", type=str, default=None, choices=[t.value for t in BellTag])
    p.add_argument("--correct", action="store_true")
    p.add_argument("--tau", type=int, default=1)

    p = sub.add_parser("time-loop", help="time-loop teleportation with a CNOT interaction")
    add_amplitudes(p, require=False)
    p.add_argument("--outcome", type=str, default=None, choices=[t.value for t in BellTag])
    p.add_argument("--correct", action="store_true")

    p = sub.add_parser("sweep", help="trace-distance table over beta^2")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--format", type=str, default="json", choices=["json", "csv"])
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("stability", help="resolve a degenerate problem by the imperfection limit")
    p.add_argument("--scenario", type=str, default="tde-bell", choices=["tde-bell", "time-loop"])
    p.add_argument("--outcome", type=str, default="phi+", choices=[t.value for t in BellTag])
    p.add_argument("--epsilons", type=str, default=None,
                   help="comma-separated descending list, e.g. 1e-1,1e-2,1e-3")
    p.add_argument("--alpha2", type=float, default=None)

    p = sub.add_parser("ctc-compare", help="consistency solver vs loop-iteration oracle")
    add_amplitudes(p, require=False)

    return parser


def _resolve_amplitudes(args: argparse.Namespace) -> tuple[complex, complex, float | None]:
    quartet = (args.alpha_re, args.alpha_im, args.beta_re, args.beta_im)
    if any(v is not None for v in quartet):
        if args.alpha2 is not None:
            raise ValueError("--alpha2 conflicts with the --alpha-re/--beta-re quartet")
        alpha = complex(args.alpha_re or 0.0, args.alpha_im or 0.0)
        beta = complex(args.beta_re or 0.0, args.beta_im or 0.0)
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("amplitude quartet is not normalized: |alpha|^2 + |beta|^2 != 1")
        return alpha, beta, abs(alpha) ** 2
    alpha2 = 0.5 if args.alpha2 is None else args.alpha2
    if not 0.0 <= alpha2 <= 1.0:
        raise ValueError(f"--alpha2 must lie in [0, 1], got {alpha2}")
    return math.sqrt(alpha2), math.sqrt(1.0 - alpha2), alpha2


def validate_config(args: argparse.Namespace) -> RunConfig:
    """Normalize parsed flags into a RunConfig, applying defaults."""
    command = args.command
    cfg: dict = {"command": command}

    if command in ("teleport", "time-loop", "ctc-compare"):
        alpha, beta, alpha2 = _resolve_amplitudes(args)
        cfg.update(alpha=alpha, beta=beta, alpha2=alpha2)
    if command == "tde-bell":
        if args.tau < 1:
            raise ValueError(f"--tau must be at least 1, got {args.tau}")
        cfg["tau"] = args.tau
    if command == "teleport":
        if args.tau < 1:
            raise ValueError(f"--tau must be at least 1, got {args.tau}")
        cfg["tau"] = args.tau
    if command == "time-loop":
        cfg["tau"] = 2
    if command in ("teleport", "time-loop"):
        outcome = BellTag.from_string(args.outcome) if args.outcome else None
        if args.correct and outcome is None:
            raise ValueError("--correct requires --outcome")
        cfg.update(outcome=outcome, correct=args.correct)
    if command == "sweep":
        if args.grid < 3:
            raise ValueError(f"--grid must be at least 3, got {args.grid}")
        if args.jobs < 1:
            raise ValueError(f"--jobs must be at least 1, got {args.jobs}")
        cfg.update(grid=args.grid, format=args.format, output_path=args.out, jobs=args.jobs)
    if command == "stability":
        if args.epsilons is None:
            eps = DEFAULT_EPSILONS
        else:
            try:
                eps = tuple(float(token) for token in args.epsilons.split(","))
            except ValueError:
                raise ValueError(f"--epsilons is not a comma-separated float list: {args.epsilons!r}")
        if any(not 0.0 < e < 0.5 for e in eps):
            raise ValueError("--epsilons entries must lie in (0, 0.5)")
        if any(later >= earlier for earlier, later in zip(eps, eps[1:])):
            raise ValueError("--epsilons must be strictly descending")
        alpha2 = 0.5 if args.alpha2 is None else args.alpha2
        if not 0.0 <= alpha2 <= 1.0:
            raise ValueError(f"--alpha2 must lie in [0, 1], got {alpha2}")
        cfg.update(
            scenario=args.scenario,
            outcome=BellTag.from_string(args.outcome),
            epsilons=eps,
            alpha2=alpha2,
            alpha=math.sqrt(alpha2),
            beta=math.sqrt(1.0 - alpha2),
        )
    return RunConfig(**cfg)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _matrix_json(m: np.ndarray) -> dict:
    m = np.asarray(m)
    return {"real": m.real.tolist(), "imag": m.imag.tolist()}


def _run_protocol(cfg: RunConfig) -> dict:
    policy: OutcomePolicy = PostSelect(cfg.outcome) if cfg.outcome else AverageAll()
    spec = ScenarioSpec(
        kind=ScenarioKind(cfg.command),
        alpha=cfg.alpha,
        beta=cfg.beta,
        tau_cycles=cfg.tau,
        outcome_policy=policy,
    )
    result = run_scenario(spec, apply_correction=cfg.correct)
    payload = result.to_json_dict(cfg.alpha2)
    if isinstance(policy, PostSelect):
        payload["outcomes"] = [
            entry for entry in payload["outcomes"] if entry["tag"] == policy.outcome.value
        ]
    return payload


def _run_tde_bell(cfg: RunConfig) -> dict:
    from .protocols import run_bell_on_tde

    return run_bell_on_tde(cfg.tau).to_json_dict(None)


def _run_sweep(cfg: RunConfig) -> str:
    table = analysis.trace_distance_curve(cfg.grid, jobs=cfg.jobs)
    if cfg.format == "csv":
        return table.to_csv()
    return table.to_json() + "\n"


def _run_stability(cfg: RunConfig) -> dict:
    if cfg.scenario == "tde-bell":
        scenario = BellOnTde()
        alpha2 = None
    else:
        scenario = TimeLoopTeleport(cfg.alpha, cfg.beta)
        alpha2 = cfg.alpha2
    result = stability_limit(scenario, cfg.outcome, cfg.epsilons)
    return {
        "scenario": cfg.scenario,
        "outcome": cfg.outcome.value,
        "alpha2": alpha2,
        "epsilons": list(cfg.epsilons),
        "reports": [r.to_json_dict(alpha2) for r in result.reports],
        "successive_distances": list(result.successive_distances),
        "gamma": _matrix_json(result.gamma),
    }


def _run_ctc_compare(cfg: RunConfig) -> dict:
    from .consistency import build_consistency_map, solve_fixed_point

    problem = build_consistency_map(TimeLoopTeleport(cfg.alpha, cfg.beta), BellTag.PHI_PLUS)
    report = solve_fixed_point(problem)
    rho_solver = partial_trace(report.gamma, keep=(1,), dims=(2, 2))
    chi = np.array([cfg.alpha, cfg.beta], dtype=complex)
    rho_ctc, rho_oracle = deutsch_ctc_oracle(cnot_swap_interaction(), np.outer(chi, chi.conj()))
    return {
        "alpha2": cfg.alpha2,
        "rho_solver": _matrix_json(rho_solver),
        "rho_oracle": _matrix_json(rho_oracle),
        "rho_ctc": _matrix_json(rho_ctc),
        "trace_distance": trace_distance(rho_solver, rho_oracle),
    }


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = validate_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if cfg.command == "sweep":
            _emit(_run_sweep(cfg), cfg.output_path)
            return 0
        if cfg.command == "tde-bell":
            payload = _run_tde_bell(cfg)
        elif cfg.command in ("teleport", "time-loop"):
            payload = _run_protocol(cfg)
        elif cfg.command == "stability":
            payload = _run_stability(cfg)
        elif cfg.command == "ctc-compare":
            payload = _run_ctc_compare(cfg)
        else:  # pragma: no cover - argparse rejects unknown commands
            print(f"error: unknown command {cfg.command}", file=sys.stderr)
            return 2
    except ConsistencyError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1

    _emit(json.dumps(payload, indent=2, sort_keys=True), cfg.output_path)
    return 0


def entrypoint() -> None:  # pragma: no cover - console-script shim
    sys.exit(main())
