"""Closed-loop encounters: MPC-controlled ownship against a Dubins intruder.

The intruder commits to the Dubins schedule toward its waypoint computed once
at t = 0 and indexed by absolute time; an optional bounded uniform
angular-rate disturbance perturbs each applied step.  The ownship re-solves
its receding-horizon problem every step.  Monte-Carlo batches rerun the same
encounter under per-run derived seeds.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dubins import ControlSchedule, DubinsPath, Pose, control_schedule, shortest_path
from .dynamics import ControlBounds, ControlInput, separation, step
from .mpc import MpcConfig, MpcMode, MpcSolution, MpcWeights, solve_step
from .solver import NumericalDomainError, SolverConfig, STATUS_INFEASIBLE

TERMINAL_ARRIVED = "arrived"
TERMINAL_MAX_STEPS = "max_steps"
TERMINAL_VIOLATION = "violation_flagged"

DISTURBANCE_NONE = "none"
DISTURBANCE_UNIFORM = "uniform"

# Receding-horizon solves need feasibility, not tight stationarity: the
# optimality tolerance is loosened to match the cost scale (~1e5 m^2) and the
# outer budget trimmed, since the next re-solve corrects any slack.
CLOSED_LOOP_SOLVER = SolverConfig(outer_max_iters=12, inner_max_iters=200, optimality_tol=5e-4)


@dataclass(frozen=True)
class Disturbance:
    """Additive angular-rate noise on the intruder, in radians/second."""

    kind: str = DISTURBANCE_NONE
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (DISTURBANCE_NONE, DISTURBANCE_UNIFORM):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == DISTURBANCE_UNIFORM and not self.lo <= self.hi:
            raise ValueError(f"need lo <= hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to reproduce one encounter."""

    own_start: Pose
    own_target: Pose
    target_radius: float
    intruder_start: Pose
    intruder_target: Pose
    own_bounds: ControlBounds
    intruder_bounds: ControlBounds
    min_separation: float
    horizon: int
    robust_horizon: int
    weights: MpcWeights
    mode: MpcMode
    disturbance: Disturbance
    max_steps: int
    rng_seed: int
    dt: float = 1.0
    solver: SolverConfig = CLOSED_LOOP_SOLVER

    def __post_init__(self) -> None:
        if not self.target_radius > 0.0:
            raise ValueError("target_radius must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not self.intruder_bounds.u_max > 0.0:
            raise ValueError("intruder needs a positive maximum turn rate")

    def mpc_config(self) -> MpcConfig:
        return MpcConfig(
            horizon=self.horizon,
            robust_horizon=self.robust_horizon,
            dt=self.dt,
            min_separation=self.min_separation,
            weights=self.weights,
            own_bounds=self.own_bounds,
            intruder_bounds=self.intruder_bounds,
            mode=self.mode,
            target=self.own_target,
            solver=self.solver,
        )


@dataclass(frozen=True)
class SimStep:
    """State of both aircraft at time t and the inputs applied over [t, t+1)."""

    t: int
    own: Pose
    intruder: Pose
    applied: ControlInput
    intruder_applied: ControlInput
    separation: float
    solver_status: str
    solve_seconds: float
    inner_iters: int
    outer_iters: int
    flagged: bool


@dataclass
class SimTrace:
    spec: ScenarioSpec
    steps: list[SimStep]
    own_final: Pose
    intruder_final: Pose
    arrived: bool
    terminal_status: str
    intent_path: DubinsPath
    intent_schedule: ControlSchedule


class SimulationAborted(RuntimeError):
    """Solver hit a numerical-domain error; the partial trace is attached."""

    def __init__(self, message: str, trace: SimTrace):
        super().__init__(message)
        self.trace = trace


def intruder_plan(spec: ScenarioSpec) -> tuple[DubinsPath, ControlSchedule]:
    """Dubins path and per-step schedule from the intruder's start to its waypoint."""
    radius = spec.intruder_bounds.v_max / spec.intruder_bounds.u_max
    path = shortest_path(spec.intruder_start, spec.intruder_target, radius)
    return path, control_schedule(path, spec.intruder_bounds.v_max, spec.dt)


def run_closed_loop(spec: ScenarioSpec) -> SimTrace:
    """Simulate one encounter until arrival or the step budget runs out."""
    intent_path, schedule = intruder_plan(spec)
    config = spec.mpc_config()
    rng = np.random.default_rng(spec.rng_seed) if spec.disturbance.kind == DISTURBANCE_UNIFORM else None

    own = spec.own_start
    intruder = spec.intruder_start
    steps: list[SimStep] = []
    warm: MpcSolution | None = None
    arrived = _within_target(own, spec)

    t = 0
    while not arrived and t < spec.max_steps:
        t_start = time.perf_counter()
        try:
            sol = solve_step(own, intruder, t, schedule, config, warm)
        except NumericalDomainError as err:
            trace = _finish_trace(spec, steps, own, intruder, False, intent_path, schedule)
            raise SimulationAborted(f"solver domain error at step {t}: {err}", trace) from err
        solve_seconds = time.perf_counter() - t_start

        nominal_rate = schedule.rate_at(t)
        if rng is not None:
            noise = rng.uniform(spec.disturbance.lo, spec.disturbance.hi)
            intruder_input = spec.intruder_bounds.clamp(
                ControlInput(speed=spec.intruder_bounds.v_max, angular_rate=nominal_rate + noise)
            )
        else:
            # Kept unclamped so the realized nominal trajectory matches the
            # scenario tree's nominal branch bit for bit.
            intruder_input = ControlInput(speed=spec.intruder_bounds.v_max, angular_rate=nominal_rate)

        steps.append(
            SimStep(
                t=t,
                own=own,
                intruder=intruder,
                applied=sol.first_input,
                intruder_applied=intruder_input,
                separation=separation(own, intruder),
                solver_status=sol.solver.status,
                solve_seconds=solve_seconds,
                inner_iters=sol.solver.inner_iters_total,
                outer_iters=sol.solver.outer_iters,
                flagged=sol.solver.status == STATUS_INFEASIBLE,
            )
        )

        own = step(own, sol.first_input, spec.dt)
        intruder = step(intruder, intruder_input, spec.dt)
        warm = sol
        t += 1
        arrived = _within_target(own, spec)

    return _finish_trace(spec, steps, own, intruder, arrived, intent_path, schedule)


def _within_target(own: Pose, spec: ScenarioSpec) -> bool:
    return math.hypot(own.x - spec.own_target.x, own.y - spec.own_target.y) <= spec.target_radius


def _finish_trace(
    spec: ScenarioSpec,
    steps: list[SimStep],
    own: Pose,
    intruder: Pose,
    arrived: bool,
    intent_path: DubinsPath,
    schedule: ControlSchedule,
) -> SimTrace:
    status = TERMINAL_ARRIVED if arrived else TERMINAL_MAX_STEPS
    if any(s.separation < spec.min_separation for s in steps) or any(s.flagged for s in steps):
        status = TERMINAL_VIOLATION
    return SimTrace(
        spec=spec,
        steps=steps,
        own_final=own,
        intruder_final=intruder,
        arrived=arrived,
        terminal_status=status,
        intent_path=intent_path,
        intent_schedule=schedule,
    )


@dataclass(frozen=True)
class SimMetrics:
    min_separation: float
    min_separation_time: int
    path_length: float
    arrival_time: int | None
    violation_stages: int
    max_solver_iterations: int

    def as_dict(self) -> dict:
        return {
            "min_separation": self.min_separation,
            "min_separation_time": self.min_separation_time,
            "path_length": self.path_length,
            "arrival_time": self.arrival_time,
            "violation_stages": self.violation_stages,
            "max_solver_iterations": self.max_solver_iterations,
        }


def metrics(trace: SimTrace) -> SimMetrics:
    """Summary metrics, recomputed from the recorded poses."""
    if not trace.steps:
        raise ValueError("metrics require a nonempty trace")
    seps = [separation(s.own, s.intruder) for s in trace.steps]
    idx = int(np.argmin(seps))
    return SimMetrics(
        min_separation=seps[idx],
        min_separation_time=trace.steps[idx].t,
        path_length=sum(trace.spec.dt * s.applied.speed for s in trace.steps),
        arrival_time=len(trace.steps) if trace.arrived else None,
        violation_stages=sum(1 for s in seps if s < trace.spec.min_separation),
        max_solver_iterations=max(s.inner_iters for s in trace.steps),
    )


@dataclass
class RunOutcome:
    index: int
    seed: int
    trace: SimTrace | None
    error: str | None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class MonteCarloAggregate:
    min_min_separation: float
    violation_runs: int
    path_length_min: float
    path_length_mean: float
    path_length_max: float
    terminal_spread_max: float
    terminal_spread_mean: float
    common_step_index: int


@dataclass
class MonteCarloReport:
    spec: ScenarioSpec
    runs: list[RunOutcome]
    nominal: SimTrace
    aggregate: MonteCarloAggregate


def _run_for_report(spec: ScenarioSpec) -> RunOutcome:
    try:
        return RunOutcome(index=0, seed=spec.rng_seed, trace=run_closed_loop(spec), error=None)
    except SimulationAborted as err:
        return RunOutcome(index=0, seed=spec.rng_seed, trace=err.trace, error=str(err))


def run_monte_carlo(spec: ScenarioSpec, runs: int, max_workers: int = 1) -> MonteCarloReport:
    """Run seeded repetitions plus the disturbance-free nominal reference.

    Run i uses seed rng_seed + i.  The terminal spread is measured at the last
    step index common to every run, against the nominal intruder position.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    specs = [replace(spec, rng_seed=spec.rng_seed + i) for i in range(runs)]
    nominal = run_closed_loop(replace(spec, disturbance=Disturbance()))

    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(_run_for_report, specs))
    else:
        outcomes = [_run_for_report(s) for s in specs]
    for i, outcome in enumerate(outcomes):
        outcome.index = i

    return MonteCarloReport(
        spec=spec,
        runs=outcomes,
        nominal=nominal,
        aggregate=_aggregate(outcomes, nominal),
    )


def _aggregate(outcomes: list[RunOutcome], nominal: SimTrace) -> MonteCarloAggregate:
    complete = [o.trace for o in outcomes if o.ok and o.trace is not None and o.trace.steps]
    if not complete:
        raise RuntimeError("no run completed; cannot aggregate")
    per_run = [metrics(t) for t in complete]

    common = min(min(len(t.steps) for t in complete), len(nominal.steps)) - 1
    ref = nominal.steps[common].intruder
    deviations = [separation(t.steps[common].intruder, ref) for t in complete]

    lengths = [m.path_length for m in per_run]
    return MonteCarloAggregate(
        min_min_separation=min(m.min_separation for m in per_run),
        violation_runs=sum(1 for m in per_run if m.violation_stages > 0),
        path_length_min=min(lengths),
        path_length_mean=sum(lengths) / len(lengths),
        path_length_max=max(lengths),
        terminal_spread_max=max(deviations),
        terminal_spread_mean=sum(deviations) / len(deviations),
        common_step_index=common,
    )
