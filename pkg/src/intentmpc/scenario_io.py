"""Scenario-file parsing (strict JSON schema), CSV traces, and summaries.

Scenario documents mirror ScenarioSpec field for field; unknown keys are
rejected with the offending JSON path so authoring mistakes surface instead
of silently acquiring defaults.  Angles are radians; disturbance bounds are
degrees/second (converted here).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dubins import Pose
from .dynamics import ControlBounds, separation
from .mpc import MpcMode, MpcWeights
from .sim import (
    DISTURBANCE_NONE,
    DISTURBANCE_UNIFORM,
    Disturbance,
    MonteCarloReport,
    ScenarioSpec,
    SimTrace,
    metrics,
)

DEG = math.pi / 180.0

CSV_HEADER = "t,own_x,own_y,own_heading,intr_x,intr_y,intr_heading,v,u,separation,solver_status,solve_ms"

_MODES = {m.value: m for m in MpcMode}


class ScenarioError(ValueError):
    """Scenario document rejected; `path` names the offending JSON node."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require_keys(doc: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> None:
    if not isinstance(doc, dict):
        raise ScenarioError(path, f"expected an object, got {type(doc).__name__}")
    for key in required:
        if key not in doc:
            raise ScenarioError(f"{path}.{key}" if path else key, "missing required key")
    for key in doc:
        if key not in required and key not in optional:
            raise ScenarioError(f"{path}.{key}" if path else key, "unknown key")


def _number(doc, path: str) -> float:
    if isinstance(doc, bool) or not isinstance(doc, (int, float)):
        raise ScenarioError(path, f"expected a number, got {type(doc).__name__}")
    value = float(doc)
    if not math.isfinite(value):
        raise ScenarioError(path, "must be finite")
    return value


def _integer(doc, path: str) -> int:
    if isinstance(doc, bool) or not isinstance(doc, int):
        raise ScenarioError(path, f"expected an integer, got {type(doc).__name__}")
    return doc


def _pose(doc, path: str) -> Pose:
    if not isinstance(doc, list) or len(doc) != 3:
        raise ScenarioError(path, "expected [x, y, heading]")
    return Pose(*(_number(v, f"{path}[{i}]") for i, v in enumerate(doc)))


def _pair(doc, path: str) -> tuple[float, float]:
    if not isinstance(doc, list) or len(doc) != 2:
        raise ScenarioError(path, "expected [min, max]")
    return _number(doc[0], f"{path}[0]"), _number(doc[1], f"{path}[1]")


def _triple(doc, path: str) -> tuple[float, float, float]:
    if not isinstance(doc, list) or len(doc) != 3:
        raise ScenarioError(path, "expected three diagonal entries")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(doc))  # type: ignore[return-value]


def _bounds(doc, path: str) -> ControlBounds:
    _require_keys(doc, path, ("v", "u"))
    v = _pair(doc["v"], f"{path}.v")
    u = _pair(doc["u"], f"{path}.u")
    try:
        return ControlBounds(v_min=v[0], v_max=v[1], u_min=u[0], u_max=u[1])
    except ValueError as err:
        raise ScenarioError(path, str(err)) from err


def _aircraft(doc, path: str) -> tuple[Pose, Pose, ControlBounds]:
    _require_keys(doc, path, ("start", "target", "bounds"))
    return (
        _pose(doc["start"], f"{path}.start"),
        _pose(doc["target"], f"{path}.target"),
        _bounds(doc["bounds"], f"{path}.bounds"),
    )


def parse_scenario(doc: dict) -> ScenarioSpec:
    """Validate a scenario document into a ScenarioSpec (strict schema)."""
    _require_keys(doc, "", ("ownship", "intruder", "mpc", "disturbance", "sim"))
    own_start, own_target, own_bounds = _aircraft(doc["ownship"], "ownship")
    intr_start, intr_target, intr_bounds = _aircraft(doc["intruder"], "intruder")

    mpc = doc["mpc"]
    _require_keys(mpc, "mpc", ("N", "N_r", "Q", "Qf", "R", "rho", "mode"))
    n = _integer(mpc["N"], "mpc.N")
    n_r = _integer(mpc["N_r"], "mpc.N_r")
    if n < 1:
        raise ScenarioError("mpc.N", "horizon must be >= 1")
    if not 0 <= n_r <= n:
        raise ScenarioError("mpc.N_r", f"robust horizon must lie in [0, {n}]")
    rho = _number(mpc["rho"], "mpc.rho")
    mode_name = mpc["mode"]
    if mode_name not in _MODES:
        raise ScenarioError("mpc.mode", f"expected one of {sorted(_MODES)}, got {mode_name!r}")
    mode = _MODES[mode_name]
    if rho <= 0 and mode is not MpcMode.UNCONSTRAINED:
        raise ScenarioError("mpc.rho", "minimum separation must be positive")
    try:
        weights = MpcWeights.from_diagonals(
            _triple(mpc["Q"], "mpc.Q"), _triple(mpc["Qf"], "mpc.Qf"), _number(mpc["R"], "mpc.R")
        )
    except ValueError as err:
        raise ScenarioError("mpc", str(err)) from err

    dist = doc["disturbance"]
    _require_keys(dist, "disturbance", ("kind",), ("lo_deg_s", "hi_deg_s"))
    kind = dist["kind"]
    if kind not in (DISTURBANCE_NONE, DISTURBANCE_UNIFORM):
        raise ScenarioError("disturbance.kind", f"expected 'none' or 'uniform', got {kind!r}")
    if kind == DISTURBANCE_UNIFORM:
        if "lo_deg_s" not in dist or "hi_deg_s" not in dist:
            raise ScenarioError("disturbance", "uniform disturbance needs lo_deg_s and hi_deg_s")
        lo = _number(dist["lo_deg_s"], "disturbance.lo_deg_s") * DEG
        hi = _number(dist["hi_deg_s"], "disturbance.hi_deg_s") * DEG
        if lo > hi:
            raise ScenarioError("disturbance.lo_deg_s", "lo_deg_s must not exceed hi_deg_s")
        disturbance = Disturbance(kind=kind, lo=lo, hi=hi)
    else:
        disturbance = Disturbance()

    sim = doc["sim"]
    _require_keys(sim, "sim", ("max_steps", "target_radius", "seed"))
    max_steps = _integer(sim["max_steps"], "sim.max_steps")
    if max_steps < 1:
        raise ScenarioError("sim.max_steps", "must be >= 1")
    target_radius = _number(sim["target_radius"], "sim.target_radius")
    if target_radius <= 0:
        raise ScenarioError("sim.target_radius", "must be positive")
    seed = _integer(sim["seed"], "sim.seed")

    try:
        return ScenarioSpec(
            own_start=own_start,
            own_target=own_target,
            target_radius=target_radius,
            intruder_start=intr_start,
            intruder_target=intr_target,
            own_bounds=own_bounds,
            intruder_bounds=intr_bounds,
            min_separation=rho,
            horizon=n,
            robust_horizon=n_r,
            weights=weights,
            mode=mode,
            disturbance=disturbance,
            max_steps=max_steps,
            rng_seed=seed,
        )
    except ValueError as err:
        raise ScenarioError("", str(err)) from err


def load_scenario(path) -> ScenarioSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ScenarioError("", f"not valid JSON: {err}") from err
    return parse_scenario(doc)


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def trace_to_csv(trace: SimTrace) -> str:
    """One row per applied step; floats carry 9 significant digits, LF endings.

    Every column except solve_ms is a deterministic function of the scenario
    and seed; solve_ms is measured wall time.
    """
    lines = [CSV_HEADER]
    for s in trace.steps:
        lines.append(
            ",".join(
                (
                    str(s.t),
                    _fmt(s.own.x),
                    _fmt(s.own.y),
                    _fmt(s.own.heading),
                    _fmt(s.intruder.x),
                    _fmt(s.intruder.y),
                    _fmt(s.intruder.heading),
                    _fmt(s.applied.speed),
                    _fmt(s.applied.angular_rate),
                    _fmt(s.separation),
                    s.solver_status,
                    _fmt(s.solve_seconds * 1000.0),
                )
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CsvMetrics:
    min_separation: float
    min_separation_time: int
    path_length: float
    violation_stages: int


def metrics_from_csv(text: str, rho: float, dt: float = 1.0) -> CsvMetrics:
    """Recompute the pose-derived metrics from an exported trace."""
    rows = text.strip().split("\n")
    if rows[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    seps = []
    ts = []
    speed_sum = 0.0
    for row in rows[1:]:
        cells = row.split(",")
        own = Pose(float(cells[1]), float(cells[2]), float(cells[3]))
        intr = Pose(float(cells[4]), float(cells[5]), float(cells[6]))
        seps.append(separation(own, intr))
        ts.append(int(cells[0]))
        speed_sum += float(cells[7])
    idx = int(np.argmin(seps))
    return CsvMetrics(
        min_separation=seps[idx],
        min_separation_time=ts[idx],
        path_length=dt * speed_sum,
        violation_stages=sum(1 for s in seps if s < rho),
    )


def summary_doc(trace: SimTrace) -> dict:
    """Deterministic per-run summary (no timing)."""
    m = metrics(trace)
    return {
        "mode": trace.spec.mode.value,
        "rho": trace.spec.min_separation,
        "steps": len(trace.steps),
        "arrived": trace.arrived,
        "terminal_status": trace.terminal_status,
        "metrics": m.as_dict(),
        "flagged_steps": sum(1 for s in trace.steps if s.flagged),
        "seed": trace.spec.rng_seed,
    }


def report_doc(report: MonteCarloReport) -> dict:
    """Deterministic Monte-Carlo report document."""
    runs = []
    for outcome in report.runs:
        entry: dict = {"index": outcome.index, "seed": outcome.seed}
        if outcome.trace is not None and outcome.trace.steps:
            entry.update(summary_doc(outcome.trace))
        if outcome.error is not None:
            entry["error"] = outcome.error
        runs.append(entry)
    agg = report.aggregate
    return {
        "runs": runs,
        "nominal": summary_doc(report.nominal),
        "aggregate": {
            "min_min_separation": agg.min_min_separation,
            "violation_runs": agg.violation_runs,
            "path_length": {
                "min": agg.path_length_min,
                "mean": agg.path_length_mean,
                "max": agg.path_length_max,
            },
            "terminal_spread": {
                "max": agg.terminal_spread_max,
                "mean": agg.terminal_spread_mean,
                "common_step_index": agg.common_step_index,
            },
        },
    }


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
