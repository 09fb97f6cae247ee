"""Discrete-time planar aircraft kinematics and intruder scenario trees.

The plant is the forward-Euler unicycle: position advances along the current
heading, heading advances by the angular rate.  Intruder uncertainty is
enumerated as a tree of control sequences branching over
{upper rate, lower rate, nominal rate} for the first few stages (the robust
horizon) and following the nominal schedule afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dubins import ControlSchedule, Pose

BRANCH_UPPER = 0
BRANCH_LOWER = 1
BRANCH_NOMINAL = 2


@dataclass(frozen=True)
class ControlInput:
    """Linear speed and angular rate applied over one step."""

    speed: float
    angular_rate: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.speed) and math.isfinite(self.angular_rate)):
            raise ValueError(f"control input must be finite, got {(self.speed, self.angular_rate)}")


@dataclass(frozen=True)
class ControlBounds:
    """Box bounds on speed and angular rate."""

    v_min: float
    v_max: float
    u_min: float
    u_max: float

    def __post_init__(self) -> None:
        if not 0.0 < self.v_min <= self.v_max:
            raise ValueError(f"need 0 < v_min <= v_max, got [{self.v_min}, {self.v_max}]")
        if not self.u_min <= self.u_max:
            raise ValueError(f"need u_min <= u_max, got [{self.u_min}, {self.u_max}]")

    def clamp(self, inp: ControlInput) -> ControlInput:
        return ControlInput(
            speed=min(max(inp.speed, self.v_min), self.v_max),
            angular_rate=min(max(inp.angular_rate, self.u_min), self.u_max),
        )


@dataclass(frozen=True)
class TreeShape:
    """Branching layout: m branches per stage over the robust horizon."""

    m: int
    robust_horizon: int
    horizon: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"branch count must be >= 1, got {self.m}")
        # robust_horizon == 0 is the degenerate single-scenario (nominal) tree.
        if not 0 <= self.robust_horizon <= self.horizon:
            raise ValueError(
                f"need 0 <= robust_horizon <= horizon, got {self.robust_horizon}, {self.horizon}"
            )

    @property
    def scenario_count(self) -> int:
        return self.m**self.robust_horizon


@dataclass(frozen=True)
class ScenarioTree:
    """All intruder control sequences and their predicted trajectories.

    Scenarios sharing a branch prefix share the control prefix, so
    non-anticipativity holds by construction.
    """

    shape: TreeShape
    control_sequences: tuple[tuple[ControlInput, ...], ...]
    trajectories: tuple[tuple[Pose, ...], ...]


def step(state: Pose, inp: ControlInput, dt: float) -> Pose:
    """One forward-Euler update; heading is left unwrapped."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return Pose(
        x=state.x + dt * inp.speed * math.cos(state.heading),
        y=state.y + dt * inp.speed * math.sin(state.heading),
        heading=state.heading + dt * inp.angular_rate,
    )


def rollout(initial: Pose, inputs: list[ControlInput] | tuple[ControlInput, ...], dt: float) -> tuple[Pose, ...]:
    """Iterate `step`; element 0 is the initial pose."""
    if len(inputs) == 0:
        raise ValueError("rollout requires at least one input")
    poses = [initial]
    for inp in inputs:
        poses.append(step(poses[-1], inp, dt))
    return tuple(poses)


def branch_index(j: int, k: int, shape: TreeShape) -> int:
    """Branch taken by scenario j (1-based) at stage k.

    Over the robust horizon this is digit k of j-1 in base m, most significant
    first; afterwards every scenario follows the nominal branch.
    """
    if not 1 <= j <= shape.scenario_count:
        raise ValueError(f"scenario id {j} outside 1..{shape.scenario_count}")
    if not 0 <= k < shape.horizon:
        raise ValueError(f"stage {k} outside 0..{shape.horizon - 1}")
    if k >= shape.robust_horizon:
        return BRANCH_NOMINAL
    return (math.ceil(j / shape.m ** (shape.robust_horizon - 1 - k)) - 1) % shape.m


def build_scenario_tree(
    intruder_now: Pose,
    nominal_schedule: ControlSchedule,
    t: int,
    bounds: ControlBounds,
    shape: TreeShape,
    dt: float,
) -> ScenarioTree:
    """Enumerate intruder futures rooted at its current pose at step t.

    Branches are upper rate / lower rate / nominal-schedule rate; speed is
    pinned at the intruder's maximum everywhere.
    """
    if shape.robust_horizon > 0 and shape.m != 3:
        raise ValueError(f"branching is over {{upper, lower, nominal}}, so m must be 3, got {shape.m}")
    if t < 0:
        raise ValueError(f"absolute time must be >= 0, got {t}")

    sequences = []
    trajectories = []
    for j in range(1, shape.scenario_count + 1):
        controls = []
        for k in range(shape.horizon):
            branch = branch_index(j, k, shape)
            if branch == BRANCH_UPPER:
                rate = bounds.u_max
            elif branch == BRANCH_LOWER:
                rate = bounds.u_min
            else:
                rate = nominal_schedule.rate_at(t + k)
            controls.append(ControlInput(speed=bounds.v_max, angular_rate=rate))
        sequences.append(tuple(controls))
        trajectories.append(rollout(intruder_now, controls, dt))
    return ScenarioTree(shape=shape, control_sequences=tuple(sequences), trajectories=tuple(trajectories))


def separation(a: Pose, b: Pose) -> float:
    """Horizontal distance between two poses."""
    return math.hypot(a.x - b.x, a.y - b.y)
