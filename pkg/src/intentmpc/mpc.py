"""Receding-horizon transcription of the intent-aware avoidance problem.

The ownship's controls over the horizon are the only decision variables
(single shooting): states are eliminated by rolling the Euler model forward,
so the NLP has box bounds on controls plus one separation inequality per
intruder scenario and stage.  Four controller modes share the transcription
and differ only in how the intruder is predicted:

* scenario-tree: branch over {upper, lower, nominal} intruder rates for the
  robust horizon (the robust controller);
* classic: single nominal-schedule prediction;
* no-intent: single straight-line prediction (nominal rates zeroed);
* unconstrained: no separation constraints at all (nominal-path baseline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dubins import ControlSchedule, Pose
from .dynamics import ControlBounds, ControlInput, ScenarioTree, TreeShape, build_scenario_tree, rollout
from .solver import NlpProblem, SolverConfig, SolverResult, solve

TWO_PI = 2.0 * math.pi


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Elementwise reduction to (-pi, pi]."""
    w = np.asarray(angles, dtype=float) % TWO_PI
    return np.where(w > math.pi, w - TWO_PI, w)


class MpcMode(Enum):
    SCENARIO_TREE = "scenario-tree"
    CLASSIC = "classic"
    NO_INTENT = "no-intent"
    UNCONSTRAINED = "unconstrained"


@dataclass(frozen=True)
class MpcWeights:
    """Quadratic tracking weights: 3x3 stage/terminal matrices over
    (x, y, heading) error and a scalar penalty on angular-rate changes."""

    state_weight: np.ndarray
    terminal_weight: np.ndarray
    rate_smoothing: float

    def __post_init__(self) -> None:
        q = np.asarray(self.state_weight, dtype=float)
        qf = np.asarray(self.terminal_weight, dtype=float)
        for name, m in (("state_weight", q), ("terminal_weight", qf)):
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3")
            if not np.allclose(m, m.T, atol=1e-12):
                raise ValueError(f"{name} must be symmetric")
        if np.min(np.linalg.eigvalsh(q)) < -1e-12:
            raise ValueError("state_weight must be positive semidefinite")
        if np.min(np.linalg.eigvalsh(qf)) <= 0.0:
            raise ValueError("terminal_weight must be positive definite")
        if not self.rate_smoothing > 0.0:
            raise ValueError("rate_smoothing must be positive")
        object.__setattr__(self, "state_weight", q)
        object.__setattr__(self, "terminal_weight", qf)

    @staticmethod
    def from_diagonals(q_diag, qf_diag, rate_smoothing: float) -> "MpcWeights":
        return MpcWeights(np.diag(np.asarray(q_diag, dtype=float)),
                          np.diag(np.asarray(qf_diag, dtype=float)),
                          float(rate_smoothing))


# Position-dominant tracking with terminal heading alignment; tunable per
# scenario, not a claim about any reference data.
DEFAULT_WEIGHTS = MpcWeights.from_diagonals((0.01, 0.01, 0.0), (1.0, 1.0, 10.0), 100.0)


@dataclass(frozen=True)
class MpcConfig:
    horizon: int
    robust_horizon: int
    dt: float
    min_separation: float
    weights: MpcWeights
    own_bounds: ControlBounds
    intruder_bounds: ControlBounds
    mode: MpcMode
    target: Pose
    solver: SolverConfig = SolverConfig()

    def __post_init__(self) -> None:
        if not 0 <= self.robust_horizon <= self.horizon:
            raise ValueError(f"need 0 <= robust_horizon <= horizon, got {self.robust_horizon}, {self.horizon}")
        if self.mode is not MpcMode.UNCONSTRAINED and not self.min_separation > 0.0:
            raise ValueError("min_separation must be positive in constrained modes")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")


@dataclass
class MpcSolution:
    first_input: ControlInput
    own_predicted: tuple[Pose, ...]
    intruder_scenarios: ScenarioTree
    solver: SolverResult
    cost_value: float
    controls: np.ndarray  # optimal decision vector, kept for warm starting


class _SingleShooting:
    """Vectorized states, cost, and derivatives of the ownship rollout.

    Decision vector layout: z = (u_0..u_{N-1}, v_0..v_{N-1}).  Closed forms
    follow from the Euler model being a double cumulative sum: headings are
    cumsums of rates, positions are cumsums of heading-projected speeds.
    """

    def __init__(self, own_now: Pose, config: MpcConfig):
        self.n = config.horizon
        self.dt = config.dt
        self.start = own_now
        self.target = config.target
        self.weights = config.weights
        self._memo_key: bytes | None = None
        self._memo: tuple | None = None

    def states(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Ownship (x, y, heading) arrays over stages 0..N."""
        key = z.tobytes()
        if key == self._memo_key:
            return self._memo  # type: ignore[return-value]
        n, dt = self.n, self.dt
        u, v = z[:n], z[n:]
        sigma = np.empty(n + 1)
        sigma[0] = self.start.heading
        sigma[1:] = self.start.heading + dt * np.cumsum(u)
        cos_s, sin_s = np.cos(sigma[:n]), np.sin(sigma[:n])
        x = np.empty(n + 1)
        y = np.empty(n + 1)
        x[0], y[0] = self.start.x, self.start.y
        x[1:] = self.start.x + dt * np.cumsum(v * cos_s)
        y[1:] = self.start.y + dt * np.cumsum(v * sin_s)
        self._memo_key = key
        self._memo = (x, y, sigma)
        return x, y, sigma

    def _errors(self, z: np.ndarray) -> np.ndarray:
        x, y, sigma = self.states(z)
        return np.column_stack((x - self.target.x, y - self.target.y, wrap_angles(sigma - self.target.heading)))

    def objective(self, z: np.ndarray) -> float:
        n = self.n
        e = self._errors(z)
        q, qf, r = self.weights.state_weight, self.weights.terminal_weight, self.weights.rate_smoothing
        stage = float(np.einsum("ki,ij,kj->", e[:n], q, e[:n]))
        terminal = float(e[n] @ qf @ e[n])
        du = np.diff(z[:n])
        return stage + terminal + r * float(np.dot(du, du))

    def state_gradient_to_controls(self, z: np.ndarray, lam: np.ndarray) -> np.ndarray:
        """Pull a per-stage state gradient lam (N+1, 3) back to the controls.

        Uses the cumulative-sum structure: the sensitivity of x_k to u_j is
        -dt^2 * sum_{j<i<k} v_i sin(sigma_i), and similarly for y with +cos.
        """
        n, dt = self.n, self.dt
        u, v = z[:n], z[n:]
        _, _, sigma = self.states(z)
        cos_s, sin_s = np.cos(sigma[:n]), np.sin(sigma[:n])

        a = np.concatenate(([0.0], np.cumsum(v * sin_s)))  # a[k] = sum_{i<k} v_i sin sigma_i
        b = np.concatenate(([0.0], np.cumsum(v * cos_s)))

        def suffix(arr: np.ndarray) -> np.ndarray:
            # suffix[j] = sum over stages k > j (j = 0..N-1)
            return np.cumsum(arr[::-1])[::-1][1:]

        lx, ly, ls = lam[:, 0], lam[:, 1], lam[:, 2]
        sx1, sy1, ss1 = suffix(lx), suffix(ly), suffix(ls)
        sxa, syb = suffix(lx * a), suffix(ly * b)

        gu = -dt * dt * (sxa - a[1:] * sx1) + dt * dt * (syb - b[1:] * sy1) + dt * ss1
        gv = dt * (cos_s * sx1 + sin_s * sy1)
        return np.concatenate((gu, gv))

    def objective_grad(self, z: np.ndarray) -> np.ndarray:
        n = self.n
        e = self._errors(z)
        q, qf, r = self.weights.state_weight, self.weights.terminal_weight, self.weights.rate_smoothing
        lam = np.empty((n + 1, 3))
        lam[:n] = 2.0 * e[:n] @ q
        lam[n] = 2.0 * e[n] @ qf
        g = self.state_gradient_to_controls(z, lam)
        du = np.diff(z[:n])
        g[: n - 1] -= 2.0 * r * du
        g[1:n] += 2.0 * r * du
        return g

    def position_jacobians(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Dense Jacobians of x and y (stages 0..N) w.r.t. z, each (N+1, 2N)."""
        n, dt = self.n, self.dt
        v = z[n:]
        _, _, sigma = self.states(z)
        cos_s, sin_s = np.cos(sigma[:n]), np.sin(sigma[:n])
        a = np.concatenate(([0.0], np.cumsum(v * sin_s)))
        b = np.concatenate(([0.0], np.cumsum(v * cos_s)))

        later = np.arange(n)[None, :] < np.arange(n + 1)[:, None]  # [k, j] = (j < k)
        jx = np.empty((n + 1, 2 * n))
        jy = np.empty((n + 1, 2 * n))
        jx[:, :n] = -dt * dt * (a[:, None] - a[None, 1:]) * later
        jx[:, n:] = dt * cos_s[None, :] * later
        jy[:, :n] = dt * dt * (b[:, None] - b[None, 1:]) * later
        jy[:, n:] = dt * sin_s[None, :] * later
        return jx, jy


def _prediction_tree(intruder_now: Pose, t: int, intent_schedule: ControlSchedule, config: MpcConfig) -> ScenarioTree:
    if config.mode is MpcMode.SCENARIO_TREE:
        shape = TreeShape(m=3, robust_horizon=config.robust_horizon, horizon=config.horizon)
        schedule = intent_schedule
    else:
        # Single-scenario prediction; no-intent replaces the schedule with an
        # empty one, which reads as all-zero rates (straight-line intruder).
        shape = TreeShape(m=3, robust_horizon=0, horizon=config.horizon)
        if config.mode is MpcMode.NO_INTENT:
            schedule = ControlSchedule(speed=intent_schedule.speed, dt=intent_schedule.dt, angular_rates=())
        else:
            schedule = intent_schedule
    return build_scenario_tree(intruder_now, schedule, t, config.intruder_bounds, shape, config.dt)


def build_problem(
    own_now: Pose,
    intruder_now: Pose,
    t: int,
    intent_schedule: ControlSchedule,
    config: MpcConfig,
) -> tuple[NlpProblem, ScenarioTree]:
    """Transcribe one receding-horizon instance at absolute step t."""
    if t < 0:
        raise ValueError(f"absolute step must be >= 0, got {t}")
    n = config.horizon
    tree = _prediction_tree(intruder_now, t, intent_schedule, config)
    shoot = _SingleShooting(own_now, config)

    ob = config.own_bounds
    lower = np.concatenate((np.full(n, ob.u_min), np.full(n, ob.v_min)))
    upper = np.concatenate((np.full(n, ob.u_max), np.full(n, ob.v_max)))

    if config.mode is MpcMode.UNCONSTRAINED:
        return (
            NlpProblem(
                dimension=2 * n,
                objective=shoot.objective,
                objective_grad=shoot.objective_grad,
                lower=lower,
                upper=upper,
            ),
            tree,
        )

    # Intruder positions per scenario and stage, fixed for this instance.
    intr_x = np.array([[p.x for p in traj] for traj in tree.trajectories])
    intr_y = np.array([[p.y for p in traj] for traj in tree.trajectories])
    rho_sq = config.min_separation**2

    def constraints(z: np.ndarray) -> np.ndarray:
        x, y, _ = shoot.states(z)
        return (rho_sq - (x[None, :] - intr_x) ** 2 - (y[None, :] - intr_y) ** 2).ravel()

    def constraints_jac(z: np.ndarray) -> np.ndarray:
        x, y, _ = shoot.states(z)
        jx, jy = shoot.position_jacobians(z)
        dx = x[None, :] - intr_x  # (M, N+1)
        dy = y[None, :] - intr_y
        jac = -2.0 * (dx[:, :, None] * jx[None, :, :] + dy[:, :, None] * jy[None, :, :])
        return jac.reshape(-1, 2 * n)

    def constraints_weighted_grad(z: np.ndarray, w: np.ndarray) -> np.ndarray:
        # J^T w without forming J: aggregate the weights into one per-stage
        # position gradient, then pull it back through the rollout.
        x, y, _ = shoot.states(z)
        w2 = w.reshape(intr_x.shape)
        lam = np.zeros((n + 1, 3))
        lam[:, 0] = -2.0 * np.einsum("jk,jk->k", w2, x[None, :] - intr_x)
        lam[:, 1] = -2.0 * np.einsum("jk,jk->k", w2, y[None, :] - intr_y)
        return shoot.state_gradient_to_controls(z, lam)

    problem = NlpProblem(
        dimension=2 * n,
        objective=shoot.objective,
        objective_grad=shoot.objective_grad,
        lower=lower,
        upper=upper,
        constraints=constraints,
        constraints_jac=constraints_jac,
        constraints_weighted_grad=constraints_weighted_grad,
    )
    return problem, tree


def cold_start(config: MpcConfig) -> np.ndarray:
    n = config.horizon
    return np.concatenate((np.zeros(n), np.full(n, config.own_bounds.v_max)))


def shift_warm_start(previous: np.ndarray, horizon: int) -> np.ndarray:
    """Drop stage 0 and duplicate the final stage for both control channels."""
    u, v = previous[:horizon], previous[horizon:]
    return np.concatenate((u[1:], u[-1:], v[1:], v[-1:]))


def solve_step(
    own_now: Pose,
    intruder_now: Pose,
    t: int,
    intent_schedule: ControlSchedule,
    config: MpcConfig,
    warm: MpcSolution | None = None,
) -> MpcSolution:
    """Solve one receding-horizon instance and package the applied action."""
    problem, tree = build_problem(own_now, intruder_now, t, intent_schedule, config)
    z0 = shift_warm_start(warm.controls, config.horizon) if warm is not None else cold_start(config)
    result = solve(problem, z0, config.solver)

    z = result.z_star
    n = config.horizon
    first = config.own_bounds.clamp(ControlInput(speed=float(z[n]), angular_rate=float(z[0])))
    inputs = [ControlInput(speed=float(z[n + k]), angular_rate=float(z[k])) for k in range(n)]
    predicted = rollout(own_now, inputs, config.dt)
    return MpcSolution(
        first_input=first,
        own_predicted=predicted,
        intruder_scenarios=tree,
        solver=result,
        cost_value=result.objective_value,
        controls=z,
    )

