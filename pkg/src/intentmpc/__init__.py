"""Intent-aware scenario-tree MPC for two-aircraft horizontal collision avoidance."""

from .dubins import (
    ControlSchedule,
    DubinsPath,
    DubinsWord,
    Pose,
    control_schedule,
    sample_pose,
    shortest_path,
    solve_word,
    wrap_angle,
)
from .dynamics import (
    BRANCH_LOWER,
    BRANCH_NOMINAL,
    BRANCH_UPPER,
    ControlBounds,
    ControlInput,
    ScenarioTree,
    TreeShape,
    branch_index,
    build_scenario_tree,
    rollout,
    separation,
    step,
)
from .mpc import (
    DEFAULT_WEIGHTS,
    MpcConfig,
    MpcMode,
    MpcSolution,
    MpcWeights,
    build_problem,
    solve_step,
)
from .sim import (
    Disturbance,
    MonteCarloReport,
    ScenarioSpec,
    SimTrace,
    SimulationAborted,
    metrics,
    run_closed_loop,
    run_monte_carlo,
)
from .solver import (
    NlpProblem,
    NumericalDomainError,
    SolverConfig,
    SolverResult,
    check_gradient,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BRANCH_LOWER",
    "BRANCH_NOMINAL",
    "BRANCH_UPPER",
    "ControlBounds",
    "ControlInput",
    "ControlSchedule",
    "DEFAULT_WEIGHTS",
    "Disturbance",
    "DubinsPath",
    "DubinsWord",
    "MonteCarloReport",
    "MpcConfig",
    "MpcMode",
    "MpcSolution",
    "MpcWeights",
    "NlpProblem",
    "NumericalDomainError",
    "Pose",
    "ScenarioSpec",
    "ScenarioTree",
    "SimTrace",
    "SimulationAborted",
    "SolverConfig",
    "SolverResult",
    "TreeShape",
    "branch_index",
    "build_problem",
    "build_scenario_tree",
    "check_gradient",
    "control_schedule",
    "metrics",
    "rollout",
    "run_closed_loop",
    "run_monte_carlo",
    "sample_pose",
    "separation",
    "shortest_path",
    "solve",
    "solve_step",
    "solve_word",
    "step",
    "wrap_angle",
]
