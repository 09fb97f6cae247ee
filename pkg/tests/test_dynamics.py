"""Tests for the Euler plant, branch indexing, and scenario trees."""

import itertools
import math

import numpy as np
import pytest

from intentmpc import (
    BRANCH_LOWER,
    BRANCH_NOMINAL,
    BRANCH_UPPER,
    ControlBounds,
    ControlInput,
    ControlSchedule,
    Pose,
    TreeShape,
    branch_index,
    build_scenario_tree,
    control_schedule,
    rollout,
    sample_pose,
    shortest_path,
    step,
)

INTRUDER_BOUNDS = ControlBounds(v_min=10.0, v_max=10.0, u_min=-0.07, u_max=0.07)


class TestStep:
    def test_straight(self):
        out = step(Pose(0, 0, 0), ControlInput(10.0, 0.0), 1.0)
        assert (out.x, out.y, out.heading) == (10.0, 0.0, 0.0)

    def test_turn_uses_pre_update_heading(self):
        out = step(Pose(0, 0, 0), ControlInput(10.0, 0.07), 1.0)
        assert (out.x, out.y, out.heading) == (10.0, 0.0, 0.07)

    def test_north_with_negative_rate(self):
        out = step(Pose(0, 0, math.pi / 2), ControlInput(8.0, -0.1), 1.0)
        assert out.x == pytest.approx(0.0, abs=1e-15)
        assert out.y == pytest.approx(8.0)
        assert out.heading == pytest.approx(math.pi / 2 - 0.1)

    def test_closed_form_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x, y, h = rng.uniform(-100, 100, 3)
            v, u, dt = rng.uniform(1, 20), rng.uniform(-0.1, 0.1), rng.uniform(0.1, 2)
            out = step(Pose(x, y, h), ControlInput(v, u), dt)
            assert out.x == x + dt * v * math.cos(h)
            assert out.y == y + dt * v * math.sin(h)
            assert out.heading == h + dt * u


class TestRollout:
    def test_three_straight_steps(self):
        poses = rollout(Pose(0, 0, 0), [ControlInput(10.0, 0.0)] * 3, 1.0)
        assert [p.x for p in poses] == [0.0, 10.0, 20.0, 30.0]
        assert all(p.y == 0.0 for p in poses)

    def test_constant_rate_heading_accumulates(self):
        eps = 1e-3
        poses = rollout(Pose(0, 0, 0), [ControlInput(10.0, eps)] * 40, 1.0)
        assert poses[-1].heading == pytest.approx(40 * eps, rel=1e-12)

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            rollout(Pose(0, 0, 0), [], 1.0)

    def test_dubins_schedule_reaches_sampled_headings(self):
        # Integrating the schedule reproduces the continuous-path heading at
        # every step boundary (cross-check against sample_pose).
        start, goal = Pose(0, 0, 0.3), Pose(600, -300, -1.0)
        path = shortest_path(start, goal, 142.857)
        sched = control_schedule(path, 10.0, 1.0)
        inputs = [ControlInput(10.0, r) for r in sched.angular_rates]
        poses = rollout(start, inputs, 1.0)
        for k, pose in enumerate(poses):
            expected = sample_pose(path, min(k * 10.0, path.total_length)).heading
            assert pose.heading == pytest.approx(expected, abs=1e-9)


class TestBranchIndex:
    def test_first_scenario_all_upper(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=30)
        assert [branch_index(1, k, shape) for k in range(3)] == [BRANCH_UPPER] * 3

    def test_last_scenario_all_nominal(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=30)
        assert [branch_index(27, k, shape) for k in range(3)] == [BRANCH_NOMINAL] * 3

    def test_beyond_robust_horizon_nominal(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=30)
        for j in range(1, 28):
            assert branch_index(j, 5, shape) == BRANCH_NOMINAL

    def test_covers_all_tuples_once(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=30)
        tuples = {tuple(branch_index(j, k, shape) for k in range(3)) for j in range(1, 28)}
        assert tuples == set(itertools.product((0, 1, 2), repeat=3))

    def test_range_checks(self):
        shape = TreeShape(m=3, robust_horizon=2, horizon=10)
        with pytest.raises(ValueError):
            branch_index(0, 0, shape)
        with pytest.raises(ValueError):
            branch_index(10, 0, shape)
        with pytest.raises(ValueError):
            branch_index(1, 10, shape)


class TestScenarioTree:
    def _zero_schedule(self):
        return ControlSchedule(speed=10.0, dt=1.0, angular_rates=(0.0,) * 40)

    def test_degenerate_all_nominal(self):
        shape = TreeShape(m=3, robust_horizon=0, horizon=10)
        tree = build_scenario_tree(Pose(0, 0, 0), self._zero_schedule(), 0, INTRUDER_BOUNDS, shape, 1.0)
        assert len(tree.control_sequences) == 1
        assert all(c.angular_rate == 0.0 for c in tree.control_sequences[0])

    def test_branch_rates_and_straight_scenario(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=10)
        tree = build_scenario_tree(Pose(0, 0, 0), self._zero_schedule(), 0, INTRUDER_BOUNDS, shape, 1.0)
        assert len(tree.control_sequences) == 27
        # Scenario 1 turns at the upper rate for 3 steps, then nominal (0).
        rates = [c.angular_rate for c in tree.control_sequences[0]]
        assert rates[:3] == [0.07] * 3 and all(r == 0.0 for r in rates[3:])
        # Scenario 27 is all-nominal: straight throughout.
        assert all(c.angular_rate == 0.0 for c in tree.control_sequences[26])
        # Hand rollout of scenario 1 agrees with the stored trajectory.
        expected = rollout(Pose(0, 0, 0), list(tree.control_sequences[0]), 1.0)
        assert tree.trajectories[0] == expected

    def test_covers_branch_tuples_exactly_once(self):
        shape = TreeShape(m=3, robust_horizon=3, horizon=6)
        tree = build_scenario_tree(Pose(0, 0, 0), self._zero_schedule(), 0, INTRUDER_BOUNDS, shape, 1.0)
        seen = set()
        for seq in tree.control_sequences:
            key = tuple(c.angular_rate for c in seq[:3])
            assert key not in seen
            seen.add(key)
        assert len(seen) == 27

    def test_prefix_property(self):
        # Controls agree at stage k iff branch tuples agree through stage k.
        shape = TreeShape(m=3, robust_horizon=3, horizon=6)
        sched = ControlSchedule(speed=10.0, dt=1.0, angular_rates=(0.01, 0.02, 0.03, 0.04, 0.05, 0.06))
        tree = build_scenario_tree(Pose(0, 0, 0), sched, 0, INTRUDER_BOUNDS, shape, 1.0)
        for a in range(1, 28):
            for b in range(a + 1, 28):
                agree = True
                for k in range(shape.horizon):
                    ba, bb = branch_index(a, k, shape), branch_index(b, k, shape)
                    agree = agree and ba == bb
                    same_controls = tree.control_sequences[a - 1][: k + 1] == tree.control_sequences[b - 1][: k + 1]
                    assert same_controls == agree

    def test_tree_sizes(self):
        for n_r in (0, 1, 2, 3):
            shape = TreeShape(m=3, robust_horizon=n_r, horizon=8)
            tree = build_scenario_tree(Pose(0, 0, 0), self._zero_schedule(), 0, INTRUDER_BOUNDS, shape, 1.0)
            assert len(tree.trajectories) == 3**n_r

    def test_speeds_pinned_at_max(self):
        shape = TreeShape(m=3, robust_horizon=2, horizon=8)
        tree = build_scenario_tree(Pose(0, 0, 0), self._zero_schedule(), 3, INTRUDER_BOUNDS, shape, 1.0)
        for seq in tree.control_sequences:
            assert all(c.speed == INTRUDER_BOUNDS.v_max for c in seq)

    def test_nominal_indexes_absolute_time(self):
        sched = ControlSchedule(speed=10.0, dt=1.0, angular_rates=(0.01, 0.02, 0.03))
        shape = TreeShape(m=3, robust_horizon=0, horizon=5)
        tree = build_scenario_tree(Pose(0, 0, 0), sched, 2, INTRUDER_BOUNDS, shape, 1.0)
        rates = [c.angular_rate for c in tree.control_sequences[0]]
        # Index 2 of the schedule first, then zeros past the end.
        assert rates == [0.03, 0.0, 0.0, 0.0, 0.0]
