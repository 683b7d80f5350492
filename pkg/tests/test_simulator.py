import math

import pytest

from sharednav.gridmap import WorldPoint
from sharednav.potential_field import FieldCache
from sharednav.pseudo_user import Directions, InputCondition
from sharednav.shared_controller import ControlMode
from sharednav.simulator import SimParams, SimState, run_trial, step

from conftest import make_grid


class TestStep:
    def test_free_motion(self, open5):
        st = SimState(position=WorldPoint(2.5, 2.5))
        step(st, (0.3, 0.0), 0.05, open5)
        assert st.position.x == pytest.approx(2.515)
        assert st.path_length == pytest.approx(0.015)
        assert st.clock == pytest.approx(0.05)
        assert st.collisions == 0

    def test_rest(self, open5):
        st = SimState(position=WorldPoint(2.5, 2.5))
        step(st, (0.0, 0.0), 0.05, open5)
        assert st.position == WorldPoint(2.5, 2.5)
        assert st.path_length == 0.0
        assert st.clock == pytest.approx(0.05)

    def test_collision_debounce_and_slide(self):
        g = make_grid([
            ".....",
            ".....",
            "..#..",
            ".....",
            ".....",
        ])
        # push into the obstacle from the left with an upward component
        st = SimState(position=WorldPoint(1.9, 2.5))
        for _ in range(10):
            step(st, (0.3, 0.1), 0.1, g)
        assert st.collisions == 1  # one episode despite repeated contact
        assert st.position.y > 2.5  # slid upward along the wall

    def test_collision_resets_after_free_step(self):
        g = make_grid([
            ".....",
            ".....",
            "..#..",
            ".....",
            ".....",
        ])
        st = SimState(position=WorldPoint(1.95, 2.5))
        step(st, (0.3, 0.0), 1.0, g)  # blocked
        assert st.collisions == 1 and st.colliding
        step(st, (-0.3, 0.0), 1.0, g)  # back away
        assert not st.colliding
        step(st, (0.3, 0.0), 1.0, g)  # free approach back to 1.95
        step(st, (0.3, 0.0), 1.0, g)  # hit again: a new episode
        assert st.collisions == 2

    def test_map_edge_blocks(self, open5):
        st = SimState(position=WorldPoint(0.1, 2.5))
        step(st, (-0.3, 0.0), 1.0, open5)
        assert st.position.x == pytest.approx(0.1)
        assert st.collisions == 1

    def test_bad_dt(self, open5):
        with pytest.raises(ValueError):
            step(SimState(position=WorldPoint(2.5, 2.5)), (0.0, 0.0), 0.0, open5)


class TestRunTrial:
    def _params(self, **kw):
        defaults = dict(timeout=60.0)
        defaults.update(kw)
        return SimParams(**defaults)

    def test_ideal_direct_succeeds(self, open5):
        cond = InputCondition(Directions.ALL, 1.0, 1.0, ControlMode.DIRECT)
        r = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=1, params=self._params())
        assert r.success
        assert r.collisions == 0
        assert r.elapsed < 60.0

    def test_elapsed_is_step_multiple(self, open5):
        cond = InputCondition(Directions.ALL, 1.0, 1.0, ControlMode.DIRECT)
        p = self._params()
        r = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=1, params=p)
        steps = r.elapsed / p.dt
        assert abs(steps - round(steps)) < 1e-6

    def test_path_at_least_displacement(self, open5):
        cond = InputCondition(Directions.FOUR, 0.8, 1.0, ControlMode.DIRECT)
        r = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=3, params=self._params())
        goal = open5.cell_to_world((4, 4))
        if r.reached_goal:
            net = math.hypot(goal.x - 0.5, goal.y - 0.5) - self._params().goal_radius
            assert r.path_length >= net - 1e-9

    def test_deterministic(self, open5):
        cond = InputCondition(Directions.FOUR, 0.7, 1.0, ControlMode.SHARED)
        a = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=9, params=self._params())
        b = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=9, params=self._params())
        assert a == b

    def test_unreachable_goal_rejected(self):
        g = make_grid([
            "..#..",
            "..#..",
            "..#..",
            "..#..",
            "..#..",
        ])
        cond = InputCondition(Directions.ALL, 1.0, 1.0, ControlMode.DIRECT)
        with pytest.raises(ValueError, match="unreachable"):
            run_trial(g, WorldPoint(0.5, 2.5), (4, 2), cond, seed=0)

    def test_start_within_radius_is_instant_success(self, open5):
        cond = InputCondition(Directions.ALL, 1.0, 1.0, ControlMode.DIRECT)
        r = run_trial(open5, WorldPoint(2.4, 2.4), (2, 2), cond, seed=0, params=self._params())
        assert r.success
        assert r.elapsed == 0.0

    def test_debounce_stable_under_dt_halving(self):
        # collision episode counts differ by at most 1 when dt halves
        g = make_grid([
            "#####",
            "#...#",
            "#...#",
            "#...#",
            "#####",
        ])
        cond = InputCondition(Directions.FOUR, 0.5, 1.0, ControlMode.DIRECT)
        cache = FieldCache(g)
        counts = {}
        for dt in (0.05, 0.025):
            p = SimParams(dt=dt, timeout=30.0)
            r = run_trial(g, WorldPoint(1.5, 1.5), (3, 3), cond, seed=12, params=p, cache=cache)
            counts[dt] = r.collisions
        assert abs(counts[0.05] - counts[0.025]) <= 1

    def test_trajectory_recording(self, open5):
        cond = InputCondition(Directions.ALL, 1.0, 1.0, ControlMode.SHARED)
        traj = []
        p = self._params()
        r = run_trial(open5, WorldPoint(0.5, 0.5), (4, 4), cond, seed=1, params=p, trajectory=traj)
        assert len(traj) == round(r.elapsed / p.dt)
        assert traj[0].t == pytest.approx(p.dt)
