import math

import pytest

from sharednav.autonomy import UnreachableGoalError, autonomous_command
from sharednav.gridmap import WorldPoint
from sharednav.potential_field import FieldCache

from conftest import make_grid


class TestAutonomousCommand:
    def test_goal_due_east(self, open5):
        v = autonomous_command(open5, (4, 2), WorldPoint(0.5, 2.5), 0.3)
        assert v[0] == pytest.approx(0.3)
        assert v[1] == pytest.approx(0.0, abs=1e-15)

    def test_zero_at_goal(self, open5):
        assert autonomous_command(open5, (2, 2), WorldPoint(2.5, 2.5), 0.3) == (0.0, 0.0)

    def test_detour_around_wall(self):
        # wall across the middle with a gap at the top
        g = make_grid([
            "...#...",
            "...#...",
            ".......",
            "...#...",
            "...#...",
            "...#...",
            "...#...",
        ])
        # rows above: gap at y=4; goal west of the wall, robot east, due south of it
        v = autonomous_command(g, (1, 1), WorldPoint(5.5, 1.5), 0.3)
        assert v[1] > 0.0  # has to head north toward the gap

    def test_unreachable_goal(self):
        g = make_grid([
            "..#..",
            "..#..",
            "..#..",
            "..#..",
            "..#..",
        ])
        with pytest.raises(UnreachableGoalError):
            autonomous_command(g, (4, 2), WorldPoint(0.5, 2.5), 0.3)

    def test_magnitude_everywhere_off_goal(self, open5):
        cache = FieldCache(open5)
        for x in range(5):
            for y in range(5):
                if (x, y) == (0, 0):
                    continue
                v = autonomous_command(open5, (0, 0), open5.cell_to_world((x, y)), 0.3, cache)
                assert abs(math.hypot(*v) - 0.3) < 1e-12

    def test_descent_reaches_goal(self, open5):
        # following the command with small steps strictly descends
        cache = FieldCache(open5)
        field = cache.get((4, 4))
        pos = WorldPoint(0.5, 0.5)
        last = field.value_at_point(open5, pos)
        for _ in range(300):
            v = autonomous_command(open5, (4, 4), pos, 0.3, cache)
            if v == (0.0, 0.0):
                break
            pos = WorldPoint(pos.x + v[0] * 0.2, pos.y + v[1] * 0.2)
            cur = field.value_at_point(open5, pos)
            assert cur <= last + 1e-9
            last = cur
        assert field.value_at_point(open5, pos) == 0.0
