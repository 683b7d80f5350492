import math

import numpy as np
import pytest

from sharednav.dataset import (
    MAGIC,
    DatasetError,
    emit_samples,
    generate_dataset,
    read_samples,
    sample_endpoints,
    trace_route,
)
from sharednav.goal_estimator import step_likelihood
from sharednav.gridmap import WorldPoint
from sharednav.potential_field import FieldCache

from conftest import make_grid


@pytest.fixture
def roomy():
    return make_grid([
        "........",
        "........",
        "...##...",
        "...##...",
        "........",
        "........",
    ])


class TestSampleEndpoints:
    def test_pairs_satisfy_constraints(self, roomy):
        rng = np.random.default_rng(0)
        cache = FieldCache(roomy)
        for start, goal in sample_endpoints(roomy, 3.0, 10, rng):
            gw = roomy.cell_to_world(goal)
            assert math.hypot(gw.x - start.x, gw.y - start.y) > 3.0
            assert roomy.is_free_point(start)
            assert roomy.is_free_cell(goal)
            assert math.isfinite(cache.get(goal).value_at_point(roomy, start))

    def test_impossible_distance_rejected(self, roomy):
        rng = np.random.default_rng(0)
        with pytest.raises(DatasetError, match="diagonal"):
            sample_endpoints(roomy, 100.0, 1, rng)

    def test_constrained_map_caps_out(self):
        g = make_grid(["###", "#..", "###"])
        rng = np.random.default_rng(0)
        # diagonal is ~4.24 but the two free cells are only 1 m apart
        with pytest.raises(DatasetError, match="constrained"):
            sample_endpoints(g, 2.0, 1, rng)

    def test_deterministic(self, roomy):
        a = sample_endpoints(roomy, 3.0, 5, np.random.default_rng(7))
        b = sample_endpoints(roomy, 3.0, 5, np.random.default_rng(7))
        assert a == b


class TestTraceRoute:
    def test_reaches_goal_region(self, roomy):
        trace = trace_route(roomy, WorldPoint(0.5, 0.5), (7, 5), 0.3)
        assert len(trace) > 0
        last_pos, last_v = trace[-1]
        gw = roomy.cell_to_world((7, 5))
        # the step after the last record ends in the goal cell or radius
        end = WorldPoint(last_pos.x + last_v[0] * 0.5, last_pos.y + last_v[1] * 0.5)
        assert (
            roomy.world_to_cell(end) == (7, 5)
            or math.hypot(end.x - gw.x, end.y - gw.y) <= 0.3
        )

    def test_velocities_normalized(self, roomy):
        for _, v in trace_route(roomy, WorldPoint(0.5, 0.5), (7, 5), 0.3):
            assert abs(math.hypot(*v) - 0.3) < 1e-12

    def test_stays_free(self, roomy):
        for pos, _ in trace_route(roomy, WorldPoint(0.5, 0.5), (7, 0), 0.3):
            assert roomy.is_free_point(pos)

    def test_unreachable_goal_rejected(self):
        g = make_grid(["..#..", "..#..", "..#.."])
        with pytest.raises(DatasetError, match="unreachable"):
            trace_route(g, WorldPoint(0.5, 0.5), (4, 0), 0.3)

    def test_start_at_goal_is_empty(self, roomy):
        assert trace_route(roomy, WorldPoint(0.5, 0.5), (0, 0), 0.3) == []


class TestContainer:
    def test_roundtrip_bitwise(self, roomy, tmp_path):
        cache = FieldCache(roomy)
        traces = [trace_route(roomy, WorldPoint(0.5, 0.5), (7, 5), 0.3, cache=cache)]
        out = tmp_path / "d.bin"
        n = emit_samples(roomy, traces, str(out), 0.3, cache)
        header, samples = read_samples(str(out))
        assert header["count"] == n == len(samples)
        assert header["width"] == roomy.width and header["height"] == roomy.height
        assert header["resolution"] == pytest.approx(roomy.resolution)
        for (pos, v), sample in zip(traces[0], samples):
            expected = step_likelihood(
                roomy, WorldPoint(*sample.xt), sample.vt, 0.3, cache
            ).astype(np.float32)
            assert np.array_equal(sample.likelihood, expected)
            assert sample.xt == (np.float32(pos.x), np.float32(pos.y))
            assert sample.vt == (np.float32(v[0]), np.float32(v[1]))

    def test_x0_is_trace_start(self, roomy, tmp_path):
        traces = [trace_route(roomy, WorldPoint(0.5, 0.5), (7, 5), 0.3)]
        out = tmp_path / "d.bin"
        emit_samples(roomy, traces, str(out), 0.3)
        _, samples = read_samples(str(out))
        assert all(s.x0 == (0.5, 0.5) for s in samples)

    def test_magic_checked(self, tmp_path):
        bad = tmp_path / "junk.bin"
        bad.write_bytes(b"NOTADSET" + b"\x00" * 64)
        with pytest.raises(DatasetError, match="not a"):
            read_samples(str(bad))

    def test_truncated_header(self, tmp_path):
        bad = tmp_path / "short.bin"
        bad.write_bytes(MAGIC)
        with pytest.raises(DatasetError):
            read_samples(str(bad))


class TestGenerateDataset:
    def test_exact_count_and_determinism(self, roomy, tmp_path):
        a = tmp_path / "a.bin"
        b = tmp_path / "b.bin"
        assert generate_dataset(roomy, 40, 3.0, seed=1, out_path=str(a)) == 40
        assert generate_dataset(roomy, 40, 3.0, seed=1, out_path=str(b)) == 40
        assert a.read_bytes() == b.read_bytes()

    def test_likelihood_peaks_near_goal_direction(self, roomy, tmp_path):
        out = tmp_path / "d.bin"
        generate_dataset(roomy, 20, 3.0, seed=2, out_path=str(out))
        _, samples = read_samples(str(out))
        for s in samples:
            # the argmax cell lies on the same side as the command
            by, bx = np.unravel_index(np.argmax(s.likelihood), s.likelihood.shape)
            gw = roomy.cell_to_world((int(bx), int(by)))
            dot = (gw.x - s.xt[0]) * s.vt[0] + (gw.y - s.xt[1]) * s.vt[1]
            assert dot > -1e-6

    def test_cli(self, roomy, tmp_path):
        from sharednav.cli import gen_dataset_main

        map_path = tmp_path / "m.map"
        map_path.write_text(roomy.to_ascii())
        out = tmp_path / "d.bin"
        rc = gen_dataset_main([
            "--map", str(map_path), "--samples", "10", "--seed", "3",
            "--out", str(out), "--inflate", "0.0", "--min-distance", "3.0",
        ])
        assert rc == 0
        header, samples = read_samples(str(out))
        assert header["count"] == 10 and len(samples) == 10

    def test_cli_bad_map_exits_2(self, tmp_path):
        from sharednav.cli import gen_dataset_main

        rc = gen_dataset_main([
            "--map", str(tmp_path / "missing.map"), "--samples", "1",
            "--out", str(tmp_path / "d.bin"),
        ])
        assert rc == 2
