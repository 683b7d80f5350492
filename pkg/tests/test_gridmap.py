import numpy as np
import pytest
from hypothesis import given, strategies as st

from sharednav.gridmap import MapLoadError, OccupancyGrid, WorldPoint, inflate, load_map

from conftest import make_grid


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestLoadAscii:
    def test_all_free(self, tmp_path):
        path = write(tmp_path, "m.map", "5 5 1 0 0\n" + "\n".join(["....."] * 5) + "\n")
        g = load_map(path)
        assert g.width == g.height == 5
        assert g.free_count == 25

    def test_single_obstacle(self, tmp_path):
        rows = ["....."] * 5
        rows[2] = "..#.."
        path = write(tmp_path, "m.map", "5 5 1 0 0\n" + "\n".join(rows) + "\n")
        g = load_map(path)
        assert g.occupied[2, 2]
        assert g.free_count == 24

    def test_unknown_chars_become_occupied(self, tmp_path):
        path = write(tmp_path, "m.map", "3 3 1 0 0\n..?\n...\n...\n")
        g = load_map(path)
        assert g.occupied[0, 2]

    def test_malformed_header(self, tmp_path):
        path = write(tmp_path, "m.map", "5 5\n.....\n")
        with pytest.raises(MapLoadError, match=":1"):
            load_map(path)

    def test_zero_dimensions(self, tmp_path):
        path = write(tmp_path, "m.map", "0 5 1 0 0\n")
        with pytest.raises(MapLoadError, match="dimensions"):
            load_map(path)

    def test_non_rectangular(self, tmp_path):
        path = write(tmp_path, "m.map", "3 3 1 0 0\n...\n..\n...\n")
        with pytest.raises(MapLoadError, match=":3"):
            load_map(path)

    def test_roundtrip_byte_identical(self, tmp_path):
        text = "4 3 0.5 -1 2\n.#..\n....\n##..\n"
        path = write(tmp_path, "m.map", text)
        g = load_map(path)
        assert g.to_ascii() == text


class TestLoadRaster:
    def _write_p5(self, tmp_path, w, h, pixels):
        p = tmp_path / "m.pgm"
        p.write_bytes(f"P5\n{w} {h}\n255\n".encode() + bytes(pixels))
        return str(p)

    def test_threshold(self, tmp_path):
        # pixel 120 at (0,0) -> occupied; 250 and above -> free
        pixels = [255] * 9
        pixels[0] = 120
        pixels[1] = 250
        pixels[2] = 249
        g = load_map(self._write_p5(tmp_path, 3, 3, pixels))
        assert g.occupied[0, 0]
        assert not g.occupied[0, 1]
        assert g.occupied[0, 2]

    def test_truncated(self, tmp_path):
        p = tmp_path / "m.pgm"
        p.write_bytes(b"P5\n3 3\n255\n\x00\x00")
        with pytest.raises(MapLoadError, match="pixel bytes"):
            load_map(str(p))


class TestCoordinates:
    def test_world_to_cell_unit(self, open5):
        assert open5.world_to_cell(WorldPoint(2.5, 3.5)) == (2, 3)

    def test_cell_to_world_center(self, open5):
        p = open5.cell_to_world((2, 3))
        assert (p.x, p.y) == (2.5, 3.5)

    def test_out_of_bounds(self, open5):
        assert open5.world_to_cell(WorldPoint(-0.1, 0.0)) is None

    @given(st.integers(0, 4), st.integers(0, 4))
    def test_roundtrip(self, cx, cy):
        g = make_grid(["....."] * 5, resolution=0.25, origin=(-1.0, 2.0))
        assert g.world_to_cell(g.cell_to_world((cx, cy))) == (cx, cy)


class TestInflate:
    def test_radius_zero_identity(self, open5):
        assert inflate(open5, 0.0) is open5

    def test_single_obstacle_cardinals(self):
        rows = ["....."] * 5
        rows[2] = "..#.."
        g = make_grid(rows)
        gi = inflate(g, 1.0)
        assert gi.occupied[2, 2]
        for cx, cy in [(1, 2), (3, 2), (2, 1), (2, 3)]:
            assert gi.occupied[cy, cx], (cx, cy)
        # diagonals are at distance sqrt(2) > 1
        assert not gi.occupied[1, 1]
        assert gi.free_count == 25 - 5

    def test_all_occupied_fixed_point(self):
        g = OccupancyGrid(4, 4, 1.0, 0, 0, np.ones((4, 4), bool))
        gi = inflate(g, 3.0)
        assert gi.occupied.all()

    def test_negative_radius_rejected(self, open5):
        with pytest.raises(ValueError):
            inflate(open5, -0.5)

    @given(st.integers(0, 10**6))
    def test_monotone_and_never_clears(self, seed):
        rng = np.random.default_rng(seed)
        occ = rng.random((6, 6)) < 0.3
        g = OccupancyGrid(6, 6, 1.0, 0, 0, occ)
        g1 = inflate(g, 1.0)
        g2 = inflate(g, 2.0)
        assert (g.occupied <= g1.occupied).all()
        assert (g1.occupied <= g2.occupied).all()


class TestInvariants:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            OccupancyGrid(2, 5, 1.0, 0, 0, np.zeros((5, 2), bool))

    def test_positive_resolution(self):
        with pytest.raises(ValueError):
            OccupancyGrid(5, 5, 0.0, 0, 0, np.zeros((5, 5), bool))

    def test_nonfinite_point_rejected(self):
        with pytest.raises(ValueError):
            WorldPoint(float("nan"), 0.0)
