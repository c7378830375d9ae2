import numpy as np
import pytest

from clampseq.model import (
    GRID_NX,
    GRID_NY,
    Hole,
    HoleLayout,
    FullStiffness,
    build_full_stiffness,
    build_layout,
    schur_reduce,
)


def toy_layout(nx, ny, holes):
    return HoleLayout(holes=tuple(holes), nx=nx, ny=ny, spacing=10.0)


class TestLayout:
    def test_hole_0_position(self):
        layout = build_layout()
        h = layout.holes[0]
        assert (h.x, h.y, h.block) == (10.0, 20.0, 0)

    def test_hole_39_position(self):
        layout = build_layout()
        h = layout.holes[39]
        assert (h.x, h.y, h.block) == (580.0, 40.0, 4)

    def test_forty_unique_holes(self):
        layout = build_layout()
        assert len(layout.holes) == 40
        assert sorted(h.index for h in layout.holes) == list(range(40))

    def test_blocks_partition_into_five_of_eight(self):
        layout = build_layout()
        for b in range(5):
            assert len(layout.holes_in_block(b)) == 8

    def test_holes_coincide_with_grid_nodes(self):
        layout = build_layout()
        for h in layout.holes:
            assert h.x % layout.spacing == 0.0
            assert h.y % layout.spacing == 0.0
            assert 0 <= layout.grid_row(h) < layout.nx * layout.ny

    def test_mirror_symmetry_about_295(self):
        layout = build_layout()
        perm = layout.mirror_permutation()
        assert perm[0] == 19
        assert perm[19] == 0
        pos = layout.positions()
        axis = (pos[:, 0].min() + pos[:, 0].max()) / 2.0
        assert axis == 295.0
        np.testing.assert_allclose(pos[perm, 0], 2 * axis - pos[:, 0])
        np.testing.assert_allclose(pos[perm, 1], pos[:, 1])


class TestFullStiffness:
    def test_single_edge_grid(self):
        layout = toy_layout(2, 1, [])
        full = build_full_stiffness(layout, edge_stiffness=2.0, ground_stiffness=1.0)
        np.testing.assert_allclose(full.matrix, [[3.0, -2.0], [-2.0, 3.0]])

    def test_rejects_nonpositive_stiffness(self):
        layout = toy_layout(2, 1, [])
        with pytest.raises(ValueError):
            build_full_stiffness(layout, edge_stiffness=0.0, ground_stiffness=1.0)
        with pytest.raises(ValueError):
            build_full_stiffness(layout, edge_stiffness=1.0, ground_stiffness=-2.0)

    def test_default_grid_row_sums_equal_ground_stiffness(self):
        full = build_full_stiffness(build_layout(), edge_stiffness=250.0, ground_stiffness=14.0)
        n = GRID_NX * GRID_NY
        assert full.matrix.shape == (n, n)
        np.testing.assert_allclose(full.matrix.sum(axis=1), np.full(n, 14.0), atol=1e-9)

    def test_symmetric_and_positive_definite(self):
        full = build_full_stiffness(build_layout())
        m = full.matrix
        assert np.abs(m - m.T).max() <= 1e-12 * np.abs(m).max()
        np.linalg.cholesky(m)

    def test_four_neighbor_pattern(self):
        layout = toy_layout(3, 2, [])
        full = build_full_stiffness(layout, edge_stiffness=1.0, ground_stiffness=1.0)
        m = full.matrix
        # node 0=(0,0) connects to 1=(1,0) and 3=(0,1) only
        assert m[0, 1] == -1.0 and m[0, 3] == -1.0
        assert m[0, 2] == 0.0 and m[0, 4] == 0.0 and m[0, 5] == 0.0


class TestSchurReduce:
    def test_scalar_schur_complement(self):
        layout = toy_layout(2, 1, [Hole(index=0, x=0.0, y=0.0, block=0)])
        full = FullStiffness(
            matrix=np.array([[4.0, 1.0], [1.0, 2.0]]), layout=layout, hole_rows=np.array([0])
        )
        reduced = schur_reduce(full)
        np.testing.assert_allclose(reduced.stiffness, [[3.5]])
        np.testing.assert_allclose(reduced.initial_gaps, [6.0])

    def test_zero_coupling_returns_corner_block(self):
        layout = toy_layout(2, 1, [Hole(index=0, x=0.0, y=0.0, block=0)])
        full = FullStiffness(
            matrix=np.array([[2.0, 0.0], [0.0, 3.0]]), layout=layout, hole_rows=np.array([0])
        )
        reduced = schur_reduce(full)
        np.testing.assert_allclose(reduced.stiffness, [[2.0]], atol=0)

    def test_reduced_matches_full_unit_load_response(self, model):
        # Unit load at hole j: the reduced inverse column must equal the
        # full solve restricted to the holes.
        full = build_full_stiffness(build_layout())
        rows = full.hole_rows
        for j in (0, 7, 25):
            e = np.zeros(model.n_holes)
            e[j] = 1.0
            reduced_disp = np.linalg.solve(model.stiffness, e)
            f = np.zeros(full.matrix.shape[0])
            f[rows[j]] = 1.0
            full_disp = np.linalg.solve(full.matrix, f)[rows]
            np.testing.assert_allclose(reduced_disp, full_disp, rtol=1e-9, atol=1e-12)

    def test_reduced_is_spd_and_symmetric(self, model):
        k = model.stiffness
        assert np.abs(k - k.T).max() <= 1e-12 * np.abs(k).max()
        np.linalg.cholesky(k)

    def test_mirror_permutation_invariance(self, model):
        perm = model.layout.mirror_permutation()
        k = model.stiffness
        assert np.abs(k[np.ix_(perm, perm)] - k).max() <= 1e-10 * np.abs(k).max()

    def test_initial_gaps_uniform_six(self, model):
        np.testing.assert_array_equal(model.initial_gaps, np.full(40, 6.0))

    def test_grid_constants(self):
        assert (GRID_NX, GRID_NY) == (60, 7)
