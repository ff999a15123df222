import numpy as np
import pytest

from retarget import (
    CellImportance,
    DistortionParams,
    InputError,
    MeshGrid,
    UniformMeshSpec,
    build_uniform_mesh,
    distortion,
    max_admissible_warp,
)


def distortion_oracle(mesh, spec, omega, omega0):
    """Direct per-cell summation, written independently of the vectorized path."""
    total = 0.0
    area = 0.0
    for i in range(mesh.grid_rows):
        for j in range(mesh.grid_cols):
            h = mesh.row_heights[i]
            w = mesh.col_widths[j]
            hp = h / spec.cell_h0
            wp = w / spec.cell_w0
            bracket = max(hp, wp) / min(hp, wp) - 1.0
            total += bracket * h * w * (omega.omega[i, j] + omega0)
            area += h * w
    return total / area


def test_identity_mesh_zero():
    spec = UniformMeshSpec(100, 80, 4, 4)
    mesh = build_uniform_mesh(spec)
    omega = CellImportance(np.random.default_rng(0).random((4, 4)))
    assert distortion(mesh, spec, omega, 1.0) == 0.0


def test_uniform_squash_closed_forms():
    spec = UniformMeshSpec(100, 80, 4, 4)
    uniform = build_uniform_mesh(spec)
    zero = CellImportance(np.zeros((4, 4)))
    half = CellImportance(np.full((4, 4), 0.5))
    squash_05 = MeshGrid(uniform.col_widths * 0.5, uniform.row_heights)
    squash_08 = MeshGrid(uniform.col_widths * 0.8, uniform.row_heights)
    assert distortion(squash_05, spec, zero, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert distortion(squash_08, spec, half, 1.0) == pytest.approx(0.375, abs=1e-9)


def test_matches_direct_sum_oracle():
    rng = np.random.default_rng(4)
    spec = UniformMeshSpec(100, 100, 5, 5)
    for _ in range(200):
        widths = spec.cell_w0 * rng.uniform(0.3, 1.8, 5)
        heights = spec.cell_h0 * rng.uniform(0.3, 1.8, 5)
        mesh = MeshGrid(widths, heights)
        omega = CellImportance(rng.random((5, 5)))
        omega0 = float(rng.uniform(0, 2))
        d = distortion(mesh, spec, omega, omega0)
        ref = distortion_oracle(mesh, spec, omega, omega0)
        assert d == pytest.approx(ref, rel=1e-12)
        assert d >= 0


def test_swap_symmetry_of_bracket():
    # Swapping a cell's normalized height and width leaves its term unchanged:
    # a mesh and its transpose have equal distortion under a transposed setup.
    rng = np.random.default_rng(8)
    spec = UniformMeshSpec(100, 100, 4, 4)
    widths = spec.cell_w0 * rng.uniform(0.4, 1.6, 4)
    heights = spec.cell_h0 * rng.uniform(0.4, 1.6, 4)
    omega = rng.random((4, 4))
    d = distortion(MeshGrid(widths, heights), spec, CellImportance(omega), 1.0)
    d_t = distortion(MeshGrid(heights, widths), spec, CellImportance(omega.T), 1.0)
    assert d == pytest.approx(d_t, rel=1e-12)


def test_monotone_in_omega0():
    spec = UniformMeshSpec(100, 80, 4, 4)
    uniform = build_uniform_mesh(spec)
    mesh = MeshGrid(uniform.col_widths * 0.7, uniform.row_heights)
    omega = CellImportance(np.random.default_rng(1).random((4, 4)))
    d1 = distortion(mesh, spec, omega, 0.5)
    d2 = distortion(mesh, spec, omega, 1.5)
    assert d2 > d1


def test_nonpositive_cell_rejected():
    spec = UniformMeshSpec(100, 80, 2, 2)
    omega = CellImportance(np.zeros((2, 2)))
    with pytest.raises(InputError):
        MeshGrid([25.0, -1.0], [40.0, 40.0])
    with pytest.raises(InputError):
        distortion(build_uniform_mesh(UniformMeshSpec(100, 80, 3, 3)), spec, omega, 1.0)


class TestMaxAdmissibleWarp:
    def _spec(self):
        return UniformMeshSpec(160, 120, 4, 4)

    def test_early_exit_when_target_admissible(self):
        spec = self._spec()
        omega = CellImportance(np.zeros((4, 4)))
        params = DistortionParams(omega0=1.0, d_threshold=10.0)
        res = max_admissible_warp(spec, omega, 80, params)
        assert res.reached_target
        assert res.factor == pytest.approx(0.5)
        assert res.distortion <= 10.0

    def test_dt_zero_returns_identity(self):
        spec = self._spec()
        omega = CellImportance(np.random.default_rng(2).random((4, 4)))
        params = DistortionParams(omega0=1.0, d_threshold=0.0)
        res = max_admissible_warp(spec, omega, 80, params)
        assert res.factor == 1.0
        assert res.distortion == 0.0
        assert not res.reached_target

    def test_dt_infinite_always_reaches_target(self):
        spec = self._spec()
        omega = CellImportance(np.ones((4, 4)))
        params = DistortionParams(omega0=1.0, d_threshold=float("inf"))
        res = max_admissible_warp(spec, omega, 60, params)
        assert res.reached_target
        assert res.factor == pytest.approx(60 / 160)

    def test_bisection_hits_closed_form_root(self):
        # Zero importance, omega0 = 1: uniform squash gives D = 1/f - 1, so
        # D = 0.5 at f = 2/3.
        spec = self._spec()
        omega = CellImportance(np.zeros((4, 4)))
        params = DistortionParams(omega0=1.0, d_threshold=0.5)
        res = max_admissible_warp(spec, omega, 80, params)
        assert not res.reached_target
        assert res.factor == pytest.approx(2 / 3, abs=params.bisection_tol)
        assert res.distortion <= 0.5 + 1e-9

    def test_bisection_boundary_is_tight(self):
        # One bisection_tol further down in factor must exceed the threshold.
        from retarget.distortion import _probe

        spec = self._spec()
        omega = CellImportance(np.zeros((4, 4)))
        params = DistortionParams(omega0=1.0, d_threshold=0.5)
        res = max_admissible_warp(spec, omega, 80, params)
        _, d_beyond, _ = _probe(spec, omega, res.factor - params.bisection_tol, params, 0.15)
        assert d_beyond > params.d_threshold

    def test_invalid_target(self):
        spec = self._spec()
        omega = CellImportance(np.zeros((4, 4)))
        with pytest.raises(InputError):
            max_admissible_warp(spec, omega, 200, DistortionParams())
