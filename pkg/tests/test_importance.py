import numpy as np
import pytest
from PIL import Image

from retarget import (
    CellImportance,
    ImportanceMap,
    InputError,
    SegmentationMask,
    UniformMeshSpec,
    build_uniform_mesh,
    cell_importance,
    column_profile,
    combine_importance,
    fallback_saliency,
    load_external_map,
)
from retarget.importance import make_column_profile, resize_bilinear
from retarget.mesh import MeshGrid


def _saliency_like(h, w, value=0.3):
    return ImportanceMap(np.full((h, w), value))


class TestCombineImportance:
    def test_coverage_above_threshold_uses_mask(self):
        labels = np.zeros((20, 20), dtype=int)
        labels[:4, :10] = 3  # 10% coverage
        out = combine_importance(SegmentationMask(labels), _saliency_like(20, 20), 0.05)
        assert set(np.unique(out.scores)) <= {0.0, 1.0}
        assert np.array_equal(out.scores, (labels != 0).astype(float))

    def test_zero_coverage_passthrough(self):
        sal = _saliency_like(20, 20, 0.42)
        out = combine_importance(SegmentationMask(np.zeros((20, 20), dtype=int)), sal, 0.05)
        assert out is sal

    def test_exact_threshold_counts_as_above(self):
        # 20 labeled pixels out of 400 is exactly 5%
        labels = np.zeros((20, 20), dtype=int)
        labels[0, :20] = 1
        assert np.count_nonzero(labels) == 20
        out = combine_importance(SegmentationMask(labels), _saliency_like(20, 20), 0.05)
        assert set(np.unique(out.scores)) == {0.0, 1.0}

    def test_output_is_binary_or_identical(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            labels = (rng.random((16, 16)) < rng.random() * 0.2).astype(int)
            sal = ImportanceMap(rng.random((16, 16)))
            out = combine_importance(SegmentationMask(labels), sal, 0.05)
            binary = set(np.unique(out.scores)) <= {0.0, 1.0}
            identical = out is sal
            assert binary or identical

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            combine_importance(
                SegmentationMask(np.zeros((10, 10), dtype=int)), _saliency_like(10, 12), 0.05
            )


class TestFallbackSaliency:
    def test_constant_image_is_flat(self):
        out = fallback_saliency(np.full((40, 60, 3), 77, dtype=np.uint8))
        assert out.scores.max() - out.scores.min() < 0.05

    def test_white_square_is_salient(self):
        img = np.zeros((64, 64), dtype=np.uint8)
        img[30:35, 40:45] = 255
        out = fallback_saliency(img)
        peak = np.unravel_index(np.argmax(out.scores), out.scores.shape)
        assert abs(peak[0] - 32) <= 10 and abs(peak[1] - 42) <= 10

    def test_range_and_determinism(self):
        rng = np.random.default_rng(5)
        img = (rng.random((50, 70, 3)) * 255).astype(np.uint8)
        a = fallback_saliency(img)
        b = fallback_saliency(img)
        assert a.scores.min() >= 0.0 and a.scores.max() <= 1.0
        assert np.array_equal(a.scores, b.scores)

    def test_zero_area_rejected(self):
        with pytest.raises(InputError):
            fallback_saliency(np.zeros((0, 10)))


class TestLoadExternalMap:
    def test_value_scaling(self, tmp_path):
        arr = np.zeros((80, 100), dtype=np.uint8)
        arr[3, 4] = 255
        path = tmp_path / "m.png"
        Image.fromarray(arr, mode="L").save(path)
        imp = load_external_map(path, (100, 80))
        assert imp.scores[3, 4] == 1.0
        assert imp.scores[0, 0] == 0.0

    def test_resample_on_mismatch_matches_bilinear_oracle(self, tmp_path):
        rng = np.random.default_rng(9)
        arr = (rng.random((40, 50)) * 255).astype(np.uint8)
        path = tmp_path / "small.png"
        Image.fromarray(arr, mode="L").save(path)
        imp = load_external_map(path, (100, 80))
        assert (imp.width, imp.height) == (100, 80)
        oracle = resize_bilinear(arr.astype(float) / 255.0, 100, 80)
        for y, x in [(0, 0), (0, 99), (79, 0), (79, 99)]:
            assert imp.scores[y, x] == pytest.approx(oracle[y, x], abs=1e-12)

    def test_unreadable_file(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"not a png")
        with pytest.raises(InputError):
            load_external_map(bad, (10, 10))

    def test_rejects_rgb(self, tmp_path):
        path = tmp_path / "rgb.png"
        Image.fromarray(np.zeros((5, 5, 3), dtype=np.uint8)).save(path)
        with pytest.raises(InputError):
            load_external_map(path, (5, 5))


class TestCellImportance:
    def test_constant_map(self):
        spec = UniformMeshSpec(16, 16, 4, 4)
        imp = ImportanceMap(np.full((16, 16), 0.7))
        cell = cell_importance(imp, build_uniform_mesh(spec))
        assert np.allclose(cell.omega, 0.7)

    def test_quadrant_alignment(self):
        scores = np.zeros((8, 8))
        scores[:4, :4] = 1.0
        cell = cell_importance(ImportanceMap(scores), build_uniform_mesh(UniformMeshSpec(8, 8, 2, 2)))
        assert np.array_equal(cell.omega, [[1.0, 0.0], [0.0, 0.0]])

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(13)
        scores = rng.random((16, 16))
        spec = UniformMeshSpec(16, 16, 4, 4)
        cell = cell_importance(ImportanceMap(scores), build_uniform_mesh(spec))
        # brute force: each 4x4 pixel block
        for i in range(4):
            for j in range(4):
                expected = scores[4 * i : 4 * i + 4, 4 * j : 4 * j + 4].mean()
                assert abs(cell.omega[i, j] - expected) < 1e-12

    def test_area_weighted_mean_equals_global_mean(self):
        rng = np.random.default_rng(17)
        scores = rng.random((20, 30))
        spec = UniformMeshSpec(30, 20, 5, 4)
        cell = cell_importance(ImportanceMap(scores), build_uniform_mesh(spec))
        # cells tile the pixel grid exactly: 6x5 pixels per cell
        assert abs(cell.omega.mean() - scores.mean()) < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            cell_importance(
                ImportanceMap(np.zeros((10, 10))),
                build_uniform_mesh(UniformMeshSpec(12, 10, 2, 2)),
            )


class TestColumnProfile:
    def test_identity_mesh_ones(self):
        spec = UniformMeshSpec(16, 16, 4, 4)
        imp = ImportanceMap(np.ones((16, 16)))
        profile = column_profile(imp, build_uniform_mesh(spec), spec)
        assert profile.length == 16
        assert np.allclose(profile.weights, 16.0)

    def test_single_pixel(self):
        spec = UniformMeshSpec(8, 8, 2, 2)
        scores = np.zeros((8, 8))
        scores[5, 3] = 0.5
        profile = column_profile(ImportanceMap(scores), build_uniform_mesh(spec), spec)
        assert profile.weights[3] == 0.5
        assert profile.weights.sum() == 0.5

    def test_half_width_uniform_warp(self):
        spec = UniformMeshSpec(16, 16, 4, 4)
        imp = ImportanceMap(np.full((16, 16), 0.5))
        mesh = MeshGrid(np.full(4, 2.0), np.full(4, 4.0))  # half width
        profile = column_profile(imp, mesh, spec)
        assert profile.length == 8
        # nearest resampling preserves per-column score magnitude
        assert np.allclose(profile.weights, 16 * 0.5)
        # resample-then-sum oracle
        from retarget.importance import warp_map_nearest

        warped = warp_map_nearest(imp, mesh, spec)
        assert np.allclose(profile.weights, warped.sum(axis=0))

    def test_total_mass_matches_resampled(self):
        rng = np.random.default_rng(21)
        spec = UniformMeshSpec(16, 16, 4, 4)
        imp = ImportanceMap(rng.random((16, 16)))
        widths = np.array([2.0, 3.0, 4.0, 3.0])
        mesh = MeshGrid(widths, np.full(4, 4.0))
        profile = column_profile(imp, mesh, spec)
        from retarget.importance import warp_map_nearest

        total = warp_map_nearest(imp, mesh, spec).sum()
        assert profile.weights.sum() == pytest.approx(total, rel=1e-6)

    def test_prefix_sums_invariant(self):
        profile = make_column_profile([1.0, 0.5, 2.0, 0.0])
        assert np.allclose(profile.prefix_sums, np.cumsum(profile.weights), rtol=1e-9)


def test_importance_map_validates_range():
    with pytest.raises(InputError):
        ImportanceMap(np.array([[1.5]]))
    with pytest.raises(InputError):
        ImportanceMap(np.array([[-0.1]]))


def test_cell_importance_type_shape():
    c = CellImportance(np.zeros((3, 5)))
    assert c.grid_rows == 3 and c.grid_cols == 5
