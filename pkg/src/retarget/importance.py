"""Importance maps: ingestion, combination, fallback saliency and aggregates."""
import logging
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import InputError
from .mesh import MeshGrid, UniformMeshSpec

logger = logging.getLogger(__name__)

# Width at which the spectral-residual response is computed; the classical
# recipe works on a heavily downscaled copy.
_SALIENCY_SCALE = 64
_FLAT_EPS = 1e-12


@dataclass(frozen=True)
class ImportanceMap:
    """Per-pixel importance scores in [0, 1], same dimensions as the source."""

    scores: np.ndarray  # (H, W) float

    def __post_init__(self):
        object.__setattr__(self, "scores", np.asarray(self.scores, dtype=float))
        if self.scores.ndim != 2:
            raise InputError("importance scores must be a 2-D grid")
        if self.scores.size == 0:
            raise InputError("importance map must be non-empty")
        if self.scores.min() < -1e-12 or self.scores.max() > 1 + 1e-12:
            raise InputError("importance scores must lie in [0, 1]")

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    @property
    def height(self) -> int:
        return self.scores.shape[0]

    def transposed(self) -> "ImportanceMap":
        return ImportanceMap(self.scores.T.copy())


@dataclass(frozen=True)
class SegmentationMask:
    """Non-negative integer class labels; 0 means background."""

    labels: np.ndarray  # (H, W) int

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels))
        if self.labels.ndim != 2:
            raise InputError("segmentation labels must be a 2-D grid")
        if np.any(self.labels < 0):
            raise InputError("segmentation labels must be non-negative")

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def coverage(self) -> float:
        """Fraction of pixels labelled as non-background."""
        return float(np.count_nonzero(self.labels)) / self.labels.size


@dataclass(frozen=True)
class CellImportance:
    """Mean importance per mesh cell, row-major (grid_rows x grid_cols)."""

    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        if self.omega.ndim != 2:
            raise InputError("cell importance must be a 2-D grid")

    @property
    def grid_rows(self) -> int:
        return self.omega.shape[0]

    @property
    def grid_cols(self) -> int:
        return self.omega.shape[1]


@dataclass(frozen=True)
class ColumnProfile:
    """1-D importance: per-column mass of the warped map, with prefix sums."""

    weights: np.ndarray
    prefix_sums: np.ndarray

    @property
    def length(self) -> int:
        return len(self.weights)


def make_column_profile(weights) -> ColumnProfile:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise InputError("column profile weights must be non-negative")
    return ColumnProfile(weights=weights, prefix_sums=np.cumsum(weights))


def combine_importance(
    mask: SegmentationMask, saliency: ImportanceMap, coverage_threshold: float
) -> ImportanceMap:
    """Pick segmentation (binarized) when it covers enough of the frame,
    otherwise fall back to the saliency map unchanged.

    Coverage exactly at the threshold counts as sufficient.
    """
    if not 0 < coverage_threshold < 1:
        raise InputError("coverage_threshold must be in (0, 1)")
    if (mask.width, mask.height) != (saliency.width, saliency.height):
        raise InputError(
            f"mask dims {mask.width}x{mask.height} do not match "
            f"saliency dims {saliency.width}x{saliency.height}"
        )
    if mask.coverage >= coverage_threshold:
        return ImportanceMap((mask.labels != 0).astype(float))
    return saliency


def _to_gray(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=float)
    if image.ndim == 2:
        return image
    if image.ndim == 3:
        if image.shape[2] == 1:
            return image[:, :, 0]
        # ITU-R 601 luma over the first three channels
        return (
            0.299 * image[:, :, 0] + 0.587 * image[:, :, 1] + 0.114 * image[:, :, 2]
        )
    raise InputError("image must be HxW or HxWxC")


def resize_bilinear(arr: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Bilinear resize with pixel-center alignment and edge clamping."""
    h, w = arr.shape[:2]
    sx = (np.arange(target_w) + 0.5) * (w / target_w) - 0.5
    sy = (np.arange(target_h) + 0.5) * (h / target_h) - 0.5
    sx = np.clip(sx, 0, w - 1)
    sy = np.clip(sy, 0, h - 1)
    x0 = np.floor(sx).astype(int)
    y0 = np.floor(sy).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = sx - x0
    fy = (sy - y0)[:, None]
    top = arr[y0][:, x0] * (1 - fx) + arr[y0][:, x1] * fx
    bot = arr[y1][:, x0] * (1 - fx) + arr[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def fallback_saliency(image: np.ndarray) -> ImportanceMap:
    """Classical spectral-residual saliency, normalized to [0, 1].

    Stands in when no externally generated map is supplied.
    """
    gray = _to_gray(image)
    h, w = gray.shape
    if h == 0 or w == 0:
        raise InputError("cannot compute saliency of a zero-area image")
    if gray.max() - gray.min() < 1e-9:
        # Constant input: the spectrum is a bare DC spike and the residual is
        # numerical noise; treat as structureless directly.
        return ImportanceMap(np.full((h, w), 0.5))

    # Scale the longer side to the working size so the computation commutes
    # with transposition (every later step uses symmetric kernels).
    if w >= h:
        scale_w = min(_SALIENCY_SCALE, w)
        scale_h = max(1, round(h * scale_w / w))
    else:
        scale_h = min(_SALIENCY_SCALE, h)
        scale_w = max(1, round(w * scale_h / h))
    small = resize_bilinear(gray, scale_w, scale_h)

    spectrum = np.fft.fft2(small)
    log_amp = np.log(np.abs(spectrum) + 1e-12)
    phase = np.angle(spectrum)
    residual = log_amp - ndimage.uniform_filter(log_amp, size=3, mode="nearest")
    response = np.abs(np.fft.ifft2(np.exp(residual + 1j * phase))) ** 2
    response = ndimage.gaussian_filter(response, sigma=2.5, mode="nearest")

    full = resize_bilinear(response, w, h)
    lo, hi = full.min(), full.max()
    if hi - lo < _FLAT_EPS:
        # Flat response: a constant map warps uniformly, the sane degenerate case.
        return ImportanceMap(np.full((h, w), 0.5))
    return ImportanceMap((full - lo) / (hi - lo))


def load_external_map(path, expected_dims: tuple[int, int]) -> ImportanceMap:
    """Load a grayscale PNG/PGM as an importance map scaled to [0, 1].

    expected_dims is (width, height); a mismatched file is bilinearly
    resampled and a warning recorded.
    """
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise InputError(f"cannot read importance map {path}: {exc}") from exc
    if img.mode == "1":
        img = img.convert("L")
    if img.mode != "L":
        raise InputError(
            f"importance map {path} must be single-channel 8-bit grayscale, got mode {img.mode}"
        )
    scores = np.asarray(img, dtype=float) / 255.0
    exp_w, exp_h = expected_dims
    if (img.width, img.height) != (exp_w, exp_h):
        logger.warning(
            "importance map %s is %dx%d, resampling to expected %dx%d",
            path, img.width, img.height, exp_w, exp_h,
        )
        scores = np.clip(resize_bilinear(scores, exp_w, exp_h), 0.0, 1.0)
    return ImportanceMap(scores)


def load_segmentation_mask(path, expected_dims: tuple[int, int]) -> SegmentationMask:
    """Load a grayscale raster as a segmentation mask (0 = background)."""
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise InputError(f"cannot read segmentation mask {path}: {exc}") from exc
    if img.mode == "1":
        img = img.convert("L")
    if img.mode != "L":
        raise InputError(f"segmentation mask {path} must be grayscale, got mode {img.mode}")
    labels = np.asarray(img, dtype=int)
    exp_w, exp_h = expected_dims
    if (img.width, img.height) != (exp_w, exp_h):
        logger.warning(
            "segmentation mask %s is %dx%d, resampling (nearest) to expected %dx%d",
            path, img.width, img.height, exp_w, exp_h,
        )
        ys = np.clip(((np.arange(exp_h) + 0.5) * img.height / exp_h).astype(int), 0, img.height - 1)
        xs = np.clip(((np.arange(exp_w) + 0.5) * img.width / exp_w).astype(int), 0, img.width - 1)
        labels = labels[ys][:, xs]
    return SegmentationMask(labels)


def _cell_index(edges: np.ndarray, centers: np.ndarray, n_cells: int) -> np.ndarray:
    # Pixel center belongs to the cell whose [edge, next edge) interval holds
    # it; the last cell absorbs anything past the final interior edge.
    idx = np.searchsorted(edges[1:-1], centers, side="right")
    return np.clip(idx, 0, n_cells - 1)


def cell_importance(imp_map: ImportanceMap, mesh: MeshGrid) -> CellImportance:
    """Mean importance over the pixels whose centers fall in each mesh cell."""
    w_sum, h_sum = mesh.width, mesh.height
    if abs(w_sum - imp_map.width) > 1e-6 or abs(h_sum - imp_map.height) > 1e-6:
        raise InputError(
            f"mesh spans {w_sum}x{h_sum} but map is {imp_map.width}x{imp_map.height}"
        )
    col_idx = _cell_index(mesh.col_edges(), np.arange(imp_map.width) + 0.5, mesh.grid_cols)
    row_idx = _cell_index(mesh.row_edges(), np.arange(imp_map.height) + 0.5, mesh.grid_rows)
    # cell indices are sorted along each axis, so the per-cell sum is two
    # separable reduceat passes instead of a full 2-D scatter
    col_starts = np.searchsorted(col_idx, np.arange(mesh.grid_cols))
    row_starts = np.searchsorted(row_idx, np.arange(mesh.grid_rows))
    sums = np.add.reduceat(imp_map.scores, row_starts, axis=0)
    sums = np.add.reduceat(sums, col_starts, axis=1)
    col_counts = np.bincount(col_idx, minlength=mesh.grid_cols)
    row_counts = np.bincount(row_idx, minlength=mesh.grid_rows)
    counts = row_counts[:, None] * col_counts[None, :]
    # reduceat yields a stray element (not 0) for an empty slice; a cell with
    # no pixel centers must read as importance 0
    omega = np.where(counts == 0, 0.0, sums / np.maximum(counts, 1))
    return CellImportance(omega)


def warp_map_nearest(imp_map: ImportanceMap, mesh: MeshGrid, spec: UniformMeshSpec) -> np.ndarray:
    """Resample the map through the mesh warp with nearest-neighbor sampling.

    Output dims are the rounded warped dims.
    """
    from .render import build_mesh_map  # local import to avoid a cycle

    out_w = int(round(mesh.width))
    out_h = int(round(mesh.height))
    xmap, ymap = build_mesh_map(mesh, spec)
    sx = np.interp(np.arange(out_w) + 0.5, xmap[0], xmap[1])
    sy = np.interp(np.arange(out_h) + 0.5, ymap[0], ymap[1])
    xi = np.clip(np.round(sx - 0.5).astype(int), 0, imp_map.width - 1)
    yi = np.clip(np.round(sy - 0.5).astype(int), 0, imp_map.height - 1)
    return imp_map.scores[yi][:, xi]


def column_profile(imp_map: ImportanceMap, intermediate_mesh: MeshGrid, spec: UniformMeshSpec) -> ColumnProfile:
    """1-D importance of the intermediately warped image: per-column sums."""
    warped = warp_map_nearest(imp_map, intermediate_mesh, spec)
    return make_column_profile(warped.sum(axis=0))
