"""Separable piecewise-linear mapping and bilinear rendering."""
from dataclasses import dataclass

import numpy as np

from .crop import FinalMesh
from .errors import InputError, RetargetError
from .mesh import MeshGrid, UniformMeshSpec


@dataclass(frozen=True)
class SeparableMap:
    """Monotone piecewise-linear target->source maps for x and y, as breakpoints."""

    x_target: np.ndarray
    x_source: np.ndarray
    y_target: np.ndarray
    y_source: np.ndarray

    def __post_init__(self):
        for name in ("x_target", "x_source", "y_target", "y_source"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for t, s in ((self.x_target, self.x_source), (self.y_target, self.y_source)):
            if len(t) != len(s) or len(t) < 2:
                raise RetargetError("map breakpoints malformed")
            if np.any(np.diff(t) <= 0) or np.any(np.diff(s) <= 0):
                raise RetargetError("separable map must be strictly increasing")

    def map_x(self, t):
        return np.interp(t, self.x_target, self.x_source)

    def map_y(self, t):
        return np.interp(t, self.y_target, self.y_source)

    def transposed(self) -> "SeparableMap":
        return SeparableMap(
            x_target=self.y_target.copy(),
            x_source=self.y_source.copy(),
            y_target=self.x_target.copy(),
            y_source=self.x_source.copy(),
        )


def build_mesh_map(mesh: MeshGrid, spec: UniformMeshSpec):
    """Warped->source breakpoints for a crop-free mesh: ((tx, sx), (ty, sy))."""
    tx = mesh.col_edges()
    sx = np.arange(mesh.grid_cols + 1) * spec.cell_w0
    ty = mesh.row_edges()
    sy = np.arange(mesh.grid_rows + 1) * spec.cell_h0
    return (tx, sx), (ty, sy)


def build_separable_map(final: FinalMesh, spec: UniformMeshSpec) -> SeparableMap:
    """Map the target raster back to source coordinates through warp and crop.

    Each surviving column's target interval maps linearly onto the (possibly
    clipped) source interval of the uniform-mesh column it came from.
    """
    mesh = final.mesh
    if not final.col_spans or len(final.col_spans) != mesh.grid_cols:
        raise RetargetError("final mesh is missing its column provenance")
    tx = mesh.col_edges()
    sx = np.empty(mesh.grid_cols + 1)
    j0, fl0, _ = final.col_spans[0]
    sx[0] = (j0 + fl0) * spec.cell_w0
    for k, (j, _, fh) in enumerate(final.col_spans):
        sx[k + 1] = (j + fh) * spec.cell_w0
    ty = mesh.row_edges()
    sy = np.arange(mesh.grid_rows + 1) * spec.cell_h0
    return SeparableMap(x_target=tx, x_source=sx, y_target=ty, y_source=sy)


def render(source: np.ndarray, smap: SeparableMap, target_dims: tuple[int, int]) -> np.ndarray:
    """Pull each target pixel center back through the map; bilinear, edge-clamped.

    target_dims is (width, height). Output dtype follows the source (uint8
    sources are rounded and clipped).
    """
    target_w, target_h = target_dims
    if target_w <= 0 or target_h <= 0:
        raise InputError("target dimensions must be positive")
    source = np.asarray(source)
    if source.ndim not in (2, 3):
        raise InputError("source raster must be HxW or HxWxC")
    h, w = source.shape[:2]

    sx = smap.map_x(np.arange(target_w) + 0.5) - 0.5
    sy = smap.map_y(np.arange(target_h) + 0.5) - 0.5
    sx = np.clip(sx, 0, w - 1)
    sy = np.clip(sy, 0, h - 1)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = sx - x0
    fy = sy - y0
    if source.ndim == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
    else:
        fx = fx[None, :]
        fy = fy[:, None]

    # The map is separable, so bilinear pull-back factors into an x-pass over
    # source rows followed by a y-pass; identical result, far fewer gathers.
    # An identity axis (no warp/crop along it) skips its pass entirely.
    # Gathering in the native dtype before widening keeps memory traffic low.
    is_int = np.issubdtype(source.dtype, np.integer)
    work = np.float32 if is_int else np.float64
    fx = fx.astype(work)
    fy = fy.astype(work)
    x_identity = target_w == w and not np.any(fx) and np.array_equal(x0, np.arange(w))
    y_identity = target_h == h and not np.any(fy) and np.array_equal(y0, np.arange(h))

    def lerp(a, b, frac):
        a = a.astype(work, copy=False)
        b = b.astype(work, copy=False)
        b -= a
        b *= frac
        a += b
        return a

    rows = source if x_identity else lerp(source[:, x0], source[:, x1], fx)
    out = rows if y_identity else lerp(rows[y0], rows[y1], fy)
    out = out.astype(work, copy=False)

    if is_int:
        info = np.iinfo(source.dtype)
        if out is source or out.base is not None:
            out = out.copy()
        np.rint(out, out=out)
        np.clip(out, info.min, info.max, out=out)
        return out.astype(source.dtype)
    return out.astype(source.dtype)
