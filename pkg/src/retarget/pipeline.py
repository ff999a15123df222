"""End-to-end orchestration: importance -> bounded warp -> crop -> render."""
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cache import ImportanceCache, importance_key
from .crop import FinalMesh, identity_final_mesh, merge_crop_into_mesh, optimal_crop_split
from .distortion import (
    DistortionParams,
    distortion,
    max_admissible_expansion,
    max_admissible_warp,
)
from .errors import FeasibilityError, InputError
from .importance import (
    ImportanceMap,
    cell_importance,
    column_profile,
    combine_importance,
    fallback_saliency,
    load_external_map,
    load_segmentation_mask,
)
from .mesh import MeshGrid, UniformMeshSpec, build_uniform_mesh
from .render import SeparableMap, build_separable_map, render
from .warp import solve_warp

DEFAULT_GRID = 25
DEFAULT_MIN_CELL_FRACTION = 0.15
DEFAULT_COVERAGE_THRESHOLD = 0.05


@dataclass(frozen=True)
class RetargetConfig:
    target_width: Optional[int] = None
    target_height: Optional[int] = None
    factor: Optional[float] = None
    params: DistortionParams = field(default_factory=DistortionParams)
    grid_cols: int = DEFAULT_GRID
    grid_rows: int = DEFAULT_GRID
    min_cell_fraction: float = DEFAULT_MIN_CELL_FRACTION
    coverage_threshold: float = DEFAULT_COVERAGE_THRESHOLD
    importance_path: Optional[str] = None
    mask_path: Optional[str] = None
    allow_scale_fallback: bool = False

    @property
    def importance_source(self) -> str:
        """Generator route implied by the configured inputs."""
        if self.mask_path:
            return "combined"
        if self.importance_path:
            return "external"
        return "fallback"

    def resolve_target(self, source_w: int, source_h: int) -> tuple[int, int]:
        if self.factor is not None:
            if self.factor <= 0:
                raise InputError("retarget factor must be positive")
            if self.target_width is not None or self.target_height is not None:
                raise InputError("give either a factor or explicit target dims, not both")
            return max(1, round(source_w * self.factor)), source_h
        tw = self.target_width if self.target_width is not None else source_w
        th = self.target_height if self.target_height is not None else source_h
        if tw <= 0 or th <= 0:
            raise InputError("target dimensions must be positive")
        return tw, th


@dataclass
class RetargetPlan:
    factor: float
    distortion: float
    crop_left: int
    crop_right: int
    reached_target: bool
    scale_fallback: bool = False
    vertical: Optional["RetargetPlan"] = None

    def to_dict(self) -> dict:
        d = {
            "factor": self.factor,
            "distortion": self.distortion,
            "crop_left": self.crop_left,
            "crop_right": self.crop_right,
            "reached_target": self.reached_target,
            "scale_fallback": self.scale_fallback,
        }
        if self.vertical is not None:
            d["vertical"] = self.vertical.to_dict()
        return d


@dataclass
class RetargetResult:
    image: np.ndarray
    plan: RetargetPlan
    timings: dict
    importance: ImportanceMap
    final_mesh: Optional[FinalMesh] = None


def _as_array(source) -> np.ndarray:
    arr = np.asarray(source)
    if arr.ndim not in (2, 3) or arr.size == 0:
        raise InputError("source raster must be a non-empty HxW or HxWxC array")
    return arr


def get_importance(source: np.ndarray, config: RetargetConfig) -> tuple[ImportanceMap, dict]:
    """Produce the importance map for a source image along the configured route."""
    h, w = source.shape[:2]
    coverage = 0.0
    if config.mask_path:
        mask = load_segmentation_mask(config.mask_path, (w, h))
        coverage = mask.coverage
        if config.importance_path:
            saliency = load_external_map(config.importance_path, (w, h))
        else:
            saliency = fallback_saliency(source)
        imp = combine_importance(mask, saliency, config.coverage_threshold)
        generator = "combined"
    elif config.importance_path:
        imp = load_external_map(config.importance_path, (w, h))
        generator = "external"
    else:
        imp = fallback_saliency(source)
        generator = "fallback"
    return imp, {"generator": generator, "coverage_fraction": coverage}


def precompute_importance(
    source: np.ndarray,
    config: RetargetConfig,
    cache: ImportanceCache,
    source_bytes: Optional[bytes] = None,
) -> tuple[ImportanceMap, dict]:
    """Compute (or fetch) the importance map, keyed by content hash + route."""
    source = _as_array(source)
    raw = source_bytes if source_bytes is not None else np.ascontiguousarray(source).tobytes()
    key = importance_key(raw, config.importance_source)

    def compute():
        imp, meta = get_importance(source, config)
        meta = dict(meta, source_hash=key)
        return imp, meta

    return cache.get_or_compute(key, compute)


def _plan_width_axis(
    shape: tuple[int, int], imp: ImportanceMap, config: RetargetConfig, target_w: int
) -> tuple[RetargetPlan, FinalMesh, SeparableMap, UniformMeshSpec]:
    """Plan a width-only retarget; height is preserved. No pixels touched."""
    h, w = shape
    spec = UniformMeshSpec(w, h, config.grid_cols, config.grid_rows)
    uniform = build_uniform_mesh(spec)
    omega = cell_importance(imp, uniform)
    params = config.params

    if target_w == w:
        final = identity_final_mesh(uniform)
        return (
            RetargetPlan(1.0, 0.0, 0, 0, True),
            final,
            build_separable_map(final, spec),
            spec,
        )

    scale_fallback = False
    if target_w < w:
        search = max_admissible_warp(spec, omega, target_w, params, config.min_cell_fraction)
        mesh = search.mesh
        if search.reached_target:
            widths = mesh.col_widths * (target_w / mesh.width)
            final = identity_final_mesh(MeshGrid(widths, mesh.row_heights))
            crop_l = crop_r = 0
        else:
            inter_w = int(round(mesh.width))
            mesh = MeshGrid(mesh.col_widths * (inter_w / mesh.width), mesh.row_heights)
            profile = column_profile(imp, mesh, spec)
            split = optimal_crop_split(profile, inter_w - target_w)
            final = merge_crop_into_mesh(mesh, split)
            crop_l, crop_r = split.left, split.right
    else:
        search = max_admissible_expansion(spec, omega, target_w, params, config.min_cell_fraction)
        mesh = search.mesh
        crop_l = crop_r = 0
        if not search.reached_target:
            if not config.allow_scale_fallback:
                raise FeasibilityError(
                    f"expansion to width {target_w} exceeds the distortion budget "
                    f"(admissible factor {search.factor:.4f}); "
                    "set allow_scale_fallback to cover the remainder by uniform scaling"
                )
            scale_fallback = True
        # Uniform correction to land exactly on the target width (identity
        # when the target was reached, the scale fallback otherwise).
        mesh = MeshGrid(mesh.col_widths * (target_w / mesh.width), mesh.row_heights)
        final = identity_final_mesh(mesh)

    final.energy = search.energy
    plan = RetargetPlan(
        factor=search.factor,
        distortion=search.distortion,
        crop_left=crop_l,
        crop_right=crop_r,
        reached_target=search.reached_target,
        scale_fallback=scale_fallback,
    )
    return plan, final, build_separable_map(final, spec), spec


def _resample_importance(
    imp: ImportanceMap, smap: SeparableMap, target_w: int, target_h: int
) -> ImportanceMap:
    sx = smap.map_x(np.arange(target_w) + 0.5)
    sy = smap.map_y(np.arange(target_h) + 0.5)
    xi = np.clip(np.round(sx - 0.5).astype(int), 0, imp.width - 1)
    yi = np.clip(np.round(sy - 0.5).astype(int), 0, imp.height - 1)
    return ImportanceMap(imp.scores[yi][:, xi])


def retarget(
    source,
    config: RetargetConfig,
    importance: Optional[ImportanceMap] = None,
) -> RetargetResult:
    """Run the full pipeline. A precomputed importance map skips that stage."""
    image = _as_array(source)
    h, w = image.shape[:2]
    target_w, target_h = config.resolve_target(w, h)

    timings = {}
    t0 = time.perf_counter()
    if importance is None:
        importance, _ = get_importance(image, config)
    elif (importance.width, importance.height) != (w, h):
        raise InputError("importance map dimensions do not match the source")
    timings["importance"] = time.perf_counter() - t0

    if (target_w, target_h) == (w, h):
        timings["warp_and_crop"] = 0.0
        timings["render"] = 0.0
        return RetargetResult(image.copy(), RetargetPlan(1.0, 0.0, 0, 0, True), timings, importance)

    t_warp = 0.0
    t_render = 0.0
    if target_h == h:
        t1 = time.perf_counter()
        plan, final, smap, _ = _plan_width_axis((h, w), importance, config, target_w)
        t_warp += time.perf_counter() - t1
        t1 = time.perf_counter()
        out = render(image, smap, (target_w, h))
        t_render += time.perf_counter() - t1
    elif target_w == w:
        # Vertical retargeting is the transpose of the horizontal problem.
        timg = np.swapaxes(image, 0, 1)
        t1 = time.perf_counter()
        plan, final, smap, _ = _plan_width_axis((w, h), importance.transposed(), config, target_h)
        t_warp += time.perf_counter() - t1
        t1 = time.perf_counter()
        out = np.ascontiguousarray(np.swapaxes(render(timg, smap, (target_h, w)), 0, 1))
        t_render += time.perf_counter() - t1
    else:
        t1 = time.perf_counter()
        plan, final, smap, _ = _plan_width_axis((h, w), importance, config, target_w)
        t_warp += time.perf_counter() - t1
        t1 = time.perf_counter()
        mid = render(image, smap, (target_w, h))
        t_render += time.perf_counter() - t1
        imp2 = _resample_importance(importance, smap, target_w, h)
        t1 = time.perf_counter()
        vplan, final, vsmap, _ = _plan_width_axis(
            (target_w, h), imp2.transposed(), config, target_h
        )
        t_warp += time.perf_counter() - t1
        t1 = time.perf_counter()
        out = np.ascontiguousarray(
            np.swapaxes(render(np.swapaxes(mid, 0, 1), vsmap, (target_h, target_w)), 0, 1)
        )
        t_render += time.perf_counter() - t1
        plan.vertical = vplan
    timings["warp_and_crop"] = t_warp
    timings["render"] = t_render

    return RetargetResult(out, plan, timings, importance, final_mesh=final)


def distortion_curve(
    source,
    config: RetargetConfig,
    samples: int,
    importance: Optional[ImportanceMap] = None,
) -> list[tuple[float, float]]:
    """Distortion at equally spaced warp factors from 1.0 down to the target."""
    if samples < 2:
        raise InputError("need at least two curve samples")
    image = _as_array(source)
    h, w = image.shape[:2]
    target_w, _ = config.resolve_target(w, h)
    f_end = target_w / w
    if f_end >= 1.0:
        raise InputError("distortion curve requires a width reduction target")
    if importance is None:
        importance, _ = get_importance(image, config)
    spec = UniformMeshSpec(w, h, config.grid_cols, config.grid_rows)
    omega = cell_importance(importance, build_uniform_mesh(spec))
    curve = []
    for f in np.linspace(1.0, f_end, samples):
        f = float(f)
        if f == 1.0:
            mesh = build_uniform_mesh(spec)
        else:
            mesh = solve_warp(
                spec, omega, f * w, h, min_cell_fraction=config.min_cell_fraction
            ).mesh
        curve.append((f, distortion(mesh, spec, omega, config.params.omega0)))
    return curve
