"""Content-aware image retargeting via bounded axis-aligned warping and cropping."""
from .cache import ImportanceCache
from .crop import CropSplit, FinalMesh, merge_crop_into_mesh, optimal_crop_split
from .distortion import (
    DistortionParams,
    WarpSearchResult,
    distortion,
    max_admissible_warp,
)
from .errors import FeasibilityError, InputError, RetargetError, SolverError
from .estimator import Retargeter
from .importance import (
    CellImportance,
    ColumnProfile,
    ImportanceMap,
    SegmentationMask,
    cell_importance,
    column_profile,
    combine_importance,
    fallback_saliency,
    load_external_map,
)
from .mesh import MeshGrid, UniformMeshSpec, build_uniform_mesh
from .pipeline import (
    RetargetConfig,
    RetargetPlan,
    RetargetResult,
    distortion_curve,
    precompute_importance,
    retarget,
)
from .render import SeparableMap, build_separable_map, render
from .warp import WarpSolution, solve_warp

__version__ = "0.1.0"

__all__ = [
    "CellImportance",
    "ColumnProfile",
    "CropSplit",
    "DistortionParams",
    "FeasibilityError",
    "FinalMesh",
    "ImportanceCache",
    "ImportanceMap",
    "InputError",
    "MeshGrid",
    "RetargetConfig",
    "RetargetError",
    "RetargetPlan",
    "RetargetResult",
    "Retargeter",
    "SegmentationMask",
    "SeparableMap",
    "SolverError",
    "UniformMeshSpec",
    "WarpSearchResult",
    "WarpSolution",
    "build_separable_map",
    "build_uniform_mesh",
    "cell_importance",
    "column_profile",
    "combine_importance",
    "distortion",
    "distortion_curve",
    "fallback_saliency",
    "load_external_map",
    "max_admissible_warp",
    "merge_crop_into_mesh",
    "optimal_crop_split",
    "precompute_importance",
    "render",
    "retarget",
    "solve_warp",
]
