"""Content-aware crop split and merging of crops into the warping mesh."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .importance import ColumnProfile
from .mesh import MeshGrid


@dataclass(frozen=True)
class CropSplit:
    """Left/right crop amounts (integer pixels) and the importance mass removed."""

    left: int
    right: int
    removed_mass: float

    @property
    def deficit(self) -> int:
        return self.left + self.right


@dataclass
class FinalMesh:
    """Merged warp-plus-crop mesh over the target width.

    col_spans records, per surviving column, the originating column of the
    intermediate mesh and the fraction of its extent that survives the crop.
    """

    mesh: MeshGrid
    x_offset: float
    source_mesh: MeshGrid
    col_spans: list = field(default_factory=list)  # (col_index, frac_lo, frac_hi)
    energy: float = 0.0  # warp energy of the intermediate solve, for dumps/UI
    converged: bool = True


def optimal_crop_split(profile: ColumnProfile, deficit: int) -> CropSplit:
    """Split the deficit into left/right crops minimizing removed importance.

    Ties are broken by balancing the two sides, then by the smaller left crop.
    """
    if deficit < 0:
        raise InputError("crop deficit must be non-negative")
    if deficit > profile.length:
        raise InputError(f"crop deficit {deficit} exceeds profile length {profile.length}")
    if deficit == 0:
        return CropSplit(left=0, right=0, removed_mass=0.0)
    prefix = profile.prefix_sums
    total = prefix[-1]

    def prefix_mass(k):
        return prefix[k - 1] if k > 0 else 0.0

    # Masses within rounding noise count as tied; ties prefer the balanced
    # split, then the smaller left crop.
    tol = 1e-9 * max(1.0, float(total))
    best = None
    for left in range(deficit + 1):
        right = deficit - left
        mass = prefix_mass(left) + (total - prefix_mass(profile.length - right))
        if best is None or mass < best[0] - tol:
            best = (mass, left, right)
        elif mass <= best[0] + tol:
            if (abs(left - right), left) < (abs(best[1] - best[2]), best[1]):
                best = (min(mass, best[0]), left, right)
    mass, left, right = best
    return CropSplit(left=left, right=right, removed_mass=float(mass))


def merge_crop_into_mesh(intermediate: MeshGrid, split: CropSplit) -> FinalMesh:
    """Drop/clip intermediate columns outside the crop window.

    Row heights are untouched; surviving widths sum to the intermediate width
    minus the deficit.
    """
    total = intermediate.width
    if split.deficit > total + 1e-9:
        raise InputError("crop deficit exceeds the intermediate mesh width")
    lo = float(split.left)
    hi = total - float(split.right)
    edges = intermediate.col_edges()
    widths = []
    spans = []
    for j in range(intermediate.grid_cols):
        a = max(edges[j], lo)
        b = min(edges[j + 1], hi)
        surviving = b - a
        if surviving <= 1e-12:
            continue
        wj = intermediate.col_widths[j]
        widths.append(surviving)
        spans.append((j, (a - edges[j]) / wj, (b - edges[j]) / wj))
    mesh = MeshGrid(col_widths=np.array(widths), row_heights=intermediate.row_heights.copy())
    return FinalMesh(mesh=mesh, x_offset=lo, source_mesh=intermediate, col_spans=spans)


def identity_final_mesh(mesh: MeshGrid) -> FinalMesh:
    """Wrap an uncropped mesh as a FinalMesh (the crop-free branch)."""
    spans = [(j, 0.0, 1.0) for j in range(mesh.grid_cols)]
    return FinalMesh(mesh=mesh, x_offset=0.0, source_mesh=mesh, col_spans=spans)
