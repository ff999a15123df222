"""Distortion measure over warped meshes and the bounded-warp search.

The distortion of a mesh is the area- and importance-weighted mean departure
of its cells from their original aspect ratio. The search finds the maximum
width warp whose distortion stays within a threshold; the remainder of the
size change is left to cropping.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .importance import CellImportance
from .mesh import MeshGrid, UniformMeshSpec, build_uniform_mesh
from .warp import DEFAULT_MIN_CELL_FRACTION, solve_warp

logger = logging.getLogger(__name__)

DENSE_SCAN_SAMPLES = 64


@dataclass(frozen=True)
class DistortionParams:
    """Tunables: background penalty, distortion threshold, search precision."""

    omega0: float = 1.0
    d_threshold: float = 1.0
    bisection_tol: float = 1e-3
    max_bisection_iters: int = 30

    def __post_init__(self):
        if self.omega0 < 0:
            raise InputError("omega0 must be non-negative")
        if self.d_threshold < 0:
            raise InputError("d_threshold must be non-negative")
        if self.bisection_tol <= 0:
            raise InputError("bisection_tol must be positive")


@dataclass
class WarpSearchResult:
    factor: float
    mesh: MeshGrid
    distortion: float
    reached_target: bool
    energy: float = 0.0
    diagnostics: list = field(default_factory=list)


def distortion(mesh: MeshGrid, spec: UniformMeshSpec, omega: CellImportance, omega0: float) -> float:
    """Area-normalized sum over cells of (aspect-ratio change) * area * (importance + omega0)."""
    if mesh.grid_cols != spec.grid_cols or mesh.grid_rows != spec.grid_rows:
        raise InputError("mesh grid does not match the uniform mesh spec")
    if omega.grid_rows != spec.grid_rows or omega.grid_cols != spec.grid_cols:
        raise InputError("cell importance grid does not match the mesh grid")
    w = mesh.col_widths
    h = mesh.row_heights
    if np.any(w <= 0) or np.any(h <= 0):
        raise InputError("mesh cells must have positive size")
    wp = w / spec.cell_w0  # normalized widths, per column
    hp = h / spec.cell_h0  # normalized heights, per row
    ratio = np.maximum(hp[:, None], wp[None, :]) / np.minimum(hp[:, None], wp[None, :]) - 1.0
    areas = h[:, None] * w[None, :]
    total_area = areas.sum()
    return float(np.sum(ratio * areas * (omega.omega + omega0)) / total_area)


def _probe(spec, omega, factor, params, min_cell_fraction):
    """Warp at the given width factor (height pinned to source) and measure D."""
    if factor == 1.0:
        mesh, energy = build_uniform_mesh(spec), 0.0
    else:
        sol = solve_warp(
            spec,
            omega,
            target_width=factor * spec.source_width,
            target_height=spec.source_height,
            min_cell_fraction=min_cell_fraction,
        )
        mesh, energy = sol.mesh, sol.energy
    return mesh, distortion(mesh, spec, omega, params.omega0), energy


def max_admissible_warp(
    spec: UniformMeshSpec,
    omega: CellImportance,
    target_width: float,
    params: DistortionParams,
    min_cell_fraction: float = DEFAULT_MIN_CELL_FRACTION,
) -> WarpSearchResult:
    """Largest width reduction whose distortion stays within the threshold.

    If warping straight to the target already satisfies the threshold, that
    mesh is returned with reached_target set. Otherwise the warp factor is
    bisected between the target factor and 1, assuming distortion grows as
    the factor shrinks; a detected non-monotonicity falls back to a dense
    scan.
    """
    if not 0 < target_width < spec.source_width:
        raise InputError("target width must be positive and below the source width")
    f_target = target_width / spec.source_width

    mesh, d, energy = _probe(spec, omega, f_target, params, min_cell_fraction)
    if d <= params.d_threshold:
        return WarpSearchResult(
            factor=f_target, mesh=mesh, distortion=d, reached_target=True, energy=energy
        )

    diagnostics: list = []
    lo, d_lo = f_target, d  # D(lo) > threshold
    hi, d_hi = 1.0, 0.0  # identity, D = 0
    best_mesh, best_d, best_e = build_uniform_mesh(spec), 0.0, 0.0
    for _ in range(params.max_bisection_iters):
        if hi - lo <= params.bisection_tol:
            break
        mid = 0.5 * (lo + hi)
        mesh_mid, d_mid, e_mid = _probe(spec, omega, mid, params, min_cell_fraction)
        if d_mid + 1e-9 < d_hi or d_mid - 1e-9 > d_lo:
            # Bracket is not monotone; scan densely instead.
            diagnostics.append(
                f"non-monotone distortion in bracket [{lo:.4f}, {hi:.4f}]; dense scan"
            )
            logger.warning(diagnostics[-1])
            return _dense_scan(spec, omega, f_target, params, min_cell_fraction, diagnostics)
        if d_mid <= params.d_threshold:
            hi, d_hi = mid, d_mid
            best_mesh, best_d, best_e = mesh_mid, d_mid, e_mid
        else:
            lo, d_lo = mid, d_mid
    return WarpSearchResult(
        factor=hi,
        mesh=best_mesh,
        distortion=best_d,
        reached_target=False,
        energy=best_e,
        diagnostics=diagnostics,
    )


def _dense_scan(spec, omega, f_target, params, min_cell_fraction, diagnostics):
    best = None
    for f in np.linspace(f_target, 1.0, DENSE_SCAN_SAMPLES):
        mesh, d, energy = _probe(spec, omega, float(f), params, min_cell_fraction)
        if d <= params.d_threshold:
            best = WarpSearchResult(
                factor=float(f),
                mesh=mesh,
                distortion=d,
                reached_target=math.isclose(f, f_target),
                energy=energy,
                diagnostics=diagnostics,
            )
            break
    if best is None:
        # Identity is always admissible (D = 0).
        mesh = build_uniform_mesh(spec)
        best = WarpSearchResult(
            factor=1.0, mesh=mesh, distortion=0.0, reached_target=False, diagnostics=diagnostics
        )
    return best


def max_admissible_expansion(
    spec: UniformMeshSpec,
    omega: CellImportance,
    target_width: float,
    params: DistortionParams,
    min_cell_fraction: float = DEFAULT_MIN_CELL_FRACTION,
) -> WarpSearchResult:
    """Expansion analog: largest width stretch with distortion within threshold."""
    if target_width <= spec.source_width:
        raise InputError("expansion requires a target wider than the source")
    f_target = target_width / spec.source_width
    mesh, d, energy = _probe(spec, omega, f_target, params, min_cell_fraction)
    if d <= params.d_threshold:
        return WarpSearchResult(
            factor=f_target, mesh=mesh, distortion=d, reached_target=True, energy=energy
        )
    lo, hi = 1.0, f_target  # D(lo) = 0 <= threshold < D(hi)
    best_mesh, best_d, best_f, best_e = build_uniform_mesh(spec), 0.0, 1.0, 0.0
    for _ in range(params.max_bisection_iters):
        if hi - lo <= params.bisection_tol:
            break
        mid = 0.5 * (lo + hi)
        mesh_mid, d_mid, e_mid = _probe(spec, omega, mid, params, min_cell_fraction)
        if d_mid <= params.d_threshold:
            lo = mid
            best_mesh, best_d, best_f, best_e = mesh_mid, d_mid, mid, e_mid
        else:
            hi = mid
    return WarpSearchResult(
        factor=best_f, mesh=best_mesh, distortion=best_d, reached_target=False, energy=best_e
    )
