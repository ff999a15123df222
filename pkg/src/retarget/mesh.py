"""Axis-aligned mesh primitives.

A mesh is fully described by per-column widths and per-row heights; the
induced warp is separable in x and y.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class MeshGrid:
    """Ordered column widths and row heights (pixels, positive reals)."""

    col_widths: np.ndarray
    row_heights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "col_widths", np.asarray(self.col_widths, dtype=float))
        object.__setattr__(self, "row_heights", np.asarray(self.row_heights, dtype=float))
        if self.col_widths.ndim != 1 or self.row_heights.ndim != 1:
            raise InputError("mesh widths/heights must be 1-D sequences")
        if np.any(self.col_widths <= 0) or np.any(self.row_heights <= 0):
            raise InputError("mesh cell sizes must be strictly positive")

    @property
    def grid_cols(self) -> int:
        return len(self.col_widths)

    @property
    def grid_rows(self) -> int:
        return len(self.row_heights)

    @property
    def width(self) -> float:
        return float(self.col_widths.sum())

    @property
    def height(self) -> float:
        return float(self.row_heights.sum())

    def col_edges(self) -> np.ndarray:
        """Cumulative x positions of the vertical grid lines, starting at 0."""
        return np.concatenate([[0.0], np.cumsum(self.col_widths)])

    def row_edges(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.row_heights)])

    def transposed(self) -> "MeshGrid":
        return MeshGrid(col_widths=self.row_heights.copy(), row_heights=self.col_widths.copy())

    def to_dict(self) -> dict:
        return {
            "grid_cols": self.grid_cols,
            "grid_rows": self.grid_rows,
            "col_widths": self.col_widths.tolist(),
            "row_heights": self.row_heights.tolist(),
        }


@dataclass(frozen=True)
class UniformMeshSpec:
    """Source dimensions plus grid resolution; fixes the reference cell size."""

    source_width: int
    source_height: int
    grid_cols: int
    grid_rows: int
    cell_w0: float = field(init=False)
    cell_h0: float = field(init=False)

    def __post_init__(self):
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise InputError("grid must have at least one row and one column")
        if self.source_width <= 0 or self.source_height <= 0:
            raise InputError("source dimensions must be positive")
        object.__setattr__(self, "cell_w0", self.source_width / self.grid_cols)
        object.__setattr__(self, "cell_h0", self.source_height / self.grid_rows)

    def transposed(self) -> "UniformMeshSpec":
        return UniformMeshSpec(
            source_width=self.source_height,
            source_height=self.source_width,
            grid_cols=self.grid_rows,
            grid_rows=self.grid_cols,
        )


def build_uniform_mesh(spec: UniformMeshSpec) -> MeshGrid:
    """Mesh with all cells at the reference size (the unwarped state)."""
    return MeshGrid(
        col_widths=np.full(spec.grid_cols, spec.cell_w0),
        row_heights=np.full(spec.grid_rows, spec.cell_h0),
    )
