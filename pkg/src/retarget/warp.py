"""Importance-weighted as-uniform-as-possible mesh warping.

Column widths and row heights minimize a strictly convex quadratic that
penalizes a cell's departure from uniform scaling, weighted by cell
importance, subject to target-size equalities and minimum cell sizes.
Solved by a primal active-set method on the bound constraints.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import FeasibilityError, InputError, SolverError
from .importance import CellImportance
from .mesh import MeshGrid, UniformMeshSpec

# Small importance floor and uniform-scaling tether keeping the QP strictly
# convex even when whole rows/columns carry zero importance.
DEFAULT_LAMBDA = 0.01
DEFAULT_MU = 1e-3
DEFAULT_MIN_CELL_FRACTION = 0.15
MAX_ITER = 100


@dataclass
class WarpSolution:
    mesh: MeshGrid
    energy: float
    iterations: int
    converged: bool
    kkt_residual: float = 0.0
    energy_history: list = field(default_factory=list)


def _energy(w, h, omega_l, w0, h0, mu, fx, fy):
    ratio = w[None, :] / w0 - h[:, None] / h0
    e = float(np.sum(omega_l * w0 * h0 * ratio**2))
    e += mu * float(np.sum((w - fx * w0) ** 2))
    e += mu * float(np.sum((h - fy * h0) ** 2))
    return e


def solve_warp(
    spec: UniformMeshSpec,
    omega: CellImportance,
    target_width: float,
    target_height: float,
    min_cell_fraction: float = DEFAULT_MIN_CELL_FRACTION,
    lam: float = DEFAULT_LAMBDA,
    mu: float = DEFAULT_MU,
) -> WarpSolution:
    """Solve for the mesh minimizing the warp energy at the given target size."""
    R, C = spec.grid_rows, spec.grid_cols
    if omega.grid_rows != R or omega.grid_cols != C:
        raise InputError(
            f"cell importance is {omega.grid_rows}x{omega.grid_cols}, "
            f"mesh grid is {R}x{C}"
        )
    if target_width <= 0 or target_height <= 0:
        raise InputError("target dimensions must be positive")
    if not 0 < min_cell_fraction < 1:
        raise InputError("min_cell_fraction must be in (0, 1)")
    w0, h0 = spec.cell_w0, spec.cell_h0
    lb_w = min_cell_fraction * w0
    lb_h = min_cell_fraction * h0
    if C * lb_w > target_width + 1e-9 or R * lb_h > target_height + 1e-9:
        raise FeasibilityError(
            "minimum cell sizes exceed the target dimensions; "
            "reduce min_cell_fraction or the grid resolution"
        )

    omega_l = omega.omega + lam
    fx = target_width / spec.source_width
    fy = target_height / spec.source_height

    n = C + R
    # E = 1/2 x^T H x + g^T x + const, x = [w_0..w_{C-1}, h_0..h_{R-1}]
    H = np.zeros((n, n))
    coef = w0 * h0
    col_sums = omega_l.sum(axis=0)  # over rows, per column
    row_sums = omega_l.sum(axis=1)
    H[np.arange(C), np.arange(C)] = 2 * coef * col_sums / w0**2 + 2 * mu
    H[C + np.arange(R), C + np.arange(R)] = 2 * coef * row_sums / h0**2 + 2 * mu
    cross = -2 * coef * omega_l / (w0 * h0)  # (R, C)
    H[:C, C:] = cross.T
    H[C:, :C] = cross
    g = np.concatenate([np.full(C, -2 * mu * fx * w0), np.full(R, -2 * mu * fy * h0)])

    A = np.zeros((2, n))
    A[0, :C] = 1.0
    A[1, C:] = 1.0
    b = np.array([target_width, target_height], dtype=float)
    lb = np.concatenate([np.full(C, lb_w), np.full(R, lb_h)])

    x = np.concatenate([np.full(C, target_width / C), np.full(R, target_height / R)])
    x = np.maximum(x, lb)
    active: set[int] = set(np.flatnonzero(x <= lb + 1e-12).tolist())

    def split_eval(xv):
        return _energy(xv[:C], xv[C:], omega_l, w0, h0, mu, fx, fy)

    energy_history = [split_eval(x)]
    nu = np.zeros(2)
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        act = sorted(active)
        free = [i for i in range(n) if i not in active]
        nf = len(free)
        Hff = H[np.ix_(free, free)]
        Af = A[:, free]
        rhs_top = -(g[free] + H[np.ix_(free, act)] @ lb[act]) if act else -g[free]
        rhs_bot = b - (A[:, act] @ lb[act] if act else 0.0)
        # Drop an equality row if every variable on that axis is pinned.
        rows = [r for r in range(2) if np.any(Af[r] != 0)]
        kkt = np.block(
            [
                [Hff, Af[rows].T],
                [Af[rows], np.zeros((len(rows), len(rows)))],
            ]
        )
        rhs = np.concatenate([rhs_top, rhs_bot[rows]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        x_sub = sol[:nf]
        nu = np.zeros(2)
        nu[rows] = sol[nf:]

        x_target = lb.copy()
        x_target[free] = x_sub
        p = x_target - x

        if np.max(np.abs(p)) <= 1e-11:
            # At the subspace minimizer; check bound multipliers.
            grad = H @ x + g
            mu_bound = grad + A.T @ nu
            worst = None
            worst_val = -1e-9
            for i in act:
                if mu_bound[i] < worst_val:
                    worst_val = mu_bound[i]
                    worst = i
            if worst is None:
                converged = True
                break
            active.discard(worst)
            continue

        # Ratio test against the lower bounds of free variables.
        alpha = 1.0
        blocking = None
        for i in free:
            if p[i] < -1e-15:
                a_i = (lb[i] - x[i]) / p[i]
                if a_i < alpha:
                    alpha = a_i
                    blocking = i
        x = x + alpha * p
        if blocking is not None:
            x[blocking] = lb[blocking]
            active.add(blocking)
        energy_history.append(split_eval(x))

    energy = split_eval(x)
    energy_history.append(energy)

    grad = H @ x + g
    mu_full = np.zeros(n)
    stat = grad + A.T @ nu
    act_idx = sorted(active)
    if act_idx:
        mu_full[act_idx] = stat[act_idx]
    residual = max(
        float(np.max(np.abs(stat - mu_full))),
        float(np.max(np.abs(A @ x - b))),
        float(max(0.0, -mu_full.min(initial=0.0))),
        float(np.max(np.abs(mu_full * (x - lb))) if act_idx else 0.0),
    )

    solution = WarpSolution(
        mesh=MeshGrid(col_widths=x[:C], row_heights=x[C:]),
        energy=energy,
        iterations=iterations,
        converged=converged,
        kkt_residual=residual,
        energy_history=energy_history,
    )
    if not converged:
        raise SolverError(
            f"warp solve did not converge within {MAX_ITER} iterations", solution=solution
        )
    return solution
