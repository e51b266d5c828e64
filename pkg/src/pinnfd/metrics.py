"""Error norms, convergence-order estimation, and grid interpolation.

All solution comparisons in this package go through the functions here so
that finite-difference and network-based solvers are measured on the same
footing.  Errors are evaluated on a fixed uniform assessment grid (513
nodes in 1D, 101x101 in 2D); fields living on a different grid are first
interpolated onto it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ASSESSMENT_NODES_1D = 513
ASSESSMENT_NODES_2D = 101


@dataclass(frozen=True)
class ErrorSummary:
    """L2-relative and max-norm error of an approximate field."""

    l2_relative: float
    l_inf: float
    n_points: int


def l2_norm(v) -> float:
    """Euclidean norm sqrt(sum v_i^2) of a non-empty vector."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ValueError("l2_norm of an empty array is undefined")
    return float(np.sqrt(np.sum(v * v)))


def relative_l2(approx, exact) -> float:
    """Relative L2 error ||approx - exact|| / ||exact||.

    Raises ValueError when the reference has zero norm, since the quotient
    is undefined there.
    """
    approx = np.asarray(approx, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    if approx.shape != exact.shape:
        raise ValueError(f"shape mismatch: {approx.shape} vs {exact.shape}")
    denom = l2_norm(exact)
    if denom == 0.0:
        raise ValueError("relative_l2 undefined: reference field has zero norm")
    return l2_norm(approx - exact) / denom


def error_summary(approx, exact) -> ErrorSummary:
    approx = np.asarray(approx, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    return ErrorSummary(
        l2_relative=relative_l2(approx, exact),
        l_inf=float(np.max(np.abs(approx - exact))),
        n_points=approx.size,
    )


def convergence_order(resolutions, errors) -> float:
    """Least-squares slope of log2(error) against log2(h).

    ``resolutions`` must increase by exact factors of 2 (h = 1/N), and all
    errors must be positive.  For a method of order p the returned slope
    is p.
    """
    res = np.asarray(resolutions, dtype=float)
    err = np.asarray(errors, dtype=float)
    if res.size < 2 or res.size != err.size:
        raise ValueError("need at least two (resolution, error) pairs")
    if np.any(err <= 0):
        raise ValueError("errors must be positive for a log-log fit")
    ratios = res[1:] / res[:-1]
    if np.any(ratios != 2.0):
        raise ValueError("resolutions must increase by exact factors of 2")
    log_h = -np.log2(res)
    log_e = np.log2(err)
    slope, _ = np.polyfit(log_h, log_e, 1)
    return float(slope)


def interpolate(field, points) -> np.ndarray:
    """Sample a :class:`~pinnfd.fdm.FieldSolution` at arbitrary points.

    Piecewise-linear in 1D, bilinear in 2D; exact at grid nodes.  Points
    outside the closed domain are rejected.
    """
    from .fdm import Grid1D, Grid2D  # local import to avoid a cycle

    if isinstance(field.grid, Grid1D):
        x = np.atleast_1d(np.asarray(points, dtype=float)).ravel()
        nodes = field.grid.nodes
        lo, hi = nodes[0], nodes[-1]
        bad = (x < lo) | (x > hi)
        if np.any(bad):
            raise ValueError(f"points outside domain [{lo}, {hi}]: {x[bad][:5]}")
        return np.interp(x, nodes, field.values)

    if isinstance(field.grid, Grid2D):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != 2:
            raise ValueError("2D interpolation expects points of shape (n, 2)")
        return _bilinear(field.grid, field.values, pts[:, 0], pts[:, 1])

    raise TypeError(f"unsupported grid type: {type(field.grid).__name__}")


def _bilinear(grid, values, x, y) -> np.ndarray:
    x_lo, x_hi = grid.x_bounds
    y_lo, y_hi = grid.y_bounds
    bad = (x < x_lo) | (x > x_hi) | (y < y_lo) | (y > y_hi)
    if np.any(bad):
        where = np.column_stack([x[bad], y[bad]])[:5]
        raise ValueError(f"points outside domain: {where}")

    # Cell indices, clamped so the last node falls in the last cell.
    fx = (x - x_lo) / grid.hx
    fy = (y - y_lo) / grid.hy
    ix = np.clip(fx.astype(int), 0, grid.nx - 1)
    iy = np.clip(fy.astype(int), 0, grid.ny - 1)
    tx = fx - ix
    ty = fy - iy

    v00 = values[iy, ix]
    v01 = values[iy, ix + 1]
    v10 = values[iy + 1, ix]
    v11 = values[iy + 1, ix + 1]
    return (
        v00 * (1 - tx) * (1 - ty)
        + v01 * tx * (1 - ty)
        + v10 * (1 - tx) * ty
        + v11 * tx * ty
    )


def assessment_grid_1d(lo: float, hi: float, n_nodes: int = ASSESSMENT_NODES_1D) -> np.ndarray:
    return np.linspace(lo, hi, n_nodes)


def assessment_grid_2d(n_nodes: int = ASSESSMENT_NODES_2D):
    """Uniform (x, y) meshgrid on the unit square, indexed [y, x]."""
    x = np.linspace(0.0, 1.0, n_nodes)
    y = np.linspace(0.0, 1.0, n_nodes)
    return np.meshgrid(x, y)
