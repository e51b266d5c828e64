"""Collocation and boundary point generation.

Interior points come from Latin Hypercube Sampling: each axis of [0,1) is
cut into n equal strata and every stratum receives exactly one coordinate,
with the axes permuted independently.  Boundary points are deterministic.

RNG discipline: everything is derived from PCG64
(``numpy.random.default_rng``).  ``lhs`` consumes its seed directly; draw
order is fixed as (permutation, offsets) per axis, axis 0 first.  Distinct
named streams (network init, collocation, per-epoch resampling) derive
their integer seeds from one base seed via ``derive_seed`` so that runs
are reproducible from a single configured seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .problems import FipSpec, ProblemSpec1D, ProblemSpec2D

# Offsets are clipped away from 0 so scaled interior points can never sit
# on the domain boundary.  The clip moves a probability-2^-30 sliver of
# each stratum: far below anything the stratification tests can resolve.
_EDGE = 2.0**-30


def derive_seed(base: int, *key: int) -> int:
    """Deterministic child seed for the named stream ``key``."""
    ss = np.random.SeedSequence(entropy=base, spawn_key=key)
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])


def lhs(n: int, dims: int, seed: int) -> np.ndarray:
    """n stratified points in [0,1)^dims, exactly one per axis-stratum."""
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if dims not in (1, 2):
        raise ValueError(f"dims must be 1 or 2, got {dims}")
    rng = np.random.default_rng(seed)
    cols = []
    for _ in range(dims):
        perm = rng.permutation(n)
        offsets = rng.uniform(0.0, 1.0, n)
        cols.append((perm + offsets) / n)
    return np.column_stack(cols)


def boundary_points_1d(spec: Union[ProblemSpec1D, FipSpec]):
    """The two endpoint (point, value) pairs of a 1D problem."""
    points = np.array([[spec.domain_lo], [spec.domain_hi]])
    values = np.array([spec.bc_lo, spec.bc_hi], dtype=float)
    return points, values


def boundary_points_2d(spec: ProblemSpec2D, n_per_edge: int, seed: int | None = None):
    """n_per_edge points on each edge of the rectangle, with their values.

    Each edge is traversed half-open at offsets (j + 1/2)/n, so corners are
    never emitted twice (or at all); n_per_edge = 1 gives the four edge
    midpoints.  Placement is deterministic; ``seed`` is accepted for
    interface symmetry with the interior sampler and ignored.
    """
    if n_per_edge < 1:
        raise ValueError(f"need at least one point per edge, got {n_per_edge}")
    (x0, x1), (y0, y1) = spec.x_bounds, spec.y_bounds
    t = (np.arange(n_per_edge) + 0.5) / n_per_edge
    xs = x0 + t * (x1 - x0)
    ys = y0 + t * (y1 - y0)
    edges = [
        np.column_stack([xs, np.full(n_per_edge, y0)]),
        np.column_stack([xs, np.full(n_per_edge, y1)]),
        np.column_stack([np.full(n_per_edge, x0), ys]),
        np.column_stack([np.full(n_per_edge, x1), ys]),
    ]
    points = np.vstack(edges)
    values = np.asarray(spec.boundary(points[:, 0], points[:, 1]), dtype=float)
    return points, values


@dataclass(frozen=True)
class SampleSet:
    """Interior collocation points plus boundary (point, value) pairs."""

    interior: np.ndarray
    boundary_points: np.ndarray
    boundary_values: np.ndarray
    seed: int

    def __post_init__(self):
        if self.interior.ndim != 2 or self.boundary_points.ndim != 2:
            raise ValueError("point arrays must be 2-d (n, dims)")
        if len(self.boundary_points) != len(self.boundary_values):
            raise ValueError("boundary points and values must pair up")


def sample_interior(spec, n: int, seed: int) -> np.ndarray:
    """LHS points scaled into the open interior of the problem's domain."""
    if isinstance(spec, ProblemSpec2D):
        unit = np.maximum(lhs(n, 2, seed), _EDGE)
        (x0, x1), (y0, y1) = spec.x_bounds, spec.y_bounds
        return np.column_stack(
            [x0 + unit[:, 0] * (x1 - x0), y0 + unit[:, 1] * (y1 - y0)]
        )
    unit = np.maximum(lhs(n, 1, seed), _EDGE)
    return spec.domain_lo + unit * (spec.domain_hi - spec.domain_lo)


def build_sample_set(spec, n_collocation: int, n_boundary_per_edge: int, seed: int) -> SampleSet:
    interior = sample_interior(spec, n_collocation, seed)
    if isinstance(spec, ProblemSpec2D):
        bpts, bvals = boundary_points_2d(spec, n_boundary_per_edge)
    else:
        bpts, bvals = boundary_points_1d(spec)
    return SampleSet(
        interior=interior, boundary_points=bpts, boundary_values=bvals, seed=seed
    )
