"""Loss assembly and optimization for the network-based solvers.

The total training loss is the unweighted (by default) sum of

* ``l_pde``  - mean squared PDE residual over interior collocation points,
* ``l_bc``   - mean squared boundary mismatch,
* ``l_data`` - mean squared mismatch at observation points (inverse runs).

All losses exist twice: as plain evaluators on numpy arrays (cheap, used
for reporting) and as taped builders on :class:`~pinnfd.autodiff.Var`
(used to obtain parameter gradients).  Both paths share the same formulas
and reduction order, so their values agree to the last bit.

Optimization is two-stage: Adam (textbook update with bias correction)
followed by L-BFGS (two-loop recursion, strong-Wolfe line search).  Both
optimizers act on the flat parameter vector and are deterministic for a
fixed seed and sampling schedule.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import metrics
from .autodiff import Var
from .fdm import MethodFip, solve_fip_fdm
from .neural import (
    NetworkArch,
    NetworkParams,
    forward,
    forward_with_input_derivs,
    init_params,
    params_to_vars,
    taped_forward,
    taped_forward_with_jets,
    vars_to_flat_grad,
)
from .problems import FipSpec, ProblemSpec2D
from .sampling import (
    boundary_points_1d,
    build_sample_set,
    derive_seed,
    sample_interior,
)

LBFGS_GRAD_TOL = 1e-9
LBFGS_REL_LOSS_TOL = 1e-12

# Named sub-streams of the run seed; see sampling module docstring.
_STREAM_INIT_U = 0
_STREAM_INIT_H = 1
_STREAM_COLLOCATION = 2
_STREAM_RESAMPLE = 3
_STREAM_LBFGS_SET = 4


@dataclass(frozen=True)
class TrainConfig:
    n_collocation: int = 256
    n_boundary_per_edge: int = 64
    adam_epochs: int = 5000
    adam_lr: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    lbfgs_max_iters: int = 500
    lbfgs_memory: int = 10
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    seed: int = 0
    resample_each_epoch: bool = False
    w_pde: float = 1.0
    w_bc: float = 1.0
    w_data: float = 1.0

    def __post_init__(self):
        if not 0 < self.adam_beta1 < self.adam_beta2 < 1:
            raise ValueError(
                f"need 0 < beta1 < beta2 < 1, got ({self.adam_beta1}, {self.adam_beta2})"
            )
        if self.lbfgs_memory < 1:
            raise ValueError(f"lbfgs_memory must be >= 1, got {self.lbfgs_memory}")
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError(
                f"need 0 < c1 < c2 < 1, got ({self.wolfe_c1}, {self.wolfe_c2})"
            )
        if self.n_collocation < 1:
            raise ValueError("n_collocation must be positive")
        if self.adam_epochs < 0 or self.lbfgs_max_iters < 0:
            raise ValueError("epoch/iteration counts must be non-negative")
        if self.adam_lr <= 0 or self.adam_eps <= 0:
            raise ValueError("adam_lr and adam_eps must be positive")
        if min(self.w_pde, self.w_bc, self.w_data) < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass(frozen=True)
class LossReport:
    """Weighted loss components; ``total`` is their sum by construction."""

    l_pde: float
    l_bc: float
    l_data: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        for name in ("l_pde", "l_bc", "l_data"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")
        object.__setattr__(self, "total", self.l_pde + self.l_bc + self.l_data)


@dataclass(frozen=True)
class Observations:
    """Sampled solution values used by the inverse experiments."""

    points: np.ndarray
    values: np.ndarray
    provenance: str

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("observation points and values must pair up")

    def __len__(self) -> int:
        return len(self.values)


class FipMode(enum.Enum):
    RECOVER_SOURCE = "recover-source"
    RECOVER_COEFFICIENT = "recover-coefficient"


# -- plain loss evaluators ----------------------------------------------


def _check_residual_finite(r: np.ndarray, points: np.ndarray):
    finite = np.isfinite(r)
    if not np.all(finite):
        bad = np.atleast_2d(points)[~finite.ravel()][:3]
        raise FloatingPointError(f"non-finite residual at points {bad}")


def pde_loss(params: NetworkParams, points: np.ndarray, source_values: np.ndarray) -> float:
    """Mean squared Poisson residual: sum_k d2u/dx_k^2 - f at each point."""
    if len(points) < 1:
        raise ValueError("need at least one collocation point")
    ev = forward_with_input_derivs(params, points)
    r = ev.second.sum(axis=1) - np.asarray(source_values, dtype=float).ravel()
    _check_residual_finite(r, points)
    return float(np.mean(r * r))


def fip_pde_loss(
    u_params: NetworkParams,
    h_params: NetworkParams,
    points: np.ndarray,
    known_values: np.ndarray,
    mode: FipMode,
) -> float:
    """Mean squared residual of U'' - a U - Q with the learned term substituted.

    ``known_values`` holds a(x_i) when recovering the source and Q(x_i)
    when recovering the coefficient; the other factor comes from the
    hidden-term network.
    """
    ev = forward_with_input_derivs(u_params, points)
    u = ev.values[:, 0]
    h = forward(h_params, points)[:, 0]
    known = np.asarray(known_values, dtype=float).ravel()
    if mode is FipMode.RECOVER_SOURCE:
        r = ev.second[:, 0] - known * u - h
    else:
        r = ev.second[:, 0] - h * u - known
    _check_residual_finite(r, points)
    return float(np.mean(r * r))


def bc_loss(params: NetworkParams, points: np.ndarray, values: np.ndarray) -> float:
    """Mean squared mismatch between the network and prescribed values."""
    if len(points) < 1:
        raise ValueError("need at least one boundary point")
    u = forward(params, points)[:, 0]
    r = u - np.asarray(values, dtype=float).ravel()
    _check_residual_finite(r, points)
    return float(np.mean(r * r))


def data_loss(params: NetworkParams, observations: Observations) -> float:
    """Mean squared mismatch at observed solution values."""
    return bc_loss(params, observations.points, observations.values)


# -- taped objectives ---------------------------------------------------


def _taped_mse(residual: Var) -> Var:
    return (residual * residual).mean()


def _poisson_objective(
    arch: NetworkArch,
    x_int: np.ndarray,
    f_vals: np.ndarray,
    bpts: np.ndarray,
    bvals: np.ndarray,
    cfg: TrainConfig,
    cell: dict,
) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    f_col = np.asarray(f_vals, dtype=float).reshape(-1, 1)
    bval_col = np.asarray(bvals, dtype=float).reshape(-1, 1)

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        params = NetworkParams.from_flat(arch, theta)
        wv, bv = params_to_vars(params)
        _, _, seconds = taped_forward_with_jets(wv, bv, x_int)
        lap = seconds[0] if len(seconds) == 1 else seconds[0] + seconds[1]
        l_pde = _taped_mse(lap - f_col) * cfg.w_pde
        l_bc = _taped_mse(taped_forward(wv, bv, bpts) - bval_col) * cfg.w_bc
        total = l_pde + l_bc
        total.backward()
        cell["report"] = LossReport(float(l_pde.value), float(l_bc.value))
        return float(total.value), vars_to_flat_grad(wv, bv)

    return objective


def _fip_objective(
    u_arch: NetworkArch,
    h_arch: NetworkArch,
    mode: FipMode,
    x_int: np.ndarray,
    known_vals: np.ndarray,
    bpts: np.ndarray,
    bvals: np.ndarray,
    obs: Observations,
    cfg: TrainConfig,
    cell: dict,
) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    known_col = np.asarray(known_vals, dtype=float).reshape(-1, 1)
    bval_col = np.asarray(bvals, dtype=float).reshape(-1, 1)
    obs_col = np.asarray(obs.values, dtype=float).reshape(-1, 1)
    n_u = u_arch.n_params

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        u_params = NetworkParams.from_flat(u_arch, theta[:n_u])
        h_params = NetworkParams.from_flat(h_arch, theta[n_u:])
        uw, ub = params_to_vars(u_params)
        hw, hb = params_to_vars(h_params)
        u, _, seconds = taped_forward_with_jets(uw, ub, x_int)
        h = taped_forward(hw, hb, x_int)
        if mode is FipMode.RECOVER_SOURCE:
            residual = seconds[0] - u * known_col - h
        else:
            residual = seconds[0] - h * u - known_col
        l_pde = _taped_mse(residual) * cfg.w_pde
        l_bc = _taped_mse(taped_forward(uw, ub, bpts) - bval_col) * cfg.w_bc
        l_data = _taped_mse(taped_forward(uw, ub, obs.points) - obs_col) * cfg.w_data
        total = l_pde + l_bc + l_data
        total.backward()
        cell["report"] = LossReport(
            float(l_pde.value), float(l_bc.value), float(l_data.value)
        )
        grad = np.concatenate([vars_to_flat_grad(uw, ub), vars_to_flat_grad(hw, hb)])
        return float(total.value), grad

    return objective


# -- optimizers ----------------------------------------------------------


@dataclass
class OptimizerResult:
    theta: np.ndarray
    history: list[float]
    converged: bool
    status: str
    n_evals: int


def adam_run(
    provider: Callable[[np.ndarray], tuple[float, np.ndarray]],
    theta0: np.ndarray,
    config: TrainConfig,
    epochs: int,
    callback: Optional[Callable[[int, np.ndarray, float], None]] = None,
) -> OptimizerResult:
    """Adam with bias correction over a flat parameter vector.

    The provider is called once per epoch at the current parameters; the
    history records that (pre-update) loss.  A non-finite loss or gradient
    aborts the run with the history collected so far.
    """
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    theta = np.array(theta0, dtype=float, copy=True)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    history: list[float] = []
    status = "ok"
    b1, b2 = config.adam_beta1, config.adam_beta2
    for t in range(1, epochs + 1):
        value, grad = provider(theta)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            status = "nonfinite-abort"
            break
        history.append(float(value))
        if callback is not None:
            callback(t, theta, float(value))
        m = b1 * m + (1.0 - b1) * grad
        v = b2 * v + (1.0 - b2) * grad * grad
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        theta = theta - config.adam_lr * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return OptimizerResult(
        theta=theta,
        history=history,
        converged=status == "ok",
        status=status,
        n_evals=len(history) + (1 if status != "ok" else 0),
    )


def _zoom(
    phi, a_lo, f_lo, d_lo, a_hi, f_hi, f0, d0, c1, c2, max_iter=40
):
    """Wolfe zoom stage: shrink [a_lo, a_hi] around an acceptable step.

    Quadratic interpolation through (a_lo, f_lo, d_lo) and (a_hi, f_hi),
    safeguarded by bisection.  Returns (alpha, value, grad) or None.
    """
    for _ in range(max_iter):
        span = a_hi - a_lo
        a = None
        denom = f_hi - f_lo - d_lo * span
        if np.isfinite(denom) and denom != 0.0:
            curv = denom / span**2
            if curv > 0:
                a = a_lo - d_lo / (2.0 * curv)
        lo, hi = (a_lo, a_hi) if a_lo < a_hi else (a_hi, a_lo)
        margin = 0.1 * abs(span)
        if a is None or not np.isfinite(a) or a < lo + margin or a > hi - margin:
            a = 0.5 * (a_lo + a_hi)
        f_a, g_a, d_a = phi(a)
        if not np.isfinite(f_a) or f_a > f0 + c1 * a * d0 or f_a >= f_lo:
            a_hi, f_hi = a, f_a
        else:
            if abs(d_a) <= -c2 * d0:
                return a, f_a, g_a
            if d_a * (a_hi - a_lo) >= 0:
                a_hi, f_hi = a_lo, f_lo
            a_lo, f_lo, d_lo = a, f_a, d_a
        if abs(a_hi - a_lo) <= 1e-16 * max(1.0, abs(a_lo), abs(a_hi)):
            break
    # No curvature-satisfying point found; fall back to the best point
    # with sufficient decrease so accepted losses stay monotone.
    if a_lo > 0 and f_lo <= f0 + c1 * a_lo * d0:
        f_a, g_a, _ = phi(a_lo)
        return a_lo, f_a, g_a
    return None


def _wolfe_line_search(evaluate, x, direction, f0, g0, c1, c2, max_brackets=25):
    """Strong-Wolfe step length along ``direction`` from ``x``.

    ``evaluate`` maps a parameter vector to (value, gradient).  Returns
    (alpha, value, gradient, n_evals) or None when no acceptable step is
    found (non-descent direction included).
    """
    d0 = float(g0 @ direction)
    if not np.isfinite(d0) or d0 >= 0:
        return None
    evals = [0]

    def phi(alpha):
        evals[0] += 1
        value, grad = evaluate(x + alpha * direction)
        return value, grad, float(grad @ direction)

    a_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = 1.0
    for i in range(max_brackets):
        f_a, g_a, d_a = phi(alpha)
        if not np.isfinite(f_a):
            alpha = 0.5 * (a_prev + alpha)
            continue
        if f_a > f0 + c1 * alpha * d0 or (i > 0 and f_a >= f_prev):
            hit = _zoom(phi, a_prev, f_prev, d_prev, alpha, f_a, f0, d0, c1, c2)
            break
        if abs(d_a) <= -c2 * d0:
            hit = (alpha, f_a, g_a)
            break
        if d_a >= 0:
            hit = _zoom(phi, alpha, f_a, d_a, a_prev, f_prev, f0, d0, c1, c2)
            break
        a_prev, f_prev, d_prev = alpha, f_a, d_a
        alpha *= 2.0
    else:
        hit = None
    if hit is None:
        return None
    return hit[0], hit[1], hit[2], evals[0]


def lbfgs_run(
    provider: Callable[[np.ndarray], tuple[float, np.ndarray]],
    theta0: np.ndarray,
    config: TrainConfig,
    callback: Optional[Callable[[int, np.ndarray, float], None]] = None,
) -> OptimizerResult:
    """Limited-memory BFGS with the two-loop recursion.

    Terminates on gradient max-norm <= 1e-9, relative loss change
    <= 1e-12, the iteration cap, or an irrecoverable line search.
    Accepted losses are monotone non-increasing (guaranteed by the
    sufficient-decrease condition); on line-search failure the best
    iterate so far is returned with a status flag.
    """
    theta = np.array(theta0, dtype=float, copy=True)
    if config.lbfgs_max_iters == 0:
        return OptimizerResult(theta, [], False, "max-iters", 0)

    f, g = provider(theta)
    n_evals = 1
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        return OptimizerResult(theta, [], False, "nonfinite-abort", n_evals)
    history = [float(f)]
    if np.max(np.abs(g)) <= LBFGS_GRAD_TOL:
        return OptimizerResult(theta, history, True, "gradient-converged", n_evals)

    pairs: list[tuple[np.ndarray, np.ndarray, float]] = []  # (s, y, rho)
    status = "max-iters"
    converged = False
    for it in range(1, config.lbfgs_max_iters + 1):
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(pairs):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if pairs:
            s, y, _ = pairs[-1]
            q *= (s @ y) / (y @ y)
        for (s, y, rho), a in zip(pairs, reversed(alphas)):
            b = rho * (y @ q)
            q += s * (a - b)
        direction = -q

        hit = _wolfe_line_search(
            provider, theta, direction, f, g, config.wolfe_c1, config.wolfe_c2
        )
        if hit is None and pairs:
            # Stale curvature pairs can produce a non-descent direction;
            # retry once along steepest descent.
            pairs.clear()
            hit = _wolfe_line_search(
                provider, theta, -g, f, g, config.wolfe_c1, config.wolfe_c2
            )
            direction = -g
        if hit is None:
            status = "line-search-failure"
            break
        alpha, f_new, g_new, evals = hit
        n_evals += evals

        step = alpha * direction
        theta = theta + step
        y_vec = g_new - g
        sy = float(step @ y_vec)
        if sy > 1e-10 * np.linalg.norm(step) * np.linalg.norm(y_vec):
            pairs.append((step, y_vec, 1.0 / sy))
            if len(pairs) > config.lbfgs_memory:
                pairs.pop(0)

        history.append(float(f_new))
        if callback is not None:
            callback(it, theta, float(f_new))

        # relative to the loss scale itself: near a zero-valued minimum the
        # per-step drop tracks f, so an absolute floor here would call
        # superlinear convergence a plateau while the gradient is still large
        rel_change = abs(f - f_new) / max(abs(f), abs(f_new), np.finfo(float).tiny)
        f, g = f_new, g_new
        if np.max(np.abs(g)) <= LBFGS_GRAD_TOL:
            status, converged = "gradient-converged", True
            break
        if rel_change <= LBFGS_REL_LOSS_TOL:
            status, converged = "loss-converged", True
            break
    return OptimizerResult(theta, history, converged, status, n_evals)


# -- training loops ------------------------------------------------------


@dataclass
class TrainReport:
    """Outcome of one training run, before any file artifacts are written."""

    params: NetworkParams
    history: list[tuple[int, LossReport]]
    final: LossReport
    error: Optional[metrics.ErrorSummary]
    wall_time: float
    adam_status: str
    lbfgs_status: Optional[str]
    seed: int

    @property
    def ok(self) -> bool:
        bad = {"nonfinite-abort"}
        return self.adam_status not in bad and (self.lbfgs_status or "") not in bad


def _assessment_points(problem) -> np.ndarray:
    if isinstance(problem, ProblemSpec2D):
        gx, gy = metrics.assessment_grid_2d()
        return np.column_stack([gx.ravel(), gy.ravel()])
    lo, hi = problem.domain_lo, problem.domain_hi
    return metrics.assessment_grid_1d(lo, hi)[:, None]


def _forward_error(params, problem) -> Optional[metrics.ErrorSummary]:
    if problem.exact is None:
        return None
    pts = _assessment_points(problem)
    pred = forward(params, pts)[:, 0]
    if isinstance(problem, ProblemSpec2D):
        exact = problem.exact(pts[:, 0], pts[:, 1])
    else:
        exact = problem.exact(pts[:, 0])
    return metrics.error_summary(pred, exact)


def train_forward_pinn(problem, arch: NetworkArch, config: TrainConfig) -> TrainReport:
    """Two-stage (Adam then L-BFGS) training of a forward Poisson solver.

    The L-BFGS stage always runs on a fixed collocation set: its line
    search needs a deterministic objective.  When per-epoch resampling is
    enabled it applies to the Adam stage only and the L-BFGS set is drawn
    from a separate stream.
    """
    t0 = time.perf_counter()
    samples = build_sample_set(
        problem,
        config.n_collocation,
        config.n_boundary_per_edge,
        derive_seed(config.seed, _STREAM_COLLOCATION),
    )
    bpts, bvals = samples.boundary_points, samples.boundary_values

    def source_at(pts: np.ndarray) -> np.ndarray:
        if isinstance(problem, ProblemSpec2D):
            return problem.source(pts[:, 0], pts[:, 1])
        return problem.source(pts[:, 0])

    theta = init_params(arch, derive_seed(config.seed, _STREAM_INIT_U)).to_flat()
    cell: dict = {}
    history: list[tuple[int, LossReport]] = []

    if config.resample_each_epoch:
        epoch_box = [0]

        def adam_provider(t):
            epoch_box[0] += 1
            pts = sample_interior(
                problem,
                config.n_collocation,
                derive_seed(config.seed, _STREAM_RESAMPLE, epoch_box[0]),
            )
            obj = _poisson_objective(arch, pts, source_at(pts), bpts, bvals, config, cell)
            return obj(t)

    else:
        adam_provider = _poisson_objective(
            arch, samples.interior, source_at(samples.interior), bpts, bvals, config, cell
        )

    adam_res = adam_run(
        adam_provider,
        theta,
        config,
        config.adam_epochs,
        callback=lambda t, th, v: history.append((t, cell["report"])),
    )

    if config.resample_each_epoch:
        x_fixed = sample_interior(
            problem, config.n_collocation, derive_seed(config.seed, _STREAM_LBFGS_SET)
        )
    else:
        x_fixed = samples.interior
    fixed_obj = _poisson_objective(
        arch, x_fixed, source_at(x_fixed), bpts, bvals, config, cell
    )

    lbfgs_status = None
    theta = adam_res.theta
    if adam_res.status == "ok" and config.lbfgs_max_iters > 0:
        offset = config.adam_epochs

        def on_accept(it, th, v):
            p = NetworkParams.from_flat(arch, th)
            lp = pde_loss(p, x_fixed, source_at(x_fixed)) * config.w_pde
            lb = bc_loss(p, bpts, bvals) * config.w_bc
            history.append((offset + it, LossReport(lp, lb)))

        lbfgs_res = lbfgs_run(fixed_obj, theta, config, callback=on_accept)
        theta = lbfgs_res.theta
        lbfgs_status = lbfgs_res.status

    params = NetworkParams.from_flat(arch, theta)
    final = LossReport(
        pde_loss(params, x_fixed, source_at(x_fixed)) * config.w_pde,
        bc_loss(params, bpts, bvals) * config.w_bc,
    )
    return TrainReport(
        params=params,
        history=history,
        final=final,
        error=_forward_error(params, problem),
        wall_time=time.perf_counter() - t0,
        adam_status=adam_res.status,
        lbfgs_status=lbfgs_status,
        seed=config.seed,
    )


# -- forward-inverse training ---------------------------------------------


def make_observations(spec: FipSpec, n_obs: int, fdm_resolution: int = 1024) -> Observations:
    """Equispaced interior observations of the finite-difference solution."""
    if n_obs < 2:
        raise ValueError(f"need at least 2 observations, got {n_obs}")
    field = solve_fip_fdm(spec, fdm_resolution, MethodFip.DIRECT)
    x = np.linspace(0.0, spec.length, n_obs + 2)[1:-1]
    values = metrics.interpolate(field, x)
    return Observations(
        points=x[:, None],
        values=values,
        provenance=f"fdm:direct:n={fdm_resolution}",
    )


@dataclass
class FipTrainReport:
    u_params: NetworkParams
    h_params: NetworkParams
    history: list[tuple[int, LossReport]]
    final: LossReport
    error_u: metrics.ErrorSummary
    error_h: metrics.ErrorSummary
    wall_time: float
    adam_status: str
    lbfgs_status: Optional[str]
    seed: int
    observations: Observations

    @property
    def ok(self) -> bool:
        bad = {"nonfinite-abort"}
        return self.adam_status not in bad and (self.lbfgs_status or "") not in bad


def fip_truth_function(spec: FipSpec, mode: FipMode):
    """Closed form the hidden-term network is trying to recover."""
    if mode is FipMode.RECOVER_SOURCE:
        return spec.source
    return spec.coefficient


def fip_known_function(spec: FipSpec, mode: FipMode):
    """Closed form treated as known data in the residual."""
    if mode is FipMode.RECOVER_SOURCE:
        return spec.coefficient
    return spec.source


def train_fip(
    spec: FipSpec,
    mode: FipMode,
    observations: Observations,
    archs: tuple[NetworkArch, NetworkArch],
    config: TrainConfig,
    reference_resolution: int = 1024,
) -> FipTrainReport:
    """Jointly train the solution network and the hidden-term network.

    The residual U'' - a U - Q is evaluated with the learned network
    substituted for the unknown term (Q when recovering the source, a
    when recovering the coefficient) and the known term from its closed
    form.  Errors are reported against the finite-difference solution
    (for U) and the true closed form (for the hidden term).
    """
    if len(observations) == 0:
        raise ValueError("observations must be non-empty")
    t0 = time.perf_counter()
    u_arch, h_arch = archs
    x_int = sample_interior(
        spec, config.n_collocation, derive_seed(config.seed, _STREAM_COLLOCATION)
    )
    known = fip_known_function(spec, mode)(x_int[:, 0])
    bpts, bvals = boundary_points_1d(spec)

    theta = np.concatenate(
        [
            init_params(u_arch, derive_seed(config.seed, _STREAM_INIT_U)).to_flat(),
            init_params(h_arch, derive_seed(config.seed, _STREAM_INIT_H)).to_flat(),
        ]
    )
    cell: dict = {}
    objective = _fip_objective(
        u_arch, h_arch, mode, x_int, known, bpts, bvals, observations, config, cell
    )
    history: list[tuple[int, LossReport]] = []
    adam_res = adam_run(
        objective,
        theta,
        config,
        config.adam_epochs,
        callback=lambda t, th, v: history.append((t, cell["report"])),
    )
    theta = adam_res.theta
    n_u = u_arch.n_params

    lbfgs_status = None
    if adam_res.status == "ok" and config.lbfgs_max_iters > 0:
        offset = config.adam_epochs

        def on_accept(it, th, v):
            up = NetworkParams.from_flat(u_arch, th[:n_u])
            hp = NetworkParams.from_flat(h_arch, th[n_u:])
            lp = fip_pde_loss(up, hp, x_int, known, mode) * config.w_pde
            lb = bc_loss(up, bpts, bvals) * config.w_bc
            ld = data_loss(up, observations) * config.w_data
            history.append((offset + it, LossReport(lp, lb, ld)))

        lbfgs_res = lbfgs_run(objective, theta, config, callback=on_accept)
        theta = lbfgs_res.theta
        lbfgs_status = lbfgs_res.status

    u_params = NetworkParams.from_flat(u_arch, theta[:n_u])
    h_params = NetworkParams.from_flat(h_arch, theta[n_u:])
    final = LossReport(
        fip_pde_loss(u_params, h_params, x_int, known, mode) * config.w_pde,
        bc_loss(u_params, bpts, bvals) * config.w_bc,
        data_loss(u_params, observations) * config.w_data,
    )

    grid = metrics.assessment_grid_1d(0.0, spec.length)
    reference = solve_fip_fdm(spec, reference_resolution, MethodFip.DIRECT)
    u_pred = forward(u_params, grid[:, None])[:, 0]
    error_u = metrics.error_summary(u_pred, metrics.interpolate(reference, grid))
    h_pred = forward(h_params, grid[:, None])[:, 0]
    error_h = metrics.error_summary(h_pred, fip_truth_function(spec, mode)(grid))

    return FipTrainReport(
        u_params=u_params,
        h_params=h_params,
        history=history,
        final=final,
        error_u=error_u,
        error_h=error_h,
        wall_time=time.perf_counter() - t0,
        adam_status=adam_res.status,
        lbfgs_status=lbfgs_status,
        seed=config.seed,
        observations=observations,
    )
