"""Turn validated requests into runs on disk.

Each entry point resolves per-problem defaults, calls the core solvers or
trainers, writes the artifact set for the run directory, and returns a
report model.  The HTTP service and the CLI both call straight into these
functions, so a run behaves identically no matter how it was requested.

Artifact layout for a single run (under ``<outdir>/<experiment_id>/``):

* ``config.ini``        fully resolved settings echo (reloadable)
* ``report.csv``        one summary row; no wall-clock column so reruns
                        with the same seed are byte-identical
* ``timing.json``       wall-clock sidecar, excluded from determinism
* ``solution.csv``      field values (``x[,y],u``)
* ``loss_history.csv``  per-step loss components (training runs)
* ``checkpoint.txt``    network parameters (training runs)

The forward-inverse runs write ``solution_u.csv`` / ``solution_h.csv``
and a checkpoint per network instead of the single ``solution.csv``.
"""

from __future__ import annotations

import configparser
import json
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import metrics
from .fdm import (
    Method2D,
    MethodFip,
    solve_fip_fdm,
    solve_poisson_1d,
    solve_poisson_2d,
)
from .neural import NetworkArch, NetworkParams, forward, save_checkpoint
from .problems import (
    FipSpec,
    ProblemSpec1D,
    ProblemSpec2D,
    SourceMode,
    get_problem,
)
from .service.schemas import (
    BenchReport,
    BenchRequest,
    BenchRow,
    ErrorSummaryModel,
    FipRequest,
    LossReportModel,
    RunReport,
    SolveFdmRequest,
    TrainPinnRequest,
    TrainSettings,
)
from .training import (
    FipMode,
    TrainConfig,
    fip_truth_function,
    make_observations,
    train_fip,
    train_forward_pinn,
)

_FDM_DEFAULT_METHOD = {"poisson1d": "thomas", "poisson2d": "sor", "fip": "direct"}
_FDM_ALLOWED_METHODS = {
    "poisson1d": ("thomas",),
    "poisson2d": ("gauss_seidel", "sor", "direct"),
    "fip": ("direct", "jacobi"),
}

# Per-problem training schedules.  The 2D forward problem needs a larger
# collocation set, a longer polish stage, and a boundary weight: with unit
# weights the boundary residual stalls near sqrt(l_bc) ~ 4e-4, which is a
# 5e-2 relative error on a solution whose RMS is only ~4e-3.
_TRAIN_DEFAULTS: dict[str, dict] = {
    "poisson1d": {
        "n_collocation": 512,
        "adam_epochs": 5_000,
        "lbfgs_max_iters": 500,
        "resample_each_epoch": True,
    },
    "poisson2d": {
        "n_collocation": 2_048,
        "adam_epochs": 10_000,
        "lbfgs_max_iters": 8_000,
        "w_bc": 10.0,
    },
    "fip": {
        "n_collocation": 256,
        "adam_epochs": 40_000,
        "lbfgs_max_iters": 0,
    },
}
_DEFAULT_ARCH = {
    "poisson1d": (1, 20, 20, 20, 1),
    "poisson2d": (2, 20, 20, 20, 1),
    "fip": (1, 20, 20, 20, 1),
}
_DEFAULT_H_ARCH = (1, 20, 20, 1)

_TRAIN_FIELDS = (
    "n_collocation",
    "n_boundary_per_edge",
    "adam_epochs",
    "adam_lr",
    "adam_beta1",
    "adam_beta2",
    "adam_eps",
    "lbfgs_max_iters",
    "lbfgs_memory",
    "wolfe_c1",
    "wolfe_c2",
    "w_pde",
    "w_bc",
    "w_data",
    "seed",
    "resample_each_epoch",
)

_REPORT_COLUMNS = (
    "experiment_id",
    "method",
    "problem_id",
    "l2_relative",
    "l_inf",
    "n_points",
    "l2_relative_hidden",
    "l_pde",
    "l_bc",
    "l_data",
    "total_loss",
    "iterations",
    "seed",
    "converged",
)


def _fmt(value) -> str:
    """Stable text form for CSV cells and config echoes."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")


def _write_report_csv(path: Path, row: dict) -> None:
    _write_csv(path, _REPORT_COLUMNS, [[row.get(c) for c in _REPORT_COLUMNS]])


def _write_loss_history(path: Path, history) -> None:
    rows = [
        [epoch, rep.l_pde, rep.l_bc, rep.l_data, rep.total]
        for epoch, rep in history
    ]
    _write_csv(path, ("epoch", "l_pde", "l_bc", "l_data", "total"), rows)


def _write_config_echo(path: Path, sections: dict[str, dict[str, str]]) -> None:
    parser = configparser.ConfigParser()
    for name, keys in sections.items():
        parser[name] = keys
    with path.open("w") as fh:
        parser.write(fh)


def _write_timing(path: Path, wall_time: float, stages: Optional[dict] = None) -> None:
    payload: dict = {"wall_time": wall_time}
    if stages:
        payload["stages"] = stages
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _run_dir(outdir: str, experiment_id: str) -> Path:
    path = Path(outdir) / experiment_id
    path.mkdir(parents=True, exist_ok=True)
    return path


def _problem_echo(req_problem) -> dict[str, str]:
    return {
        "id": req_problem.id,
        "source_mode": req_problem.source_mode,
        "b1": _fmt(req_problem.b1),
        "w1": _fmt(req_problem.w1),
        "length": _fmt(req_problem.length),
    }


def _build_problem(settings):
    return get_problem(
        settings.id,
        source_mode=SourceMode(settings.source_mode),
        b1=settings.b1,
        w1=settings.w1,
        length=settings.length,
    )


def _error_model(summary) -> Optional[ErrorSummaryModel]:
    if summary is None:
        return None
    return ErrorSummaryModel(
        l2_relative=summary.l2_relative,
        l_inf=summary.l_inf,
        n_points=summary.n_points,
    )


def _loss_model(report) -> Optional[LossReportModel]:
    if report is None:
        return None
    return LossReportModel(
        l_pde=report.l_pde, l_bc=report.l_bc, l_data=report.l_data, total=report.total
    )


# ---------------------------------------------------------------------------
# training-settings resolution


def resolve_train_config(settings: TrainSettings, problem_id: str) -> TrainConfig:
    """Apply per-problem defaults to fields the caller left unset."""
    if problem_id not in _TRAIN_DEFAULTS:
        raise KeyError(f"no training defaults for problem {problem_id!r}")
    kwargs = dict(_TRAIN_DEFAULTS[problem_id])
    for name in _TRAIN_FIELDS:
        value = getattr(settings, name)
        if name in settings.model_fields_set:
            kwargs[name] = value
        elif name not in kwargs and value is not None:
            kwargs[name] = value
    return TrainConfig(**kwargs)


def resolve_arch(settings: TrainSettings, problem_id: str) -> NetworkArch:
    layers = settings.arch if settings.arch else _DEFAULT_ARCH[problem_id]
    return NetworkArch(tuple(layers))


def resolve_h_arch(settings: TrainSettings) -> NetworkArch:
    layers = settings.h_arch if settings.h_arch else _DEFAULT_H_ARCH
    return NetworkArch(tuple(layers))


def _train_echo(config: TrainConfig, arch: NetworkArch, h_arch: Optional[NetworkArch]):
    sampling = {
        "n_collocation": _fmt(config.n_collocation),
        "n_boundary_per_edge": _fmt(config.n_boundary_per_edge),
        "resample_each_epoch": _fmt(config.resample_each_epoch),
        "seed": _fmt(config.seed),
    }
    train = {
        "arch": _fmt(list(arch.layers)),
        "adam_epochs": _fmt(config.adam_epochs),
        "adam_lr": _fmt(config.adam_lr),
        "adam_beta1": _fmt(config.adam_beta1),
        "adam_beta2": _fmt(config.adam_beta2),
        "adam_eps": _fmt(config.adam_eps),
        "lbfgs_max_iters": _fmt(config.lbfgs_max_iters),
        "lbfgs_memory": _fmt(config.lbfgs_memory),
        "wolfe_c1": _fmt(config.wolfe_c1),
        "wolfe_c2": _fmt(config.wolfe_c2),
        "w_pde": _fmt(config.w_pde),
        "w_bc": _fmt(config.w_bc),
        "w_data": _fmt(config.w_data),
    }
    if h_arch is not None:
        train["h_arch"] = _fmt(list(h_arch.layers))
    return sampling, train


# ---------------------------------------------------------------------------
# FDM runs


def _fdm_error(problem, field):
    """Native-grid error against the exact solution, when one exists."""
    if isinstance(problem, FipSpec) or problem.exact is None:
        return None
    if isinstance(problem, ProblemSpec1D):
        exact = problem.exact(field.grid.nodes)
        return metrics.error_summary(field.values, exact)
    xx, yy = np.meshgrid(field.grid.nodes_x, field.grid.nodes_y)
    return metrics.error_summary(field.values, problem.exact(xx, yy))


def _write_solution_1d(path: Path, x: np.ndarray, u: np.ndarray) -> None:
    data = np.column_stack([x, u])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,u", comments="")


def _write_solution_2d(path: Path, nodes_x, nodes_y, values) -> None:
    xx, yy = np.meshgrid(nodes_x, nodes_y)
    data = np.column_stack([xx.ravel(), yy.ravel(), values.ravel()])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,y,u", comments="")


def run_solve_fdm(req: SolveFdmRequest) -> RunReport:
    t0 = time.perf_counter()
    problem = _build_problem(req.problem)
    method = req.fdm.method or _FDM_DEFAULT_METHOD[req.problem.id]
    if method not in _FDM_ALLOWED_METHODS[req.problem.id]:
        allowed = ", ".join(_FDM_ALLOWED_METHODS[req.problem.id])
        raise ValueError(
            f"method {method!r} not available for {req.problem.id} (use one of: {allowed})"
        )

    n = req.fdm.resolution
    omega = req.fdm.omega
    if isinstance(problem, ProblemSpec1D):
        field = solve_poisson_1d(problem, n)
    elif isinstance(problem, ProblemSpec2D):
        field = solve_poisson_2d(
            problem,
            n,
            n,
            method=Method2D(method),
            tol=req.fdm.tol,
            max_iter=req.fdm.max_iter,
            omega=omega,
        )
    else:
        field = solve_fip_fdm(
            problem,
            n,
            method=MethodFip(method),
            tol=req.fdm.tol,
            max_iter=req.fdm.max_iter,
        )

    error = _fdm_error(problem, field)
    experiment_id = req.experiment_id or f"fdm-{req.problem.id}"
    run_dir = _run_dir(req.outdir, experiment_id)

    if isinstance(problem, ProblemSpec2D):
        _write_solution_2d(
            run_dir / "solution.csv", field.grid.nodes_x, field.grid.nodes_y, field.values
        )
    else:
        _write_solution_1d(run_dir / "solution.csv", field.grid.nodes, field.values)

    sections = {
        "problem": _problem_echo(req.problem),
        "fdm": {
            "resolution": _fmt(n),
            "method": method,
            "tol": _fmt(req.fdm.tol),
            "max_iter": _fmt(req.fdm.max_iter),
            "omega": _fmt(omega),
        },
        "output": {
            "outdir": req.outdir,
            "experiment_id": experiment_id,
            "seed": _fmt(req.seed),
        },
    }
    _write_config_echo(run_dir / "config.ini", sections)

    row = {
        "experiment_id": experiment_id,
        "method": "fdm",
        "problem_id": req.problem.id,
        "iterations": field.iterations,
        "seed": req.seed,
        "converged": field.converged,
    }
    if error is not None:
        row.update(
            l2_relative=error.l2_relative, l_inf=error.l_inf, n_points=error.n_points
        )
    _write_report_csv(run_dir / "report.csv", row)

    wall_time = time.perf_counter() - t0
    _write_timing(run_dir / "timing.json", wall_time, {"solve": field.wall_time})

    return RunReport(
        experiment_id=experiment_id,
        method="fdm",
        problem_id=req.problem.id,
        config=sections,
        error=_error_model(error),
        final_loss=None,
        iterations=field.iterations,
        wall_time=wall_time,
        seed=req.seed,
        converged=field.converged,
        ok=field.converged,
        artifacts={
            "run_dir": str(run_dir),
            "config": str(run_dir / "config.ini"),
            "report": str(run_dir / "report.csv"),
            "solution": str(run_dir / "solution.csv"),
            "timing": str(run_dir / "timing.json"),
        },
    )


# ---------------------------------------------------------------------------
# forward PINN runs


def _pinn_solution_csv(run_dir: Path, problem, params: NetworkParams) -> Path:
    path = run_dir / "solution.csv"
    if isinstance(problem, ProblemSpec2D):
        xx, yy = metrics.assessment_grid_2d()
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        u = forward(params, pts).ravel()
        data = np.column_stack([pts[:, 0], pts[:, 1], u])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,y,u", comments="")
    else:
        x = metrics.assessment_grid_1d(problem.domain_lo, problem.domain_hi)
        u = forward(params, x[:, None]).ravel()
        _write_solution_1d(path, x, u)
    return path


def run_train_pinn(req: TrainPinnRequest) -> RunReport:
    t0 = time.perf_counter()
    if req.problem.id == "fip":
        raise ValueError("fip problems train through the fip command, not train-pinn")
    problem = _build_problem(req.problem)
    config = resolve_train_config(req.train, req.problem.id)
    arch = resolve_arch(req.train, req.problem.id)

    report = train_forward_pinn(problem, arch, config)

    experiment_id = req.experiment_id or f"pinn-{req.problem.id}"
    run_dir = _run_dir(req.outdir, experiment_id)

    _pinn_solution_csv(run_dir, problem, report.params)
    _write_loss_history(run_dir / "loss_history.csv", report.history)
    save_checkpoint(run_dir / "checkpoint.txt", report.params, config.seed)

    sampling, train = _train_echo(config, arch, None)
    sections = {
        "problem": _problem_echo(req.problem),
        "sampling": sampling,
        "train": train,
        "output": {"outdir": req.outdir, "experiment_id": experiment_id},
    }
    _write_config_echo(run_dir / "config.ini", sections)

    row = {
        "experiment_id": experiment_id,
        "method": "pinn",
        "problem_id": req.problem.id,
        "l_pde": report.final.l_pde,
        "l_bc": report.final.l_bc,
        "l_data": report.final.l_data,
        "total_loss": report.final.total,
        "iterations": len(report.history),
        "seed": config.seed,
        "converged": report.ok,
    }
    if report.error is not None:
        row.update(
            l2_relative=report.error.l2_relative,
            l_inf=report.error.l_inf,
            n_points=report.error.n_points,
        )
    _write_report_csv(run_dir / "report.csv", row)

    wall_time = time.perf_counter() - t0
    _write_timing(run_dir / "timing.json", wall_time, {"train": report.wall_time})

    return RunReport(
        experiment_id=experiment_id,
        method="pinn",
        problem_id=req.problem.id,
        config=sections,
        error=_error_model(report.error),
        final_loss=_loss_model(report.final),
        iterations=len(report.history),
        wall_time=wall_time,
        seed=config.seed,
        converged=report.ok,
        ok=report.ok,
        artifacts={
            "run_dir": str(run_dir),
            "config": str(run_dir / "config.ini"),
            "report": str(run_dir / "report.csv"),
            "solution": str(run_dir / "solution.csv"),
            "loss_history": str(run_dir / "loss_history.csv"),
            "checkpoint": str(run_dir / "checkpoint.txt"),
            "timing": str(run_dir / "timing.json"),
        },
    )


# ---------------------------------------------------------------------------
# forward-inverse runs


def run_fip(req: FipRequest) -> RunReport:
    t0 = time.perf_counter()
    spec = get_problem(
        "fip", b1=req.problem.b1, w1=req.problem.w1, length=req.problem.length
    )
    mode = FipMode(req.mode)
    config = resolve_train_config(req.train, "fip")
    u_arch = resolve_arch(req.train, "fip")
    h_arch = resolve_h_arch(req.train)

    observations = make_observations(spec, req.n_obs, req.obs_resolution)
    report = train_fip(
        spec,
        mode,
        observations,
        (u_arch, h_arch),
        config,
        reference_resolution=req.obs_resolution,
    )

    short = "source" if mode is FipMode.RECOVER_SOURCE else "coefficient"
    experiment_id = req.experiment_id or f"fip-{short}"
    run_dir = _run_dir(req.outdir, experiment_id)

    x = metrics.assessment_grid_1d(0.0, spec.length)
    reference = solve_fip_fdm(spec, req.obs_resolution, MethodFip.DIRECT)
    u_ref = metrics.interpolate(reference, x)
    u_pinn = forward(report.u_params, x[:, None]).ravel()
    h_pinn = forward(report.h_params, x[:, None]).ravel()
    h_true = np.asarray(fip_truth_function(spec, mode)(x), dtype=float)

    _write_csv(
        run_dir / "solution_u.csv",
        ("x", "u", "reference"),
        np.column_stack([x, u_pinn, u_ref]),
    )
    _write_csv(
        run_dir / "solution_h.csv",
        ("x", "h", "truth"),
        np.column_stack([x, h_pinn, h_true]),
    )
    _write_loss_history(run_dir / "loss_history.csv", report.history)
    save_checkpoint(run_dir / "checkpoint_u.txt", report.u_params, config.seed)
    save_checkpoint(run_dir / "checkpoint_h.txt", report.h_params, config.seed)

    sampling, train = _train_echo(config, u_arch, h_arch)
    sections = {
        "problem": _problem_echo(req.problem),
        "fip": {
            "mode": req.mode,
            "n_obs": _fmt(req.n_obs),
            "obs_resolution": _fmt(req.obs_resolution),
        },
        "sampling": sampling,
        "train": train,
        "output": {"outdir": req.outdir, "experiment_id": experiment_id},
    }
    _write_config_echo(run_dir / "config.ini", sections)

    row = {
        "experiment_id": experiment_id,
        "method": "pinn",
        "problem_id": "fip",
        "l2_relative": report.error_u.l2_relative,
        "l_inf": report.error_u.l_inf,
        "n_points": report.error_u.n_points,
        "l2_relative_hidden": report.error_h.l2_relative,
        "l_pde": report.final.l_pde,
        "l_bc": report.final.l_bc,
        "l_data": report.final.l_data,
        "total_loss": report.final.total,
        "iterations": len(report.history),
        "seed": config.seed,
        "converged": report.ok,
    }
    _write_report_csv(run_dir / "report.csv", row)

    wall_time = time.perf_counter() - t0
    _write_timing(run_dir / "timing.json", wall_time, {"train": report.wall_time})

    return RunReport(
        experiment_id=experiment_id,
        method="pinn",
        problem_id="fip",
        config=sections,
        error=_error_model(report.error_u),
        error_hidden=_error_model(report.error_h),
        final_loss=_loss_model(report.final),
        iterations=len(report.history),
        wall_time=wall_time,
        seed=config.seed,
        converged=report.ok,
        ok=report.ok,
        artifacts={
            "run_dir": str(run_dir),
            "config": str(run_dir / "config.ini"),
            "report": str(run_dir / "report.csv"),
            "solution_u": str(run_dir / "solution_u.csv"),
            "solution_h": str(run_dir / "solution_h.csv"),
            "loss_history": str(run_dir / "loss_history.csv"),
            "checkpoint_u": str(run_dir / "checkpoint_u.txt"),
            "checkpoint_h": str(run_dir / "checkpoint_h.txt"),
            "timing": str(run_dir / "timing.json"),
        },
    )


# ---------------------------------------------------------------------------
# bench suites


def _row_from_report(row_id: str, rep: RunReport) -> BenchRow:
    if rep.problem_id == "fip" and rep.error_hidden is not None:
        l2 = rep.error_hidden.l2_relative
    else:
        l2 = rep.error.l2_relative if rep.error else None
    return BenchRow(
        row_id=row_id,
        problem_id=rep.problem_id,
        method=rep.method,
        l2_relative=l2,
        final_loss=rep.final_loss.total if rep.final_loss else None,
        ok=rep.ok,
        experiment_id=rep.experiment_id,
    )


def _bench_paper_forward(seed: int, suite_dir: Path) -> list[BenchRow]:
    outdir = str(suite_dir)
    rows = []
    rep = run_solve_fdm(
        SolveFdmRequest(problem={"id": "poisson1d"}, fdm={"resolution": 512}, outdir=outdir)
    )
    rows.append(_row_from_report("fdm-1d", rep))
    rep = run_train_pinn(
        TrainPinnRequest(problem={"id": "poisson1d"}, train={"seed": seed}, outdir=outdir)
    )
    rows.append(_row_from_report("pinn-1d", rep))
    rep = run_solve_fdm(
        SolveFdmRequest(problem={"id": "poisson2d"}, fdm={"resolution": 512}, outdir=outdir)
    )
    rows.append(_row_from_report("fdm-2d", rep))
    rep = run_train_pinn(
        TrainPinnRequest(problem={"id": "poisson2d"}, train={"seed": seed}, outdir=outdir)
    )
    rows.append(_row_from_report("pinn-2d", rep))
    return rows


def _bench_paper_fip(seed: int, suite_dir: Path) -> list[BenchRow]:
    outdir = str(suite_dir)
    rows = []
    for mode in ("recover-source", "recover-coefficient"):
        rep = run_fip(FipRequest(mode=mode, train={"seed": seed}, outdir=outdir))
        rows.append(_row_from_report(f"fip-{mode.split('-', 1)[1]}", rep))
    return rows


def _bench_convergence(suite_dir: Path) -> tuple[list[BenchRow], list]:
    from .problems import builtin_poisson_1d, builtin_poisson_2d

    detail = []

    spec1 = builtin_poisson_1d()
    res1, err1, conv1 = [64, 128, 256, 512], [], True
    for n in res1:
        field = solve_poisson_1d(spec1, n)
        conv1 &= field.converged
        err1.append(
            metrics.relative_l2(field.values, spec1.exact(field.grid.nodes))
        )
        detail.append(["poisson1d", n, err1[-1]])
    order1 = metrics.convergence_order(res1, err1)

    spec2 = builtin_poisson_2d()
    res2, err2, conv2 = [16, 32, 64], [], True
    for n in res2:
        field = solve_poisson_2d(spec2, n, n, method=Method2D.SOR)
        conv2 &= field.converged
        xx, yy = np.meshgrid(field.grid.nodes_x, field.grid.nodes_y)
        err2.append(metrics.relative_l2(field.values, spec2.exact(xx, yy)))
        detail.append(["poisson2d", n, err2[-1]])
    order2 = metrics.convergence_order(res2, err2)

    rows = [
        BenchRow(
            row_id="fdm-1d",
            problem_id="poisson1d",
            method="fdm",
            l2_relative=err1[-1],
            order=order1,
            ok=conv1,
            experiment_id="fdm-1d",
        ),
        BenchRow(
            row_id="fdm-2d",
            problem_id="poisson2d",
            method="fdm",
            l2_relative=err2[-1],
            order=order2,
            ok=conv2,
            experiment_id="fdm-2d",
        ),
    ]
    return rows, detail


def run_bench(req: BenchRequest) -> BenchReport:
    t0 = time.perf_counter()
    suite_dir = Path(req.outdir) / req.suite
    suite_dir.mkdir(parents=True, exist_ok=True)

    detail = None
    if req.suite == "paper-forward":
        rows = _bench_paper_forward(req.seed, suite_dir)
    elif req.suite == "paper-fip":
        rows = _bench_paper_fip(req.seed, suite_dir)
    else:
        rows, detail = _bench_convergence(suite_dir)

    comparison = suite_dir / "comparison.csv"
    _write_csv(
        comparison,
        ("row_id", "problem_id", "method", "l2_relative", "order", "final_loss", "ok", "experiment_id"),
        [
            [r.row_id, r.problem_id, r.method, r.l2_relative, r.order, r.final_loss, r.ok, r.experiment_id]
            for r in rows
        ],
    )
    artifacts = {"suite_dir": str(suite_dir), "comparison": str(comparison)}
    if detail is not None:
        detail_path = suite_dir / "errors.csv"
        _write_csv(detail_path, ("problem_id", "resolution", "l2_relative"), detail)
        artifacts["errors"] = str(detail_path)

    summary = suite_dir / "summary.txt"
    lines = [f"suite: {req.suite}"]
    for r in rows:
        parts = [f"{r.row_id:<18} {r.method:<4}"]
        if r.l2_relative is not None:
            parts.append(f"rel_l2={r.l2_relative:.6e}")
        if r.order is not None:
            parts.append(f"order={r.order:.4f}")
        if r.final_loss is not None:
            parts.append(f"loss={r.final_loss:.6e}")
        parts.append("ok" if r.ok else "FAILED")
        lines.append("  ".join(parts))
    summary.write_text("\n".join(lines) + "\n")
    artifacts["summary"] = str(summary)

    wall_time = time.perf_counter() - t0
    _write_timing(suite_dir / "timing.json", wall_time)
    artifacts["timing"] = str(suite_dir / "timing.json")

    return BenchReport(
        suite=req.suite,
        rows=rows,
        ok=all(r.ok for r in rows),
        wall_time=wall_time,
        artifacts=artifacts,
    )
