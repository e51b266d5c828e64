"""Command-line entry points.

Thin client over :mod:`pinnfd.runner`: each subcommand assembles a request
from the config file plus its flags, dispatches it either in-process or to
a running service (``--server`` / ``PINNFD_SERVER``), prints a short
summary, and exits nonzero if the run reports a failure.
"""

from __future__ import annotations

from typing import Optional

import click

from . import __version__, config, runner
from .problems import PROBLEM_IDS
from .service.schemas import BenchReport, RunReport

_RUNNERS = {
    "solve-fdm": runner.run_solve_fdm,
    "train-pinn": runner.run_train_pinn,
    "fip": runner.run_fip,
    "bench": runner.run_bench,
}


@click.group()
@click.version_option(version=__version__, prog_name="pinnfd")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="INI config file; flags override its values.",
)
@click.option("--seed", type=int, default=None, help="Seed for all random streams.")
@click.option("--outdir", default=None, help="Run directory root (or PINNFD_OUTDIR).")
@click.option(
    "--server",
    envvar="PINNFD_SERVER",
    default=None,
    help="Base URL of a running pinnfd service; runs over HTTP instead of in-process.",
)
@click.pass_context
def main(ctx, config_path, seed: Optional[int], outdir: Optional[str], server):
    """Finite-difference and physics-informed solvers for Poisson-type problems."""
    file_cfg = config.load_config_file(config_path) if config_path else {}
    ctx.obj = {"file_cfg": file_cfg, "seed": seed, "outdir": outdir, "server": server}


def _dispatch(obj: dict, endpoint: str, request):
    server = obj["server"]
    if not server:
        return _RUNNERS[endpoint](request)

    import httpx

    url = f"{server.rstrip('/')}/runs/{endpoint}"
    try:
        resp = httpx.post(url, json=request.model_dump(), timeout=None)
        resp.raise_for_status()
    except httpx.HTTPStatusError as exc:
        raise click.ClickException(
            f"{url} returned {exc.response.status_code}: {exc.response.text}"
        ) from exc
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach {url}: {exc}") from exc
    model = BenchReport if endpoint == "bench" else RunReport
    return model.model_validate(resp.json())


def _print_run(rep: RunReport) -> None:
    click.echo(f"{rep.experiment_id}: {rep.method} on {rep.problem_id}")
    if rep.error is not None:
        click.echo(
            f"  rel_l2 {rep.error.l2_relative:.6e}   l_inf {rep.error.l_inf:.6e}"
        )
    if rep.error_hidden is not None:
        click.echo(f"  rel_l2 (hidden term) {rep.error_hidden.l2_relative:.6e}")
    if rep.final_loss is not None:
        f = rep.final_loss
        click.echo(
            f"  loss total {f.total:.6e}  (pde {f.l_pde:.3e}, bc {f.l_bc:.3e}, data {f.l_data:.3e})"
        )
    click.echo(
        f"  iterations {rep.iterations}   wall_time {rep.wall_time:.2f}s   "
        f"{'ok' if rep.ok else 'FAILED'}"
    )
    click.echo(f"  artifacts: {rep.artifacts['run_dir']}")


def _print_bench(rep: BenchReport) -> None:
    click.echo(f"suite {rep.suite}: {'ok' if rep.ok else 'FAILED'}")
    for row in rep.rows:
        parts = [f"  {row.row_id:<18} {row.method:<4}"]
        if row.l2_relative is not None:
            parts.append(f"rel_l2 {row.l2_relative:.6e}")
        if row.order is not None:
            parts.append(f"order {row.order:.4f}")
        if row.final_loss is not None:
            parts.append(f"loss {row.final_loss:.6e}")
        parts.append("ok" if row.ok else "FAILED")
        click.echo("   ".join(parts))
    click.echo(f"  artifacts: {rep.artifacts['suite_dir']}")


def _finish(ok: bool) -> None:
    if not ok:
        raise SystemExit(1)


def _overrides(**kwargs) -> dict:
    return {k: v for k, v in kwargs.items() if v is not None}


@main.command("solve-fdm")
@click.option("--problem", type=click.Choice(PROBLEM_IDS), default=None)
@click.option(
    "--source-mode", type=click.Choice(["manufactured", "paper_verbatim"]), default=None
)
@click.option("--b1", type=float, default=None)
@click.option("--w1", type=float, default=None)
@click.option("--length", type=float, default=None)
@click.option("--resolution", type=int, default=None, help="Cells per axis.")
@click.option(
    "--method",
    type=click.Choice(["thomas", "gauss_seidel", "sor", "direct", "jacobi"]),
    default=None,
)
@click.option("--tol", type=float, default=None)
@click.option("--max-iter", type=int, default=None)
@click.option("--omega", type=float, default=None, help="SOR factor; default optimal.")
@click.option("--experiment-id", default=None)
@click.pass_obj
def solve_fdm(obj, problem, source_mode, b1, w1, length, resolution, method, tol, max_iter, omega, experiment_id):
    """Solve a problem by finite differences and write the run artifacts."""
    request = config.build_solve_fdm_request(
        obj["file_cfg"],
        problem=_overrides(id=problem, source_mode=source_mode, b1=b1, w1=w1, length=length),
        fdm=_overrides(
            resolution=resolution, method=method, tol=tol, max_iter=max_iter, omega=omega
        ),
        seed=obj["seed"],
        outdir=obj["outdir"],
        experiment_id=experiment_id,
    )
    rep = _dispatch(obj, "solve-fdm", request)
    _print_run(rep)
    _finish(rep.ok)


@main.command("train-pinn")
@click.option("--problem", type=click.Choice(["poisson1d", "poisson2d"]), default=None)
@click.option(
    "--source-mode", type=click.Choice(["manufactured", "paper_verbatim"]), default=None
)
@click.option("--arch", default=None, help="Layer sizes, e.g. 1,20,20,20,1.")
@click.option("--n-collocation", type=int, default=None)
@click.option("--n-boundary-per-edge", type=int, default=None)
@click.option("--resample/--no-resample", "resample_each_epoch", default=None)
@click.option("--adam-epochs", type=int, default=None)
@click.option("--adam-lr", type=float, default=None)
@click.option("--lbfgs-max-iters", type=int, default=None)
@click.option("--experiment-id", default=None)
@click.pass_obj
def train_pinn(obj, problem, source_mode, arch, n_collocation, n_boundary_per_edge, resample_each_epoch, adam_epochs, adam_lr, lbfgs_max_iters, experiment_id):
    """Train a physics-informed network on a forward problem."""
    request = config.build_train_pinn_request(
        obj["file_cfg"],
        problem=_overrides(id=problem, source_mode=source_mode),
        train=_overrides(
            arch=arch,
            n_collocation=n_collocation,
            n_boundary_per_edge=n_boundary_per_edge,
            resample_each_epoch=resample_each_epoch,
            adam_epochs=adam_epochs,
            adam_lr=adam_lr,
            lbfgs_max_iters=lbfgs_max_iters,
        ),
        seed=obj["seed"],
        outdir=obj["outdir"],
        experiment_id=experiment_id,
    )
    rep = _dispatch(obj, "train-pinn", request)
    _print_run(rep)
    _finish(rep.ok)


@main.command("fip")
@click.option(
    "--mode",
    type=click.Choice(["recover-source", "recover-coefficient"]),
    default=None,
)
@click.option("--n-obs", type=int, default=None)
@click.option("--obs-resolution", type=int, default=None)
@click.option("--b1", type=float, default=None)
@click.option("--w1", type=float, default=None)
@click.option("--length", type=float, default=None)
@click.option("--arch", default=None, help="Solution network layers.")
@click.option("--h-arch", default=None, help="Hidden-term network layers.")
@click.option("--adam-epochs", type=int, default=None)
@click.option("--lbfgs-max-iters", type=int, default=None)
@click.option("--experiment-id", default=None)
@click.pass_obj
def fip(obj, mode, n_obs, obs_resolution, b1, w1, length, arch, h_arch, adam_epochs, lbfgs_max_iters, experiment_id):
    """Recover a hidden source or coefficient from sparse observations."""
    request = config.build_fip_request(
        obj["file_cfg"],
        problem=_overrides(b1=b1, w1=w1, length=length),
        fip=_overrides(mode=mode, n_obs=n_obs, obs_resolution=obs_resolution),
        train=_overrides(
            arch=arch,
            h_arch=h_arch,
            adam_epochs=adam_epochs,
            lbfgs_max_iters=lbfgs_max_iters,
        ),
        seed=obj["seed"],
        outdir=obj["outdir"],
        experiment_id=experiment_id,
    )
    rep = _dispatch(obj, "fip", request)
    _print_run(rep)
    _finish(rep.ok)


@main.command("bench")
@click.option(
    "--suite",
    type=click.Choice(["paper-forward", "paper-fip", "convergence"]),
    default="paper-forward",
)
@click.pass_obj
def bench(obj, suite):
    """Run a benchmark suite and write its comparison table."""
    request = config.build_bench_request(
        obj["file_cfg"], suite=suite, seed=obj["seed"], outdir=obj["outdir"]
    )
    rep = _dispatch(obj, "bench", request)
    _print_bench(rep)
    _finish(rep.ok)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
