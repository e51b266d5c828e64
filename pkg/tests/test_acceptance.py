"""End-to-end acceptance gate.

Each test emits one ``ACCEPTANCE n: PASS|FAIL`` line (shown in the
terminal summary at the end of the run) and then asserts. The two
heavyweight bench suites and the convergence study run once per session;
several criteria read rows and per-run timings out of those shared
results.

Budget note: the full set trains four networks at production budgets and
takes several minutes of CPU.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from conftest import record_acceptance

from pinnfd.neural import (
    NetworkArch,
    NetworkParams,
    forward,
    forward_with_input_derivs,
    init_params,
    params_to_vars,
    taped_forward,
    vars_to_flat_grad,
)
from pinnfd.runner import run_bench, run_solve_fdm, run_train_pinn
from pinnfd.sampling import lhs
from pinnfd.service.schemas import (
    BenchRequest,
    SolveFdmRequest,
    TrainPinnRequest,
)
from pinnfd.training import TrainConfig, adam_run, lbfgs_run


def emit(n: int, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    record_acceptance(line)
    print(line)
    return line


def row(report, row_id: str):
    return next(r for r in report.rows if r.row_id == row_id)


def run_wall_time(report, row_id: str) -> float:
    suite_dir = Path(report.artifacts["suite_dir"])
    rid = row(report, row_id).experiment_id
    with open(suite_dir / rid / "timing.json") as fh:
        return float(json.load(fh)["wall_time"])


def run_config(report, row_id: str) -> str:
    suite_dir = Path(report.artifacts["suite_dir"])
    rid = row(report, row_id).experiment_id
    return (suite_dir / rid / "config.ini").read_text()


@pytest.fixture(scope="session")
def bench_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="session")
def paper_forward(bench_root):
    return run_bench(BenchRequest(suite="paper-forward", seed=0, outdir=str(bench_root)))


@pytest.fixture(scope="session")
def paper_fip(bench_root):
    return run_bench(BenchRequest(suite="paper-fip", seed=0, outdir=str(bench_root)))


@pytest.fixture(scope="session")
def convergence(bench_root):
    return run_bench(BenchRequest(suite="convergence", seed=0, outdir=str(bench_root)))


def test_criterion_01_fdm_1d_error_band(tmp_path):
    t0 = time.perf_counter()
    rep = run_solve_fdm(
        SolveFdmRequest(
            problem={"id": "poisson1d"}, fdm={"resolution": 512}, outdir=str(tmp_path)
        )
    )
    elapsed = time.perf_counter() - t0
    err = rep.error.l2_relative
    in_band = 7.26e-9 <= err <= 7.26e-7
    ok = in_band and elapsed < 1.0
    line = emit(
        1,
        ok,
        f"1D 512-cell rel L2 {err:.4e} (required band [7.26e-9, 7.26e-7]), {elapsed:.2f}s",
    )
    assert ok, line


def test_criterion_02_convergence_orders(convergence):
    r1 = row(convergence, "fdm-1d")
    r2 = row(convergence, "fdm-2d")
    orders_ok = abs(r1.order - 2.0) <= 0.2 and abs(r2.order - 2.0) <= 0.2
    time_ok = convergence.wall_time < 30.0
    ok = orders_ok and time_ok and convergence.ok
    line = emit(
        2,
        ok,
        f"orders 1D {r1.order:.4f}, 2D {r2.order:.4f} (2.0 +/- 0.2), {convergence.wall_time:.1f}s",
    )
    assert ok, line


def test_criterion_03_fdm_2d_error_band(paper_forward):
    r = row(paper_forward, "fdm-2d")
    wall = run_wall_time(paper_forward, "fdm-2d")
    used_sor = "method = sor" in run_config(paper_forward, "fdm-2d")
    ok = r.l2_relative <= 2.21e-3 and wall < 300.0 and used_sor and r.ok
    line = emit(
        3,
        ok,
        f"2D 512x512 rel L2 {r.l2_relative:.4e} (<= 2.21e-3), SOR, {wall:.1f}s",
    )
    assert ok, line


def test_criterion_04_pinn_1d(paper_forward):
    r = row(paper_forward, "pinn-1d")
    wall = run_wall_time(paper_forward, "pinn-1d")
    arch_ok = "arch = 1,20,20,20,1" in run_config(paper_forward, "pinn-1d")
    ok = r.l2_relative <= 1e-3 and wall <= 600.0 and arch_ok and r.ok
    line = emit(
        4,
        ok,
        f"1D PINN rel L2 {r.l2_relative:.4e} (<= 1e-3), arch 1,20,20,20,1, {wall:.1f}s",
    )
    assert ok, line


def test_criterion_05_pinn_2d(paper_forward):
    r = row(paper_forward, "pinn-2d")
    wall = run_wall_time(paper_forward, "pinn-2d")
    ok = r.l2_relative <= 5e-2 and wall <= 1200.0 and r.ok
    line = emit(5, ok, f"2D PINN rel L2 {r.l2_relative:.4e} (<= 5e-2), {wall:.1f}s")
    assert ok, line


def test_criterion_06_fdm_beats_pinn(paper_forward):
    f1 = row(paper_forward, "fdm-1d").l2_relative
    p1 = row(paper_forward, "pinn-1d").l2_relative
    f2 = row(paper_forward, "fdm-2d").l2_relative
    p2 = row(paper_forward, "pinn-2d").l2_relative
    ok = f1 < p1 and f2 < p2
    line = emit(
        6,
        ok,
        f"1D: fdm {f1:.3e} < pinn {p1:.3e} is {f1 < p1}; "
        f"2D: fdm {f2:.3e} < pinn {p2:.3e} is {f2 < p2}",
    )
    assert ok, line


def test_criterion_07_fip_source_recovery(paper_fip):
    r = row(paper_fip, "fip-source")
    wall = run_wall_time(paper_fip, "fip-source")
    cfg = run_config(paper_fip, "fip-source")
    epochs_ok = "adam_epochs = 40000" in cfg
    ok = r.final_loss <= 5e-2 and r.l2_relative <= 0.15 and wall <= 1800.0 and epochs_ok
    line = emit(
        7,
        ok,
        f"loss {r.final_loss:.4e} (<= 5e-2), recovered-source rel L2 {r.l2_relative:.4f} "
        f"(<= 0.15), 40000 Adam epochs, {wall:.0f}s",
    )
    assert ok, line


def test_criterion_08_fip_coefficient_recovery(paper_fip):
    r = row(paper_fip, "fip-coefficient")
    wall = run_wall_time(paper_fip, "fip-coefficient")
    ok = r.final_loss <= 8e-2 and r.l2_relative <= 0.2 and wall <= 1800.0
    line = emit(
        8,
        ok,
        f"loss {r.final_loss:.4e} (<= 8e-2), recovered-coefficient rel L2 "
        f"{r.l2_relative:.4f} (<= 0.2), {wall:.0f}s",
    )
    assert ok, line


def test_criterion_09_derivative_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    arch_pool = [(1, 8, 1), (1, 6, 6, 1), (2, 7, 1), (2, 5, 5, 1)]
    worst_d2 = 0.0
    worst_grad = 0.0
    for i in range(100):
        layers = arch_pool[rng.integers(len(arch_pool))]
        arch = NetworkArch(layers)
        params = init_params(arch, seed=int(rng.integers(1 << 30)))
        d = layers[0]
        x = rng.uniform(0.1, 0.9, size=(5, d))

        # second input-derivatives vs a fourth-order central stencil (the
        # three-point stencil's own truncation error exceeds the bound)
        ev = forward_with_input_derivs(params, x)
        h = 1e-3
        for k in range(d):
            dx = np.zeros_like(x)
            dx[:, k] = h
            fd2 = (
                -forward(params, x + 2 * dx)
                + 16 * forward(params, x + dx)
                - 30 * forward(params, x)
                + 16 * forward(params, x - dx)
                - forward(params, x - 2 * dx)
            ).ravel() / (12 * h * h)
            rel = np.max(
                np.abs(ev.second[:, k] - fd2) / np.maximum(np.abs(fd2), 1e-6)
            )
            worst_d2 = max(worst_d2, rel)

        # parameter gradient of a mean-square objective vs central differences
        wv, bv = params_to_vars(params)
        loss = (taped_forward(wv, bv, x) ** 2).mean()
        loss.backward()
        grad = vars_to_flat_grad(wv, bv)
        flat0 = params.to_flat()

        def loss_at(flat):
            return float(np.mean(forward(NetworkParams.from_flat(arch, flat), x) ** 2))

        hp = 1e-6
        for idx in rng.choice(flat0.size, size=3, replace=False):
            fp = flat0.copy()
            fp[idx] += hp
            fm = flat0.copy()
            fm[idx] -= hp
            fd = (loss_at(fp) - loss_at(fm)) / (2 * hp)
            rel = abs(grad[idx] - fd) / max(abs(fd), 1e-8)
            worst_grad = max(worst_grad, rel)

    elapsed = time.perf_counter() - t0
    ok = worst_d2 <= 1e-6 and worst_grad <= 1e-5 and elapsed < 60.0
    line = emit(
        9,
        ok,
        f"worst second-derivative rel dev {worst_d2:.2e} (<= 1e-6), worst gradient "
        f"rel dev {worst_grad:.2e} (<= 1e-5) over 100 instances, {elapsed:.1f}s",
    )
    assert ok, line


def test_criterion_10_lhs_stratification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(123)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(1, 513))
        seed = int(rng.integers(1 << 31))
        dims = int(rng.integers(1, 3))
        pts = lhs(n, dims, seed)
        assert pts.shape == (n, dims)
        for k in range(dims):
            strata = np.floor(pts[:, k] * n).astype(int)
            assert sorted(strata) == list(range(n)), (n, seed, k)
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked == 200 and elapsed < 10.0
    line = emit(
        10, ok, f"one sample per axis-stratum for {checked} (n, seed) pairs, {elapsed:.1f}s"
    )
    assert ok, line


def test_criterion_11_optimizer_unit_behavior():
    t0 = time.perf_counter()

    # SPD quadratic, minimum 0 at the origin
    rng = np.random.default_rng(7)
    m = rng.standard_normal((5, 5))
    a = m @ m.T + 5 * np.eye(5)
    res_q = lbfgs_run(
        lambda t: (float(0.5 * t @ a @ t), a @ t),
        rng.standard_normal(5),
        TrainConfig(lbfgs_max_iters=50),
    )
    grad_norm = float(np.max(np.abs(a @ res_q.theta)))
    quad_ok = grad_norm <= 1e-9 and len(res_q.history) <= 50

    def rosenbrock(t):
        x, y = t
        f = (1 - x) ** 2 + 100.0 * (y - x * x) ** 2
        g = np.array([-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)])
        return float(f), g

    res_r = lbfgs_run(rosenbrock, np.array([-1.2, 1.0]), TrainConfig(lbfgs_max_iters=200))
    rosen_ok = res_r.history[-1] < 1e-8

    res_a = adam_run(
        lambda t: (float(t[0] ** 2), 2.0 * t),
        np.array([1.0]),
        TrainConfig(adam_lr=0.01),
        epochs=2000,
    )
    adam_ok = abs(res_a.theta[0]) < 1e-3

    elapsed = time.perf_counter() - t0
    ok = quad_ok and rosen_ok and adam_ok and elapsed < 10.0
    line = emit(
        11,
        ok,
        f"quadratic grad {grad_norm:.2e} in {len(res_q.history)} iters, Rosenbrock loss "
        f"{res_r.history[-1]:.2e}, Adam |theta| {abs(res_a.theta[0]):.2e}, {elapsed:.1f}s",
    )
    assert ok, line


def test_criterion_12_byte_identical_reruns(tmp_path):
    def fdm_req(out: str) -> SolveFdmRequest:
        return SolveFdmRequest(
            problem={"id": "poisson1d"},
            fdm={"resolution": 128},
            seed=5,
            outdir=out,
            experiment_id="det-fdm",
        )

    def pinn_req(out: str) -> TrainPinnRequest:
        return TrainPinnRequest(
            problem={"id": "poisson1d"},
            train={
                "arch": "1,8,1",
                "n_collocation": 32,
                "adam_epochs": 50,
                "lbfgs_max_iters": 5,
                "resample_each_epoch": True,
                "seed": 5,
            },
            outdir=out,
            experiment_id="det-pinn",
        )

    run_solve_fdm(fdm_req(str(tmp_path / "a")))
    run_solve_fdm(fdm_req(str(tmp_path / "b")))
    run_train_pinn(pinn_req(str(tmp_path / "a")))
    run_train_pinn(pinn_req(str(tmp_path / "b")))

    mismatched = []
    for rel in ("det-fdm/report.csv", "det-pinn/report.csv", "det-pinn/loss_history.csv",
                "det-pinn/checkpoint.txt"):
        if (tmp_path / "a" / rel).read_bytes() != (tmp_path / "b" / rel).read_bytes():
            mismatched.append(rel)
    ok = not mismatched
    line = emit(
        12,
        ok,
        "reports, loss histories and checkpoints byte-identical across reruns"
        if ok
        else f"files differ: {mismatched}",
    )
    assert ok, line
