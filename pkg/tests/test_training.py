"""Optimizers, loss evaluators, and the training loops.

The optimizer tests use hand-checkable objectives (quadratics, Rosenbrock)
with frozen expectations; the loss tests pin values computed by hand for a
zero-initialized network, where every residual reduces to a closed form.
"""

import numpy as np
import pytest

from pinnfd.neural import NetworkArch, NetworkParams, forward, init_params
from pinnfd.problems import get_problem
from pinnfd.training import (
    FipMode,
    LossReport,
    Observations,
    TrainConfig,
    adam_run,
    bc_loss,
    data_loss,
    fip_known_function,
    fip_pde_loss,
    fip_truth_function,
    lbfgs_run,
    make_observations,
    pde_loss,
    train_fip,
    train_forward_pinn,
)

ARCH_1D = NetworkArch((1, 8, 1))


def zero_params(arch: NetworkArch = ARCH_1D) -> NetworkParams:
    flat = np.zeros(arch.n_params)
    return NetworkParams.from_flat(arch, flat)


# -- TrainConfig validation ----------------------------------------------


def test_config_defaults_construct():
    cfg = TrainConfig()
    assert cfg.adam_beta1 < cfg.adam_beta2 < 1
    assert cfg.wolfe_c1 < cfg.wolfe_c2


@pytest.mark.parametrize(
    "kw",
    [
        {"adam_beta1": 0.999, "adam_beta2": 0.9},
        {"adam_beta1": 0.0},
        {"adam_beta2": 1.0},
        {"wolfe_c1": 0.9, "wolfe_c2": 0.5},
        {"wolfe_c2": 1.0},
        {"lbfgs_memory": 0},
        {"n_collocation": 0},
        {"adam_epochs": -1},
        {"lbfgs_max_iters": -1},
        {"adam_lr": 0.0},
        {"adam_eps": -1e-8},
        {"w_pde": -0.5},
    ],
)
def test_config_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        TrainConfig(**kw)


def test_loss_report_total_is_sum_of_parts():
    rep = LossReport(l_pde=0.5, l_bc=0.25, l_data=0.125)
    assert rep.total == 0.875


def test_loss_report_rejects_negative_part():
    with pytest.raises(ValueError):
        LossReport(l_pde=-1e-9, l_bc=0.0)


def test_observations_require_matching_lengths():
    with pytest.raises(ValueError):
        Observations(points=np.zeros((3, 1)), values=np.zeros(2), provenance="x")


# -- plain loss evaluators -----------------------------------------------
# A zero-initialized network outputs 0 everywhere with zero derivatives,
# so each loss collapses to the mean square of the data it is fit against.


def test_pde_loss_zero_network_equals_mean_square_source():
    problem = get_problem("poisson1d")
    pts = np.array([[0.5]])
    f = problem.source(pts[:, 0])
    loss = pde_loss(zero_params(), pts, f)
    # f(0.5) = -2.231106024182005 for the built-in 1D source
    assert loss == pytest.approx(4.977834091141233, rel=1e-13)


def test_bc_loss_zero_network_equals_mean_square_values():
    problem = get_problem("poisson1d")
    pts = np.array([[0.0], [1.0]])
    vals = np.array([problem.bc_lo, problem.bc_hi])
    loss = bc_loss(zero_params(), pts, vals)
    # (0^2 + e^-2) / 2
    assert loss == pytest.approx(0.06766764161830635, rel=1e-13)


def test_data_loss_zero_network():
    vals = np.array([1.0, 2.0, 3.0])
    obs = Observations(points=np.linspace(0.2, 0.8, 3)[:, None], values=vals, provenance="t")
    assert data_loss(zero_params(), obs) == pytest.approx(np.mean(vals**2), rel=1e-14)


def test_data_loss_exact_observations_is_zero():
    params = init_params(ARCH_1D, seed=3)
    pts = np.linspace(0.1, 0.9, 5)[:, None]
    obs = Observations(points=pts, values=forward(params, pts)[:, 0], provenance="t")
    assert data_loss(params, obs) == 0.0


def test_pde_loss_requires_points():
    with pytest.raises(ValueError):
        pde_loss(zero_params(), np.empty((0, 1)), np.empty(0))


def test_pde_loss_flags_nonfinite_residual():
    pts = np.array([[0.25], [0.75]])
    with pytest.raises(FloatingPointError):
        pde_loss(zero_params(), pts, np.array([1.0, np.nan]))


def test_fip_loss_mode_selects_learned_term():
    # With both networks zero the residual keeps only the known closed
    # form: recover-source leaves r = -a(x)*0 - 0 = 0, recover-coefficient
    # leaves r = -Q(x).
    spec = get_problem("fip")
    pts = np.linspace(0.1, 0.9, 7)[:, None]
    zp = zero_params()
    known_src = fip_known_function(spec, FipMode.RECOVER_SOURCE)(pts[:, 0])
    loss_src = fip_pde_loss(zp, zp, pts, known_src, FipMode.RECOVER_SOURCE)
    assert loss_src == 0.0

    q = fip_known_function(spec, FipMode.RECOVER_COEFFICIENT)(pts[:, 0])
    loss_coef = fip_pde_loss(zp, zp, pts, q, FipMode.RECOVER_COEFFICIENT)
    assert loss_coef == pytest.approx(float(np.mean(q**2)), rel=1e-14)


def test_fip_truth_and_known_are_complementary():
    spec = get_problem("fip")
    x = np.array([0.3])
    for mode in FipMode:
        t = fip_truth_function(spec, mode)(x)
        k = fip_known_function(spec, mode)(x)
        both = sorted([float(t[0]), float(k[0])])
        assert both == sorted([float(spec.source(x)[0]), float(spec.coefficient(x)[0])])
    t_src = fip_truth_function(spec, FipMode.RECOVER_SOURCE)(x)
    assert float(t_src[0]) == float(spec.source(x)[0])
    k_src = fip_known_function(spec, FipMode.RECOVER_SOURCE)(x)
    assert float(k_src[0]) == float(spec.coefficient(x)[0])


# -- Adam -----------------------------------------------------------------


def test_adam_first_step_hand_checked():
    # Constant gradient 2, lr 0.5: m_hat = 2, v_hat = 4, so the first
    # update is 0.5 * 2 / (2 + eps) and theta_1 = 0.5000000025.
    cfg = TrainConfig(adam_lr=0.5)

    def provider(theta):
        return float(theta[0] ** 2), np.array([2.0])

    res = adam_run(provider, np.array([1.0]), cfg, epochs=1)
    expected = 1.0 - 0.5 * 2.0 / (2.0 + cfg.adam_eps)
    assert res.theta[0] == expected
    assert res.theta[0] == pytest.approx(0.5000000025, rel=1e-12)
    assert res.history == [1.0]
    assert res.status == "ok" and res.converged


def test_adam_scalar_quadratic_converges():
    cfg = TrainConfig(adam_lr=0.01)

    def provider(theta):
        return float(theta[0] ** 2), 2.0 * theta

    res = adam_run(provider, np.array([1.0]), cfg, epochs=2000)
    assert abs(res.theta[0]) < 1e-3
    assert res.n_evals == 2000


def test_adam_zero_epochs_is_noop():
    theta0 = np.array([1.0, -2.0])
    res = adam_run(lambda t: (0.0, np.zeros(2)), theta0, TrainConfig(), epochs=0)
    assert res.history == []
    np.testing.assert_array_equal(res.theta, theta0)


def test_adam_does_not_mutate_theta0():
    theta0 = np.array([1.0])
    adam_run(lambda t: (float(t[0]), np.array([1.0])), theta0, TrainConfig(), epochs=5)
    assert theta0[0] == 1.0


def test_adam_nonfinite_abort_keeps_prior_history():
    calls = {"n": 0}

    def provider(theta):
        calls["n"] += 1
        if calls["n"] == 3:
            return float("nan"), np.array([1.0])
        return 1.0, np.array([1.0])

    res = adam_run(provider, np.array([0.0]), TrainConfig(), epochs=10)
    assert res.status == "nonfinite-abort"
    assert not res.converged
    assert len(res.history) == 2
    assert res.n_evals == 3


def test_adam_callback_sees_each_epoch():
    seen = []
    adam_run(
        lambda t: (float(t[0] ** 2), 2.0 * t),
        np.array([1.0]),
        TrainConfig(adam_lr=0.1),
        epochs=4,
        callback=lambda t, theta, v: seen.append((t, v)),
    )
    assert [t for t, _ in seen] == [1, 2, 3, 4]
    # first callback fires before any update
    assert seen[0][1] == 1.0


# -- L-BFGS ---------------------------------------------------------------


def _spd_quadratic(n: int = 5, seed: int = 7):
    # 1/2 theta^T A theta with A SPD: unique minimum 0 at the origin
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    a = m @ m.T + n * np.eye(n)

    def provider(theta):
        return float(0.5 * theta @ a @ theta), a @ theta

    return provider, a


def test_lbfgs_spd_quadratic_gradient_convergence():
    provider, a = _spd_quadratic()
    theta0 = np.random.default_rng(0).standard_normal(5)
    res = lbfgs_run(provider, theta0, TrainConfig(lbfgs_max_iters=50))
    assert res.status == "gradient-converged"
    assert res.converged
    assert len(res.history) <= 50
    assert np.max(np.abs(a @ res.theta)) <= 1e-9
    np.testing.assert_allclose(res.theta, np.zeros(5), atol=1e-9)


def test_lbfgs_rosenbrock_from_standard_start():
    def provider(theta):
        x, y = theta
        f = (1 - x) ** 2 + 100.0 * (y - x * x) ** 2
        g = np.array(
            [-2.0 * (1 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x)]
        )
        return float(f), g

    res = lbfgs_run(provider, np.array([-1.2, 1.0]), TrainConfig(lbfgs_max_iters=200))
    assert res.history[-1] < 1e-8
    np.testing.assert_allclose(res.theta, [1.0, 1.0], atol=1e-4)


def test_lbfgs_accepted_losses_monotone():
    provider, _ = _spd_quadratic(seed=11)
    res = lbfgs_run(provider, np.ones(5), TrainConfig(lbfgs_max_iters=50))
    diffs = np.diff(res.history)
    assert np.all(diffs <= 1e-15)


def test_lbfgs_stationary_start_returns_immediately():
    provider, _ = _spd_quadratic()
    theta_star = np.zeros(5)
    res = lbfgs_run(provider, theta_star, TrainConfig(lbfgs_max_iters=50))
    assert res.status == "gradient-converged"
    assert len(res.history) == 1
    np.testing.assert_array_equal(res.theta, theta_star)


def test_lbfgs_zero_iteration_budget():
    provider, _ = _spd_quadratic()
    res = lbfgs_run(provider, np.ones(5), TrainConfig(lbfgs_max_iters=0))
    assert res.status == "max-iters"
    assert not res.converged
    assert res.history == []


# -- forward training loop ------------------------------------------------


def tiny_config(**kw) -> TrainConfig:
    base = dict(
        n_collocation=16,
        n_boundary_per_edge=4,
        adam_epochs=3,
        lbfgs_max_iters=2,
        seed=0,
    )
    base.update(kw)
    return TrainConfig(**base)


def test_train_forward_history_covers_both_stages():
    report = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, tiny_config())
    epochs = [t for t, _ in report.history]
    assert len(report.history) >= 3
    assert epochs == sorted(epochs)
    assert report.adam_status == "ok"
    assert report.lbfgs_status is not None
    assert report.ok
    final = report.final
    assert final.total == pytest.approx(final.l_pde + final.l_bc + final.l_data)


def test_train_forward_zero_budget_reports_untrained_error():
    report = train_forward_pinn(
        get_problem("poisson1d"), ARCH_1D, tiny_config(adam_epochs=0, lbfgs_max_iters=0)
    )
    assert report.history == []
    assert report.lbfgs_status is None
    # error must reflect the returned parameters
    from pinnfd.metrics import assessment_grid_1d, error_summary

    x = assessment_grid_1d(0.0, 1.0)
    pred = forward(report.params, x[:, None])[:, 0]
    exact = get_problem("poisson1d").exact(x)
    recomputed = error_summary(pred, exact)
    assert report.error.l2_relative == recomputed.l2_relative


def test_train_forward_is_deterministic():
    r1 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, tiny_config())
    r2 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, tiny_config())
    np.testing.assert_array_equal(r1.params.to_flat(), r2.params.to_flat())
    assert [(t, rep.total) for t, rep in r1.history] == [
        (t, rep.total) for t, rep in r2.history
    ]


def test_train_forward_resampling_changes_trajectory_not_determinism():
    cfg = tiny_config(resample_each_epoch=True, adam_epochs=5, lbfgs_max_iters=0)
    r1 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, cfg)
    r2 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, cfg)
    np.testing.assert_array_equal(r1.params.to_flat(), r2.params.to_flat())

    fixed = train_forward_pinn(
        get_problem("poisson1d"), ARCH_1D, tiny_config(adam_epochs=5, lbfgs_max_iters=0)
    )
    assert r1.final.total != fixed.final.total


def test_train_forward_adam_reduces_loss():
    cfg = tiny_config(n_collocation=32, adam_epochs=200, lbfgs_max_iters=0)
    report = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, cfg)
    first = report.history[0][1].total
    assert report.final.total < first


def test_train_forward_2d_smoke():
    arch = NetworkArch((2, 6, 1))
    report = train_forward_pinn(get_problem("poisson2d"), arch, tiny_config())
    assert report.ok
    assert report.error is not None and np.isfinite(report.error.l2_relative)


def test_train_forward_loss_weights_scale_reported_parts():
    cfg1 = tiny_config(adam_epochs=0, lbfgs_max_iters=0)
    cfg2 = tiny_config(adam_epochs=0, lbfgs_max_iters=0, w_bc=10.0)
    r1 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, cfg1)
    r2 = train_forward_pinn(get_problem("poisson1d"), ARCH_1D, cfg2)
    # same untrained network, so the weighted part scales exactly
    assert r2.final.l_bc == pytest.approx(10.0 * r1.final.l_bc, rel=1e-12)
    assert r2.final.l_pde == r1.final.l_pde


# -- observations and the inverse loop ------------------------------------


def test_make_observations_equispaced_interior():
    spec = get_problem("fip")
    obs = make_observations(spec, n_obs=2, fdm_resolution=64)
    np.testing.assert_allclose(obs.points[:, 0], [1.0 / 3.0, 2.0 / 3.0], rtol=1e-15)
    assert len(obs) == 2
    assert obs.provenance == "fdm:direct:n=64"
    # solution lives between its boundary values for this problem
    assert np.all(obs.values > 1.0) and np.all(obs.values < 3.0)


def test_make_observations_default_resolution_in_provenance():
    obs = make_observations(get_problem("fip"), n_obs=3)
    assert obs.provenance == "fdm:direct:n=1024"


def test_make_observations_rejects_too_few():
    with pytest.raises(ValueError):
        make_observations(get_problem("fip"), n_obs=1)


@pytest.mark.parametrize("mode", list(FipMode))
def test_train_fip_smoke(mode):
    spec = get_problem("fip")
    obs = make_observations(spec, n_obs=5, fdm_resolution=128)
    archs = (NetworkArch((1, 6, 1)), NetworkArch((1, 4, 1)))
    cfg = tiny_config(adam_epochs=4, lbfgs_max_iters=0)
    report = train_fip(spec, mode, obs, archs, cfg, reference_resolution=128)
    assert report.ok
    assert len(report.history) == 4
    assert np.isfinite(report.error_u.l2_relative)
    assert np.isfinite(report.error_h.l2_relative)
    assert report.observations is obs
    assert report.final.l_data >= 0.0


def test_train_fip_deterministic():
    spec = get_problem("fip")
    obs = make_observations(spec, n_obs=5, fdm_resolution=128)
    archs = (NetworkArch((1, 6, 1)), NetworkArch((1, 4, 1)))
    cfg = tiny_config(adam_epochs=3, lbfgs_max_iters=0)
    r1 = train_fip(spec, FipMode.RECOVER_SOURCE, obs, archs, cfg, reference_resolution=128)
    r2 = train_fip(spec, FipMode.RECOVER_SOURCE, obs, archs, cfg, reference_resolution=128)
    np.testing.assert_array_equal(r1.u_params.to_flat(), r2.u_params.to_flat())
    np.testing.assert_array_equal(r1.h_params.to_flat(), r2.h_params.to_flat())
    assert r1.final.total == r2.final.total
