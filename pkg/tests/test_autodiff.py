import numpy as np
import pytest

from pinnfd.autodiff import Var, tanh


def _fd_grad(fn, x, h=1e-6):
    """Central-difference gradient of a scalar function of one array."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        xp = x.copy(); xp[idx] += h
        xm = x.copy(); xm[idx] -= h
        g[idx] = (fn(xp) - fn(xm)) / (2 * h)
    return g


def test_value_arithmetic_matches_numpy():
    a = Var(np.array([1.0, -2.0, 3.0]))
    b = Var(np.array([0.5, 4.0, -1.0]))
    out = (a + b) * a - b / a + 2.0
    expect = (a.value + b.value) * a.value - b.value / a.value + 2.0
    np.testing.assert_array_equal(out.value, expect)


def test_reflected_ops_and_ufunc_opt_out():
    # ndarray op Var must route through Var, not produce an object array
    a = Var(np.ones(3))
    for out in (np.float64(2.0) * a, 2.0 - a, 6.0 / (a + 1.0)):
        assert isinstance(out, Var)
        assert out.value.dtype == np.float64


def test_add_mul_gradients():
    a = Var(np.array([1.0, 2.0]))
    b = Var(np.array([3.0, 4.0]))
    ((a * b) + a).sum().backward()
    np.testing.assert_allclose(a.grad, b.value + 1.0)
    np.testing.assert_allclose(b.grad, a.value)


def test_tanh_gradient_identity():
    x = Var(np.array([-1.5, 0.0, 0.7]))
    x.tanh().sum().backward()
    np.testing.assert_allclose(x.grad, 1.0 - np.tanh(x.value) ** 2, rtol=1e-15)


def test_pow_and_division_gradients():
    x = Var(np.array([0.5, 2.0, 3.0]))
    (x**3).sum().backward()
    np.testing.assert_allclose(x.grad, 3.0 * x.value**2, rtol=1e-14)

    y = Var(np.array([1.0, 4.0]))
    (1.0 / y).sum().backward()
    np.testing.assert_allclose(y.grad, -1.0 / y.value**2, rtol=1e-14)


def test_matmul_gradients_against_finite_differences():
    rng = np.random.default_rng(5)
    w = rng.normal(size=(3, 4))
    x = rng.normal(size=(5, 3))

    def fn(wv):
        return float((Var(x) @ Var(wv)).tanh().mean().value)

    wvar = Var(w)
    (Var(x) @ wvar).tanh().mean().backward()
    np.testing.assert_allclose(wvar.grad, _fd_grad(fn, w), rtol=1e-6, atol=1e-9)


def test_broadcast_add_gradient_shape_and_value():
    # bias broadcast over rows: grad must collapse back to bias shape
    rng = np.random.default_rng(9)
    h = rng.normal(size=(6, 4))
    b = rng.normal(size=(4,))

    def fn(bv):
        return float(((Var(h) + Var(bv)) ** 2).sum().value)

    bvar = Var(b)
    ((Var(h) + bvar) ** 2).sum().backward()
    assert bvar.grad.shape == b.shape
    np.testing.assert_allclose(bvar.grad, _fd_grad(fn, b), rtol=1e-6, atol=1e-8)


def test_mean_gradient_is_uniform():
    x = Var(np.arange(8.0).reshape(2, 4))
    x.mean().backward()
    np.testing.assert_array_equal(x.grad, np.full((2, 4), 1.0 / 8.0))


def test_diamond_graph_accumulates_gradient():
    # z = x*x reuses x twice; gradient must sum both paths
    x = Var(np.array([3.0]))
    (x * x).sum().backward()
    np.testing.assert_allclose(x.grad, [6.0])


def test_backward_requires_scalar():
    x = Var(np.ones(3))
    with pytest.raises(ValueError):
        (x * 2.0).backward()


def test_quadratic_gradient_is_exact():
    # loss = 0.5 ||theta||^2 has gradient exactly theta, bit for bit
    rng = np.random.default_rng(21)
    theta = rng.normal(size=37)
    v = Var(theta.copy())
    ((v * v).sum() * 0.5).backward()
    np.testing.assert_array_equal(v.grad, theta)


def test_module_level_tanh_matches_method():
    x = Var(np.array([0.3]))
    assert tanh(x).value == x.tanh().value


def test_deep_chain_does_not_overflow_stack():
    # iterative backward should handle graphs deeper than recursion limits
    x = Var(np.array([0.5]))
    out = x
    for _ in range(5000):
        out = out + 0.001
    out.sum().backward()
    np.testing.assert_allclose(x.grad, [1.0])
