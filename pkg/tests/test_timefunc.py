import numpy as np
import pytest

from su2riccati.quad import Grid
from su2riccati.timefunc import TimeFunction, exp

T = np.linspace(0.0, 2.0, 41)


def _fd(f, t, h=1e-6):
    return (f(t + h) - f(t - h)) / (2 * h)


def test_from_expr_has_exact_derivative():
    f = TimeFunction.from_expr("w*sin(t)^2", {"w": 2.0})
    assert f.exact
    np.testing.assert_allclose(f.derivative(T), 4.0 * np.sin(T) * np.cos(T), atol=1e-14)
    np.testing.assert_allclose(f.diff().derivative(T), 4.0 * np.cos(2 * T), atol=1e-13)


def test_fallback_derivative_is_flagged():
    f = TimeFunction(np.sin)
    assert not f.exact
    np.testing.assert_allclose(f.derivative(T), np.cos(T), atol=1e-8)


def test_arithmetic_rules():
    f = TimeFunction.from_expr("sin(t)")
    g = TimeFunction.from_expr("exp(t/3)")
    t = T + 0.1
    for h, ref in [(f + g, lambda x: np.sin(x) + np.exp(x / 3)),
                   (f - 2.0, lambda x: np.sin(x) - 2.0),
                   (3.0 - f, lambda x: 3.0 - np.sin(x)),
                   (f * g, lambda x: np.sin(x) * np.exp(x / 3)),
                   (2j * f, lambda x: 2j * np.sin(x)),
                   (f / g, lambda x: np.sin(x) / np.exp(x / 3)),
                   (-f, lambda x: -np.sin(x)),
                   (exp(1j * f), lambda x: np.exp(1j * np.sin(x))),
                   (f.conj() * 1j, lambda x: 1j * np.sin(x))]:
        np.testing.assert_allclose(h(t), ref(t), atol=1e-14)
        np.testing.assert_allclose(h.derivative(t), _fd(ref, t), atol=1e-8)


def test_polar():
    mag = TimeFunction.from_expr("1 + t^2")
    ph = TimeFunction.from_expr("3*t")
    z = TimeFunction.polar(mag, ph)
    ref = lambda x: (1 + x * x) * np.exp(3j * x)  # noqa: E731
    np.testing.assert_allclose(z(T), ref(T), atol=1e-14)
    np.testing.assert_allclose(z.derivative(T), _fd(ref, T), atol=1e-7)


def test_integral_real_and_complex():
    g = Grid(0.0, 2.0, 101)
    F = TimeFunction.from_expr("cos(t)").integral(g)
    np.testing.assert_allclose(F(T), np.sin(T), atol=1e-10)
    np.testing.assert_allclose(F.derivative(T), np.cos(T), atol=1e-15)
    z = TimeFunction.polar(TimeFunction.constant(1.0), TimeFunction.from_expr("t"))
    Z = z.integral(g)
    np.testing.assert_allclose(Z(T), -1j * (np.exp(1j * T) - 1.0), atol=1e-10)


def test_constant():
    c = TimeFunction.constant(2.5)
    assert c(0.3) == 2.5
    np.testing.assert_array_equal(c(T), 2.5)
    np.testing.assert_array_equal(c.derivative(T), 0.0)
    assert c.diff()(1.0) == 0.0


def test_repr():
    assert "sin(t)" in repr(TimeFunction.from_expr("sin(t)"))
    assert "Omega" in repr(TimeFunction.from_expr("t", name="Omega"))
    with pytest.raises(Exception):
        TimeFunction.from_expr("sin(")
