import math

import numpy as np
import pytest

from su2riccati import exprdsl
from su2riccati.generator import (GeneratorX, PhaseSingularityError, ThetaRecipe, XRecipe,
                                  phase_kernel, theta_from_generator)
from su2riccati.quad import Grid, cumulative
from su2riccati.riccati import continued_atan_ratio, u_from_entries
from su2riccati.su2core import schrodinger_residual, unitarity_defect
from su2riccati.timefunc import TimeFunction

GRID = Grid(0.0, 3.0, 601)
T = GRID.points
fn = TimeFunction.from_expr


def _x(mag, phase, **params):
    return GeneratorX(fn(mag, params), fn(phase, params))


def test_generator_must_vanish_at_zero():
    with pytest.raises(ValueError):
        _x("1 + t", "t")


def test_phase_kernel_examples():
    assert np.all(phase_kernel(_x("0*t", "t"), T) == 0)
    assert np.all(phase_kernel(_x("sin(t)", "0"), T) == 0)
    c = 0.8
    X = _x("c*sin(t + t^2/4)", "t + t^2/4", c=c)
    ph, dph = T + T ** 2 / 4, 1 + T / 2
    ref = c * c * dph * np.sin(ph) ** 2 / (1 + c * c * np.sin(ph) ** 2)
    np.testing.assert_allclose(phase_kernel(X, T), ref, atol=1e-15)


def test_x_entries_start_and_unitarity():
    X = _x("t*exp(-t/3)", "sin(t)")
    r = XRecipe(X, fn("0.4 + 0.2*cos(t)"), GRID)
    e0 = r.entries(0.0)
    assert e0.a == 1 and e0.b == 0
    a, b = r.closed_form()(T)
    assert np.max(unitarity_defect(a, b)) <= 1e-12
    assert np.max(schrodinger_residual(r.hamiltonian(), r.closed_form(), T)) <= 1e-8


def test_real_generator_without_longitudinal_field():
    X = _x("tanh(t)", "0")
    r = XRecipe(X, fn("0"), GRID)
    a, b = r.closed_form()(T)
    assert np.all(np.abs(a.imag) < 1e-15) and np.all(a.real > 0)
    assert np.all(np.abs(b.real) < 1e-15)
    w = r.omega(T)
    np.testing.assert_allclose(w, (1 / np.cosh(T) ** 2) / (1 + np.tanh(T) ** 2), atol=1e-15)


def test_example1_generator_magnitudes():
    # tan(phi) = tan(Phi1) / sqrt(1 + c^2) with Phi1 = sqrt(1 + c^2)/c * t
    c = 1.5
    s = math.sqrt(1 + c * c)
    phi = fn("P + atan((1 - s)*sin(P)*cos(P)/(s*cos(P)^2 + sin(P)^2))".replace("P", "(k*t)"),
             {"s": s, "k": s / c})
    X = GeneratorX(TimeFunction.from_expr(exprdsl.substitute(exprdsl.parse("c*sin(q)"), "q", phi.expr),
                                          {"c": c, **phi.params}), phi)
    r = XRecipe(X, fn("0.3"), GRID)
    P = s / c * T
    np.testing.assert_allclose(phi(T), continued_atan_ratio(P, s), atol=1e-14)
    a, b = r.closed_form()(T)
    np.testing.assert_allclose(np.abs(a), np.sqrt((1 + c * c * np.cos(P) ** 2) / (1 + c * c)),
                               atol=1e-13)
    np.testing.assert_allclose(np.abs(b), c * np.abs(np.sin(P)) / s, atol=1e-13)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_example1_omega_and_coefficient_link(c):
    X = _x("c*sin(t + t^2/4)", "t + t^2/4", c=c)
    Omega = fn("0.3*cos(t)")
    r = XRecipe(X, Omega, GRID)
    ph, dph = T + T ** 2 / 4, 1 + T / 2
    mag = c * dph / (1 + c * c * np.sin(ph) ** 2)
    int_omega = 0.3 * np.sin(T)
    int_k = cumulative(lambda t: (1 + t / 2) / (1 + c * c * np.sin(t + t * t / 4) ** 2), GRID).prefix
    ref = mag * np.exp(-2j * int_omega + 2j * int_k)
    np.testing.assert_allclose(r.omega(T), ref, atol=1e-9)
    m, p = r.omega_decomposition()
    link = m(T) / c - Omega(T) - 0.5 * p.derivative(T)
    assert np.max(np.abs(link)) <= 1e-10
    assert p(0.0) == pytest.approx(np.angle(X.dot(0.0)), abs=1e-15)


def test_omega_phase_is_continuous_and_degenerate_points_flagged():
    # X' = 1 - t^2/... changes sign at t = 1: the phase jumps by pi there
    X = _x("t - t^3/3", "0")
    g = Grid(0.0, 2.0, 201)
    r = XRecipe(X, fn("0"), g)
    assert np.any(np.isclose(r.degenerate_times, 1.0))
    m, p = r.omega_decomposition()
    ph = p(g.points)
    assert np.all(np.isfinite(ph))
    # the modulus stays the modulus
    np.testing.assert_allclose(m(g.points) * np.exp(1j * ph), r.omega(g.points), atol=1e-12)


def _theta(Theta, mag="w", phase="0", w=1.0, grid=GRID, **kw):
    return ThetaRecipe(fn(mag, {"w": w}), fn(phase, {"w": w}), fn(Theta, {"w": w}), grid, **kw)


def test_theta_entries_start():
    r = _theta("w*t")
    e = r.entries(0.0)
    assert abs(e.a - 1) < 1e-15 and abs(e.b) < 1e-15


def test_theta_sine_omega_formula():
    r = _theta("w*t", phase="0.2*t")
    t = T[1:]
    ref = 0.5 * (1 - 0.2) + np.sin(t) / np.tan(2 * np.sin(t))
    np.testing.assert_allclose(r.Omega(t), ref, rtol=1e-9, atol=1e-9)
    # integrated S agrees with sin(int |omega|)
    np.testing.assert_allclose(r.S(T), np.sin(T), atol=1e-9)


def test_theta_arctan_a_omega_formula():
    r = _theta("2*atan(2*w*t/sqrt(2 + 4*(w*t)^2))")
    t = T
    ref = 4 * (1 + t * t) / ((1 + 4 * t * t) * np.sqrt(2 + 4 * t * t))
    np.testing.assert_allclose(r.Omega(t), ref, atol=1e-8)


def test_theta_arctan_b_magnitudes_and_R():
    r = _theta("2*atan(w*t/sqrt(2 + (w*t)^2))")
    tau = T
    a, b = r.closed_form()(T)
    np.testing.assert_allclose(np.abs(a), 1 / np.sqrt(1 + tau ** 2), atol=1e-9)
    np.testing.assert_allclose(np.abs(b), tau / np.sqrt(1 + tau ** 2), atol=1e-9)
    assert abs(r.closed_form().a(1.0)) == pytest.approx(0.70710678, abs=1e-8)
    # closed form of R = int |omega| sin Theta / sin(2 S) for this case
    R = 0.25 * tau * np.sqrt(2 + tau ** 2) + 0.5 * np.log((tau + np.sqrt(2 + tau ** 2)) / math.sqrt(2))
    np.testing.assert_allclose(r.R(T), R, atol=1e-8)


def test_theta_limit_at_zero():
    k, dp = 1.7, 0.4
    r = _theta(f"{k}*t + t^2", phase=f"{dp}*t", grid=Grid(0.0, 1.0, 201))
    assert r.omega_at_zero() == pytest.approx(k - dp / 2, abs=1e-14)
    assert float(r.Omega(0.0)) == pytest.approx(k - dp / 2, abs=1e-9)
    hs = np.array([1e-4, 1e-5, 1e-6])
    vals = np.array([float(r.omega_longitudinal_raw(h)) for h in hs])
    # linear Richardson on the two finest points
    extrap = vals[2] + (vals[2] - vals[1]) * hs[2] / (hs[1] - hs[2])
    assert extrap == pytest.approx(k - dp / 2, abs=1e-6)


def test_theta_phase_singularity():
    # S = sin(w t) with w = 1 leaves (0, pi/2) at t = pi
    g = Grid(0.0, 4.0, 401)
    with pytest.raises(PhaseSingularityError) as info:
        _theta("w*t", grid=g)
    assert info.value.time == pytest.approx(math.pi, abs=1e-8)


def test_theta_requires_zero_start():
    with pytest.raises(ValueError):
        _theta("1 + t")
    with pytest.raises(ValueError):
        _theta("t", phase="1 + t")


def test_theta_phase_sum_law():
    r = _theta("w*t", phase="0.2*t")
    s = r.phase_a(T) + r.phase_b(T)
    np.testing.assert_allclose(s, 0.2 * T - T - math.pi / 2, atol=1e-14)


def test_recipes_agree():
    X = _x("t", "t + t^2/4")
    r = XRecipe(X, fn("0.3 + 0.1*t"), GRID)
    Theta = theta_from_generator(X)
    np.testing.assert_allclose(np.tan(Theta(T)), T * (1 + T / 2), atol=1e-12)
    m, p = r.omega_decomposition()
    q = ThetaRecipe(m, p, Theta, GRID)
    ax, bx = r.closed_form()(T)
    at, bt = q.closed_form()(T)
    assert np.max(np.abs(ax - at)) <= 1e-8
    assert np.max(np.abs(bx - bt)) <= 1e-8
    np.testing.assert_allclose(q.Omega(T), r.Omega(T), atol=1e-8)
    np.testing.assert_allclose(r.particular()(T[1:]), u_from_entries(ax[1:], bx[1:]), atol=1e-12)
