"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict; the lines are printed in the
pytest terminal summary, and running this file directly prints them too.
"""
import math
import sys
import time

import numpy as np
import pytest

from su2riccati import exprdsl
from su2riccati.catalog import CASES, THETA_CASES, build_case
from su2riccati.generator import GeneratorX, ThetaRecipe, XRecipe, theta_from_generator
from su2riccati.oracle import IntegratorConfig, integrate_riccati, integrate_su2
from su2riccati.quad import Grid
from su2riccati.riccati import GeneralIntegral, cross_ratio, riccati_residual, u_from_entries
from su2riccati.su2core import schrodinger_residual, unitarity_defect
from su2riccati.timefunc import TimeFunction

RESULTS = []

GRID = Grid(0.0, 3.0, 1001)
T = GRID.points
_cache = {}


def _case(name):
    if name not in _cache:
        _cache[name] = build_case(name, {"omega": 1.0, "phi_omega": "0"})
    return _cache[name]


def _record(n, title, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_1_unitarity():
    worst = {n: float(np.max(unitarity_defect(*_case(n).entries(T)))) for n in CASES}
    m = max(worst.values())
    assert _record(1, "unitarity <= 1e-12", m <= 1e-12, f"max defect {m:.2e}")


def test_2_schrodinger_residual():
    worst = {n: float(np.max(schrodinger_residual(_case(n).hamiltonian, _case(n).entries, T)))
             for n in CASES}
    m = max(worst.values())
    assert _record(2, "entry-equation residual <= 1e-8", m <= 1e-8,
                   f"max {m:.2e} ({max(worst, key=worst.get)})")


def test_3_riccati_residual():
    worst = {n: float(np.max(riccati_residual(_case(n).dre, _case(n).ubar, T))) for n in CASES}
    m = max(worst.values())
    assert _record(3, "particular-solution residual <= 1e-8", m <= 1e-8,
                   f"max {m:.2e} ({max(worst, key=worst.get)})")


def test_4_oracle_equivalence():
    cfg = IntegratorConfig(rel_tol=1e-10)
    e_ab, e_u = 0.0, 0.0
    for n in CASES:
        b = _case(n)
        tr = integrate_su2(b.hamiltonian, GRID, cfg)
        a, bb = b.entries(T)
        e_ab = max(e_ab, *(float(np.max(np.abs(x))) for x in
                           (tr.a.real - a.real, tr.a.imag - a.imag,
                            tr.b.real - bb.real, tr.b.imag - bb.imag)))
        rt = integrate_riccati(b.dre, 0.0, GRID, cfg)
        assert rt.completed
        e_u = max(e_u, float(np.max(np.abs(rt.y - u_from_entries(tr.a, tr.b)))))
    ok = e_ab <= 1e-7 and e_u <= 1e-6
    assert _record(4, "oracle equivalence", ok,
                   f"entries {e_ab:.2e} (tol 1e-7), riccati vs b/conj(a) {e_u:.2e} (tol 1e-6)")


def test_5_general_integral():
    b = _case("scenario_tanh")
    gi = GeneralIntegral(b.dre, b.ubar, GRID)
    ts = np.linspace(0.0, 3.0, 2477)  # mostly between tabulation nodes
    res, init = 0.0, 0.0
    for c0 in (2, 1 + 1j, -3j):
        ok = np.abs(gi.denominator(c0, ts)) > 1e-3
        res = max(res, float(np.max(gi.residual(c0, ts[ok]))))
        init = max(init, abs(gi(c0, 0.0) - 1 / c0))
    consts = (2, 1 + 1j, -3j, 5)
    away = np.min([np.abs(gi.denominator(c, ts)) for c in consts], axis=0) > 1e-3
    cr = cross_ratio(*[gi(c, ts[away]) for c in consts])
    spread = float(np.max(np.abs(cr - cr[0])) / abs(cr[0]))
    ok = res <= 1e-7 and init <= 1e-12 and spread <= 1e-6
    assert _record(5, "general integral", ok,
                   f"residual {res:.2e}, u(0)-1/C0 {init:.1e}, cross-ratio spread {spread:.1e}")


def test_6_coefficient_links():
    link = 0.0
    for c in (0.5, 1.0, 2.0):
        b = build_case("example1", {"c": c})
        # rebuild omega from the generator X = c sin(phi) e^{i phi} and the case's Omega
        X = GeneratorX(b.extras["X_mag"], b.extras["X_phase"])
        r = XRecipe(X, b.hamiltonian.Omega, b.default_grid(1001))
        mag, phase = r.omega_decomposition()
        t = np.linspace(0.0, b.t_max, 1001)
        link = max(link, float(np.max(np.abs(mag(t) / c - b.hamiltonian.Omega(t)
                                             - 0.5 * phase.derivative(t)))))
        assert np.max(np.abs(mag(t) - b.hamiltonian.omega_mag(t))) <= 1e-10
    hs = np.array([1e-4, 1e-5, 1e-6])
    lim = 0.0
    for n in THETA_CASES:
        b = build_case(n, {"phi_omega": "0.4*t + sin(t)^2"})
        r = b.extras["recipe"]
        vals = np.array([float(r.omega_longitudinal_raw(h)) for h in hs])
        # quadratic through the three samples, evaluated at t = 0 (Neville)
        p01 = (hs[1] * vals[0] - hs[0] * vals[1]) / (hs[1] - hs[0])
        p12 = (hs[2] * vals[1] - hs[1] * vals[2]) / (hs[2] - hs[1])
        extrap = (hs[2] * p01 - hs[0] * p12) / (hs[2] - hs[0])
        expected = float(b.extras["Theta"].derivative(0.0)) - 0.5 * 0.4
        lim = max(lim, abs(extrap - expected))
    ok = link <= 1e-10 and lim <= 1e-6
    assert _record(6, "coefficient links", ok,
                   f"|omega|/c - Omega - phi_omega'/2 {link:.1e}, Omega(0) limit {lim:.1e}")


def test_7_spot_values():
    one = Grid(0.0, 1.0, 2)
    errs = {}
    for name, ref in (("scenario_tanh", 0.7955512), ("scenario_sinh", 0.6480543),
                      ("theta_arctan_a", 0.8506508)):
        b = _case(name)
        closed = abs(complex(b.entries.a(1.0)))
        oracle = abs(integrate_su2(b.hamiltonian, one).a[-1])
        errs[name] = max(abs(closed - ref), abs(oracle - ref))
    b = _case("theta_arctan_b")
    ref = complex(math.cos(5 * math.pi / 6), -math.sin(5 * math.pi / 6))
    closed = complex(b.ubar(1.0))
    oracle = complex(integrate_riccati(b.dre, 0.0, one).y[-1])
    errs["theta_arctan_b"] = max(abs(z.real - ref.real) for z in (closed, oracle))
    errs["theta_arctan_b"] = max(errs["theta_arctan_b"], *(abs(z.imag - ref.imag) for z in (closed, oracle)))
    m = max(errs.values())
    assert _record(7, "spot values +-1e-6", m <= 1e-6,
                   ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))


def test_8_dsl_derivatives():
    from test_exprdsl import CORPUS
    rng = np.random.default_rng(8)
    worst, count = 0.0, 0
    for text, params, domain in CORPUS:
        e = exprdsl.parse(text)
        d = exprdsl.differentiate(e)
        for t in rng.uniform(*domain, size=100):
            h = 1e-6 * max(1.0, abs(t))
            fd = (exprdsl.evaluate(e, t + h, params) - exprdsl.evaluate(e, t - h, params)) / (2 * h)
            exact = exprdsl.evaluate(d, t, params)
            worst = max(worst, abs(exact - fd) / max(1.0, abs(exact)))
            count += 1
    ok = len(CORPUS) == 20 and count == 2000 and worst <= 1e-6
    assert _record(8, "DSL derivative vs finite difference", ok,
                   f"{len(CORPUS)} expressions x 100 points, worst scaled error {worst:.1e}")


def test_9_recipe_consistency():
    fn = TimeFunction.from_expr
    X = GeneratorX(fn("t"), fn("t + t^2/4"))          # A' = 1 > 0 throughout
    r = XRecipe(X, fn("0.5*cos(t)"), GRID)
    Theta = theta_from_generator(X)                     # tan(Theta) = A phi' / A'
    mag, phase = r.omega_decomposition()
    q = ThetaRecipe(mag, phase, Theta, GRID)
    ax, bx = r.closed_form()(T)
    at, bt = q.closed_form()(T)
    err = float(max(np.max(np.abs(ax - at)), np.max(np.abs(bx - bt))))
    assert _record(9, "X-recipe vs Theta-recipe entries <= 1e-8", err <= 1e-8, f"max {err:.2e}")


if __name__ == "__main__":
    start = time.perf_counter()
    failed = 0
    for name, fn_ in sorted(globals().items()):
        if name.startswith("test_") and callable(fn_):
            try:
                fn_()
            except AssertionError:
                failed += 1
    print(f"{9 - failed}/9 criteria passed in {time.perf_counter() - start:.1f} s")
    sys.exit(1 if failed else 0)
