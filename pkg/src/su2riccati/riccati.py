"""Riccati equations ``y' = A y^2 + B y + C`` attached to two-level problems.

For entries ``(a, b)`` the ratio ``u = b / conj(a)`` obeys::

    u' = i conj(omega) u^2 - 2i Omega u - i omega,    u(0) = 0

whose coefficients have the shape ``y' = conj(f) y^2 + g y + f`` with
``f = -i omega`` and ``g = -2i Omega``.  Every equation of that shape is stored
in this canonical orientation.  Knowing one solution ``ubar`` gives the whole
family::

    u = ubar + Phi / (C0 - int A Phi),   Phi = exp(int (2 A ubar + B))
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .quad import DEFAULT_TOL, Grid, adaptive_panels, cumulative
from .su2core import Hamiltonian, PropagatorEntries
from .timefunc import TimeFunction

POLE_TOL = 1e-12


class PoleError(ArithmeticError):
    """A Riccati solution is at (or numerically indistinguishable from) a pole."""

    def __init__(self, message, bracket=None):
        self.bracket = bracket
        super().__init__(message)


@dataclass(frozen=True)
class RiccatiDRE:
    """Coefficients of ``y' = A y^2 + B y + C``.

    ``is_class`` marks equations with ``A = conj(C)``.
    """

    A: TimeFunction
    B: TimeFunction
    C: TimeFunction
    is_class: bool = False

    @classmethod
    def from_class(cls, f: TimeFunction, g: TimeFunction, form: str = "fstar_first"):
        """Build ``y' = f* y^2 + g y + f``.

        ``form="f_first"`` reads the input as ``y' = f y^2 + g y + f*`` and
        relabels ``f -> f*`` so the stored orientation is always the same.
        """
        if form == "f_first":
            f = f.conj()
        elif form != "fstar_first":
            raise ValueError(f"unknown form {form!r}")
        return cls(f.conj(), g, f, is_class=True)

    @property
    def f(self) -> TimeFunction:
        if not self.is_class:
            raise AttributeError("f is only defined for equations of the class shape")
        return self.C

    @property
    def g(self) -> TimeFunction:
        return self.B

    def class_defect(self, t):
        """``|A - conj(C)|`` pointwise."""
        return np.abs(np.asarray(self.A(t)) - np.conj(self.C(t)))

    def rhs(self, y, t):
        return riccati_rhs(self, y, t)


def riccati_rhs(dre: RiccatiDRE, y, t):
    return (np.asarray(dre.A(t)) * y * y + np.asarray(dre.B(t)) * y
            + np.asarray(dre.C(t)))


def associate(H: Hamiltonian) -> RiccatiDRE:
    """The Riccati equation satisfied by ``b / conj(a)``."""
    omega = H.omega_function()
    A = 1j * omega.conj()
    B = -2j * H.Omega
    C = -1j * omega
    return RiccatiDRE(A, B, C, is_class=True)


def riccati_residual(dre: RiccatiDRE, u: TimeFunction, t):
    """``|u' - rhs(u)|`` using the exact derivative carried by ``u``."""
    return np.abs(np.asarray(u.derivative(t)) - riccati_rhs(dre, np.asarray(u(t)), t))


def u_from_entries(a, b=None):
    """``b / conj(a)``; raises :class:`PoleError` where ``|a|`` vanishes."""
    if isinstance(a, PropagatorEntries):
        a, b = a.a, a.b
    a = np.asarray(a)
    if np.any(np.abs(a) < POLE_TOL):
        raise PoleError("|a| below 1e-12: u = b/conj(a) has a pole here")
    out = np.asarray(b) / np.conj(a)
    return complex(out) if out.ndim == 0 else out


def ratio_function(a: TimeFunction, b: TimeFunction) -> TimeFunction:
    """``u = b / conj(a)`` with derivative by the quotient rule."""
    def value(t):
        return np.asarray(b(t)) / np.conj(a(t))

    def derivative(t):
        ca = np.conj(a(t))
        return (np.asarray(b.derivative(t)) * ca - np.asarray(b(t))
                * np.conj(a.derivative(t))) / (ca * ca)
    return TimeFunction(value, derivative, name="b/conj(a)")


class GeneralIntegral:
    """All solutions of a Riccati equation from one particular solution ``ubar``.

    The exponent of ``Phi`` and the integral ``J = int A Phi`` are tabulated on
    ``grid``; ``Phi`` off the grid comes from a cubic Hermite interpolant of the
    exponent, and ``J`` from one extra adaptive panel.
    """

    def __init__(self, dre: RiccatiDRE, ubar: TimeFunction, grid: Grid, tol: float = DEFAULT_TOL):
        if grid.t0 != 0.0:
            raise ValueError("general integrals are anchored at t = 0")
        self.dre = dre
        self.ubar = ubar
        self.grid = grid
        self.tol = tol
        nodes = grid.points
        self._nodes = nodes

        def rate(t):
            return 2.0 * np.asarray(dre.A(t)) * np.asarray(ubar(t)) + np.asarray(dre.B(t))
        self._rate = rate
        re = cumulative(lambda t: np.real(rate(t)), grid, tol)
        im = cumulative(lambda t: np.imag(rate(t)), grid, tol)
        exps = re.prefix + 1j * im.prefix
        slopes = rate(nodes)
        self._exp_re = CubicHermiteSpline(nodes, exps.real, slopes.real)
        self._exp_im = CubicHermiteSpline(nodes, exps.imag, slopes.imag)
        self._exp_nodes = exps

        def j_rate(t):
            return np.asarray(dre.A(t)) * self.Phi(t)
        self._j_rate = j_rate
        jre = cumulative(lambda t: np.real(j_rate(t)), grid, tol)
        jim = cumulative(lambda t: np.imag(j_rate(t)), grid, tol)
        self._jre, self._jim = jre, jim

    def exponent(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._exp_re(t_arr) + 1j * self._exp_im(t_arr)
        on = self._on_grid(t_arr)
        if np.any(on):
            k = self._index(t_arr)
            out = np.where(on, self._exp_nodes[k], out)
        return complex(out) if t_arr.ndim == 0 else out

    def _index(self, t):
        return np.clip(np.rint(t / self.grid.step).astype(np.int64), 0, self.grid.n - 1)

    def _on_grid(self, t):
        k = self._index(t)
        return np.abs(t - self._nodes[k]) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(t))

    def Phi(self, t):
        """Integrating factor ``exp(int (2 A ubar + B))``; ``Phi(0) = 1``."""
        return np.exp(self.exponent(t))

    def J(self, t):
        return np.asarray(self._jre(t)) + 1j * np.asarray(self._jim(t))

    def denominator(self, C0: complex, t):
        return C0 - self.J(t)

    def __call__(self, C0: complex, t):
        """Solution with ``u(0) = ubar(0) + 1/C0``."""
        D = self.denominator(C0, t)
        if np.any(np.abs(D) < POLE_TOL):
            bad = np.atleast_1d(np.asarray(t, dtype=float))[np.atleast_1d(np.abs(D) < POLE_TOL)]
            t_bad = float(bad[0])
            raise PoleError(f"general integral has a pole at t = {t_bad:.12g}",
                            bracket=self._bracket(t_bad))
        out = np.asarray(self.ubar(t)) + self.Phi(t) / D
        return complex(out) if np.ndim(out) == 0 else out

    def derivative(self, C0: complex, t):
        """Exact ``du/dt`` from the tabulated quantities."""
        D = self.denominator(C0, t)
        P = self.Phi(t)
        dP = self._rate(t) * P
        dD = -np.asarray(self.dre.A(t)) * P
        return np.asarray(self.ubar.derivative(t)) + (dP * D - P * dD) / (D * D)

    def function(self, C0: complex) -> TimeFunction:
        return TimeFunction(lambda t: self(C0, t), lambda t: self.derivative(C0, t),
                            name=f"u[C0={C0}]")

    def residual(self, C0: complex, t):
        u = self(C0, t)
        return np.abs(self.derivative(C0, t) - riccati_rhs(self.dre, u, t))

    def _bracket(self, t):
        k = int(np.clip(math.floor(t / self.grid.step), 0, self.grid.n - 2))
        return float(self._nodes[k]), float(self._nodes[k + 1])

    def poles(self, C0: complex, threshold: float = 1e-3):
        """Grid intervals on which ``|C0 - J|`` dips below ``threshold``.

        Returns ``(t_lo, t_hi, min_abs_denominator)`` triples.
        """
        D = np.abs(self.denominator(C0, self._nodes))
        low = D < threshold
        out = []
        k = 0
        n = len(D)
        while k < n:
            if low[k]:
                j = k
                while j + 1 < n and low[j + 1]:
                    j += 1
                lo = self._nodes[max(k - 1, 0)]
                hi = self._nodes[min(j + 1, n - 1)]
                out.append((float(lo), float(hi), float(D[k:j + 1].min())))
                k = j + 1
            else:
                k += 1
        return out


def cross_ratio(u1, u2, u3, u4):
    return ((u1 - u3) * (u2 - u4)) / ((u1 - u4) * (u2 - u3))


def continued_atan_ratio(x, s):
    """``atan(tan(x) / s)`` continued through the poles of ``tan``.

    Equals ``x + atan((1 - s) sin x cos x / (s cos^2 x + sin^2 x))``, which is
    smooth for ``s > 0`` and agrees with adding ``k pi`` each time ``x``
    crosses ``pi/2 + k pi``.
    """
    x = np.asarray(x, dtype=float)
    sx, cx = np.sin(x), np.cos(x)
    return x + np.arctan((1.0 - s) * sx * cx / (s * cx * cx + sx * sx))


def d_continued_atan_ratio(x, s):
    x = np.asarray(x, dtype=float)
    return s / (s * s * np.cos(x) ** 2 + np.sin(x) ** 2)


def example1_family(c: float, f_mag: TimeFunction, f_phase: TimeFunction, grid: Grid,
                    tol: float = DEFAULT_TOL):
    """Riccati equation ``y' = f* y^2 + g y + f`` with a closed-form solution.

    The coefficient ``g`` is fixed by ``|f| / c = i g / 2 + phi_f' / 2``, i.e.
    ``g = -2i (|f| / c - phi_f' / 2)`` (purely imaginary).  With
    ``P = sqrt(1 + c^2) / c * int |f|`` the solution through ``y(0) = 0`` is::

        y = c sin P / sqrt(1 + c^2 cos^2 P) * exp(i phi_f - i atan(tan P / sqrt(1 + c^2)))

    Returns ``(dre, y, P)``.
    """
    if c == 0:
        raise ValueError("c must be non-zero")
    p0 = float(f_phase(0.0))
    if abs(p0) > 1e-14:
        raise ValueError(f"phi_f(0) must be 0, got {p0!r}")
    s = math.sqrt(1.0 + c * c)
    k = s / c
    f = TimeFunction.polar(f_mag, f_phase)
    g = -2j * (f_mag * (1.0 / c) - 0.5 * f_phase.diff())
    dre = RiccatiDRE.from_class(f, g)
    P = k * f_mag.integral(grid, tol)

    def mag(x):
        return c * np.sin(x) / np.sqrt(1.0 + c * c * np.cos(x) ** 2)

    def dmag(x):
        q = 1.0 + c * c * np.cos(x) ** 2
        return c * np.cos(x) / np.sqrt(q) + c ** 3 * np.sin(x) ** 2 * np.cos(x) / q ** 1.5

    y_mag = P.map(mag, dmag, name="|y|")
    twist = P.map(lambda x: continued_atan_ratio(x, s), lambda x: d_continued_atan_ratio(x, s))
    y = TimeFunction.polar(y_mag, f_phase - twist)
    return dre, y, P
