"""Constructions of exactly solvable two-level problems.

Two recipes are provided.

``XRecipe``
    Pick a complex generator ``X(t) = A(t) e^{i phi(t)}`` with ``X(0) = 0`` and
    any longitudinal field ``Omega(t)``.  Then::

        a = (1 + |X|^2)^(-1/2) exp(-i int Omega - i int K),   K = Im[X' X*] / (1 + |X|^2)
        b = -i a X
        omega = a^2 X'

    solve the entry equations exactly.

``ThetaRecipe``
    Pick the transverse field ``(|omega|, phi_omega)`` and a real angle
    ``Theta(t)`` with ``Theta(0) = 0``.  With ``S = int |omega| cos Theta`` the
    compatible longitudinal field is::

        Omega = (Theta' - phi_omega') / 2 + |omega| sin Theta cot(2 S)

    and the entries are ``|a| = cos S``, ``|b| = sin S`` with phases
    ``phi_omega/2 - Theta/2 -/+ R`` (``b`` also carries ``-pi/2``), where
    ``R = int |omega| sin Theta / sin(2 S)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import exprdsl
from .quad import DEFAULT_TOL, Grid
from .su2core import ClosedFormEntries, Hamiltonian, PropagatorEntries
from .timefunc import TimeFunction

ZERO_TOL = 1e-14


class PhaseSingularityError(ArithmeticError):
    """``2 int |omega| cos Theta`` left the open interval ``(0, pi)``."""

    def __init__(self, time: float, value: float):
        self.time = time
        self.value = value
        super().__init__(f"phase singularity crossed near t = {time:.12g} "
                         f"(2S = {value:.6g} outside (0, pi))")


@dataclass(frozen=True)
class GeneratorX:
    """Generator ``X = A e^{i phi}``; ``A`` may change sign."""

    mag: TimeFunction
    phase: TimeFunction

    def __post_init__(self):
        a0 = float(self.mag(0.0))
        if abs(a0) > ZERO_TOL:
            raise ValueError(f"generator must vanish at t = 0, got A(0) = {a0!r}")

    def __call__(self, t):
        return np.asarray(self.mag(t)) * np.exp(1j * np.asarray(self.phase(t)))

    def dot(self, t):
        A, dA = np.asarray(self.mag(t)), np.asarray(self.mag.derivative(t))
        dp = np.asarray(self.phase.derivative(t))
        return (dA + 1j * A * dp) * np.exp(1j * np.asarray(self.phase(t)))

    def ddot(self, t):
        A, dA = np.asarray(self.mag(t)), np.asarray(self.mag.derivative(t))
        ddA = np.asarray(self.mag.diff().derivative(t))
        dp = np.asarray(self.phase.derivative(t))
        ddp = np.asarray(self.phase.diff().derivative(t))
        return ((ddA + 2j * dA * dp + 1j * A * ddp - A * dp * dp)
                * np.exp(1j * np.asarray(self.phase(t))))

    def function(self) -> TimeFunction:
        return TimeFunction(self.__call__, self.dot, name="X")

    @classmethod
    def from_strings(cls, mag: str, phase: str, params=None) -> "GeneratorX":
        return cls(TimeFunction.from_expr(mag, params, name="A"),
                   TimeFunction.from_expr(phase, params, name="phi"))


def phase_kernel(X: GeneratorX, t):
    """``Im[X' X*] / (1 + |X|^2) = A^2 phi' / (1 + A^2)``."""
    A = np.asarray(X.mag(t))
    return A * A * np.asarray(X.phase.derivative(t)) / (1.0 + A * A)


def theta_from_generator(X: GeneratorX) -> TimeFunction:
    """Angle with ``tan Theta = A phi' / A'``; valid where ``A' > 0``."""
    if X.mag.expr is not None and X.phase.expr is not None:
        A = X.mag.expr
        ratio = exprdsl.BinOp("/", exprdsl.BinOp("*", A, exprdsl.differentiate(X.phase.expr)),
                              exprdsl.differentiate(A))
        params = {**X.mag.params, **X.phase.params}
        return TimeFunction.from_expr(exprdsl.Call("atan", ratio), params, name="Theta")
    q = X.mag * X.phase.diff() / X.mag.diff()
    return q.map(np.arctan, lambda x: 1.0 / (1.0 + x * x), name="Theta")


class XRecipe:
    """Exactly solvable problem generated by ``X`` for a given ``Omega``."""

    def __init__(self, X: GeneratorX, Omega: TimeFunction, grid: Grid, tol: float = DEFAULT_TOL):
        if grid.t0 != 0.0:
            raise ValueError("recipe grids start at t = 0")
        self.X = X
        self.Omega = Omega
        self.grid = grid
        self.tol = tol
        kernel = TimeFunction(lambda t: phase_kernel(X, t), name="K")
        self.int_Omega = Omega.integral(grid, tol)
        self.int_kernel = kernel.integral(grid, tol)
        # phase of a(t)
        self.phase_a = -(self.int_Omega + self.int_kernel)
        A = X.mag
        self.mag_a = A.map(lambda x: (1.0 + x * x) ** -0.5,
                           lambda x: -x * (1.0 + x * x) ** -1.5, name="|a|")
        self._a = TimeFunction.polar(self.mag_a, self.phase_a)
        self._b = (-1j) * self._a * X.function()
        self._build_phase_track()

    # -- entries ------------------------------------------------------------

    def entries(self, t) -> PropagatorEntries:
        return PropagatorEntries(complex(self._a(t)), complex(self._b(t)))

    def closed_form(self) -> ClosedFormEntries:
        return ClosedFormEntries(self._a, self._b)

    def particular(self) -> TimeFunction:
        """``u = -i X exp(-2i (int Omega + int K))``, the solution with ``u(0) = 0``."""
        two_phase = 2.0 * self.phase_a
        rot = TimeFunction.polar(TimeFunction.constant(1.0), two_phase)
        return (-1j) * self.X.function() * rot

    def particular_fg(self, g: TimeFunction) -> TimeFunction:
        """Particular solution written for ``y' = f* y^2 + g y + f``.

        ``g`` replaces ``-2i Omega``; the result is
        ``-i X exp(int g - 2i int K)``.
        """
        exponent = g.integral(self.grid, self.tol) + (-2j) * self.int_kernel
        return (-1j) * self.X.function() * exponent.map(np.exp, np.exp)

    # -- transverse field ---------------------------------------------------

    def omega(self, t):
        """``omega = X' / (1 + |X|^2) * exp(-2i int Omega - 2i int K)``."""
        A = np.asarray(self.X.mag(t))
        return self.X.dot(t) / (1.0 + A * A) * np.exp(2j * np.asarray(self.phase_a(t)))

    def _build_phase_track(self):
        nodes = self.grid.points
        xd = self.X.dot(nodes)
        ok = np.abs(xd) > ZERO_TOL
        self.degenerate_times = nodes[~ok]
        ang = np.angle(xd)
        if not np.any(ok):
            raise ValueError("X' vanishes on the whole grid; omega has no phase")
        # fill degenerate nodes from the left, leading ones from the first good node
        idx = np.where(ok, np.arange(ok.size), 0)
        np.maximum.accumulate(idx, out=idx)
        first = int(np.argmax(ok))
        idx[:first] = first
        self._arg_nodes = np.unwrap(ang[idx])

    def arg_xdot(self, t):
        """Continuous branch of ``arg X'``, tracked from the grid nodes."""
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        k = np.clip(np.rint(flat / self.grid.step).astype(np.int64), 0, self.grid.n - 1)
        ref = self._arg_nodes[k]
        xd = self.X.dot(flat)
        raw = np.angle(xd)
        out = raw + 2 * np.pi * np.round((ref - raw) / (2 * np.pi))
        out = np.where(np.abs(xd) > ZERO_TOL, out, ref)
        return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)

    def omega_decomposition(self):
        """``(|omega|, phi_omega)`` as functions with exact derivatives."""
        X = self.X

        def mag(t):
            A = np.asarray(X.mag(t))
            return np.abs(X.dot(t)) / (1.0 + A * A)

        def dmag(t):
            A, dA = np.asarray(X.mag(t)), np.asarray(X.mag.derivative(t))
            xd, xdd = X.dot(t), X.ddot(t)
            absxd = np.abs(xd)
            dabs = np.real(np.conj(xd) * xdd) / np.where(absxd > ZERO_TOL, absxd, 1.0)
            return dabs / (1.0 + A * A) - absxd * 2.0 * A * dA / (1.0 + A * A) ** 2

        def phase(t):
            return self.arg_xdot(t) + 2.0 * np.asarray(self.phase_a(t))

        def dphase(t):
            xd, xdd = X.dot(t), X.ddot(t)
            safe = np.where(np.abs(xd) > ZERO_TOL, xd, 1.0)
            darg = np.where(np.abs(xd) > ZERO_TOL, np.imag(xdd / safe), 0.0)
            return darg + 2.0 * np.asarray(self.phase_a.derivative(t))

        return (TimeFunction(mag, dmag, name="|omega|"),
                TimeFunction(phase, dphase, name="phi_omega"))

    def hamiltonian(self) -> Hamiltonian:
        mag, phase = self.omega_decomposition()
        return Hamiltonian(self.Omega, mag, phase)


def _regularized(raw, limit: float, eps: float):
    """``raw`` away from 0; below ``eps`` a quadratic through the exact limit at 0
    and the raw values at ``eps`` and ``2 eps``."""
    if eps <= 0:
        return raw, None
    r1, r2 = float(raw(eps)), float(raw(2 * eps))
    c2 = ((r2 - limit) - 2.0 * (r1 - limit)) / (2.0 * eps * eps)
    c1 = (r1 - limit) / eps - c2 * eps

    def value(t):
        t_arr = np.asarray(t, dtype=float)
        small = t_arr < eps
        if not np.any(small):
            return raw(t)
        safe = np.where(small, eps, t_arr)
        out = np.where(small, limit + c1 * t_arr + c2 * t_arr * t_arr, raw(safe))
        return float(out) if t_arr.ndim == 0 else out

    return value, (c1, c2)


class ThetaRecipe:
    """Exactly solvable problem for given ``(|omega|, phi_omega)`` and ``Theta``.

    ``S`` may be supplied in closed form; otherwise it is integrated.
    The removable singularities at ``t = 0`` are evaluated below
    ``cutoff = cutoff_fraction * t_max`` from their analytic limit.
    """

    def __init__(self, omega_mag: TimeFunction, omega_phase: TimeFunction,
                 Theta: TimeFunction, grid: Grid, tol: float = DEFAULT_TOL,
                 S: TimeFunction | None = None, cutoff_fraction: float = 1e-4):
        if grid.t0 != 0.0:
            raise ValueError("recipe grids start at t = 0")
        th0 = float(Theta(0.0))
        if abs(th0) > ZERO_TOL:
            raise ValueError(f"Theta(0) must be 0, got {th0!r}")
        p0 = float(omega_phase(0.0))
        if abs(p0) > ZERO_TOL:
            raise ValueError(f"phi_omega(0) must be 0, got {p0!r}")
        self.omega_mag = omega_mag
        self.omega_phase = omega_phase
        self.Theta = Theta
        self.grid = grid
        self.tol = tol
        self.cutoff = cutoff_fraction * grid.t1

        m, th = omega_mag, Theta
        s_rate = TimeFunction(lambda t: np.asarray(m(t)) * np.cos(np.asarray(th(t))),
                              name="|omega|cos(Theta)")
        self.S = S if S is not None else s_rate.integral(grid, tol)
        self._check_window()

        self.limit = 0.5 * float(Theta.derivative(0.0))
        cot_raw = lambda t: (np.asarray(m(t)) * np.sin(np.asarray(th(t)))  # noqa: E731
                             / np.tan(2.0 * np.asarray(self.S(t))))
        r_raw = lambda t: (np.asarray(m(t)) * np.sin(np.asarray(th(t)))  # noqa: E731
                           / np.sin(2.0 * np.asarray(self.S(t))))
        self._cot_raw = cot_raw
        self._r_raw = r_raw
        self.cot_term, self._cot_coef = _regularized(cot_raw, self.limit, self.cutoff)
        r_reg, _ = _regularized(r_raw, self.limit, self.cutoff)
        self.R_integrand = TimeFunction(r_reg, name="R'")
        self.R = self.R_integrand.integral(grid, tol)

        half = 0.5 * (omega_phase - Theta)
        self.phase_a = half - self.R
        self.phase_b = half + self.R - math.pi / 2
        self.mag_a = self.S.map(np.cos, lambda x: -np.sin(x), name="cos S")
        self.mag_b = self.S.map(np.sin, np.cos, name="sin S")
        self._a = TimeFunction.polar(self.mag_a, self.phase_a)
        self._b = TimeFunction.polar(self.mag_b, self.phase_b)
        self.Omega = TimeFunction(self._omega_value, self._omega_derivative, name="Omega")

    def _check_window(self):
        nodes = self.grid.points[1:]
        two_s = 2.0 * np.asarray(self.S(nodes))
        bad = (two_s <= 0.0) | (two_s >= math.pi)
        if not np.any(bad):
            return
        k = int(np.argmax(bad))
        hi = float(nodes[k])
        lo = float(nodes[k - 1]) if k > 0 else 0.0
        level = 0.0 if two_s[k] <= 0.0 else math.pi
        crossing = hi
        if k > 0:
            try:
                crossing = brentq(lambda x: 2.0 * float(self.S(x)) - level, lo, hi)
            except ValueError:
                pass
        raise PhaseSingularityError(crossing, float(two_s[k]))

    # -- longitudinal field -------------------------------------------------

    def _omega_value(self, t):
        return (0.5 * (np.asarray(self.Theta.derivative(t))
                       - np.asarray(self.omega_phase.derivative(t)))
                + self.cot_term(t))

    def _omega_derivative(self, t):
        m, th = self.omega_mag, self.Theta
        t_arr = np.asarray(t, dtype=float)
        base = 0.5 * (np.asarray(th.diff().derivative(t_arr))
                      - np.asarray(self.omega_phase.diff().derivative(t_arr)))
        safe = np.maximum(t_arr, self.cutoff)
        mm, dm = np.asarray(m(safe)), np.asarray(m.derivative(safe))
        T, dT = np.asarray(th(safe)), np.asarray(th.derivative(safe))
        two_s = 2.0 * np.asarray(self.S(safe))
        ds = mm * np.cos(T)
        cot = 1.0 / np.tan(two_s)
        raw = ((dm * np.sin(T) + mm * np.cos(T) * dT) * cot
               - mm * np.sin(T) * 2.0 * ds / np.sin(two_s) ** 2)
        if self._cot_coef is None:
            return base + raw
        c1, c2 = self._cot_coef
        series = c1 + 2.0 * c2 * t_arr
        return base + np.where(t_arr < self.cutoff, series, raw)

    def omega_longitudinal_raw(self, t):
        """``Omega`` from the formula with no treatment of ``t -> 0``."""
        return (0.5 * (np.asarray(self.Theta.derivative(t))
                       - np.asarray(self.omega_phase.derivative(t)))
                + self._cot_raw(t))

    def omega_at_zero(self) -> float:
        """Analytic limit ``Theta'(0) - phi_omega'(0) / 2``."""
        return 2.0 * self.limit - 0.5 * float(self.omega_phase.derivative(0.0))

    # -- entries ------------------------------------------------------------

    def entries(self, t) -> PropagatorEntries:
        return PropagatorEntries(complex(self._a(t)), complex(self._b(t)))

    def closed_form(self) -> ClosedFormEntries:
        return ClosedFormEntries(self._a, self._b)

    def particular(self) -> TimeFunction:
        """``u = tan S exp(i (phi_omega - Theta - pi/2))``."""
        mag = self.S.map(np.tan, lambda x: 1.0 / np.cos(x) ** 2, name="tan S")
        phase = self.omega_phase - self.Theta - math.pi / 2
        return TimeFunction.polar(mag, phase)

    def hamiltonian(self) -> Hamiltonian:
        return Hamiltonian(self.Omega, self.omega_mag, self.omega_phase)
