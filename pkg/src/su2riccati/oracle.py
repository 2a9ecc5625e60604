"""Independent numerical integration of the raw equations.

Nothing here touches the construction recipes: the entry equations and the
Riccati equation are integrated directly from the Hamiltonian or the
coefficients, as real systems, with an embedded Dormand-Prince 5(4) pair and a
PI step-size controller.  Steps are shortened to land exactly on every grid
node so the traces carry no interpolation error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quad import Grid
from .riccati import RiccatiDRE, riccati_rhs
from .su2core import EntryTrace, Hamiltonian, schrodinger_rhs, unitarity_defect


class IntegratorError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    blowup_guard: float = 1e6
    max_steps: int = 10 ** 7
    resume_past_poles: bool = False

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "blowup_guard", "max_steps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class _Stepper:
    f: object
    cfg: IntegratorConfig
    t: float
    y: np.ndarray
    h: float = 0.0
    err_prev: float = 1.0
    steps: int = 0
    k1: np.ndarray = field(default=None)

    def __post_init__(self):
        self.k1 = self.f(self.t, self.y)

    def _initial_step(self, span):
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.abs(self.y)
        d0 = np.sqrt(np.mean((self.y / scale) ** 2))
        d1 = np.sqrt(np.mean((self.k1 / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(h0, span, self.cfg.max_step)

    def advance_to(self, t_end, guard=None):
        """Take adaptive steps until ``t_end``.  ``guard(y)`` may stop early."""
        if self.h == 0.0:
            self.h = self._initial_step(t_end - self.t)
        while self.t < t_end:
            if self.steps >= self.cfg.max_steps:
                raise IntegratorError(f"step budget of {self.cfg.max_steps} exhausted "
                                      f"at t = {self.t:.12g}")
            h = min(self.h, self.cfg.max_step)
            clipped = False
            if self.t + h >= t_end:
                h = t_end - self.t
                clipped = True
            y_new, k7, err = self._try(h)
            if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
                if h < 1e-14 * max(1.0, abs(self.t)):
                    raise IntegratorError(f"non-finite right-hand side near t = {self.t:.12g}")
                self.h = 0.25 * h
                continue
            if err <= 1.0:
                self.steps += 1
                t_prev = self.t
                self.t = t_end if clipped else self.t + h
                self.y = y_new
                self.k1 = k7
                factor = _SAFETY * max(err, 1e-10) ** -_ALPHA * self.err_prev ** _BETA
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
                if not clipped or factor < 1.0:
                    self.h = h * factor
                self.err_prev = max(err, 1e-4)
                if guard is not None and guard(self.y):
                    return (t_prev, self.t)
            else:
                factor = max(_MIN_FACTOR, _SAFETY * err ** -_ALPHA)
                self.h = h * factor
                if self.h < 1e-15 * max(1.0, abs(self.t)):
                    raise IntegratorError(f"step size underflow at t = {self.t:.12g}")
        return None

    def _try(self, h):
        t, y, f = self.t, self.y, self.f
        ks = [self.k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(f(t + _C[i] * h, yi))
        y_new = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
        err_vec = h * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        return y_new, ks[6], err


def _check_grid(grid: Grid):
    if grid.t0 != 0.0:
        raise ValueError("oracle integration starts at t = 0")


def integrate_su2(H: Hamiltonian, grid: Grid, cfg: IntegratorConfig = IntegratorConfig()) -> EntryTrace:
    """Integrate the entry equations from ``a = 1, b = 0``, sampled on ``grid``."""
    _check_grid(grid)

    def f(t, y):
        a = complex(y[0], y[1])
        b = complex(y[2], y[3])
        da, db = schrodinger_rhs(H, a, b, t)
        da, db = complex(da), complex(db)
        return np.array([da.real, da.imag, db.real, db.imag])

    nodes = grid.points
    out = np.empty((grid.n, 4))
    out[0] = [1.0, 0.0, 0.0, 0.0]
    stepper = _Stepper(f, cfg, 0.0, out[0].copy())
    for k in range(1, grid.n):
        stepper.advance_to(float(nodes[k]))
        out[k] = stepper.y
    a = out[:, 0] + 1j * out[:, 1]
    b = out[:, 2] + 1j * out[:, 3]
    drift = float(np.max(unitarity_defect(a, b)))
    return EntryTrace(grid, a, b, drift)


@dataclass(frozen=True)
class RiccatiTrace:
    grid: Grid
    y: np.ndarray
    poles: list
    completed: bool
    steps: int

    @property
    def t(self):
        return self.grid.points


def integrate_riccati(dre: RiccatiDRE, y0: complex, grid: Grid,
                      cfg: IntegratorConfig = IntegratorConfig()) -> RiccatiTrace:
    """Integrate ``y' = A y^2 + B y + C`` from ``y(0) = y0`` on ``grid``.

    When ``|y|`` passes ``cfg.blowup_guard`` the pole is bracketed by the last
    two step endpoints.  Integration stops there (remaining samples are NaN)
    unless ``cfg.resume_past_poles`` is set, in which case it continues through
    the pole in the reciprocal variable ``w = 1/y``.
    """
    _check_grid(grid)

    def f_direct(t, v):
        y = complex(v[0], v[1])
        d = complex(riccati_rhs(dre, y, t))
        return np.array([d.real, d.imag])

    def f_recip(t, v):
        # w = 1/y  =>  w' = -(A + B w + C w^2)
        w = complex(v[0], v[1])
        d = -complex(np.asarray(dre.A(t)) + np.asarray(dre.B(t)) * w
                     + np.asarray(dre.C(t)) * w * w)
        return np.array([d.real, d.imag])

    nodes = grid.points
    ys = np.full(grid.n, np.nan + 0j)
    ys[0] = y0
    poles = []
    guard = cfg.blowup_guard
    recip = False
    stepper = _Stepper(f_direct, cfg, 0.0, np.array([complex(y0).real, complex(y0).imag]))
    total_steps = 0

    k = 1
    while k < grid.n:
        t_target = float(nodes[k])
        if recip:
            stop = stepper.advance_to(t_target, guard=lambda v: math.hypot(v[0], v[1]) > guard)
        else:
            stop = stepper.advance_to(t_target, guard=lambda v: math.hypot(v[0], v[1]) > guard)
        if stop is None:
            z = complex(stepper.y[0], stepper.y[1])
            ys[k] = 1.0 / z if recip else z
            k += 1
            continue
        if not recip:
            poles.append(stop)
            if not cfg.resume_past_poles:
                return RiccatiTrace(grid, ys, poles, False, total_steps + stepper.steps)
        # swap to the other chart and carry on from where the guard fired
        z = complex(stepper.y[0], stepper.y[1])
        w = 1.0 / z
        total_steps += stepper.steps
        recip = not recip
        stepper = _Stepper(f_recip if recip else f_direct, cfg, stepper.t,
                           np.array([w.real, w.imag]))
        if stepper.t >= t_target:
            ys[k] = w if not recip else z
            k += 1
    return RiccatiTrace(grid, ys, poles, True, total_steps + stepper.steps)
