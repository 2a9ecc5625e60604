"""Two-level Hamiltonian, propagator entries and the entry equations.

The Hamiltonian is ``H = [[Omega, omega], [conj(omega), -Omega]]`` (hbar = 1)
and the propagator ``U = [[a, b], [-conj(b), conj(a)]]`` solves
``i dU/dt = H U`` with ``U(0) = I``.  In components::

    da/dt = -i Omega a + i omega conj(b)
    db/dt = -i omega conj(a) - i Omega b
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quad import Grid
from .timefunc import TimeFunction


@dataclass(frozen=True)
class Hamiltonian:
    """Longitudinal field ``Omega`` and transverse ``omega = |omega| e^{i phase}``."""

    Omega: TimeFunction
    omega_mag: TimeFunction
    omega_phase: TimeFunction

    def omega(self, t):
        return np.asarray(self.omega_mag(t)) * np.exp(1j * np.asarray(self.omega_phase(t)))

    def omega_function(self) -> TimeFunction:
        return TimeFunction.polar(self.omega_mag, self.omega_phase)

    def matrix(self, t) -> np.ndarray:
        w = complex(self.omega(t))
        O = float(self.Omega(t))
        return np.array([[O, w], [np.conj(w), -O]])


@dataclass(frozen=True)
class PropagatorEntries:
    a: complex
    b: complex

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [-np.conj(self.b), np.conj(self.a)]])


@dataclass(frozen=True)
class EntryTrace:
    grid: Grid
    a: np.ndarray
    b: np.ndarray
    unitarity_drift: float = 0.0

    @property
    def t(self) -> np.ndarray:
        return self.grid.points

    def __getitem__(self, k) -> PropagatorEntries:
        return PropagatorEntries(complex(self.a[k]), complex(self.b[k]))

    def __len__(self):
        return len(self.a)


@dataclass(frozen=True)
class ClosedFormEntries:
    """Entries ``a(t)``, ``b(t)`` as complex functions with exact derivatives."""

    a: TimeFunction
    b: TimeFunction

    def __call__(self, t):
        return self.a(t), self.b(t)

    def at(self, t) -> PropagatorEntries:
        return PropagatorEntries(complex(self.a(t)), complex(self.b(t)))


def schrodinger_rhs(H: Hamiltonian, a, b, t):
    """Right-hand side ``(da/dt, db/dt)`` of the entry equations."""
    O = np.asarray(H.Omega(t))
    w = H.omega(t)
    da = -1j * O * a + 1j * w * np.conj(b)
    db = -1j * w * np.conj(a) - 1j * O * b
    return da, db


def unitarity_defect(a, b=None):
    """``| |a|^2 + |b|^2 - 1 |``; accepts a :class:`PropagatorEntries` too."""
    if isinstance(a, PropagatorEntries):
        a, b = a.a, a.b
    return np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0)


def schrodinger_residual(H: Hamiltonian, entries: ClosedFormEntries, t):
    """Pointwise max-norm of ``d(a, b)/dt - rhs`` using the exact derivatives."""
    a, b = entries.a(t), entries.b(t)
    ra, rb = schrodinger_rhs(H, a, b, t)
    return np.maximum(np.abs(entries.a.derivative(t) - ra),
                      np.abs(entries.b.derivative(t) - rb))


def schrodinger_residual_fd(H: Hamiltonian, entries: ClosedFormEntries, t, h=1e-5):
    """Same residual with central differences in place of exact derivatives."""
    t = np.asarray(t, dtype=float)
    lo = np.maximum(t - h, 0.0)
    hi = lo + 2 * h
    mid = 0.5 * (lo + hi)
    da = (entries.a(hi) - entries.a(lo)) / (2 * h)
    db = (entries.b(hi) - entries.b(lo)) / (2 * h)
    ra, rb = schrodinger_rhs(H, entries.a(mid), entries.b(mid), mid)
    return np.maximum(np.abs(da - ra), np.abs(db - rb))
