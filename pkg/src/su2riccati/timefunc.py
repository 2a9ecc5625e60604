"""Functions of time that carry their own derivative.

A :class:`TimeFunction` wraps a vectorised value callable and a derivative
callable.  Expression-backed functions differentiate symbolically, integral
backed ones return their integrand, and the arithmetic helpers below combine
derivatives with the usual sum, product and chain rules.  Values may be real
or complex.
"""
from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from . import exprdsl
from .quad import DEFAULT_TOL, Grid, cumulative


def _fd(fn, t):
    t = np.asarray(t, dtype=float)
    h = 1e-6 * np.maximum(1.0, np.abs(t))
    return (np.asarray(fn(t + h)) - np.asarray(fn(t - h))) / (2.0 * h)


def _lift(x):
    return x if isinstance(x, TimeFunction) else TimeFunction.constant(x)


class TimeFunction:
    """Callable ``t -> value`` with a derivative ``t -> d value / dt``.

    If ``derivative`` is omitted a central difference is used and
    :attr:`exact` is False.
    """

    def __init__(self, value: Callable, derivative: Callable | None = None,
                 name: str = "", expr=None, params=None, diff: Callable | None = None):
        self._value = value
        self.exact = derivative is not None
        self._derivative = derivative if derivative is not None else (lambda t: _fd(value, t))
        self.name = name
        self.expr = expr
        self.params = dict(params or {})
        self._diff = diff

    def __call__(self, t):
        return self._value(t)

    def derivative(self, t):
        return self._derivative(t)

    def __repr__(self):
        label = self.name or (exprdsl.to_string(self.expr) if self.expr is not None else "?")
        return f"TimeFunction({label})"

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_expr(cls, expr, params: Mapping[str, float] | None = None, name: str = ""):
        """Wrap a DSL expression (string or tree) with bound parameters."""
        e = exprdsl.as_expr(expr)
        p = dict(params or {})
        de = exprdsl.differentiate(e)
        return cls(exprdsl.compile_expr(e, p), exprdsl.compile_expr(de, p),
                   name=name, expr=e, params=p,
                   diff=lambda: cls.from_expr(de, p))

    @classmethod
    def constant(cls, c):
        def value(t, c=c):
            return c + 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else c
        return cls(value, lambda t: 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0,
                   name=repr(c), diff=lambda: cls.constant(0.0))

    @classmethod
    def polar(cls, mag: "TimeFunction", phase: "TimeFunction"):
        """``mag * exp(i * phase)`` with derivative ``(mag' + i mag phase') e^{i phase}``."""
        def value(t):
            return np.asarray(mag(t)) * np.exp(1j * np.asarray(phase(t)))

        def derivative(t):
            m = np.asarray(mag(t))
            return ((np.asarray(mag.derivative(t)) + 1j * m * np.asarray(phase.derivative(t)))
                    * np.exp(1j * np.asarray(phase(t))))
        return cls(value, derivative, name=f"polar({mag.name}, {phase.name})")

    def integral(self, grid: Grid, tol: float = DEFAULT_TOL) -> "TimeFunction":
        """Antiderivative vanishing at ``grid.t0``; complex values are split."""
        probe = np.asarray(self(np.array([grid.t0])))
        if np.iscomplexobj(probe):
            re = cumulative(lambda t: np.real(self(t)), grid, tol)
            im = cumulative(lambda t: np.imag(self(t)), grid, tol)
            value = lambda t: re(t) + 1j * np.asarray(im(t))  # noqa: E731
        else:
            value = cumulative(self, grid, tol)
        return TimeFunction(value, self.__call__, name=f"int({self.name})", diff=lambda: self)

    # -- calculus -----------------------------------------------------------

    def diff(self) -> "TimeFunction":
        """The derivative as a function.  Exact for expression-backed inputs."""
        if self._diff is not None:
            return self._diff()
        return TimeFunction(self._derivative, name=f"d({self.name})")

    def map(self, f: Callable, df: Callable, name: str = "") -> "TimeFunction":
        """Compose with a scalar function ``f`` whose derivative is ``df``."""
        return TimeFunction(lambda t: f(self(t)),
                            lambda t: df(self(t)) * self.derivative(t),
                            name=name or f"f({self.name})")

    def conj(self) -> "TimeFunction":
        return TimeFunction(lambda t: np.conj(self(t)), lambda t: np.conj(self.derivative(t)),
                            name=f"conj({self.name})")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _lift(other)
        return TimeFunction(lambda t: self(t) + other(t),
                            lambda t: self.derivative(t) + other.derivative(t),
                            name=f"({self.name}+{other.name})")

    __radd__ = __add__

    def __neg__(self):
        return TimeFunction(lambda t: -self(t), lambda t: -self.derivative(t),
                            name=f"-{self.name}")

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, TimeFunction):
            c = other
            return TimeFunction(lambda t: c * self(t), lambda t: c * self.derivative(t),
                                name=f"{c!r}*{self.name}")
        return TimeFunction(
            lambda t: self(t) * other(t),
            lambda t: self.derivative(t) * other(t) + self(t) * other.derivative(t),
            name=f"{self.name}*{other.name}")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TimeFunction):
            return self * (1.0 / other)
        return self * other.map(lambda x: 1.0 / x, lambda x: -1.0 / (x * x),
                                name=f"1/{other.name}")


def expr_function(text, params=None, name="") -> TimeFunction:
    return TimeFunction.from_expr(text, params, name=name)


def exp(f: TimeFunction) -> TimeFunction:
    return f.map(np.exp, np.exp, name=f"exp({f.name})")
