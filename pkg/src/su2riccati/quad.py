"""Adaptive Simpson quadrature and cumulative antiderivatives.

All panels that still need work are refined together, one level at a time, so
the integrand is always called with numpy arrays.  Integrands must therefore
accept an array of abscissae and return an array of the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10
MAX_PANELS = 2 ** 20


class QuadratureError(ArithmeticError):
    """Non-convergence or a non-finite integrand sample."""

    def __init__(self, message, abscissa=None, panel=None):
        self.abscissa = abscissa
        self.panel = panel
        super().__init__(message)


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` points on ``[t0, t1]``, both ends included."""

    t0: float
    t1: float
    n: int

    def __post_init__(self):
        if not self.t0 < self.t1:
            raise ValueError(f"grid needs t0 < t1, got [{self.t0}, {self.t1}]")
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.n}")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n)

    @property
    def step(self) -> float:
        return (self.t1 - self.t0) / (self.n - 1)


def _sample(f, x):
    y = np.asarray(f(x), dtype=float)
    y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if np.any(bad):
        xb = float(x[bad][0])
        raise QuadratureError(f"non-finite integrand value at t = {xb!r}", abscissa=xb)
    return y


def adaptive_panels(f, a, b, tol, max_panels=MAX_PANELS):
    """Integrate ``f`` over each panel ``[a[i], b[i]]``.

    ``tol`` is the absolute tolerance for the sum over all panels; it is shared
    out in proportion to panel width.  Returns ``(values, errors)`` per panel.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    total_width = float(np.sum(np.abs(b - a)))
    values = np.zeros(a.shape)
    errors = np.zeros(a.shape)
    if total_width == 0.0:
        return values, errors
    density = tol / total_width

    owner = np.arange(a.size)
    lo, hi = a.copy(), b.copy()
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = (_sample(f, x) for x in (lo, mid, hi))
    whole = (hi - lo) * (flo + 4.0 * fmid + fhi) / 6.0
    n_panels = a.size

    while owner.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = _sample(f, lm)
        frm = _sample(f, rm)
        h = hi - lo
        left = 0.5 * h * (flo + 4.0 * flm + fmid) / 6.0
        right = 0.5 * h * (fmid + 4.0 * frm + fhi) / 6.0
        delta = left + right - whole
        err = np.abs(delta) / 15.0
        # tiny panels whose width is at the rounding floor are accepted as-is
        floor = np.abs(h) <= 64 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))
        done = (err <= density * np.abs(h)) | floor
        if np.any(done):
            np.add.at(values, owner[done], (left + right + delta / 15.0)[done])
            np.add.at(errors, owner[done], err[done])
        keep = ~done
        if not np.any(keep):
            break
        n_panels += int(np.count_nonzero(keep))
        if n_panels > max_panels:
            worst = int(np.argmax(np.where(keep, err, -1.0)))
            raise QuadratureError(
                f"no convergence after {max_panels} panels; worst panel "
                f"[{lo[worst]!r}, {hi[worst]!r}] with error {err[worst]:.3e}",
                panel=(float(lo[worst]), float(hi[worst])))
        owner = np.concatenate([owner[keep], owner[keep]])
        lo, hi, mid = (np.concatenate([lo[keep], mid[keep]]),
                       np.concatenate([mid[keep], hi[keep]]),
                       np.concatenate([lm[keep], rm[keep]]))
        flo, fhi, fmid = (np.concatenate([flo[keep], fmid[keep]]),
                          np.concatenate([fmid[keep], fhi[keep]]),
                          np.concatenate([flm[keep], frm[keep]]))
        whole = np.concatenate([left[keep], right[keep]])
    return values, errors


def integrate(f, a: float, b: float, tol: float = DEFAULT_TOL, initial_panels: int = 16) -> float:
    """Adaptive Simpson estimate of the integral of ``f`` from ``a`` to ``b``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    edges = np.linspace(a, b, initial_panels + 1)
    values, _ = adaptive_panels(f, edges[:-1], edges[1:], tol)
    return float(np.sum(values))


@dataclass(frozen=True)
class CumulativeIntegral:
    """Prefix integrals ``prefix[k] = int_{t0}^{grid[k]} source`` on a grid.

    Calling the object at arbitrary times adds one adaptive panel from the
    nearest grid node, so off-grid queries cost a single small integration.
    """

    source: object
    grid: Grid
    prefix: np.ndarray
    tol: float
    _nodes: np.ndarray = field(repr=False, compare=False, default=None)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        nodes = self._nodes
        k = np.clip(np.rint((flat - self.grid.t0) / self.grid.step).astype(np.int64),
                    0, self.grid.n - 1)
        out = self.prefix[k].copy()
        off = np.abs(flat - nodes[k]) > 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(flat))
        if np.any(off):
            # per-query tolerance scaled to the panel width, never looser than tol
            width = np.abs(flat[off] - nodes[k[off]])
            ptol = min(self.tol, self.tol * float(np.sum(width)) /
                       (self.grid.t1 - self.grid.t0))
            extra, _ = adaptive_panels(self.source, nodes[k[off]], flat[off], ptol)
            out[off] += extra
        if t_arr.ndim == 0:
            return float(out[0])
        return out.reshape(t_arr.shape)

    @property
    def total(self) -> float:
        return float(self.prefix[-1])


def cumulative(f, grid: Grid, tol: float = DEFAULT_TOL) -> CumulativeIntegral:
    """Integrate ``f`` panel by panel over ``grid`` and accumulate prefix sums."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    nodes = grid.points
    values, _ = adaptive_panels(f, nodes[:-1], nodes[1:], tol)
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    return CumulativeIntegral(f, grid, prefix, tol, nodes)
