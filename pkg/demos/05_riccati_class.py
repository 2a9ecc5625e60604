"""
A solvable class of Riccati equations
=====================================

The equation y' = conj(f) y^2 + g y + f with g tied to f by
|f| / c = i g / 2 + phi_f' / 2 has the closed-form solution below for any
magnitude |f(t)| and phase phi_f(t) (with phi_f(0) = 0).  No Hamiltonian
is needed to use it.
"""
import numpy as np

from su2riccati import Grid, TimeFunction, integrate_riccati, riccati_residual
from su2riccati.riccati import example1_family

fn = TimeFunction.from_expr
grid = Grid(0.0, 4.0, 801)
t = grid.points

for c, mag, phase in ((1.0, "1", "0"), (0.5, "1 + 0.3*sin(t)", "0.4*t"), (2.0, "exp(-t/4)", "sin(t)")):
    dre, y, P = example1_family(c, fn(mag), fn(phase), grid)
    tr = integrate_riccati(dre, 0.0, grid)
    print(f"c = {c}, |f| = {mag}, phi_f = {phase}")
    print(f"   residual {np.max(riccati_residual(dre, y, t)):.1e}, "
          f"vs integrator {np.max(np.abs(tr.y - y(t))):.1e}, "
          f"angle P(4) = {P(4.0):.4f} (continued past pi/2)")
