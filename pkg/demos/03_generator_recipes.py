"""
Building solvable problems from a generator
===========================================

Any complex X(t) = A e^{i phi} with X(0) = 0, together with any longitudinal
field Omega(t), fixes a transverse field omega(t) for which the propagator is
known in closed form.  The same problem can be rebuilt from the angle Theta
with tan(Theta) = A phi' / A'.
"""
import numpy as np

from su2riccati import GeneratorX, Grid, ThetaRecipe, TimeFunction, XRecipe, integrate_su2
from su2riccati import theta_from_generator

fn = TimeFunction.from_expr
grid = Grid(0.0, 3.0, 601)
t = grid.points

X = GeneratorX(fn("t"), fn("t + t^2/4"))
r = XRecipe(X, fn("0.5*cos(t)"), grid)
H = r.hamiltonian()
print("omega(t) from the generator, first samples:")
print(np.round(r.omega(t[:4]), 6))

# the closed form against the oracle
tr = integrate_su2(H, grid)
a, b = r.closed_form()(t)
print("X recipe vs oracle:", max(np.max(np.abs(tr.a - a)), np.max(np.abs(tr.b - b))))

# the particular Riccati solution has |u| = |X|
print("max ||u| - |X||:", np.max(np.abs(np.abs(r.particular()(t)) - np.abs(X(t)))))

# same problem via Theta
Theta = theta_from_generator(X)
mag, phase = r.omega_decomposition()
q = ThetaRecipe(mag, phase, Theta, grid)
a2, b2 = q.closed_form()(t)
print("X recipe vs Theta recipe:", max(np.max(np.abs(a - a2)), np.max(np.abs(b - b2))))
print("Omega from the Theta recipe vs the one we chose:", np.max(np.abs(q.Omega(t) - r.Omega(t))))

# a Theta that leaves the regular window is refused
try:
    ThetaRecipe(fn("1"), fn("0"), fn("0*t"), grid)
except ArithmeticError as exc:
    print("\nrefused:", exc)
