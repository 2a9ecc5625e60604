"""
All solutions from one
======================

With the particular solution ubar in hand, every other solution of the
Riccati equation is ubar + Phi / (C0 - int A Phi).  The constant C0 sets
u(0) = 1/C0; where the denominator vanishes the solution has a pole whose
position moves with C0.
"""
import numpy as np

from su2riccati import GeneralIntegral, IntegratorConfig, build_case, cross_ratio
from su2riccati import integrate_riccati

b = build_case("scenario_tanh")
grid = b.default_grid(1001)
gi = GeneralIntegral(b.dre, b.ubar, grid)
t = grid.points

for c0 in (2, 1 + 1j, -3j, 5):
    print(f"C0 = {c0!s:8s} u(0) = {gi(c0, 0.0):.6f}  max residual {np.max(gi.residual(c0, t)):.1e}")

# four solutions have a constant cross-ratio
us = [gi(c, t) for c in (2, 1 + 1j, -3j, 5)]
cr = cross_ratio(*us)
print("cross-ratio spread:", np.max(np.abs(cr - cr[0])))

# choose C0 so that the denominator vanishes at t = 1.5
c_pole = complex(gi.J(1.5))
print("\nC0 =", c_pole)
for lo, hi, d in gi.poles(c_pole):
    print(f"pole in [{lo:.4f}, {hi:.4f}], min |denominator| {d:.1e}")

# the direct integrator stops at the same place, or continues through it in 1/u
rt = integrate_riccati(b.dre, 1 / c_pole, grid)
print("integrator stopped:", not rt.completed, "bracket", rt.poles[0])
rt = integrate_riccati(b.dre, 1 / c_pole, grid, IntegratorConfig(resume_past_poles=True))
far = np.abs(t - 1.5) > 0.05
print("resumed; max deviation from the closed form away from the pole:",
      np.max(np.abs(rt.y[far] - gi(c_pole, t[far]))))
