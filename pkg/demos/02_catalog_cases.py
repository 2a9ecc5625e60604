"""
The six worked cases
====================

Each catalog case bundles a Hamiltonian, closed-form propagator entries, the
Riccati equation for u = b / conj(a) and its particular solution.  Here every
case is checked against a direct numerical integration of the entry
equations.
"""
import numpy as np

from su2riccati import build_case, integrate_riccati, integrate_su2, list_cases
from su2riccati import riccati_residual, schrodinger_residual, unitarity_defect

print(f"{'case':16s} {'unitarity':>10s} {'entry res':>10s} {'ricc res':>10s} {'oracle':>10s} {'|a|(1)':>10s}")
for name in list_cases():
    b = build_case(name)
    grid = b.default_grid(601)
    t = grid.points
    a, bb = b.entries(t)
    tr = integrate_su2(b.hamiltonian, grid)
    oracle = max(np.max(np.abs(tr.a - a)), np.max(np.abs(tr.b - bb)))
    print(f"{name:16s} {np.max(unitarity_defect(a, bb)):10.1e} "
          f"{np.max(schrodinger_residual(b.hamiltonian, b.entries, t)):10.1e} "
          f"{np.max(riccati_residual(b.dre, b.ubar, t)):10.1e} {oracle:10.1e} "
          f"{abs(b.entries.a(1.0)):10.7f}")

# parameters: |omega| and a time-dependent transverse phase
b = build_case("scenario_sinh", {"omega": 0.5, "phi_omega": "0.3*sin(2*t)"})
print("\nscenario_sinh with |omega| = 0.5 runs on [0, %.1f]" % b.t_max)
print("|a|(2) =", abs(b.entries.a(2.0)), " 1/cosh(1) =", 1 / np.cosh(1.0))

# the Riccati equation can be integrated on its own, from u(0) = 0
rt = integrate_riccati(b.dre, 0.0, b.default_grid(301))
print("max |u_oracle - ubar| =", np.max(np.abs(rt.y - b.ubar(rt.t))))
