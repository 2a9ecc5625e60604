"""The residual / oracle / invariant suite run by ``su2riccati verify``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import IntegratorConfig, integrate_riccati, integrate_su2
from .quad import Grid
from .riccati import riccati_residual, u_from_entries
from .su2core import schrodinger_residual, unitarity_defect

UNITARITY_TOL = 1e-12
RESIDUAL_TOL = 1e-8
ORACLE_TOL = 1e-7
RICCATI_ORACLE_TOL = 1e-6
INITIAL_TOL = 1e-14


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} {self.value:.3e}  (tol {self.tol:.0e})"


def run_checks(bundle, grid: Grid, cfg: IntegratorConfig = IntegratorConfig()) -> list[Check]:
    t = grid.points
    a = np.asarray(bundle.entries.a(t))
    b = np.asarray(bundle.entries.b(t))
    checks = [
        Check("initial_conditions", float(max(abs(a[0] - 1.0), abs(b[0]),
                                              abs(complex(bundle.ubar(0.0))))), INITIAL_TOL),
        Check("unitarity", float(np.max(unitarity_defect(a, b))), UNITARITY_TOL),
        Check("schrodinger_residual",
              float(np.max(schrodinger_residual(bundle.hamiltonian, bundle.entries, t))),
              RESIDUAL_TOL),
        Check("riccati_class_shape", float(np.max(bundle.dre.class_defect(t))), INITIAL_TOL),
        Check("riccati_residual", float(np.max(riccati_residual(bundle.dre, bundle.ubar, t))),
              RESIDUAL_TOL),
    ]
    mask = np.abs(a) > 1e-6
    u_ratio = np.asarray(b)[mask] / np.conj(a[mask])
    checks.append(Check("particular_vs_ratio",
                        float(np.max(np.abs(u_ratio - np.asarray(bundle.ubar(t))[mask]))),
                        RESIDUAL_TOL))
    tr = integrate_su2(bundle.hamiltonian, grid, cfg)
    err = max(np.max(np.abs(tr.a.real - a.real)), np.max(np.abs(tr.a.imag - a.imag)),
              np.max(np.abs(tr.b.real - b.real)), np.max(np.abs(tr.b.imag - b.imag)))
    checks.append(Check("oracle_entries", float(err), ORACLE_TOL))
    rt = integrate_riccati(bundle.dre, 0.0, grid, cfg)
    if rt.completed:
        diff = float(np.max(np.abs(rt.y - u_from_entries(tr.a, tr.b))))
    else:
        diff = float("inf")
    checks.append(Check("oracle_riccati_consistency", diff, RICCATI_ORACLE_TOL))
    return checks


def report(name: str, checks: list[Check]) -> str:
    lines = [f"verify {name}"]
    lines += ["  " + c.line() for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"  {sum(c.passed for c in checks)}/{len(checks)} checks passed"
                 + ("" if ok else "; FAILED"))
    return "\n".join(lines)
