"""Sampled traces of a bundle and their CSV / JSON text forms.

Every number is written in scientific notation with 12 significant digits
(``%.11e``), so a trace read back from disk reproduces the printed values
exactly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .quad import Grid
from .riccati import POLE_TOL, riccati_residual
from .su2core import schrodinger_residual, unitarity_defect

SCHEMA_VERSION = "1.0"

COLUMNS = (
    "t", "re_a", "im_a", "re_b", "im_b", "abs_a", "abs_b",
    "omega_mag", "omega_phase", "Omega", "re_u", "im_u",
    "unitarity_defect", "schrodinger_residual", "riccati_residual",
)

FAMILY_COLUMNS = ("t", "re_c0", "im_c0", "re_u", "im_u", "abs_denominator",
                  "riccati_residual", "near_pole")


def fmt(x: float) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return f"{float(x) + 0.0:.11e}"


@dataclass
class Trace:
    columns: dict
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.columns["t"])

    def rows(self):
        cols = [self.columns[k] for k in COLUMNS]
        for i in range(self.n):
            yield [c[i] for c in cols]


def sample_bundle(bundle, grid: Grid, tol: float | None = None) -> Trace:
    """Evaluate entries, fields, ``u`` and the three residuals on ``grid``."""
    t = grid.points
    H = bundle.hamiltonian
    a = np.asarray(bundle.entries.a(t), dtype=complex)
    b = np.asarray(bundle.entries.b(t), dtype=complex)
    u = np.asarray(bundle.ubar(t), dtype=complex)
    cols = {
        "t": t,
        "re_a": a.real, "im_a": a.imag, "re_b": b.real, "im_b": b.imag,
        "abs_a": np.abs(a), "abs_b": np.abs(b),
        "omega_mag": np.broadcast_to(H.omega_mag(t), t.shape),
        "omega_phase": np.broadcast_to(H.omega_phase(t), t.shape),
        "Omega": np.broadcast_to(H.Omega(t), t.shape),
        "re_u": u.real, "im_u": u.imag,
        "unitarity_defect": unitarity_defect(a, b),
        "schrodinger_residual": schrodinger_residual(H, bundle.entries, t),
        "riccati_residual": riccati_residual(bundle.dre, bundle.ubar, t),
    }
    meta = {
        "case": bundle.name,
        "parameters": bundle.params,
        "tolerances": {"quadrature": tol},
        "grid": {"t0": grid.t0, "t1": grid.t1, "steps": grid.n},
        "schema_version": SCHEMA_VERSION,
    }
    return Trace(cols, meta)


def write_csv(trace: Trace, sink) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in trace.rows():
        w.writerow([fmt(x) for x in row])


def write_json(trace: Trace, sink) -> None:
    # samples are written by hand so the number text matches the CSV exactly
    sink.write('{\n"metadata": ')
    sink.write(json.dumps(trace.metadata, sort_keys=True, default=str))
    sink.write(',\n"fields": ')
    sink.write(json.dumps(list(COLUMNS)))
    sink.write(',\n"samples": [\n')
    rows = list(trace.rows())
    for i, row in enumerate(rows):
        body = ", ".join(f'"{k}": {_json_num(x)}' for k, x in zip(COLUMNS, row))
        sink.write("{" + body + "}" + (",\n" if i + 1 < len(rows) else "\n"))
    sink.write("]\n}\n")


def _json_num(x) -> str:
    x = float(x)
    return fmt(x) if np.isfinite(x) else "null"


def write_trace(trace: Trace, fmt_name: str, sink) -> None:
    if fmt_name == "csv":
        write_csv(trace, sink)
    elif fmt_name == "json":
        write_json(trace, sink)
    else:
        raise ValueError(f"unknown format {fmt_name!r}")


def read_csv(source) -> dict:
    """Columns of a trace CSV as float arrays keyed by header name."""
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = list(csv.reader(source))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


# -- general-integral families ---------------------------------------------

def sample_family(gi, constants, near: float = 1e-3):
    """Per-constant samples of the general integral on its own grid.

    Samples where ``|C0 - J| <= near`` are flagged; ``u`` itself is NaN where
    the denominator is numerically zero.
    """
    t = gi.grid.points
    out = []
    for C0 in constants:
        D = np.asarray(gi.denominator(C0, t))
        absD = np.abs(D)
        ok = absD > POLE_TOL
        u = np.full(t.shape, complex(np.nan, np.nan))
        res = np.full(t.shape, np.nan)
        if np.any(ok):
            u[ok] = gi(C0, t[ok])
            res[ok] = gi.residual(C0, t[ok])
        out.append({
            "C0": complex(C0),
            "t": t, "u": u, "abs_denominator": absD, "residual": res,
            "near_pole": absD <= near,
            "poles": gi.poles(C0, near),
        })
    return out


def write_family_csv(family, sink) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(FAMILY_COLUMNS)
    for fam in family:
        c = fam["C0"]
        for i in range(len(fam["t"])):
            u = fam["u"][i]
            w.writerow([fmt(fam["t"][i]), fmt(c.real), fmt(c.imag), fmt(u.real), fmt(u.imag),
                        fmt(fam["abs_denominator"][i]), fmt(fam["residual"][i]),
                        "1" if fam["near_pole"][i] else "0"])


def write_family_json(family, metadata, sink) -> None:
    doc = {"metadata": metadata, "families": []}
    for fam in family:
        c = fam["C0"]
        doc["families"].append({
            "C0": [c.real, c.imag],
            "poles": [{"t_lo": lo, "t_hi": hi, "min_abs_denominator": d}
                      for lo, hi, d in fam["poles"]],
            "samples": [
                {"t": float(fam["t"][i]),
                 "re_u": _finite(fam["u"][i].real), "im_u": _finite(fam["u"][i].imag),
                 "abs_denominator": float(fam["abs_denominator"][i]),
                 "riccati_residual": _finite(fam["residual"][i]),
                 "near_pole": bool(fam["near_pole"][i])}
                for i in range(len(fam["t"]))
            ],
        })
    sink.write(json.dumps(doc, indent=1, default=str))
    sink.write("\n")


def _finite(x):
    x = float(x)
    return float(fmt(x)) if np.isfinite(x) else None
