"""The six worked, exactly solvable cases as ready-made bundles.

Every case takes a constant transverse magnitude ``omega`` (default 1) and a
transverse phase expression ``phi_omega`` in ``t`` (default ``"0"``, must vanish
at ``t = 0``).  ``example1`` also takes ``c`` (default 1) and optionally a
phase generator ``phi``; when ``phi`` is given it fixes ``|omega|`` and
``omega`` is ignored.

Magnitudes are written in forms that stay smooth at ``t = 0`` (for example
``sinh(x)/sqrt(cosh(2x))`` for ``sqrt((cosh 2x - 1) / (2 cosh 2x))``); the two
are equal identically but only the first has a finite symbolic derivative at
the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import exprdsl
from .exprdsl import Param, differentiate, parse, substitute
from .generator import ThetaRecipe
from .quad import DEFAULT_TOL, Grid
from .riccati import RiccatiDRE, associate
from .su2core import ClosedFormEntries, Hamiltonian
from .timefunc import TimeFunction

CASES = ("scenario_tanh", "scenario_sinh", "example1",
         "theta_sine", "theta_arctan_a", "theta_arctan_b")

DEFAULTS = {"omega": 1.0, "phi_omega": "0", "c": 1.0, "phi": None}

THETA_CASES = ("theta_sine", "theta_arctan_a", "theta_arctan_b")


class CaseError(ValueError):
    """Unknown case or parameters outside the family's domain."""


@dataclass(frozen=True)
class CaseBundle:
    name: str
    params: dict
    hamiltonian: Hamiltonian
    entries: ClosedFormEntries
    dre: RiccatiDRE
    ubar: TimeFunction
    t_max: float
    extras: dict = field(default_factory=dict)

    def default_grid(self, n: int = 1001) -> Grid:
        return Grid(0.0, self.t_max, n)


def list_cases() -> tuple[str, ...]:
    return CASES


def _expr(text: str, **subs) -> exprdsl.Expr:
    e = parse(text)
    for name, repl in subs.items():
        e = substitute(e, name, repl)
    return e


def _fn(e, params, name=""):
    return TimeFunction.from_expr(e, params, name=name)


def _phase_parts(params):
    p = parse(str(params["phi_omega"]))
    unknown = exprdsl.parameters(p) - {k for k, v in params.items()
                                       if isinstance(v, (int, float))}
    if unknown:
        raise CaseError(f"phi_omega uses unbound parameters {sorted(unknown)}")
    num = {k: float(v) for k, v in params.items() if isinstance(v, (int, float))}
    p0 = exprdsl.evaluate(p, 0.0, num)
    if abs(p0) > 1e-14:
        raise CaseError(f"phi_omega must vanish at t = 0, got {p0!r}")
    return p, differentiate(p), num


def build_case(name: str, params: Mapping | None = None, tol: float = DEFAULT_TOL,
               grid_points: int = 1001, t_max: float | None = None) -> CaseBundle:
    """Build the named case; ``params`` override :data:`DEFAULTS`.

    ``t_max`` defaults to ``3 / |omega(0)|``.  Quantities that need tabulated
    integrals are prepared on ``grid_points`` nodes over ``[0, t_max]``.
    """
    if name not in CASES:
        raise CaseError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    merged = dict(DEFAULTS)
    for k, v in (params or {}).items():
        if k not in DEFAULTS:
            raise CaseError(f"unknown parameter {k!r} for case {name!r}")
        merged[k] = v
    merged["omega"] = float(merged["omega"])
    merged["c"] = float(merged["c"])
    if not merged["omega"] > 0:
        raise CaseError(f"omega must be positive, got {merged['omega']!r}")
    builder = {
        "scenario_tanh": _scenario_tanh,
        "scenario_sinh": _scenario_sinh,
        "example1": _example1,
        "theta_sine": _theta_sine,
        "theta_arctan_a": _theta_arctan_a,
        "theta_arctan_b": _theta_arctan_b,
    }[name]
    if t_max is not None and not t_max > 0:
        raise CaseError(f"t_max must be positive, got {t_max!r}")
    bundle = builder(merged, tol, grid_points, t_max)
    return bundle


def _bundle(name, merged, H, a, b, ubar, t_max, **extras):
    shown = {k: v for k, v in merged.items() if v is not None}
    return CaseBundle(name, shown, H, ClosedFormEntries(a, b), associate(H), ubar, t_max, extras)


def _polar(mag_e, phase_e, num):
    return TimeFunction.polar(_fn(mag_e, num), _fn(phase_e, num))


def _constant_field(p, num):
    """``|omega|`` and ``phi_omega`` for a constant-magnitude case."""
    return _fn(Param("w"), num, "|omega|"), _fn(p, num, "phi_omega")


def _scenario_tanh(merged, tol, n, t_max=None):
    p, dp, num = _phase_parts(merged)
    num["w"] = merged["omega"]
    Omega = _expr("2*w/cosh(2*w*t) - dp/2", dp=dp)
    phase_a = _expr("p/2 - atan(tanh(w*t)) - w*t", p=p)
    phase_b = _expr("pa + 2*w*t - pi/2", pa=phase_a)
    a = _polar(parse("cosh(w*t)/sqrt(cosh(2*w*t))"), phase_a, num)
    b = _polar(parse("sinh(w*t)/sqrt(cosh(2*w*t))"), phase_b, num)
    ubar = _polar(parse("tanh(w*t)"), _expr("p - 2*atan(tanh(w*t)) - pi/2", p=p), num)
    H = Hamiltonian(_fn(Omega, num, "Omega"), *_constant_field(p, num))
    return _bundle("scenario_tanh", merged, H, a, b, ubar, t_max or 3.0 / num["w"])


def _scenario_sinh(merged, tol, n, t_max=None):
    p, dp, num = _phase_parts(merged)
    num["w"] = merged["omega"]
    Omega = _expr("w/2*(3/cosh(w*t) - cosh(w*t)) - dp/2", dp=dp)
    phase_a = _expr("p/2 - atan(tanh(w*t/2)) - sinh(w*t)/2", p=p)
    phase_b = _expr("pa + sinh(w*t) - pi/2", pa=phase_a)
    a = _polar(parse("1/cosh(w*t)"), phase_a, num)
    b = _polar(parse("tanh(w*t)"), phase_b, num)
    ubar = _polar(parse("sinh(w*t)"), _expr("p - 2*atan(tanh(w*t/2)) - pi/2", p=p), num)
    H = Hamiltonian(_fn(Omega, num, "Omega"), *_constant_field(p, num))
    return _bundle("scenario_sinh", merged, H, a, b, ubar, t_max or 3.0 / num["w"])


def _continued_atan(x: exprdsl.Expr, s: exprdsl.Expr) -> exprdsl.Expr:
    """Expression for ``atan(tan(x)/s)`` continued through ``x = pi/2 + k pi``."""
    return _expr("x + atan((1 - s)*sin(x)*cos(x)/(s*cos(x)^2 + sin(x)^2))", x=x, s=s)


def _example1(merged, tol, n, t_max=None):
    p, dp, num = _phase_parts(merged)
    c = merged["c"]
    if c == 0:
        raise CaseError("example1 needs c != 0")
    num["c"] = c
    num["s"] = math.sqrt(1.0 + c * c)
    if merged["phi"] is None:
        num["w"] = merged["omega"]
        # Phi1 = sqrt(1+c^2)/c * |omega| t and tan(phi) = tan(Phi1)/sqrt(1+c^2)
        Phi1 = _expr("s/c*w*t")
        phi = _continued_atan(Phi1, Param("s"))
        mag = Param("w")
        w0 = merged["omega"]
    else:
        phi = parse(str(merged["phi"]))
        if abs(exprdsl.evaluate(phi, 0.0, num)) > 1e-14:
            raise CaseError("example1 needs phi(0) = 0")
        dphi = differentiate(phi)
        # tan(Phi1) = sqrt(1+c^2) tan(phi), continued
        Phi1 = _continued_atan(phi, _expr("1/s"))
        mag = _expr("c*dphi/(1 + c^2*sin(phi)^2)", dphi=dphi, phi=phi)
        w0 = exprdsl.evaluate(mag, 0.0, num)
    grid_t = np.linspace(0.0, 3.0 / max(w0, 1e-300), 257)
    if np.any(exprdsl.evaluate(mag, grid_t, num) < 0):
        raise CaseError("example1 needs c * phi' >= 0 so that |omega| is non-negative")
    if not w0 > 0:
        raise CaseError("example1 needs |omega(0)| > 0")
    Omega = _expr("m/c - dp/2", m=mag, dp=dp)
    mag_a = _expr("sqrt((1 + c^2*cos(P)^2)/(1 + c^2))", P=Phi1)
    mag_b = _expr("c*sin(P)/s", P=Phi1)
    # -int Omega + (1/c) int |omega| = phi_omega / 2
    phase_a = _expr("p/2 - ph", p=p, ph=phi)
    phase_b = _expr("p/2 - pi/2", p=p)
    a = _polar(mag_a, phase_a, num)
    b = _polar(mag_b, phase_b, num)
    ubar = _polar(_expr("c*sin(P)/sqrt(1 + c^2*cos(P)^2)", P=Phi1),
                  _expr("p - ph - pi/2", p=p, ph=phi), num)
    H = Hamiltonian(_fn(Omega, num, "Omega"), _fn(mag, num, "|omega|"), _fn(p, num, "phi_omega"))
    X_mag = _expr("c*sin(ph)", ph=phi)
    return _bundle("example1", merged, H, a, b, ubar, t_max or 3.0 / w0,
                   X_mag=_fn(X_mag, num, "A"), X_phase=_fn(phi, num, "phi"),
                   Phi1=_fn(Phi1, num, "Phi1"))


def _theta_case(name, merged, tol, n, t_max, theta_text, S_text, Omega_text=None):
    p, dp, num = _phase_parts(merged)
    num["w"] = merged["omega"]
    t_max = t_max or 3.0 / num["w"]
    Theta = _fn(parse(theta_text), num, "Theta")
    S = _fn(parse(S_text), num, "S")
    mag, phase = _constant_field(p, num)
    recipe = ThetaRecipe(mag, phase, Theta, Grid(0.0, t_max, n), tol, S=S)
    if Omega_text is not None:
        Omega = _fn(_expr(Omega_text, dp=dp), num, "Omega")
    else:
        Omega = recipe.Omega
    H = Hamiltonian(Omega, mag, phase)
    a, b = recipe.closed_form().a, recipe.closed_form().b
    return _bundle(name, merged, H, a, b, recipe.particular(), t_max,
                   Theta=Theta, S=S, R=recipe.R, recipe=recipe,
                   phase_a=recipe.phase_a, phase_b=recipe.phase_b)


def _theta_sine(merged, tol, n, t_max=None):
    # Theta = int |omega| = w t, so int |omega| cos(Theta) = sin(w t)
    return _theta_case("theta_sine", merged, tol, n, t_max, "w*t", "sin(w*t)")


def _theta_arctan_a(merged, tol, n, t_max=None):
    return _theta_case(
        "theta_arctan_a", merged, tol, n, t_max,
        "2*atan(2*w*t/sqrt(2 + 4*(w*t)^2))", "atan(2*w*t)/2",
        "4*w*(1 + (w*t)^2)/((1 + 4*(w*t)^2)*sqrt(2 + 4*(w*t)^2)) - dp/2")


def _theta_arctan_b(merged, tol, n, t_max=None):
    return _theta_case(
        "theta_arctan_b", merged, tol, n, t_max,
        "2*atan(w*t/sqrt(2 + (w*t)^2))", "atan(w*t)",
        "w*(2 + (1 - (w*t)^2)*(2 + (w*t)^2))/(2*(1 + (w*t)^2)*sqrt(2 + (w*t)^2)) - dp/2")


CUSTOM_KEYS = {
    "X": ("A", "phi", "Omega"),
    "Theta": ("Theta", "omega_mag", "omega_phase"),
}


def build_custom(mode: str, expressions: Mapping[str, str], parameters: Mapping | None = None,
                 t_max: float = 3.0, grid_points: int = 1001,
                 tol: float = DEFAULT_TOL) -> CaseBundle:
    """Bundle for a user generator.

    ``mode="X"`` needs expressions ``A``, ``phi`` (the generator) and
    ``Omega``; ``mode="Theta"`` needs ``Theta``, ``omega_mag`` and
    ``omega_phase``.  Expression errors propagate as
    :class:`~su2riccati.exprdsl.ExprError`.
    """
    from .generator import GeneratorX, XRecipe

    if mode not in CUSTOM_KEYS:
        raise CaseError(f"mode must be one of {', '.join(CUSTOM_KEYS)}, got {mode!r}")
    need = CUSTOM_KEYS[mode]
    missing = [k for k in need if k not in expressions]
    extra = [k for k in expressions if k not in need]
    if missing or extra:
        raise CaseError(f"mode {mode} needs expressions {list(need)}; "
                        f"missing {missing}, unexpected {extra}")
    num = {k: float(v) for k, v in (parameters or {}).items()}
    fns = {}
    for key in need:
        e = parse(str(expressions[key]))
        unbound = exprdsl.parameters(e) - set(num)
        if unbound:
            raise CaseError(f"expression {key!r} uses unbound parameters {sorted(unbound)}")
        fns[key] = _fn(e, num, key)
    if not t_max > 0:
        raise CaseError(f"t_max must be positive, got {t_max!r}")
    grid = Grid(0.0, float(t_max), grid_points)
    try:
        if mode == "X":
            recipe = XRecipe(GeneratorX(fns["A"], fns["phi"]), fns["Omega"], grid, tol)
        else:
            recipe = ThetaRecipe(fns["omega_mag"], fns["omega_phase"], fns["Theta"], grid, tol)
    except ValueError as exc:
        raise CaseError(str(exc)) from None
    H = recipe.hamiltonian()
    entries = recipe.closed_form()
    shown = {"mode": mode, **{k: str(v) for k, v in expressions.items()}, **num}
    return CaseBundle("custom", shown, H, entries, associate(H), recipe.particular(),
                      float(t_max), {"recipe": recipe})
