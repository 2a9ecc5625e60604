"""
Expressions of time
===================

Fields and generators are written as small text expressions in ``t``.  They
parse into trees that evaluate on arrays and differentiate symbolically, so
every residual check downstream can use exact derivatives.
"""
import numpy as np

from su2riccati import exprdsl

e = exprdsl.parse("2*w/cosh(2*w*t) - 0.5*cos(t)")
print("parsed:     ", exprdsl.to_string(e))
print("parameters: ", exprdsl.parameters(e))

de = exprdsl.differentiate(e)
print("derivative: ", exprdsl.to_string(de))

t = np.linspace(0.0, 3.0, 7)
print("\nvalues at", t)
print(exprdsl.evaluate(e, t, {"w": 1.0}))

# derivative against a central difference
h = 1e-6
fd = (exprdsl.evaluate(e, t + h, {"w": 1.0}) - exprdsl.evaluate(e, t - h, {"w": 1.0})) / (2 * h)
print("max |exact - central difference| =", np.max(np.abs(exprdsl.evaluate(de, t, {"w": 1.0}) - fd)))

# ^ binds tighter than unary minus and is right associative
print("\n-2^2 =", exprdsl.evaluate(exprdsl.parse("-2^2"), 0.0))
print("2^3^2 =", exprdsl.evaluate(exprdsl.parse("2^3^2"), 0.0))

# mistakes are reported, never turned into NaN
for text in ("tanh(w*t", "log(t)", "k*t"):
    try:
        exprdsl.evaluate(exprdsl.parse(text), 0.0)
    except exprdsl.ExprError as exc:
        print(f"{text!r:12s} -> {type(exc).__name__}: {exc}")
