"""Small expression language for real functions of time.

Expressions are built from numeric literals, the time variable ``t``, named
parameters, the constant ``pi``, the binary operators ``+ - * / ^``, unary
minus, and a fixed set of one-argument functions.  Parsed trees are immutable
and can be evaluated on scalars or numpy arrays, printed back to text, and
differentiated symbolically with respect to ``t``.

Precedence, from tightest to loosest: ``^`` (right associative), unary minus,
``* /``, ``+ -``.  So ``-2^2 == -4`` and ``2^3^2 == 512``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

FUNCTIONS = (
    "sin", "cos", "tan", "asin", "acos", "atan",
    "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs",
)

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Raised for malformed input. ``offset`` is the 1-based character column."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownFunctionError(ExprSyntaxError):
    pass


class UnboundParameterError(ExprError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound parameter {name!r}")


class DomainError(ExprError):
    """Evaluation left the domain of an operation (log of 0, sqrt of -1, ...)."""


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The time variable ``t``."""


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Param, Pi, Neg, BinOp, Call]
T = Var()


# ---------------------------------------------------------------------------
# Tokenizer / parser

def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            try:
                value = float(text[i:j])
            except ValueError:
                raise ExprSyntaxError(f"malformed number {text[i:j]!r}", i + 1, text)
            tokens.append(("num", value, i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i + 1, text)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok):
        raise ExprSyntaxError(message, tok[2] + 1, self.text)

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            self.fail(f"expected {want}, found {got}", tok)
        return self.advance()

    def parse(self) -> Expr:
        if not self.text.strip():
            raise ExprSyntaxError("empty expression", 1, self.text)
        node = self.additive()
        self.expect("end")
        return node

    def additive(self):
        node = self.multiplicative()
        while self.peek()[0] in "+-":
            op = self.advance()[0]
            node = BinOp(op, node, self.multiplicative())
        return node

    def multiplicative(self):
        node = self.unary()
        while self.peek()[0] in "*/":
            op = self.advance()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.unary())
        if self.peek()[0] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "num":
            self.advance()
            return Num(tok[1])
        if kind == "name":
            self.advance()
            name = tok[1]
            if self.peek()[0] == "(":
                if name not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {name!r}", tok[2] + 1, self.text)
                self.advance()
                arg = self.additive()
                self.expect(")")
                return Call(name, arg)
            if name in FUNCTIONS:
                self.fail(f"function {name!r} needs an argument", self.peek())
            if name == "t":
                return T
            if name == "pi":
                return Pi()
            return Param(name)
        if kind == "(":
            self.advance()
            node = self.additive()
            self.expect(")")
            return node
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected token {tok[1]!r}", tok)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def as_expr(e: Union[str, Expr, float, int]) -> Expr:
    if isinstance(e, str):
        return parse(e)
    if isinstance(e, (int, float)):
        return Num(float(e))
    return e


# ---------------------------------------------------------------------------
# Printing

def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL,
                "/": _PREC_MUL, "^": _PREC_POW}[e.op]
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Num) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return _PREC_NEG
    return _PREC_ATOM


def _fmt_num(x: float) -> str:
    if math.isinf(x) or math.isnan(x):
        raise ExprError(f"cannot print non-finite literal {x}")
    if x == int(x) and abs(x) < 1e15:
        return str(int(x)) if x != 0 or math.copysign(1.0, x) > 0 else "-0"
    return repr(x)


def to_string(e: Expr) -> str:
    """Render ``e`` with the minimum parentheses needed to re-parse it."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.operand)
        if _prec(e.operand) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        p = _prec(e)
        left, right = to_string(e.left), to_string(e.right)
        if e.op == "^":
            if _prec(e.left) <= _PREC_POW:
                left = f"({left})"
            if _prec(e.right) < _PREC_NEG:
                right = f"({right})"
        else:
            if _prec(e.left) < p:
                left = f"({left})"
            if _prec(e.right) <= p:
                right = f"({right})"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation

def evaluate(e: Expr, t, params: Mapping[str, float] | None = None):
    """Evaluate ``e`` at time(s) ``t``.

    Returns a float for scalar ``t`` and an array shaped like ``t`` otherwise.
    Domain violations raise :class:`DomainError` instead of producing NaN.
    """
    return compile_expr(e, params)(t)


_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "asin": math.asin,
    "acos": math.acos, "atan": math.atan, "sinh": math.sinh, "cosh": math.cosh,
    "tanh": math.tanh, "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "abs": abs,
}


def compile_expr(e: Expr, params: Mapping[str, float] | None = None):
    """Turn ``e`` into a fast callable ``f(t)`` with ``params`` bound.

    Scalars go through :mod:`math`, arrays through numpy; both raise
    :class:`DomainError` on domain violations or non-finite results.
    """
    e = as_expr(e)
    params = dict(params or {})
    scalar = _compile_scalar(e, params)
    vector = _compile_vector(e, params)

    def f(t):
        if np.ndim(t) == 0:
            try:
                v = scalar(float(t))
            except DomainError as exc:
                raise DomainError(f"{exc} in {to_string(e)!r} at t = {float(t)!r}") from None
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise DomainError(f"{exc} in {to_string(e)!r} at t = {float(t)!r}") from None
            if not math.isfinite(v):
                raise DomainError(f"non-finite value of {to_string(e)!r} at t = {float(t)!r}")
            return v
        t_arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            v = vector(t_arr)
        v = np.array(np.broadcast_to(v, t_arr.shape), dtype=float)
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite value of {to_string(e)!r}")
        return v

    return f


def _param_getter(name, params):
    if name in params:
        value = float(params[name])
        return lambda t: value

    def missing(t):
        raise UnboundParameterError(name)
    return missing


def _compile_scalar(e, params):
    if isinstance(e, Num):
        v = e.value
        return lambda t: v
    if isinstance(e, Var):
        return lambda t: t
    if isinstance(e, Pi):
        return lambda t: math.pi
    if isinstance(e, Param):
        return _param_getter(e.name, params)
    if isinstance(e, Neg):
        f = _compile_scalar(e.operand, params)
        return lambda t: -f(t)
    if isinstance(e, Call):
        g = _compile_scalar(e.arg, params)
        fn = _MATH[e.func]
        guard = _SCALAR_GUARDS.get(e.func)
        if guard is not None:
            bad, message = guard

            def checked(t):
                x = g(t)
                if bad(x):
                    raise DomainError(message)
                return fn(x)
            return checked
        return lambda t: fn(g(t))
    if isinstance(e, BinOp):
        a = _compile_scalar(e.left, params)
        b = _compile_scalar(e.right, params)
        op = e.op
        if op == "+":
            return lambda t: a(t) + b(t)
        if op == "-":
            return lambda t: a(t) - b(t)
        if op == "*":
            return lambda t: a(t) * b(t)
        if op == "/":
            def div(t):
                d = b(t)
                if d == 0:
                    raise DomainError("division by zero")
                return a(t) / d
            return div
        if op == "^":
            def power(t):
                x, y = a(t), b(t)
                if x < 0 and y != round(y):
                    raise DomainError("negative base with non-integer exponent")
                if x == 0 and y < 0:
                    raise DomainError("zero to a negative power")
                return math.pow(x, y)
            return power
    raise TypeError(f"not an expression: {e!r}")


_SCALAR_GUARDS = {
    "log": (lambda x: x <= 0, "log of non-positive argument"),
    "sqrt": (lambda x: x < 0, "sqrt of negative argument"),
    "asin": (lambda x: abs(x) > 1, "asin argument outside [-1, 1]"),
    "acos": (lambda x: abs(x) > 1, "acos argument outside [-1, 1]"),
}


def _fail_if(mask, message):
    if np.any(mask):
        raise DomainError(message)


def _vector_call(func, x):
    if func == "log":
        _fail_if(x <= 0, "log of non-positive argument")
        return np.log(x)
    if func == "sqrt":
        _fail_if(x < 0, "sqrt of negative argument")
        return np.sqrt(x)
    if func in ("asin", "acos"):
        _fail_if(np.abs(x) > 1, f"{func} argument outside [-1, 1]")
        return np.arcsin(x) if func == "asin" else np.arccos(x)
    if func == "atan":
        return np.arctan(x)
    if func == "abs":
        return np.abs(x)
    return getattr(np, func)(x)


def _compile_vector(e, params):
    if isinstance(e, Num):
        v = e.value
        return lambda t: v
    if isinstance(e, Var):
        return lambda t: t
    if isinstance(e, Pi):
        return lambda t: math.pi
    if isinstance(e, Param):
        return _param_getter(e.name, params)
    if isinstance(e, Neg):
        f = _compile_vector(e.operand, params)
        return lambda t: -f(t)
    if isinstance(e, Call):
        g = _compile_vector(e.arg, params)
        func = e.func
        return lambda t: _vector_call(func, np.asarray(g(t), dtype=float))
    if isinstance(e, BinOp):
        a = _compile_vector(e.left, params)
        b = _compile_vector(e.right, params)
        op = e.op
        if op == "+":
            return lambda t: a(t) + b(t)
        if op == "-":
            return lambda t: a(t) - b(t)
        if op == "*":
            return lambda t: a(t) * b(t)
        if op == "/":
            def div(t):
                d = np.asarray(b(t), dtype=float)
                _fail_if(d == 0, "division by zero")
                return a(t) / d

            return div
        if op == "^":
            def power(t):
                x = np.asarray(a(t), dtype=float)
                y = np.asarray(b(t), dtype=float)
                xb, yb = np.broadcast_arrays(x, y)
                _fail_if((xb < 0) & (yb != np.round(yb)),
                         "negative base with non-integer exponent")
                _fail_if((xb == 0) & (yb < 0), "zero to a negative power")
                return np.power(x, y)

            return power
    raise TypeError(f"not an expression: {e!r}")


def parameters(e: Expr) -> set[str]:
    """Names of the free parameters appearing in ``e``."""
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Neg):
        return parameters(e.operand)
    if isinstance(e, Call):
        return parameters(e.arg)
    if isinstance(e, BinOp):
        return parameters(e.left) | parameters(e.right)
    return set()


def depends_on_t(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Neg):
        return depends_on_t(e.operand)
    if isinstance(e, Call):
        return depends_on_t(e.arg)
    if isinstance(e, BinOp):
        return depends_on_t(e.left) or depends_on_t(e.right)
    return False


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    """Replace every parameter ``name`` in ``e`` by ``replacement``."""
    if isinstance(e, Param):
        return replacement if e.name == name else e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, name, replacement))
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, name, replacement))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, name, replacement),
                     substitute(e.right, name, replacement))
    return e


# ---------------------------------------------------------------------------
# Differentiation

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def _add(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a, b):
    if _is_num(a) and _is_num(b) and b.value != 0:
        return Num(a.value / b.value)
    if _is_num(a, 0.0):
        return Num(0.0)
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def _pow(a, b):
    if _is_num(a) and _is_num(b):
        try:
            return Num(float(a.value ** b.value))
        except (ZeroDivisionError, OverflowError, TypeError):
            pass
    if _is_num(b, 1.0):
        return a
    return BinOp("^", a, b)


def _neg(a):
    if _is_num(a):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _fold(e: Expr) -> Expr:
    """Fold literal-only subtrees to a single number where it is safe."""
    if isinstance(e, Neg):
        return _neg(_fold(e.operand))
    if isinstance(e, BinOp):
        a, b = _fold(e.left), _fold(e.right)
        if _is_num(a) and _is_num(b):
            try:
                v = evaluate(BinOp(e.op, a, b), 0.0)
                return Num(v)
            except ExprError:
                pass
        return BinOp(e.op, a, b)
    if isinstance(e, Call):
        a = _fold(e.arg)
        if _is_num(a):
            try:
                return Num(evaluate(Call(e.func, a), 0.0))
            except ExprError:
                pass
        return Call(e.func, a)
    return e


def differentiate(e: Expr) -> Expr:
    """Symbolic derivative of ``e`` with respect to ``t``."""
    return _d(as_expr(e))


def _d(e: Expr) -> Expr:
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, (Num, Param, Pi)):
        return Num(0.0)
    if isinstance(e, Neg):
        return _neg(_d(e.operand))
    if isinstance(e, BinOp):
        u, v = e.left, e.right
        if e.op == "+":
            return _add(_d(u), _d(v))
        if e.op == "-":
            return _sub(_d(u), _d(v))
        if e.op == "*":
            return _add(_mul(_d(u), v), _mul(u, _d(v)))
        if e.op == "/":
            if not depends_on_t(v):
                return _div(_d(u), v)
            return _div(_sub(_mul(_d(u), v), _mul(u, _d(v))), _pow(v, Num(2.0)))
        if e.op == "^":
            if not depends_on_t(v):
                n = _fold(v)
                return _mul(_mul(n, _pow(u, _fold(_sub(n, Num(1.0))))), _d(u))
            if not depends_on_t(u):
                return _mul(_mul(e, Call("log", u)), _d(v))
            # u^v * (v' log u + v u'/u)
            return _mul(e, _add(_mul(_d(v), Call("log", u)),
                                _div(_mul(v, _d(u)), u)))
    if isinstance(e, Call):
        u = e.arg
        du = _d(u)
        if _is_num(du, 0.0):
            return Num(0.0)
        f = e.func
        if f == "sin":
            outer = Call("cos", u)
        elif f == "cos":
            outer = _neg(Call("sin", u))
        elif f == "tan":
            outer = _div(Num(1.0), _pow(Call("cos", u), Num(2.0)))
        elif f == "asin":
            outer = _div(Num(1.0), Call("sqrt", _sub(Num(1.0), _pow(u, Num(2.0)))))
        elif f == "acos":
            outer = _neg(_div(Num(1.0), Call("sqrt", _sub(Num(1.0), _pow(u, Num(2.0))))))
        elif f == "atan":
            outer = _div(Num(1.0), _add(Num(1.0), _pow(u, Num(2.0))))
        elif f == "sinh":
            outer = Call("cosh", u)
        elif f == "cosh":
            outer = Call("sinh", u)
        elif f == "tanh":
            outer = _div(Num(1.0), _pow(Call("cosh", u), Num(2.0)))
        elif f == "exp":
            outer = e
        elif f == "log":
            return _div(du, u)
        elif f == "sqrt":
            return _div(du, _mul(Num(2.0), e))
        elif f == "abs":
            return _mul(du, _div(u, e))
        else:
            raise ExprError(f"no derivative rule for {f}")
        if isinstance(outer, Neg):
            return _neg(_mul(du, outer.operand))
        return _mul(du, outer)
    raise TypeError(f"not an expression: {e!r}")
