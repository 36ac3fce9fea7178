"""Arithmetic expressions over chart variables, with symbolic differentiation.

Supported variables are x, y, z (cartesian) and r, theta (polar); pi is the
only named constant.  Binary operators are + - * / and ^ with a constant
exponent; unary functions are sin, cos, exp, log, abs, neg.  Differentiation
is structural; abs differentiates to sign, which is 0 at the kink (the result
of differentiating through abs is reported by :func:`is_smooth`).
"""

from __future__ import annotations

import math

from .errors import ExpressionError

VARIABLES = ("x", "y", "z", "r", "theta")
CONSTANTS = {"pi": math.pi}

_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "abs": abs,
    "sign": lambda v: 0.0 if v == 0 else math.copysign(1.0, v),
}


class Expression:
    """Abstract syntax tree node."""

    def evaluate(self, env):
        raise NotImplementedError

    def variables(self):
        raise NotImplementedError

    def __call__(self, **env):
        return self.evaluate(env)

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self)!r}>"


class Const(Expression):
    def __init__(self, value):
        self.value = float(value)

    def evaluate(self, env):
        return self.value

    def variables(self):
        return frozenset()


class Var(Expression):
    def __init__(self, name):
        self.name = name

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise ExpressionError(f"variable {self.name!r} is unbound") from None

    def variables(self):
        return frozenset((self.name,))


class BinOp(Expression):
    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        raise ExpressionError(f"unknown operator {self.op!r}")

    def variables(self):
        return self.left.variables() | self.right.variables()


class Pow(Expression):
    """Power with a constant exponent (keeps differentiation total)."""

    def __init__(self, base, exponent):
        self.base = base
        self.exponent = float(exponent)

    def evaluate(self, env):
        return self.base.evaluate(env) ** self.exponent

    def variables(self):
        return self.base.variables()


class Neg(Expression):
    def __init__(self, operand):
        self.operand = operand

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def variables(self):
        return self.operand.variables()


class Call(Expression):
    def __init__(self, func, arg):
        self.func = func
        self.arg = arg

    def evaluate(self, env):
        return _FUNCTIONS[self.func](self.arg.evaluate(env))

    def variables(self):
        return self.arg.variables()


# --- smart constructors (light constant folding keeps derivatives readable) --


def _const_of(e):
    return e.value if isinstance(e, Const) else None


def add(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    return BinOp("+", a, b)


def sub(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return neg(b)
    return BinOp("-", a, b)


def mul(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca * cb)
    if ca == 0 or cb == 0:
        return Const(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    return BinOp("*", a, b)


def div(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if cb is not None and ca is not None and cb != 0:
        return Const(ca / cb)
    if ca == 0:
        return Const(0.0)
    if cb == 1:
        return a
    return BinOp("/", a, b)


def neg(a):
    c = _const_of(a)
    if c is not None:
        return Const(-c)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(base, exponent):
    c = _const_of(base)
    if c is not None:
        return Const(c ** exponent)
    if exponent == 1:
        return base
    if exponent == 0:
        return Const(1.0)
    return Pow(base, exponent)


# ------------------------------- parsing ------------------------------------


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            seen_e = False
            while j < n and (text[j].isdigit() or text[j] == "." or
                             (text[j] in "eE" and not seen_e) or
                             (text[j] in "+-" and j > i and text[j - 1] in "eE")):
                if text[j] in "eE":
                    seen_e = True
                j += 1
            try:
                float(text[i:j])
            except ValueError:
                raise ExpressionError(f"malformed number {text[i:j]!r}", i)
            tokens.append(_Token("number", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ExpressionError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExpressionError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self):
        if self.peek().kind == "-":
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self):
        e = self.atom()
        while self.peek().kind == "^":
            tok = self.advance()
            exp = self.exponent()
            if exp.variables():
                raise ExpressionError("exponent must be constant", tok.pos)
            e = power(e, exp.evaluate({}))
        return e

    def exponent(self):
        if self.peek().kind == "-":
            self.advance()
            return neg(self.exponent())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if self.peek().kind == "(":
                if name not in _FUNCTIONS:
                    raise ExpressionError(f"unknown function {name!r}", tok.pos)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name in CONSTANTS:
                return Const(CONSTANTS[name])
            if name in VARIABLES:
                return Var(name)
            raise ExpressionError(f"unknown variable {name!r}", tok.pos)
        if tok.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ExpressionError(f"expected a value, found {tok.text or 'end of input'!r}", tok.pos)


def parse_expression(text):
    """Parse ``text`` into an :class:`Expression`.

    Raises :class:`~stokeslab.errors.ExpressionError` with the offending
    position for syntax errors and unknown identifiers.
    """
    if not text or not text.strip():
        raise ExpressionError("empty expression", 0)
    return _Parser(text).parse()


# --------------------------- differentiation --------------------------------

_DERIVATIVES = {
    "sin": lambda u: Call("cos", u),
    "cos": lambda u: neg(Call("sin", u)),
    "exp": lambda u: Call("exp", u),
    "log": lambda u: div(Const(1.0), u),
    "abs": lambda u: Call("sign", u),
    "sign": lambda u: Const(0.0),
}


def differentiate(e, var):
    """Exact structural derivative of ``e`` with respect to ``var``."""
    if var not in VARIABLES:
        raise ExpressionError(f"unknown variable {var!r}")
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.name == var else 0.0)
    if isinstance(e, Neg):
        return neg(differentiate(e.operand, var))
    if isinstance(e, Pow):
        du = differentiate(e.base, var)
        return mul(mul(Const(e.exponent), power(e.base, e.exponent - 1)), du)
    if isinstance(e, Call):
        du = differentiate(e.arg, var)
        return mul(_DERIVATIVES[e.func](e.arg), du)
    if isinstance(e, BinOp):
        da = differentiate(e.left, var)
        db = differentiate(e.right, var)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        if e.op == "/":
            return div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))
    raise ExpressionError(f"cannot differentiate node {type(e).__name__}")


def is_smooth(e):
    """False when ``e`` contains abs or sign, i.e. may have derivative kinks."""
    if isinstance(e, Call):
        return e.func not in ("abs", "sign") and is_smooth(e.arg)
    if isinstance(e, BinOp):
        return is_smooth(e.left) and is_smooth(e.right)
    if isinstance(e, (Neg,)):
        return is_smooth(e.operand)
    if isinstance(e, Pow):
        return is_smooth(e.base)
    return True


def to_text(e):
    """Render an expression back to parseable text."""
    if isinstance(e, Const):
        return format(e.value, ".17g")
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"-({to_text(e.operand)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)})^({format(e.exponent, '.17g')})"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    raise ExpressionError(f"cannot render node {type(e).__name__}")
