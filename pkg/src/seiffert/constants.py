"""Named real constants written as small arithmetic expressions.

Orders, weights and bound constants must be available at whatever precision
a caller works in, so they are stored as source text (``"log(2)/log(pi/2)"``)
and evaluated on demand in a given backend.  The grammar is a safe subset of
Python expressions: numbers, ``+ - * / **``, parentheses, the names ``pi``
and ``e``, bound parameters, and the functions listed in ``_FUNCTIONS``.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from functools import lru_cache

from .precision import NATIVE, get_context

__all__ = ["Const", "ConstError", "NAMED_CONSTANTS", "const"]


class ConstError(ValueError):
    """Raised for malformed or unresolvable constant expressions."""


_FUNCTIONS = {
    "sqrt": lambda c, x: c.sqrt(x),
    "exp": lambda c, x: c.exp(x),
    "ln": lambda c, x: c.log(x),
    "log": lambda c, x, base=None: c.log(x) if base is None else c.log(x) / c.log(base),
    "atan": lambda c, x: c.atan(x),
    "asin": lambda c, x: c.asin(x),
    "asinh": lambda c, x: c.asinh(x),
}


def _parse(text: str) -> ast.Expression:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConstError(f"cannot parse constant {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant,
                                 ast.Name, ast.Call, ast.Load, ast.Add, ast.Sub,
                                 ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)):
            raise ConstError(f"unsupported syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConstError(f"non-numeric literal in {text!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ConstError(f"unknown function in {text!r}")
            if node.keywords:
                raise ConstError(f"keyword arguments not allowed in {text!r}")
    return tree


def _evaluate(text: str, env: dict, ctx, stack: tuple = ()):
    tree = _parse(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            # Re-read the literal so "0.1" means one tenth at every precision.
            src = ast.get_source_segment(text.strip(), node) or repr(node.value)
            return ctx.convert(src) if ctx is not NATIVE else float(src)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            lhs, rhs = ev(node.left), ev(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return lhs + rhs
            if isinstance(op, ast.Sub):
                return lhs - rhs
            if isinstance(op, ast.Mult):
                return lhs * rhs
            if isinstance(op, ast.Div):
                return lhs / rhs
            return ctx.power(lhs, rhs)
        if isinstance(node, ast.Name):
            if node.id == "pi":
                return +ctx.pi if ctx is not NATIVE else ctx.pi
            if node.id == "e":
                return +ctx.e if ctx is not NATIVE else ctx.e
            if node.id in env:
                if node.id in stack:
                    raise ConstError(f"circular parameter {node.id!r}")
                return _evaluate(env[node.id], env, ctx, stack + (node.id,))
            raise ConstError(f"unbound name {node.id!r} in {text!r}")
        if isinstance(node, ast.Call):
            return _FUNCTIONS[node.func.id](ctx, *[ev(a) for a in node.args])
        raise ConstError(f"unsupported node in {text!r}")  # pragma: no cover

    return ev(tree)


@lru_cache(maxsize=4096)
def _cached(text: str, env: tuple, dps):
    return _evaluate(text, dict(env), get_context(dps))


@dataclass(frozen=True)
class Const:
    """A real constant given by expression text plus parameter bindings."""

    text: str
    env: tuple = field(default=(), compare=True)

    def __post_init__(self):
        _parse(self.text)
        # Bound parameters are checked eagerly so errors surface at parse time.
        names = {n.id for n in ast.walk(_parse(self.text)) if isinstance(n, ast.Name)}
        names -= {"pi", "e"} | set(_FUNCTIONS)
        missing = names - {k for k, _ in self.env}
        if missing:
            raise ConstError(f"unbound name(s) {sorted(missing)} in {self.text!r}")

    def value(self, ctx=NATIVE):
        return _cached(self.text, self.env, ctx.dps)

    def __float__(self):
        return float(self.value(NATIVE))

    def __str__(self):
        return self.text


def const(x, env=()) -> Const:
    """Coerce a number, string or :class:`Const` into a :class:`Const`."""
    if isinstance(x, Const):
        return x
    if isinstance(x, bool):
        raise ConstError("booleans are not constants")
    if isinstance(x, (int, float)):
        return Const(repr(x))
    if isinstance(x, str):
        return Const(x, tuple(sorted(dict(env).items())))
    # mpf or similar: round-trip through its decimal repr
    return Const(str(x))


# name -> (formula text, description)
NAMED_CONSTANTS = {
    "p1": ("log(2)/log(pi/2)", "lower sharp power-mean order for T (x -> 0 binding)"),
    "p2": ("5/3", "upper sharp power-mean order for T (x -> 1 binding)"),
    "alpha1": ("2**(8/5)/pi", "best constant with alpha1*A_{5/3} < T"),
    "p0": ("log(2)/log(log(3+2*sqrt(2)))", "lower sharp power-mean order for N"),
    "log_pi_2": ("log(2)/log(pi)", "lower sharp power-mean order for P"),
    "chu1_p": ("(sqrt(2)+1)*(4-pi)/pi", "best lower weight in w*Q + (1-w)*A < T"),
    "chu1_q": ("2/3", "best upper weight in T < w*Q + (1-w)*A"),
    "w3_r": ("2*(pi-2*sqrt(2))/((2-sqrt(2))*pi)", "weight r1 in (1-r1)*Q + r1*A < T"),
    "chu2_p": ("(1+sqrt(4/pi-1))/2", "lower argument-mixing weight for C below T"),
    "chu2_q": ("(3+sqrt(3))/6", "upper argument-mixing weight for C above T"),
}
