"""Mean-valued expression trees and their prefix text syntax.

Grammar (whitespace separated, parentheses group a constant)::

    term  := NAME                       A G Q T P N L I C
           | A_<c> | L_<c> | QL_<c>     power, Lehmer, Q^2/L_(p-1) of order c
           | scale <c> term             c * term
           | affine <c> term <c> term   c1 * term1 + c2 * term2
           | geo <w> term term          term1^w * term2^(1-w)
           | argmix <t> term            term(t a + (1-t) b, t b + (1-t) a)
    chain := term ("<" term)+

``<c>`` is a constant in the syntax of :mod:`seiffert.constants`, e.g.
``5/3``, ``p1`` or ``(1-p1)``; a parenthesised constant may contain spaces.
Note ``L`` alone is the logarithmic mean while ``L_r`` is the Lehmer mean.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import means
from .constants import Const, ConstError
from .precision import get_context

__all__ = [
    "MeanExpr",
    "Named",
    "PowerMean",
    "LehmerMean",
    "QSqOverLehmer",
    "Scale",
    "AffineCombination",
    "WeightedGeometric",
    "ArgMix",
    "ParseError",
    "parse_term",
    "parse_chain",
    "tokenize",
]


class ParseError(ValueError):
    """Malformed mean expression."""


_NAMED = {
    "A": ("Arithmetic", means.arithmetic_mean),
    "G": ("Geometric", means.geometric_mean),
    "Q": ("Quadratic", means.quadratic_mean),
    "T": ("SeiffertT", means.seiffert_t),
    "P": ("SeiffertP", means.seiffert_p),
    "N": ("NeumanSandor", means.neuman_sandor),
    "L": ("Logarithmic", means.logarithmic_mean),
    "I": ("Identric", means.identric_mean),
    "C": ("Contraharmonic", means.contraharmonic),
}


class MeanExpr:
    """Base class: a symmetric, degree-one homogeneous mean expression."""

    def evaluate(self, a, b, dps=None):
        """Value at the positive pair (a, b)."""
        ctx = get_context(dps)
        return self._eval(ctx, ctx.convert(a), ctx.convert(b))

    __call__ = evaluate

    def _eval(self, ctx, a, b):  # pragma: no cover - abstract
        raise NotImplementedError

    def to_text(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    def __str__(self):
        return self.to_text()


def _ctext(c: Const) -> str:
    text = c.text.strip()
    return text if " " not in text else f"({text})"


@dataclass(frozen=True)
class Named(MeanExpr):
    symbol: str

    def __post_init__(self):
        if self.symbol not in _NAMED:
            raise ParseError(f"unknown mean {self.symbol!r}")

    @property
    def kind(self) -> str:
        return _NAMED[self.symbol][0]

    def _eval(self, ctx, a, b):
        return _NAMED[self.symbol][1](a, b, ctx.dps)

    def to_text(self):
        return self.symbol


@dataclass(frozen=True)
class PowerMean(MeanExpr):
    r: Const

    def _eval(self, ctx, a, b):
        return means.power_mean(self.r.value(ctx), a, b, ctx.dps)

    def to_text(self):
        return f"A_{_ctext(self.r)}"


@dataclass(frozen=True)
class LehmerMean(MeanExpr):
    r: Const

    def _eval(self, ctx, a, b):
        return means.lehmer_mean(self.r.value(ctx), a, b, ctx.dps)

    def to_text(self):
        return f"L_{_ctext(self.r)}"


@dataclass(frozen=True)
class QSqOverLehmer(MeanExpr):
    p: Const

    def _eval(self, ctx, a, b):
        return means.q2_over_lehmer(self.p.value(ctx), a, b, ctx.dps)

    def to_text(self):
        return f"QL_{_ctext(self.p)}"


@dataclass(frozen=True)
class Scale(MeanExpr):
    c: Const
    expr: MeanExpr

    def _eval(self, ctx, a, b):
        return self.c.value(ctx) * self.expr._eval(ctx, a, b)

    def to_text(self):
        return f"scale {_ctext(self.c)} {self.expr.to_text()}"


@dataclass(frozen=True)
class AffineCombination(MeanExpr):
    c1: Const
    expr1: MeanExpr
    c2: Const
    expr2: MeanExpr

    def _eval(self, ctx, a, b):
        return (self.c1.value(ctx) * self.expr1._eval(ctx, a, b)
                + self.c2.value(ctx) * self.expr2._eval(ctx, a, b))

    def to_text(self):
        return (f"affine {_ctext(self.c1)} {self.expr1.to_text()} "
                f"{_ctext(self.c2)} {self.expr2.to_text()}")


@dataclass(frozen=True)
class WeightedGeometric(MeanExpr):
    """expr1^w * expr2^(1-w); homogeneous because the weights sum to one."""

    w: Const
    expr1: MeanExpr
    expr2: MeanExpr

    def _eval(self, ctx, a, b):
        w = self.w.value(ctx)
        return (ctx.power(self.expr1._eval(ctx, a, b), w)
                * ctx.power(self.expr2._eval(ctx, a, b), 1 - w))

    def to_text(self):
        return f"geo {_ctext(self.w)} {self.expr1.to_text()} {self.expr2.to_text()}"


@dataclass(frozen=True)
class ArgMix(MeanExpr):
    """expr evaluated at (t a + (1-t) b, t b + (1-t) a), t in [1/2, 1]."""

    t: Const
    expr: MeanExpr

    def __post_init__(self):
        t = float(self.t)
        if not 0.5 <= t <= 1.0:
            raise ParseError(f"argmix weight must lie in [1/2, 1], got {t}")

    def _eval(self, ctx, a, b):
        t = self.t.value(ctx)
        return self.expr._eval(ctx, t * a + (1 - t) * b, t * b + (1 - t) * a)

    def to_text(self):
        return f"argmix {_ctext(self.t)} {self.expr.to_text()}"


# ---------------------------------------------------------------------------
# parsing


def tokenize(text: str) -> list[str]:
    """Split on whitespace, keeping parenthesised groups whole."""
    tokens, buf, depth = [], [], 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced ')' in {text!r}")
        if ch.isspace() and depth == 0:
            if buf:
                tokens.append("".join(buf))
                buf = []
            continue
        buf.append(ch)
    if depth:
        raise ParseError(f"unbalanced '(' in {text!r}")
    if buf:
        tokens.append("".join(buf))
    return tokens


class _Parser:
    def __init__(self, tokens, env):
        self.tokens = tokens
        self.pos = 0
        self.env = tuple(sorted(dict(env).items()))

    def _next(self, what):
        if self.pos >= len(self.tokens):
            raise ParseError(f"expected {what}, got end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def const(self, tok=None):
        tok = tok if tok is not None else self._next("a constant")
        try:
            return Const(tok, self.env)
        except ConstError as exc:
            raise ParseError(str(exc)) from exc

    def term(self) -> MeanExpr:
        tok = self._next("a mean")
        if tok == "<":
            raise ParseError("expected a mean, got '<'")
        if tok == "scale":
            return Scale(self.const(), self.term())
        if tok == "affine":
            c1, e1 = self.const(), self.term()
            c2, e2 = self.const(), self.term()
            return AffineCombination(c1, e1, c2, e2)
        if tok == "geo":
            return WeightedGeometric(self.const(), self.term(), self.term())
        if tok == "argmix":
            return ArgMix(self.const(), self.term())
        for prefix, cls in (("QL_", QSqOverLehmer), ("A_", PowerMean), ("L_", LehmerMean)):
            if tok.startswith(prefix):
                return cls(self.const(tok[len(prefix):]))
        return Named(tok)


def parse_term(text: str, env=()) -> MeanExpr:
    """Parse a single mean expression."""
    parser = _Parser(tokenize(text), env)
    expr = parser.term()
    if parser.pos != len(parser.tokens):
        raise ParseError(f"trailing input {parser.tokens[parser.pos:]} in {text!r}")
    return expr


def parse_chain(text: str, env=()) -> tuple[MeanExpr, ...]:
    """Parse ``term < term < ...`` into its terms."""
    parser = _Parser(tokenize(text), env)
    terms = [parser.term()]
    while parser.pos < len(parser.tokens):
        sep = parser._next("'<'")
        if sep != "<":
            raise ParseError(f"expected '<' between terms, got {sep!r}")
        terms.append(parser.term())
    if len(terms) < 2:
        raise ParseError(f"a chain needs at least two terms: {text!r}")
    return tuple(terms)
