"""Grid verification of strict mean-inequality chains.

A chain ``M_0 < M_1 < ... < M_k`` is checked at the pairs (1, x) for ratios
x on a clustered grid.  The margin of pair i at x is ln(M_{i+1}(1,x) /
M_i(1,x)); the chain is *verified-on-grid* when every margin is positive.
That is a statement about sampled points only, never a proof on the
continuum.

Margins not clearly positive at the working precision are re-evaluated at
twice the precision.  A point is a counterexample only if the recheck still
gives a negative margin beyond the evaluation error (or exactly zero, as
for identical terms); anything in between makes the report inconclusive.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import fp_analysis
from .constants import const
from .expr import MeanExpr, parse_chain
from .grids import ratio_grid
from .precision import DEFAULT_DPS, get_context

__all__ = [
    "ChainSpec",
    "FixtureError",
    "Witness",
    "VerificationReport",
    "MarginProfile",
    "KyFanResult",
    "REFERENCE_SUITE",
    "evaluation_tolerance",
    "evaluate_margins",
    "verify_chain",
    "margin_profile",
    "verify_kyfan",
    "d_function",
    "d1_function",
    "d1_factored",
    "parse_fixtures",
    "load_fixtures",
]

VERIFIED = "verified-on-grid"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"

#: the thirteen chains stated in the source material, in shipping order
REFERENCE_SUITE = ("H-J", "Seiffert", "Sandor", "Chu1", "W1", "W2", "W3", "Wang",
                   "Chu2", "C-S", "4.0", "4.2", "Y2")


class FixtureError(ValueError):
    """Malformed chain fixture text."""


@dataclass(frozen=True)
class ChainSpec:
    name: str
    terms: tuple
    domain: tuple = (0.0, 1.0)
    parameters: tuple = ()
    description: str = ""

    def __post_init__(self):
        if len(self.terms) < 2:
            raise ValueError("a chain needs at least two terms")
        lo, hi = self.domain
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"chain domain must lie in [0, 1], got {self.domain}")

    @classmethod
    def from_text(cls, name: str, text: str, parameters=(), domain=(0.0, 1.0),
                  description: str = "") -> "ChainSpec":
        params = tuple(parameters.items()) if isinstance(parameters, dict) else tuple(parameters)
        return cls(name, parse_chain(text, params), tuple(domain), params, description)

    @property
    def text(self) -> str:
        return " < ".join(t.to_text() for t in self.terms)

    @property
    def pair_labels(self) -> list[str]:
        return [f"{l.to_text()} < {r.to_text()}" for l, r in zip(self.terms, self.terms[1:])]


@dataclass(frozen=True)
class Witness:
    ratio: float
    pair: int
    left: object
    right: object
    margin: object


@dataclass
class VerificationReport:
    chain: str
    status: str
    min_margin: object
    argmin: float
    argmin_pair: int
    grid_size: int
    precision: int
    counterexamples: list = field(default_factory=list)
    violation_count: int = 0
    unresolved_count: int = 0
    pair_labels: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def to_dict(self) -> dict:
        from .formatting import format_number

        return {
            "chain": self.chain,
            "status": self.status,
            "min_margin": format_number(self.min_margin, 12),
            "argmin": repr(self.argmin),
            "argmin_pair": self.pair_labels[self.argmin_pair] if self.pair_labels else self.argmin_pair,
            "grid_size": self.grid_size,
            "precision": self.precision,
            "violation_count": self.violation_count,
            "unresolved_count": self.unresolved_count,
            "counterexamples": [
                {"ratio": repr(w.ratio),
                 "pair": self.pair_labels[w.pair] if self.pair_labels else w.pair,
                 "left": format_number(w.left, 20),
                 "right": format_number(w.right, 20),
                 "log_margin": format_number(w.margin, 12)}
                for w in self.counterexamples
            ],
        }


def evaluation_tolerance(dps: int):
    """Absolute error allowance on a log-margin computed with ``dps`` digits."""
    ctx = get_context(dps)
    return ctx.mpf(10) ** (-(dps - 10))


def _margins_at(chain: ChainSpec, ctx, x) -> list:
    one = ctx.mpf(1)
    x = ctx.mpf(x)
    vals = [t._eval(ctx, one, x) for t in chain.terms]
    return [ctx.log(r / l) for l, r in zip(vals, vals[1:])]


def _margins_chunk(args):
    # raw (sign, mantissa, exponent, bits) tuples: mpf types of a private
    # context do not pickle
    chain, xs, dps = args
    ctx = get_context(dps)
    return [[m._mpf_ for m in _margins_at(chain, ctx, x)] for x in xs]


def evaluate_margins(chain: ChainSpec, xs, dps: int = DEFAULT_DPS, workers: int = 1) -> list:
    """Log-margins for every ratio in ``xs``, in the order given."""
    xs = list(xs)
    ctx = get_context(dps)
    if workers <= 1 or len(xs) < 2 * workers:
        return [_margins_at(chain, ctx, x) for x in xs]
    size = -(-len(xs) // workers)
    chunks = [(chain, xs[i:i + size], dps) for i in range(0, len(xs), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_margins_chunk, chunks))
    return [[ctx.make_mpf(m) for m in row] for part in parts for row in part]


def _argmin(points: dict):
    """(ratio, pair, margin) of the smallest margin; ties go to the smallest ratio."""
    best = None
    for x in sorted(points):
        for j, m in enumerate(points[x]):
            if best is None or m < best[2]:
                best = (x, j, m)
    return best


def verify_chain(chain: ChainSpec, grid_points: int = 10_000, dps: int = DEFAULT_DPS,
                 refine_rounds: int = 3, workers: int = 1) -> VerificationReport:
    """Check every adjacent strict inequality of ``chain`` on a ratio grid."""
    if grid_points < 64:
        raise ValueError("grid_points must be at least 64")
    ctx = get_context(dps)
    xs = ratio_grid(grid_points, *chain.domain)
    points = dict(zip(xs, evaluate_margins(chain, xs, dps, workers)))

    # refine around the smallest margin by bisecting the neighbouring cells
    for _ in range(refine_rounds):
        x0 = _argmin(points)[0]
        ordered = sorted(points)
        i = ordered.index(x0)
        new = []
        for j in (i - 1, i + 1):
            if 0 <= j < len(ordered):
                mid = (ordered[j] + x0) / 2
                if mid not in points and mid != x0:
                    new.append(mid)
        for x, row in zip(new, evaluate_margins(chain, new, dps)):
            points[x] = row

    tol = evaluation_tolerance(dps)
    dps2 = 2 * dps
    ctx2 = get_context(dps2)
    tol2 = evaluation_tolerance(dps2)

    confirmed, unresolved = [], 0
    one2 = ctx2.mpf(1)
    for x in sorted(points):
        suspects = [j for j, m in enumerate(points[x]) if m <= tol]
        if not suspects:
            continue
        vals = {}
        for j in suspects:
            for k in (j, j + 1):
                if k not in vals:
                    vals[k] = chain.terms[k]._eval(ctx2, one2, ctx2.mpf(x))
            m2 = ctx2.log(vals[j + 1] / vals[j])
            # a zero counts only when it persists across both precisions
            if (m2 == 0 and points[x][j] == 0) or m2 < -tol2:
                confirmed.append(Witness(x, j, vals[j], vals[j + 1], m2))
            elif m2 <= tol2:
                unresolved += 1
            else:
                # resolved at the higher precision; report that value
                points[x][j] = ctx.convert(m2)

    x_min, pair_min, m_min = _argmin(points)

    if confirmed:
        status = COUNTEREXAMPLE
    elif unresolved:
        status = INCONCLUSIVE
    else:
        status = VERIFIED
    return VerificationReport(
        chain=chain.name, status=status, min_margin=m_min, argmin=x_min,
        argmin_pair=pair_min, grid_size=len(points), precision=dps,
        counterexamples=_select_witnesses(confirmed), violation_count=len(confirmed),
        unresolved_count=unresolved, pair_labels=chain.pair_labels,
    )


def _select_witnesses(confirmed: list) -> list:
    """Per violated pair: the worst point, then the violations nearest each end."""
    out = []
    for pair in sorted({w.pair for w in confirmed}):
        ws = [w for w in confirmed if w.pair == pair]
        worst = min(ws, key=lambda w: (w.margin, w.ratio))
        picks = [worst, min(ws, key=lambda w: w.ratio), max(ws, key=lambda w: w.ratio)]
        for w in picks:
            if w not in out:
                out.append(w)
    return out


@dataclass
class MarginProfile:
    chain: str
    header: list
    rows: list  # (ratio, [margins])
    precision: int


def margin_profile(chain: ChainSpec, grid_points: int = 10_000, dps: int = DEFAULT_DPS,
                   workers: int = 1) -> MarginProfile:
    """One row of log-margins per grid ratio, in increasing ratio order."""
    xs = ratio_grid(grid_points, *chain.domain)
    rows = list(zip(xs, evaluate_margins(chain, xs, dps, workers)))
    return MarginProfile(chain.name, ["ratio", *chain.pair_labels], rows, dps)


# ---------------------------------------------------------------------------
# Ky Fan type ratio inequality


@dataclass(frozen=True)
class KyFanResult:
    """T(a1,b1)/T(a2,b2) versus A_p(a1,b1)/A_p(a2,b2).

    ``margin = F_p(a1/b1) - F_p(a2/b2)``; it is negative exactly when the
    forward inequality T-ratio < A_p-ratio holds, positive when reversed.
    """

    p: str
    margin: object
    forward: bool
    reversed: bool


def verify_kyfan(p, quadruple, dps: int = DEFAULT_DPS) -> KyFanResult:
    """Check the Ky Fan type inequality for T against A_p."""
    a1, b1, a2, b2 = quadruple
    ctx = get_context(dps)
    a1, b1, a2, b2 = (ctx.convert(v) for v in (a1, b1, a2, b2))
    if min(a1, b1, a2, b2) <= 0:
        raise ValueError("all four arguments must be positive")
    r1, r2 = a1 / b1, a2 / b2
    if not r1 < r2 < 1:
        raise ValueError("need a1/b1 < a2/b2 < 1")
    fc = fp_analysis.FpContext(const(p), dps)
    margin = fp_analysis.F(fc, r1) - fp_analysis.F(fc, r2)
    return KyFanResult(str(const(p)), margin, margin < 0, margin > 0)


# ---------------------------------------------------------------------------
# (2Q + A)/3 < A_5/3 in the substituted variable x = (a/b)^(1/3)


def d_function(x, dps: int = DEFAULT_DPS):
    """ln((2Q + A)/3) - ln A_5/3 at the pair (x^3, 1); negative on (0, 1)."""
    ctx = get_context(dps)
    x = ctx.convert(x)
    q = ctx.sqrt((x**6 + 1) / 2)
    return ctx.log((2 * q + (x**3 + 1) / 2) / 3) - ctx.mpf(3) / 5 * ctx.log((x**5 + 1) / 2)


def d1_function(x, dps: int = DEFAULT_DPS):
    """(1 + x) sqrt(x^6/2 + 1/2) - 2 x^2, the sign factor of D'(x)."""
    ctx = get_context(dps)
    x = ctx.convert(x)
    return (1 + x) * ctx.sqrt(x**6 / 2 + ctx.mpf(1) / 2) - 2 * x * x


def d1_factored(x, dps: int = DEFAULT_DPS):
    """Rationalised form (x-1)^2 (x^6+4x^5+8x^4+12x^3+8x^2+4x+1) / (2((1+x)s + 2x^2))."""
    ctx = get_context(dps)
    x = ctx.convert(x)
    s = ctx.sqrt(x**6 / 2 + ctx.mpf(1) / 2)
    poly = x**6 + 4 * x**5 + 8 * x**4 + 12 * x**3 + 8 * x**2 + 4 * x + 1
    return (x - 1) ** 2 * poly / (2 * ((1 + x) * s + 2 * x * x))


# ---------------------------------------------------------------------------
# fixture files

_SECTION = re.compile(r"^\[(?P<name>[^\]]+)\]$")
_PARAM = re.compile(r"^param\s+(?P<name>[A-Za-z_]\w*)\s*=\s*(?P<value>.+)$")
_KEY = re.compile(r"^(?P<key>description|chain|domain)\s*=\s*(?P<value>.*)$")


def parse_fixtures(text: str, source: str = "<text>") -> dict:
    """Parse chain fixture text into ``{name: ChainSpec}`` preserving order."""
    entries, current = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if m := _SECTION.match(line):
            current = {"name": m["name"].strip(), "params": [], "where": where}
            entries.append(current)
            continue
        if current is None:
            raise FixtureError(f"{where}: content before the first [NAME] header")
        if m := _PARAM.match(line):
            current["params"].append((m["name"], m["value"].strip()))
        elif m := _KEY.match(line):
            if m["key"] in current:
                raise FixtureError(f"{where}: duplicate key {m['key']!r}")
            current[m["key"]] = m["value"].strip()
        else:
            raise FixtureError(f"{where}: cannot parse {raw!r}")

    chains = {}
    for e in entries:
        if e["name"] in chains:
            raise FixtureError(f"{e['where']}: duplicate chain {e['name']!r}")
        if "chain" not in e:
            raise FixtureError(f"{e['where']}: chain {e['name']!r} has no 'chain =' line")
        try:
            lo, hi = (float(v) for v in e.get("domain", "0 1").split())
            chains[e["name"]] = ChainSpec.from_text(
                e["name"], e["chain"], e["params"], (lo, hi), e.get("description", ""))
        except ValueError as exc:
            raise FixtureError(f"{e['where']}: {exc}") from exc
    return chains


def load_fixtures(path: str | os.PathLike | None = None) -> dict:
    """Chains from ``path``, or the packaged fixtures when ``path`` is None."""
    if path is None:
        text = resources.files("seiffert").joinpath("data/chains.txt").read_text()
        return parse_fixtures(text, "chains.txt")
    path = Path(path)
    return parse_fixtures(path.read_text(), str(path))
