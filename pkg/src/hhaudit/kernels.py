"""Weight kernels h and sampled checks of their algebraic properties.

A kernel is a positive function of the convexity parameter t, built from
a closed grammar::

    id | one | pow:<k> | recip | scaled:<c>,<spec> | max:<spec>,<spec>

with k <= 1 and c > 0. Kernels are immutable; evaluation compiles to a
stack program executed by the active backend.

Property checks are sampled, never symbolic: a verdict is either
"no_violation_found" or "violated" with a concrete witness. Unary checks
sample the unit interval (0, 1]; binary checks sample pairs whose
combination (product or sum) stays inside the declared domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _programs as prg
from . import backends
from .errors import ConfigurationError, DomainError, SpecParseError

VERDICT_NO_VIOLATION = "no_violation_found"
VERDICT_VIOLATED = "violated"

PROPERTY_SUPERMULTIPLICATIVE = "supermultiplicative"
PROPERTY_SUPERADDITIVE = "superadditive"
PROPERTY_DOMINATES_IDENTITY = "dominates_identity"
PROPERTY_NONNEGATIVE = "nonnegative"

KERNEL_PROPERTIES = (
    PROPERTY_SUPERMULTIPLICATIVE,
    PROPERTY_SUPERADDITIVE,
    PROPERTY_DOMINATES_IDENTITY,
    PROPERTY_NONNEGATIVE,
)

# A sampled violation must beat floating-point noise at equality cases.
STRICTNESS = 1e-12


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class Sampler:
    """Deterministic sampling plan: seed, sample count, value domain."""

    seed: int = 0
    samples: int = 1000
    domain: tuple[float, float] = (0.0, 1.0)  # half-open (lo, hi]

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))

    def validate(self):
        lo, hi = self.domain
        if self.samples < 1:
            raise ConfigurationError("sampler needs at least one sample")
        if not (hi > lo >= 0.0):
            raise ConfigurationError(f"empty or negative sampler domain ({lo}, {hi}]")


@dataclass(frozen=True)
class Witness:
    point: tuple[float, ...]
    lhs: float
    rhs: float


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    samples_tested: int
    verdict: str
    witness: Optional[Witness]
    seed: int


@dataclass(frozen=True, eq=False)
class HKernel:
    family: str
    params: tuple[float, ...]
    children: tuple["HKernel", ...]
    spec: str
    program: prg.Program
    h1: float
    sigma0: float  # power-law exponent of h(t) as t -> 0+
    # every grammar family is defined on the open positive ray; unary
    # property checks conventionally sample its (0, 1] slice
    domain: tuple[float, float] = (0.0, float("inf"))

    def eval_many(self, ts) -> np.ndarray:
        ts = np.ascontiguousarray(ts, dtype=np.float64)
        return backends.eval_program_many(self.program.code, self.program.pool, ts)

    def eval(self, t: float) -> float:
        return float(self.eval_many(np.array([t]))[0])

    def __repr__(self):
        return f"HKernel({self.spec!r})"


def _build(family, params=(), children=()):
    if family == "id":
        program, sigma0, spec = prg.var(), 1.0, "id"
    elif family == "one":
        program, sigma0, spec = prg.const(1.0), 0.0, "one"
    elif family == "pow":
        (s,) = params
        program, sigma0, spec = prg.powc(s), s, f"pow:{_fmt(s)}"
    elif family == "recip":
        program, sigma0, spec = prg.powc(-1.0), -1.0, "recip"
    elif family == "scaled":
        (c,) = params
        (child,) = children
        program = prg.scaled(child.program, c)
        sigma0 = child.sigma0
        spec = f"scaled:{_fmt(c)},{child.spec}"
    elif family == "max":
        left, right = children
        program = prg.maximum(left.program, right.program)
        # Near zero the smaller exponent dominates: t^0 = 1 > t^1.
        sigma0 = min(left.sigma0, right.sigma0)
        spec = f"max:{left.spec},{right.spec}"
    else:  # pragma: no cover - guarded by the parser
        raise SpecParseError(f"unknown kernel family {family!r}")
    h1 = float(backends.eval_program_many(program.code, program.pool, np.array([1.0]))[0])
    return HKernel(family, tuple(float(p) for p in params), tuple(children),
                   spec, program, h1, float(sigma0))


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek_token(self) -> str:
        rest = self.text[self.pos:]
        for stop, ch in enumerate(rest):
            if ch in ":,":
                return rest[:stop]
        return rest

    def take_token(self) -> str:
        tok = self.peek_token()
        self.pos += len(tok)
        return tok

    def expect(self, ch: str):
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            found = self.text[self.pos:self.pos + 1] or "<end>"
            raise SpecParseError(
                f"expected {ch!r} at position {self.pos} of {self.text!r}, found {found!r}"
            )
        self.pos += 1

    def number(self) -> float:
        tok = self.take_token()
        try:
            return float(tok)
        except ValueError:
            raise SpecParseError(f"expected a number, found {tok!r} in {self.text!r}") from None


def _parse(cur: _Cursor) -> HKernel:
    tok = cur.take_token()
    if tok == "id":
        return _build("id")
    if tok == "one":
        return _build("one")
    if tok == "recip":
        return _build("recip")
    if tok == "pow":
        cur.expect(":")
        k = cur.number()
        if not k <= 1.0:
            raise DomainError(f"pow kernel requires exponent <= 1, got {k}")
        return _build("pow", (k,))
    if tok == "scaled":
        cur.expect(":")
        c = cur.number()
        if not c > 0.0:
            raise DomainError(f"scaled kernel requires factor > 0, got {c}")
        cur.expect(",")
        child = _parse(cur)
        return _build("scaled", (c,), (child,))
    if tok == "max":
        cur.expect(":")
        left = _parse(cur)
        cur.expect(",")
        right = _parse(cur)
        return _build("max", (), (left, right))
    raise SpecParseError(f"unknown kernel token {tok!r} in {cur.text!r}")


def make_kernel(spec: str) -> HKernel:
    """Parse a kernel spec string into an immutable HKernel."""
    cur = _Cursor(spec.strip())
    kernel = _parse(cur)
    if cur.pos != len(cur.text):
        raise SpecParseError(
            f"trailing input {cur.text[cur.pos:]!r} after kernel spec in {spec!r}"
        )
    return kernel


def analytic_properties(h: HKernel) -> dict[str, Optional[bool]]:
    """Which properties are known to hold per family (None = unknown)."""
    f = h.family
    if f == "id":
        return {p: True for p in KERNEL_PROPERTIES}
    if f == "one":
        return {
            PROPERTY_SUPERMULTIPLICATIVE: True,
            PROPERTY_SUPERADDITIVE: False,
            PROPERTY_DOMINATES_IDENTITY: True,
            PROPERTY_NONNEGATIVE: True,
        }
    if f == "pow":
        s = h.params[0]
        return {
            PROPERTY_SUPERMULTIPLICATIVE: True,  # (xy)^s = x^s y^s
            PROPERTY_SUPERADDITIVE: s == 1.0,
            PROPERTY_DOMINATES_IDENTITY: True,  # t^s >= t on (0,1) for s <= 1
            PROPERTY_NONNEGATIVE: True,
        }
    if f == "recip":
        return {
            PROPERTY_SUPERMULTIPLICATIVE: True,
            PROPERTY_SUPERADDITIVE: False,
            PROPERTY_DOMINATES_IDENTITY: True,
            PROPERTY_NONNEGATIVE: True,
        }
    if f == "scaled":
        c = h.params[0]
        sub = analytic_properties(h.children[0])
        return {
            PROPERTY_SUPERMULTIPLICATIVE: (
                True if sub[PROPERTY_SUPERMULTIPLICATIVE] and c <= 1.0 else None
            ),
            PROPERTY_SUPERADDITIVE: sub[PROPERTY_SUPERADDITIVE],
            PROPERTY_DOMINATES_IDENTITY: (
                True if sub[PROPERTY_DOMINATES_IDENTITY] and c >= 1.0 else None
            ),
            PROPERTY_NONNEGATIVE: sub[PROPERTY_NONNEGATIVE],
        }
    # max
    subs = [analytic_properties(ch) for ch in h.children]
    return {
        PROPERTY_SUPERMULTIPLICATIVE: None,
        PROPERTY_SUPERADDITIVE: None,
        PROPERTY_DOMINATES_IDENTITY: (
            True if any(s[PROPERTY_DOMINATES_IDENTITY] for s in subs) else None
        ),
        PROPERTY_NONNEGATIVE: (
            True if any(s[PROPERTY_NONNEGATIVE] for s in subs) else None
        ),
    }


def _violation_tol(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return STRICTNESS * (1.0 + np.abs(lhs) + np.abs(rhs))


def _first_violation(points, lhs, rhs, deficit):
    """First sample (in order) whose deficit exceeds tolerance, or None."""
    mask = deficit > _violation_tol(lhs, rhs)
    if not mask.any():
        return None
    i = int(np.argmax(mask))
    point = tuple(float(p[i]) for p in points)
    return Witness(point, float(lhs[i]), float(rhs[i]))


def _draw_open_closed(rng, lo, hi, n):
    """n draws from the half-open interval (lo, hi]."""
    return lo + (hi - lo) * (1.0 - rng.random(n))


def _unary_points(sampler: Sampler, open_right: bool) -> np.ndarray:
    lo, hi = sampler.domain
    rng = sampler.rng()
    top = hi if not open_right else lo + (hi - lo) * (1.0 - 1e-9)
    probes = np.array([top, lo + (hi - lo) * 0.75, lo + (hi - lo) * 0.5,
                       lo + (hi - lo) * 0.25, lo + (hi - lo) * 1e-6])
    draws = _draw_open_closed(rng, lo, hi, sampler.samples)
    if open_right:
        draws = np.minimum(draws, top)
    return np.concatenate([probes, draws])


def _binary_pairs(sampler: Sampler, combine) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (x, y) in domain^2 whose combination is inside the domain.

    Pairs whose combined point falls outside are rejected and resampled.
    """
    lo, hi = sampler.domain
    rng = sampler.rng()
    span = hi - lo

    def in_domain(v):
        return (v > lo) & (v <= hi)

    cand = [(hi, hi), (hi * 0.5 + lo * 0.5, hi * 0.5 + lo * 0.5),
            (lo + span * 0.25, lo + span * 0.25), (hi, lo + span * 0.5),
            (lo + span * 1e-6, lo + span * 0.5)]
    px, py = [], []
    for x, y in cand:
        if lo < combine(x, y) <= hi and lo < x <= hi and lo < y <= hi:
            px.append(x)
            py.append(y)
    need = sampler.samples
    xs = [np.array(px)]
    ys = [np.array(py)]
    got = 0
    attempts = 0
    while got < need:
        attempts += 1
        if attempts > 200:
            raise ConfigurationError(
                "sampler domain rejects nearly all pairs for this binary property"
            )
        m = max(64, 2 * (need - got))
        x = _draw_open_closed(rng, lo, hi, m)
        y = _draw_open_closed(rng, lo, hi, m)
        keep = in_domain(combine(x, y))
        x, y = x[keep], y[keep]
        take = min(x.size, need - got)
        xs.append(x[:take])
        ys.append(y[:take])
        got += take
    return np.concatenate(xs), np.concatenate(ys)


def kernel_properties(h: HKernel, property_id: str, sampler: Sampler) -> PropertyReport:
    """Sampled check of one kernel property; returns the first violation found."""
    sampler.validate()
    if property_id == PROPERTY_NONNEGATIVE:
        ts = _unary_points(sampler, open_right=False)
        vals = h.eval_many(ts)
        witness = _first_violation((ts,), vals, np.zeros_like(vals), -vals)
        n = ts.size
    elif property_id == PROPERTY_DOMINATES_IDENTITY:
        lo, hi = sampler.domain
        sub = Sampler(sampler.seed, sampler.samples, (max(lo, 0.0), min(hi, 1.0)))
        sub.validate()
        ts = _unary_points(sub, open_right=True)
        lhs = h.eval_many(ts)
        witness = _first_violation((ts,), lhs, ts, ts - lhs)
        n = ts.size
    elif property_id == PROPERTY_SUPERMULTIPLICATIVE:
        xs, ys = _binary_pairs(sampler, lambda x, y: x * y)
        lhs = h.eval_many(xs * ys)
        rhs = h.eval_many(xs) * h.eval_many(ys)
        witness = _first_violation((xs, ys), lhs, rhs, rhs - lhs)
        n = xs.size
    elif property_id == PROPERTY_SUPERADDITIVE:
        xs, ys = _binary_pairs(sampler, lambda x, y: x + y)
        lhs = h.eval_many(xs + ys)
        rhs = h.eval_many(xs) + h.eval_many(ys)
        witness = _first_violation((xs, ys), lhs, rhs, rhs - lhs)
        n = xs.size
    else:
        raise ConfigurationError(f"unknown kernel property {property_id!r}")
    verdict = VERDICT_VIOLATED if witness is not None else VERDICT_NO_VIOLATION
    return PropertyReport(property_id, int(n), verdict, witness, sampler.seed)
