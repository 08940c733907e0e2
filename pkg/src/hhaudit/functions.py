"""Nonnegative test functions on an interval and sampled class checks.

Functions come from a closed grammar::

    pow:<n> | exp:<c> | poly:<c0,...> | recip | symquad | prod:<spec>,<spec>

Each family carries just enough analytic metadata (convexity, monotone
direction) for callers to assemble grids of known-convex or
similarly-ordered inputs. Nonnegativity is enforced at construction via
family constraints, e.g. recip and negative powers need a > 0.

Class membership checks are sampled. Godunova-Levin, P-function and
s-convex memberships are all expressed as the h-convexity check with
kernels recip, one and pow:s respectively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _programs as prg
from . import backends
from .errors import ConfigurationError, DomainError, SpecParseError
from .kernels import (
    HKernel,
    PropertyReport,
    Sampler,
    VERDICT_NO_VIOLATION,
    VERDICT_VIOLATED,
    Witness,
    _Cursor,
    _first_violation,
)

PROPERTY_HCONVEX = "hconvex"
PROPERTY_SIMILARLY_ORDERED = "similarly_ordered"
PROPERTY_SYMMETRIC = "symmetric_about_midpoint"
PROPERTY_NONNEGATIVE_F = "nonnegative"
PROPERTY_DOMINATES_IDENTITY_F = "dominates_identity_on_interval"

# Convex nonnegative families used by default audit/search grids on
# positive intervals.
BUILTIN_CONVEX_SPECS = (
    "pow:1",
    "pow:2",
    "pow:3",
    "exp:1.0",
    "poly:0.5,1.0,2.0",
    "symquad",
    "recip",
)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    family: str
    params: tuple[float, ...]
    children: tuple["ScalarFunction", ...]
    spec: str
    interval: Interval
    program: prg.Program
    convex: Optional[bool]  # True when convexity is known analytically
    mono: Optional[int]  # 1 nondecreasing, -1 nonincreasing, 0 constant

    def eval_many(self, xs) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        return backends.eval_program_many(self.program.code, self.program.pool, xs)

    def eval(self, x: float) -> float:
        return float(self.eval_many(np.array([x]))[0])

    def __repr__(self):
        return f"ScalarFunction({self.spec!r} on [{self.interval.a}, {self.interval.b}])"


def _fmt(x: float) -> str:
    return repr(float(x))


def _make_pow(n: int, interval: Interval) -> ScalarFunction:
    if n >= 1:
        if n % 2 == 1 and interval.a < 0.0:
            raise DomainError(f"pow:{n} is negative on [{interval.a}, {interval.b}]")
        if n % 2 == 0:
            mono = 1 if interval.a >= 0.0 else (-1 if interval.b <= 0.0 else None)
        else:
            mono = 1
        convex = True
    else:
        if interval.a <= 0.0:
            raise DomainError(f"pow:{n} needs a > 0, got a = {interval.a}")
        mono = -1  # negative powers decrease on x > 0
        convex = True
    return ScalarFunction("pow", (float(n),), (), f"pow:{n}", interval,
                          prg.powc(float(n)), convex, mono)


def _make_poly(coeffs, interval: Interval) -> ScalarFunction:
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise SpecParseError("poly needs at least one coefficient")
    if any(c < 0.0 for c in coeffs):
        raise DomainError(f"poly coefficients must be nonnegative, got {coeffs}")
    nontrivial = any(c > 0.0 for c in coeffs[1:])
    if nontrivial and interval.a < 0.0:
        raise DomainError("poly with positive-degree terms needs a >= 0")
    spec = "poly:" + ",".join(_fmt(c) for c in coeffs)
    mono = 1 if nontrivial else 0
    return ScalarFunction("poly", tuple(coeffs), (), spec, interval,
                          prg.poly(coeffs), True, mono)


def _combine_mono(mf: Optional[int], mg: Optional[int]) -> Optional[int]:
    if mf is None or mg is None:
        return None
    if mf == 0:
        return mg
    if mg == 0:
        return mf
    return mf if mf == mg else None


def _make_prod(f: ScalarFunction, g: ScalarFunction, interval: Interval) -> ScalarFunction:
    mono = _combine_mono(f.mono, g.mono)
    if f.mono == 0:
        convex = g.convex
    elif g.mono == 0:
        convex = f.convex
    elif f.convex and g.convex and mono is not None:
        # product of nonnegative convex functions monotone in the same
        # direction is convex
        convex = True
    else:
        convex = None
    return ScalarFunction("prod", (), (f, g), f"prod:{f.spec},{g.spec}", interval,
                          prg.product(f.program, g.program), convex, mono)


def _parse_function(cur: _Cursor, interval: Interval) -> ScalarFunction:
    tok = cur.take_token()
    if tok == "pow":
        cur.expect(":")
        n = cur.number()
        if n != int(n) or abs(int(n)) < 1:
            raise DomainError(f"pow function needs an integer exponent with |n| >= 1, got {n}")
        return _make_pow(int(n), interval)
    if tok == "exp":
        cur.expect(":")
        c = cur.number()
        mono = 0 if c == 0.0 else (1 if c > 0.0 else -1)
        return ScalarFunction("exp", (c,), (), f"exp:{_fmt(c)}", interval,
                              prg.expc(c), True, mono)
    if tok == "poly":
        cur.expect(":")
        coeffs = [cur.number()]
        while cur.pos < len(cur.text) and cur.text[cur.pos] == ",":
            mark = cur.pos
            cur.pos += 1
            nxt = cur.peek_token()
            try:
                float(nxt)
            except ValueError:
                cur.pos = mark  # the comma belongs to an enclosing prod
                break
            coeffs.append(cur.number())
        return _make_poly(coeffs, interval)
    if tok == "recip":
        if interval.a <= 0.0:
            raise DomainError(f"recip needs a > 0, got a = {interval.a}")
        return ScalarFunction("recip", (), (), "recip", interval,
                              prg.powc(-1.0), True, -1)
    if tok == "symquad":
        m = interval.mid
        return ScalarFunction("symquad", (m,), (), "symquad", interval,
                              prg.sqdev(m), True, None)
    if tok == "prod":
        cur.expect(":")
        f = _parse_function(cur, interval)
        cur.expect(",")
        g = _parse_function(cur, interval)
        return _make_prod(f, g, interval)
    raise SpecParseError(f"unknown function token {tok!r} in {cur.text!r}")


def make_function(spec: str, interval: Interval) -> ScalarFunction:
    """Parse a function spec string, binding it to its interval."""
    cur = _Cursor(spec.strip())
    fn = _parse_function(cur, interval)
    if cur.pos != len(cur.text):
        raise SpecParseError(
            f"trailing input {cur.text[cur.pos:]!r} after function spec in {spec!r}"
        )
    return fn


def _sample_interval_points(rng, interval: Interval, n: int) -> np.ndarray:
    probes = np.array([interval.a, interval.b, interval.mid,
                       interval.a + 0.25 * interval.width,
                       interval.a + 0.75 * interval.width])
    draws = interval.a + interval.width * rng.random(n)
    return np.concatenate([probes, draws])


def _sample_pairs(rng, interval: Interval, n: int):
    px = np.array([interval.a, interval.b, interval.a, interval.mid])
    py = np.array([interval.b, interval.a, interval.mid, interval.b])
    xs = interval.a + interval.width * rng.random(n)
    ys = interval.a + interval.width * rng.random(n)
    return np.concatenate([px, xs]), np.concatenate([py, ys])


def _open_unit(rng, n: int) -> np.ndarray:
    """Draws from the open interval (0, 1)."""
    t = rng.random(n)
    return np.clip(t, 1e-12, 1.0 - 1e-12)


def check_class(property_id: str, f: ScalarFunction,
                g: Optional[ScalarFunction] = None,
                h: Optional[HKernel] = None,
                interval: Optional[Interval] = None,
                sampler: Sampler = Sampler()) -> PropertyReport:
    """Sampled membership / relation check for test functions."""
    if sampler.samples < 1:
        raise ConfigurationError("sampler needs at least one sample")
    iv = interval if interval is not None else f.interval
    rng = sampler.rng()

    if property_id == PROPERTY_HCONVEX:
        if h is None:
            raise ConfigurationError("hconvex check needs a kernel h")
        xs, ys = _sample_pairs(rng, iv, sampler.samples)
        n_probe = xs.size - sampler.samples
        t_probe = np.array([0.5, 0.25, 0.75, 0.99])[:n_probe]
        ts = np.concatenate([t_probe, _open_unit(rng, sampler.samples)])
        mix = ts * xs + (1.0 - ts) * ys
        lhs = f.eval_many(mix)
        rhs = h.eval_many(ts) * f.eval_many(xs) + h.eval_many(1.0 - ts) * f.eval_many(ys)
        witness = _first_violation((xs, ys, ts), lhs, rhs, lhs - rhs)
        n = xs.size
    elif property_id == PROPERTY_SIMILARLY_ORDERED:
        if g is None:
            raise ConfigurationError("similarly_ordered check needs a second function g")
        xs, ys = _sample_pairs(rng, iv, sampler.samples)
        prod = (f.eval_many(xs) - f.eval_many(ys)) * (g.eval_many(xs) - g.eval_many(ys))
        witness = _first_violation((xs, ys), prod, np.zeros_like(prod), -prod)
        n = xs.size
    elif property_id == PROPERTY_SYMMETRIC:
        xs = _sample_interval_points(rng, iv, sampler.samples)
        lhs = f.eval_many(xs)
        rhs = f.eval_many(iv.a + iv.b - xs)
        gap = np.abs(lhs - rhs)
        tol = 1e-12 * (1.0 + np.abs(lhs))
        mask = gap > tol
        witness = None
        if mask.any():
            i = int(np.argmax(mask))
            witness = Witness((float(xs[i]),), float(lhs[i]), float(rhs[i]))
        n = xs.size
    elif property_id == PROPERTY_NONNEGATIVE_F:
        xs = _sample_interval_points(rng, iv, sampler.samples)
        vals = f.eval_many(xs)
        witness = _first_violation((xs,), vals, np.zeros_like(vals), -vals)
        n = xs.size
    elif property_id == PROPERTY_DOMINATES_IDENTITY_F:
        xs = _sample_interval_points(rng, iv, sampler.samples)
        vals = f.eval_many(xs)
        witness = _first_violation((xs,), vals, xs, xs - vals)
        n = xs.size
    else:
        raise ConfigurationError(f"unknown function property {property_id!r}")

    verdict = VERDICT_VIOLATED if witness is not None else VERDICT_NO_VIOLATION
    return PropertyReport(property_id, int(n), verdict, witness, sampler.seed)
