"""Adaptive integration, the Euler Beta function, and kernel moments.

Integration uses a 15-point Kronrod rule with globally adaptive
bisection (worst interval first, depth cap 60). Program-backed
integrands (kernels, test functions, products of test functions) run on
the selected backend; plain Python callables run through an equivalent
pure-Python driver, which doubles as an independent oracle path.

The five kernel moments are the unit-interval integrals of h(t^2),
h(t(1-t)), h((1-t)^2), h(t) and h(1-t). Divergent moments (reciprocal
kernel and friends) are detected from the kernel's endpoint exponent
metadata before any integration is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _programs as prg
from . import backends
from .backends import _gk_nodes
from .errors import ConvergenceError, DivergentMomentError, DomainError, EvaluationError
from .functions import Interval, ScalarFunction
from .kernels import HKernel

MAX_DEPTH = 60
MAX_INTERVALS = 2048

MOMENT_KINDS = ("m_sq", "m_cross", "m_compsq", "m_lin", "m_comp")
_MOMENT_TRANSFORM = {
    "m_sq": prg.TR_SQ,
    "m_cross": prg.TR_CROSS,
    "m_compsq": prg.TR_COMPSQ,
    "m_lin": prg.TR_NONE,
    "m_comp": prg.TR_COMP,
}
# Divergence thresholds on the kernel's power-law exponent at 0+.
_MOMENT_MIN_SIGMA = {
    "m_sq": -0.5,
    "m_cross": -1.0,
    "m_compsq": -0.5,
    "m_lin": -1.0,
    "m_comp": -1.0,
}

_moment_cache: dict[tuple[str, str, float], "QuadratureResult"] = {}


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class HMoments:
    m_sq: QuadratureResult
    m_cross: QuadratureResult
    m_compsq: QuadratureResult
    m_lin: QuadratureResult
    m_comp: QuadratureResult


def _finish(value, err, neval, status, bad_x, what):
    if status == backends.STATUS_NON_FINITE:
        raise EvaluationError(f"non-finite value of {what} at x = {bad_x}", at=bad_x)
    if status == backends.STATUS_NO_CONVERGENCE:
        raise ConvergenceError(
            f"integration of {what} hit the subdivision limit "
            f"(best estimate {value} +/- {err})",
            best_value=value, best_error=err,
        )
    return QuadratureResult(float(value), float(err), int(neval))


def _integrate_program(program: prg.Program, a, b, tol, transform=prg.TR_NONE,
                       what="integrand") -> QuadratureResult:
    out = backends.gk_adaptive(program.code, program.pool, float(a), float(b),
                               float(tol), transform, MAX_DEPTH, MAX_INTERVALS)
    return _finish(*out, what)


def _gk15_callable(f, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = center + half * _gk_nodes.NODES
    fv = np.asarray(f(xs), dtype=np.float64)
    bad = ~np.isfinite(fv)
    if bad.any():
        return 0.0, 0.0, 0.0, False, float(xs[np.argmax(bad)])
    resk = float(np.sum(_gk_nodes.WEIGHTS_K * fv))
    resg = float(np.sum(_gk_nodes.WEIGHTS_G * fv))
    resabs = float(np.sum(_gk_nodes.WEIGHTS_K * np.abs(fv)))
    resasc = float(np.sum(_gk_nodes.WEIGHTS_K * np.abs(fv - 0.5 * resk)))
    dh = abs(half)
    value = resk * half
    resabs *= dh
    resasc *= dh
    err = abs((resk - resg) * half)
    eps = np.finfo(np.float64).eps
    if resasc != 0.0 and err != 0.0:
        scaled = (200.0 * err / resasc) ** 1.5
        err = resasc * scaled if scaled < 1.0 else resasc
    if resabs > np.finfo(np.float64).tiny / (50.0 * eps):
        err = max(err, 50.0 * eps * resabs)
    return value, err, resabs, True, 0.0


def _integrate_callable(f, a, b, tol, what="integrand") -> QuadratureResult:
    """Worst-first adaptive driver for vectorized Python callables."""
    eps = np.finfo(np.float64).eps
    v0, e0, resabs0, ok, bad = _gk15_callable(f, a, b)
    if not ok:
        return _finish(0.0, 0.0, 15, backends.STATUS_NON_FINITE, bad, what)
    segs = [[a, b, v0, e0, 0]]
    neval = 15
    tol_eff = max(tol, 50.0 * eps * resabs0)
    status = backends.STATUS_OK
    while sum(s[3] for s in segs) > tol_eff:
        worst, werr = -1, -1.0
        for i, s in enumerate(segs):
            mid = 0.5 * (s[0] + s[1])
            if s[3] > werr and s[4] < MAX_DEPTH and s[0] < mid < s[1]:
                worst, werr = i, s[3]
        if worst < 0 or len(segs) >= MAX_INTERVALS:
            status = backends.STATUS_NO_CONVERGENCE
            break
        lo, hi, _, _, d = segs[worst]
        mid = 0.5 * (lo + hi)
        vl, el, _, okl, badl = _gk15_callable(f, lo, mid)
        if not okl:
            return _finish(0.0, 0.0, neval + 15, backends.STATUS_NON_FINITE, badl, what)
        vr, er, _, okr, badr = _gk15_callable(f, mid, hi)
        if not okr:
            return _finish(0.0, 0.0, neval + 30, backends.STATUS_NON_FINITE, badr, what)
        neval += 30
        segs[worst] = [lo, mid, vl, el, d + 1]
        segs.append([mid, hi, vr, er, d + 1])
    value = sum(s[2] for s in segs)
    err = sum(s[3] for s in segs)
    return _finish(value, err, neval, status, 0.0, what)


def _has_singular_family(f: ScalarFunction) -> bool:
    if f.family == "recip":
        return True
    if f.family == "pow" and f.params[0] < 0:
        return True
    return any(_has_singular_family(ch) for ch in f.children)


def integrate(f, interval: Interval, tol: float) -> QuadratureResult:
    """Integrate f over the interval to absolute tolerance tol.

    f may be a ScalarFunction, an HKernel (integrated in its argument),
    or a vectorized Python callable.
    """
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    a, b = interval.a, interval.b
    if isinstance(f, ScalarFunction):
        if _has_singular_family(f) and a <= 0.0:
            raise DomainError(f"{f.spec} is singular at 0; needs a > 0")
        return _integrate_program(f.program, a, b, tol, what=f.spec)
    if isinstance(f, HKernel):
        if a < 0.0 or (f.sigma0 < 0.0 and a <= 0.0):
            raise DomainError(f"kernel {f.spec} integrand needs a {'>' if f.sigma0 < 0 else '>='} 0")
        return _integrate_program(f.program, a, b, tol, what=f.spec)
    return _integrate_callable(f, a, b, tol)


def integrate_product(f: ScalarFunction, g: ScalarFunction, interval: Interval,
                      tol: float) -> QuadratureResult:
    """Integral of the pointwise product f*g over the interval."""
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if (_has_singular_family(f) or _has_singular_family(g)) and interval.a <= 0.0:
        raise DomainError("product integrand is singular at 0; needs a > 0")
    program = prg.product(f.program, g.program)
    return _integrate_program(program, interval.a, interval.b, tol,
                              what=f"{f.spec}*{g.spec}")


def beta(x: float, y: float) -> float:
    """Euler Beta via log-Gamma; accurate to ~1e-14 relative."""
    if x <= 0.0 or y <= 0.0:
        raise DomainError(f"beta needs positive arguments, got ({x}, {y})")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def beta_integral(x: float, y: float, tol: float = 1e-10) -> QuadratureResult:
    """Quadrature oracle for Beta: the defining integral after t = sin^2(u).

    The substitution removes the endpoint singularities for x, y >= 1/2
    and weakens them otherwise, so the adaptive rule converges well
    within its depth cap.
    """
    if x <= 0.0 or y <= 0.0:
        raise DomainError(f"beta needs positive arguments, got ({x}, {y})")

    def integrand(us):
        s = np.sin(us)
        c = np.cos(us)
        return 2.0 * s ** (2.0 * x - 1.0) * c ** (2.0 * y - 1.0)

    return _integrate_callable(integrand, 0.0, 0.5 * math.pi, tol,
                               what=f"beta({x},{y}) integral")


def _divergent_moments(h: HKernel) -> list[str]:
    return [k for k in MOMENT_KINDS if h.sigma0 <= _MOMENT_MIN_SIGMA[k]]


def moment(h: HKernel, kind: str, tol: float) -> QuadratureResult:
    """One kernel moment with divergence screening and caching."""
    if kind not in MOMENT_KINDS:
        raise DomainError(f"unknown moment kind {kind!r}")
    if h.sigma0 <= _MOMENT_MIN_SIGMA[kind]:
        raise DivergentMomentError(
            f"moment {kind} of kernel {h.spec} diverges "
            f"(endpoint exponent {h.sigma0})", moment=kind)
    key = (h.spec, kind, float(tol))
    hit = _moment_cache.get(key)
    if hit is not None:
        return hit
    res = _integrate_program(h.program, 0.0, 1.0, tol,
                             transform=_MOMENT_TRANSFORM[kind],
                             what=f"{kind}[{h.spec}]")
    _moment_cache[key] = res
    return res


def h_moments(h: HKernel, tol: float) -> HMoments:
    """All five kernel moments; raises if any of them diverges."""
    bad = _divergent_moments(h)
    if bad:
        raise DivergentMomentError(
            f"kernel {h.spec} has divergent moment(s) {', '.join(bad)} "
            f"(endpoint exponent {h.sigma0})", moment=bad[0])
    return HMoments(*(moment(h, k, tol) for k in MOMENT_KINDS))


def cross_moment_beta_forms(s: float, tol: float = 1e-12) -> dict:
    """Adjudicate the Beta form of the cross moment for power kernels.

    Computes the integral of (t(1-t))^s over the unit interval and
    reports its distance to the two candidate closed forms B(s+1, s+1)
    and B(2s+1, 2s+1).
    """
    from .kernels import make_kernel

    res = moment(make_kernel(f"pow:{s}"), "m_cross", tol)
    cand = {"beta(s+1,s+1)": beta(s + 1.0, s + 1.0),
            "beta(2s+1,2s+1)": beta(2.0 * s + 1.0, 2.0 * s + 1.0)}
    gaps = {name: abs(res.value - v) for name, v in cand.items()}
    matches = min(gaps, key=gaps.get)
    return {"integral": res.value, "error_estimate": res.error_estimate,
            "candidates": cand, "gaps": gaps, "matches": matches}
