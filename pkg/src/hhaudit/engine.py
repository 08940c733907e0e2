"""Evaluation of both sides of each audited inequality.

Each theorem id names one printed inequality over a pair of nonnegative
functions f, g, a kernel h and an interval [a, b]. The evaluator
computes lhs, rhs, their margin (rhs - lhs), folds every integral's
error estimate into quad_error, and classifies:

    satisfied     margin >= -quad_error
    violated      margin <  -quad_error - strictness
    inconclusive  in between

A few inequalities exist in two variants: "stated" is the form exactly
as printed, "derived" is the form the printed derivation actually
supports. Hypothesis checks annotate reports; they never gate
evaluation, since a satisfied conclusion under failed hypotheses (or
the reverse) is exactly the audit signal of interest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError, DivergentMomentError, DomainError, NonEvaluableError
from .functions import (
    Interval,
    PROPERTY_DOMINATES_IDENTITY_F,
    PROPERTY_HCONVEX,
    PROPERTY_SIMILARLY_ORDERED,
    PROPERTY_SYMMETRIC,
    ScalarFunction,
    check_class,
)
from .kernels import (
    HKernel,
    PROPERTY_DOMINATES_IDENTITY,
    PROPERTY_NONNEGATIVE,
    PROPERTY_SUPERADDITIVE,
    PROPERTY_SUPERMULTIPLICATIVE,
    PropertyReport,
    Sampler,
    kernel_properties,
)
from .quadrature import beta, integrate, integrate_product, moment

THEOREM_IDS = ("HADAMARD", "TH1", "TH2", "TH3", "TH4", "TH5", "TH6")
PROPOSITION_IDS = tuple(f"PROP{n}" for n in range(301, 307))

VARIANT_STATED = "stated"
VARIANT_DERIVED = "derived"

VERDICT_SATISFIED = "satisfied"
VERDICT_VIOLATED = "violated"
VERDICT_INCONCLUSIVE = "inconclusive"

# A violation must beat the integration error by more than this scaled
# slack, so it can never be an artifact of quadrature.
STRICTNESS_SCALE = 1e-10

_MOMENT_NEEDS = {
    "HADAMARD": (),
    "TH1": ("m_cross", "m_sq", "m_compsq"),
    "TH2": ("m_lin", "m_comp"),
    "TH3": ("m_lin", "m_comp"),
    "TH4": ("m_lin", "m_comp"),
    "TH5": ("m_sq", "m_cross", "m_compsq"),
    "TH6": ("m_sq", "m_cross", "m_compsq"),
}


@dataclass(frozen=True)
class EndpointProducts:
    M: float  # f(a)g(a) + f(b)g(b)
    N: float  # f(a)g(b) + f(b)g(a)


@dataclass(frozen=True)
class HypothesisEntry:
    name: str
    report: PropertyReport
    proof_only: bool = False


@dataclass(frozen=True)
class HypothesisReport:
    theorem_id: str
    entries: tuple[HypothesisEntry, ...]

    def all_pass(self, include_proof_only: bool = True) -> bool:
        return all(e.report.verdict == "no_violation_found"
                   for e in self.entries
                   if include_proof_only or not e.proof_only)


@dataclass(frozen=True)
class InequalityReport:
    theorem_id: str
    variant: str
    hypothesis_results: tuple[HypothesisEntry, ...]
    lhs: float
    rhs: float
    margin: float
    quad_error: float
    verdict: str
    details: dict


def classify(lhs: float, rhs: float, margin: float, quad_error: float) -> str:
    strict = STRICTNESS_SCALE * (1.0 + abs(lhs) + abs(rhs))
    if margin >= -quad_error:
        return VERDICT_SATISFIED
    if margin < -quad_error - strict:
        return VERDICT_VIOLATED
    return VERDICT_INCONCLUSIVE


def endpoint_products(f: ScalarFunction, g: ScalarFunction,
                      interval: Interval) -> EndpointProducts:
    fa, fb = f.eval(interval.a), f.eval(interval.b)
    ga, gb = g.eval(interval.a), g.eval(interval.b)
    return EndpointProducts(fa * ga + fb * gb, fa * gb + fb * ga)


def _require_contains(fn: ScalarFunction, interval: Interval):
    own = fn.interval
    if interval.a < own.a or interval.b > own.b:
        raise DomainError(
            f"evaluation interval [{interval.a}, {interval.b}] is outside the "
            f"declared domain [{own.a}, {own.b}] of {fn.spec}"
        )


def _moments(theorem_id: str, h: HKernel, tol: float) -> dict:
    try:
        return {k: moment(h, k, tol) for k in _MOMENT_NEEDS[theorem_id]}
    except DivergentMomentError as exc:
        raise NonEvaluableError(
            f"{theorem_id} is not evaluable for kernel {h.spec}: "
            f"moment {exc.moment} diverges",
            theorem_id=theorem_id, moment=exc.moment,
        ) from exc


def _validate_variant(theorem_id: str, variant: str):
    if variant not in (VARIANT_STATED, VARIANT_DERIVED):
        raise ConfigurationError(f"unknown variant {variant!r}")
    if variant == VARIANT_DERIVED and theorem_id not in ("TH1", "TH4"):
        raise ConfigurationError(
            f"{theorem_id} has no derived variant; only TH1 and TH4 do")


def evaluate(theorem_id: str, variant: str, f: ScalarFunction,
             g: Optional[ScalarFunction], h: Optional[HKernel],
             interval: Interval, tol: float,
             sampler: Optional[Sampler] = Sampler(seed=0, samples=256)) -> InequalityReport:
    """Evaluate one inequality; attach hypothesis results when a sampler is given."""
    if theorem_id in PROPOSITION_IDS:
        raise ConfigurationError(
            f"{theorem_id} is a special-means proposition; use means.verify_proposition")
    if theorem_id not in THEOREM_IDS:
        raise ConfigurationError(f"unknown theorem id {theorem_id!r}")
    _validate_variant(theorem_id, variant)
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    _require_contains(f, interval)
    if theorem_id == "HADAMARD":
        g_eff = None
    else:
        if g is None:
            raise ConfigurationError(f"{theorem_id} needs a second function g")
        if h is None:
            raise ConfigurationError(f"{theorem_id} needs a kernel h")
        g_eff = g
        _require_contains(g, interval)

    a, b = interval.a, interval.b
    mids = _moments(theorem_id, h, tol) if theorem_id != "HADAMARD" else {}
    mv = {k: r.value for k, r in mids.items()}
    me = {k: r.error_estimate for k, r in mids.items()}
    details: dict = {}

    if theorem_id == "HADAMARD":
        mid_val = f.eval(interval.mid)
        ires = integrate(f, interval, tol)
        integral_mean = ires.value / interval.width
        err = ires.error_estimate / interval.width
        end_mean = 0.5 * (f.eval(a) + f.eval(b))
        margin_lower = integral_mean - mid_val
        margin_upper = end_mean - integral_mean
        if margin_lower <= margin_upper:
            lhs, rhs, margin = mid_val, integral_mean, margin_lower
        else:
            lhs, rhs, margin = integral_mean, end_mean, margin_upper
        quad_error = err
        details = {"midpoint_value": mid_val, "integral_mean": integral_mean,
                   "endpoint_mean": end_mean, "margin_lower": margin_lower,
                   "margin_upper": margin_upper}
    else:
        fa, fb = f.eval(a), f.eval(b)
        ga, gb = g_eff.eval(a), g_eff.eval(b)
        fga, fgb = fa * ga, fb * gb
        ep = EndpointProducts(fa * ga + fb * gb, fa * gb + fb * ga)
        details["M"] = ep.M
        details["N"] = ep.N

        if theorem_id == "TH1":
            if variant == VARIANT_STATED:
                ca, cb = (2 * a + 3 * b) / 6.0, (3 * a + 2 * b) / 6.0
            else:
                ca, cb = (2 * a + b) / 6.0, (a + 2 * b) / 6.0
            lhs = ca * (fa + ga) + cb * (fb + gb)
            ires = integrate_product(f, g_eff, interval, tol)
            integral_mean = ires.value / interval.width
            lerr = ires.error_estimate / interval.width
            rhs = (integral_mean + fga * (mv["m_cross"] + mv["m_sq"])
                   + fgb * (mv["m_cross"] + mv["m_compsq"]))
            quad_error = (lerr + abs(fga) * (me["m_cross"] + me["m_sq"])
                          + abs(fgb) * (me["m_cross"] + me["m_compsq"]))
            details["product_integral_mean"] = integral_mean
        elif theorem_id in ("TH2", "TH3"):
            if theorem_id == "TH2":
                lhs = ep.M / 6.0 + ep.N / 3.0
            else:
                lhs = ep.M / 3.0 + ep.N / 6.0
            rhs = h.h1 * (fga * mv["m_lin"] + fgb * mv["m_comp"])
            quad_error = abs(h.h1) * (abs(fga) * me["m_lin"] + abs(fgb) * me["m_comp"])
        elif theorem_id == "TH4":
            f_mid = f.eval(interval.mid)
            g_mid = g_eff.eval(interval.mid)
            bracket = f_mid * (ga + gb) / 2.0 + g_mid * (fa + fb) / 2.0
            lhs = bracket * (mv["m_lin"] + mv["m_comp"])
            fg_mid = f_mid * g_mid
            if variant == VARIANT_STATED:
                rhs = fg_mid + h.h1 ** 2 * (ep.M + ep.N)
            else:
                rhs = fg_mid + h.h1 ** 2 * (ep.M + ep.N) / 4.0
            quad_error = abs(bracket) * (me["m_lin"] + me["m_comp"])
            details["midpoint_product"] = fg_mid
        elif theorem_id == "TH5":
            fg_mid = f.eval(interval.mid) * g_eff.eval(interval.mid)
            bracket = mv["m_sq"] + 2.0 * mv["m_cross"] + mv["m_compsq"]
            # product form: both sides of the printed inequality are
            # multiplied by M, which keeps M = 0 evaluable
            lhs = 2.0 * fg_mid
            rhs = ep.M * bracket
            quad_error = abs(ep.M) * (me["m_sq"] + 2.0 * me["m_cross"] + me["m_compsq"])
            details["midpoint_product"] = fg_mid
            details["moment_bracket"] = bracket
        else:  # TH6
            ires = integrate_product(f, g_eff, interval, tol)
            integral_mean = ires.value / interval.width
            lerr = ires.error_estimate / interval.width
            bracket = mv["m_sq"] + 2.0 * mv["m_cross"] + mv["m_compsq"]
            lhs = integral_mean
            rhs = (ep.M + ep.N) / 4.0 * bracket
            quad_error = (lerr + abs(ep.M + ep.N) / 4.0
                          * (me["m_sq"] + 2.0 * me["m_cross"] + me["m_compsq"]))
            details["moment_bracket"] = bracket

        margin = rhs - lhs

    hyps: tuple[HypothesisEntry, ...] = ()
    if sampler is not None:
        hyps = check_hypotheses(theorem_id, f, g_eff, h, interval, sampler).entries

    verdict = classify(lhs, rhs, margin, quad_error)
    return InequalityReport(theorem_id, variant, hyps, float(lhs), float(rhs),
                            float(margin), float(quad_error), verdict, details)


_KERNEL_HYPS = {
    PROPERTY_SUPERMULTIPLICATIVE: "supermultiplicative_h",
    PROPERTY_SUPERADDITIVE: "superadditive_h",
    PROPERTY_NONNEGATIVE: "nonnegative_h",
    PROPERTY_DOMINATES_IDENTITY: "h_dominates_identity",
}


def hypothesis_names(theorem_id: str) -> tuple[tuple[str, bool], ...]:
    """(name, proof_only) pairs for each hypothesis of a theorem."""
    if theorem_id == "HADAMARD":
        return (("convex_f", False),)
    if theorem_id == "TH1":
        return (("hconvex_f", False), ("hconvex_g", False),
                ("supermultiplicative_h", False), ("similarly_ordered", False),
                ("f_dominates_identity", False), ("g_dominates_identity", False),
                ("h_dominates_identity", False))
    if theorem_id in ("TH2", "TH3"):
        return (("hconvex_f", False), ("hconvex_g", False),
                ("superadditive_h", False), ("nonnegative_h", False),
                ("h_dominates_identity", False), ("similarly_ordered", False))
    if theorem_id == "TH4":
        return (("hconvex_f", False), ("hconvex_g", False),
                ("superadditive_h", False))
    if theorem_id == "TH5":
        return (("hconvex_f", False), ("hconvex_g", False),
                ("supermultiplicative_h", False), ("similarly_ordered", True))
    if theorem_id == "TH6":
        return (("hconvex_f", False), ("hconvex_g", False),
                ("supermultiplicative_h", False),
                ("symmetric_f", False), ("symmetric_g", False))
    raise ConfigurationError(f"no hypothesis set for {theorem_id!r}")


def _run_hypothesis(name: str, f, g, h, interval, sampler) -> PropertyReport:
    if name == "convex_f":
        from .kernels import make_kernel
        return check_class(PROPERTY_HCONVEX, f, h=make_kernel("id"),
                           interval=interval, sampler=sampler)
    if name == "hconvex_f":
        return check_class(PROPERTY_HCONVEX, f, h=h, interval=interval, sampler=sampler)
    if name == "hconvex_g":
        return check_class(PROPERTY_HCONVEX, g, h=h, interval=interval, sampler=sampler)
    if name == "similarly_ordered":
        return check_class(PROPERTY_SIMILARLY_ORDERED, f, g=g, interval=interval,
                           sampler=sampler)
    if name == "f_dominates_identity":
        return check_class(PROPERTY_DOMINATES_IDENTITY_F, f, interval=interval,
                           sampler=sampler)
    if name == "g_dominates_identity":
        return check_class(PROPERTY_DOMINATES_IDENTITY_F, g, interval=interval,
                           sampler=sampler)
    if name == "symmetric_f":
        return check_class(PROPERTY_SYMMETRIC, f, interval=interval, sampler=sampler)
    if name == "symmetric_g":
        return check_class(PROPERTY_SYMMETRIC, g, interval=interval, sampler=sampler)
    for prop, hyp_name in _KERNEL_HYPS.items():
        if name == hyp_name:
            return kernel_properties(h, prop, sampler)
    raise ConfigurationError(f"unknown hypothesis {name!r}")


def check_hypotheses(theorem_id: str, f: ScalarFunction,
                     g: Optional[ScalarFunction], h: Optional[HKernel],
                     interval: Interval, sampler: Sampler) -> HypothesisReport:
    """Run the per-theorem hypothesis set; proof-only entries are flagged."""
    entries = []
    for name, proof_only in hypothesis_names(theorem_id):
        report = _run_hypothesis(name, f, g, h, interval, sampler)
        entries.append(HypothesisEntry(name, report, proof_only))
    return HypothesisReport(theorem_id, tuple(entries))


def closed_form_rhs(theorem_id: str, h: HKernel, f: ScalarFunction,
                    g: ScalarFunction, interval: Interval,
                    tol: float = 1e-11) -> float:
    """Printed corollary right-hand side for the specialized kernels.

    Supported pairs: TH1 x {one, id, pow}, TH2/TH3 x {id, pow},
    TH5 x {one, id, pow} (in product form), TH6 x {one, id, pow}.
    Beta arguments follow the moment integrals themselves, which is what
    makes these agree with the evaluator.
    """
    family = h.family
    if family not in ("one", "id", "pow"):
        raise ConfigurationError(
            f"no closed corollary form for kernel family {family!r}")
    s = h.params[0] if family == "pow" else None
    ep = endpoint_products(f, g, interval)
    M, N = ep.M, ep.N

    if theorem_id == "TH1":
        integral_mean = integrate_product(f, g, interval, tol).value / interval.width
        if family == "one":
            return integral_mean + 2.0 * M
        if family == "id":
            return integral_mean + M / 2.0
        return integral_mean + M * (beta(s + 1.0, s + 1.0) + beta(2.0 * s + 1.0, 1.0))
    if theorem_id in ("TH2", "TH3"):
        if family == "id":
            return M / 2.0
        if family == "pow":
            return M / (s + 1.0)
        raise ConfigurationError(f"no closed corollary form for ({theorem_id}, one)")
    if theorem_id == "TH5":
        if family == "one":
            return 4.0 * M
        if family == "id":
            return M
        return 2.0 * M * (beta(2.0 * s + 1.0, 1.0) + beta(s + 1.0, s + 1.0))
    if theorem_id == "TH6":
        if family == "one":
            return M + N
        if family == "id":
            return (M + N) / 4.0
        return (M + N) / 2.0 * (beta(2.0 * s + 1.0, 1.0) + beta(s + 1.0, s + 1.0))
    raise ConfigurationError(f"no closed corollary forms for {theorem_id!r}")
