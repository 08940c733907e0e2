"""Randomized counterexample search with local refinement.

Candidates (f, g, h, a, b) are drawn uniformly from a parametrized
search space, one independent substream per candidate index, so results
are deterministic for a given seed and the minimum margin found can only
deepen as the budget grows. A candidate whose margin dips below the
trigger threshold goes through 100 steps of shrinking coordinate
perturbations to deepen the violation, then must survive confirmation at
a tightened tolerance before it is reported.

In hypothesis-respecting mode candidates are filtered through the
theorem's sampled hypothesis checks before evaluation, and again (with a
larger sample budget) before a counterexample is accepted; a filtered
candidate is discarded, never silently repaired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import engine, means
from .engine import (
    HypothesisEntry,
    STRICTNESS_SCALE,
    VERDICT_VIOLATED,
    check_hypotheses,
    hypothesis_names,
    _run_hypothesis,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    ExhaustionError,
    NonEvaluableError,
)
from .functions import Interval, make_function
from .kernels import Sampler, make_kernel

REFINE_STEPS = 100
REFINE_TRIGGER = 1e-9  # margin < -(quad_error + trigger) starts refinement

CONFIRMED = "confirmed"
RETRACTED = "retracted"

_PROP_INSTANCE_SPECS = {
    # function/kernel instances the printed derivations plug in
    "PROP301": "pow", "PROP302": "pow", "PROP305": "pow",
    "PROP303": "recip", "PROP304": "recip", "PROP306": "recip",
}


@dataclass(frozen=True)
class SearchSpace:
    function_families: tuple[str, ...] = ("pow", "exp", "poly", "recip", "symquad", "prod")
    kernel_families: tuple[str, ...] = ("id", "one", "pow", "scaled", "max")
    a_range: tuple[float, float] = (0.1, 1.0)
    b_range: tuple[float, float] = (0.5, 3.0)
    pow_n_range: tuple[int, int] = (1, 4)
    exp_c_range: tuple[float, float] = (0.1, 1.5)
    poly_max_degree: int = 3
    poly_coeff_range: tuple[float, float] = (0.0, 2.0)
    kernel_s_range: tuple[float, float] = (0.05, 1.0)
    kernel_scale_range: tuple[float, float] = (0.5, 2.0)
    n_range: tuple[int, int] = (1, 3)
    respect_hypotheses: bool = False
    hypothesis_samples: int = 96

    def __post_init__(self):
        if not self.a_range[0] <= self.a_range[1] or not self.b_range[0] <= self.b_range[1]:
            raise ConfigurationError("degenerate parameter ranges must still have lo <= hi")
        if self.b_range[1] <= self.a_range[0]:
            raise ConfigurationError("interval box admits no a < b")
        needs_positive = ("recip" in self.function_families
                          or self.pow_n_range[0] < 0)
        if needs_positive and self.a_range[0] <= 0.0:
            raise ConfigurationError(
                "function families singular at 0 need a_range above 0")
        if not 0.0 < self.kernel_s_range[0] <= self.kernel_s_range[1] <= 1.0:
            raise ConfigurationError("kernel exponent range must sit in (0, 1]")
        if self.kernel_scale_range[0] <= 0.0:
            raise ConfigurationError("kernel scale range must be positive")
        if self.poly_coeff_range[0] < 0.0:
            raise ConfigurationError("poly coefficients must be nonnegative")

    @property
    def span(self) -> float:
        return self.b_range[1] - self.a_range[0]


@dataclass(frozen=True)
class Candidate:
    f_desc: Optional[tuple]
    g_desc: Optional[tuple]
    h_desc: Optional[tuple]
    a: float
    b: float
    n: Optional[int] = None

    @property
    def interval(self) -> Interval:
        return Interval(self.a, self.b)

    def specs(self) -> dict:
        return {
            "f": _desc_spec(self.f_desc) if self.f_desc else None,
            "g": _desc_spec(self.g_desc) if self.g_desc else None,
            "h": _desc_spec(self.h_desc) if self.h_desc else None,
            "a": self.a, "b": self.b, "n": self.n,
        }


@dataclass(frozen=True)
class CounterExample:
    theorem_id: str
    variant: str
    f_spec: Optional[str]
    g_spec: Optional[str]
    h_spec: Optional[str]
    interval: tuple[float, float]
    lhs: float
    rhs: float
    violation: float
    quad_error: float
    hypothesis_results: tuple[HypothesisEntry, ...]
    n: Optional[int] = None


@dataclass
class SearchStats:
    theorem_id: str
    variant: str
    seed: int
    budget: int
    drawn: int = 0
    filtered_out: int = 0
    evaluated: int = 0
    non_evaluable: int = 0
    refined: int = 0
    retracted: int = 0
    min_margin: float = math.inf
    min_margin_candidate: Optional[dict] = None


@dataclass(frozen=True)
class FalsificationResult:
    counterexample: Optional[CounterExample]
    stats: SearchStats


def _fmt(x: float) -> str:
    return repr(float(x))


def _desc_spec(desc: tuple) -> str:
    kind = desc[0]
    if kind in ("id", "one", "recip", "symquad"):
        return kind
    if kind == "pow":
        v = desc[1]
        return f"pow:{int(v)}" if float(v) == int(v) and isinstance(v, int) else f"pow:{_fmt(v)}"
    if kind == "exp":
        return f"exp:{_fmt(desc[1])}"
    if kind == "poly":
        return "poly:" + ",".join(_fmt(c) for c in desc[1])
    if kind == "scaled":
        return f"scaled:{_fmt(desc[1])},{_desc_spec(desc[2])}"
    if kind == "max":
        return f"max:{_desc_spec(desc[1])},{_desc_spec(desc[2])}"
    if kind == "prod":
        return f"prod:{_desc_spec(desc[1])},{_desc_spec(desc[2])}"
    raise ConfigurationError(f"unknown descriptor {desc!r}")


def _draw_int(rng, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _draw_exponent(rng, lo: int, hi: int) -> int:
    """Integer draw excluding the invalid exponent 0."""
    choices = [n for n in range(lo, hi + 1) if n != 0]
    if not choices:
        raise ConfigurationError(f"exponent range [{lo}, {hi}] admits only 0")
    return choices[_draw_int(rng, 0, len(choices) - 1)]


def _draw_function_desc(rng, space: SearchSpace, allow_prod: bool = True) -> tuple:
    fams = space.function_families
    if not allow_prod:
        fams = tuple(f for f in fams if f != "prod") or ("pow",)
    fam = fams[_draw_int(rng, 0, len(fams) - 1)]
    if fam == "pow":
        return ("pow", _draw_exponent(rng, *space.pow_n_range))
    if fam == "exp":
        return ("exp", float(rng.uniform(*space.exp_c_range)))
    if fam == "poly":
        deg = _draw_int(rng, 0, space.poly_max_degree)
        coeffs = tuple(float(rng.uniform(*space.poly_coeff_range)) for _ in range(deg + 1))
        return ("poly", coeffs)
    if fam in ("recip", "symquad"):
        return (fam,)
    return ("prod", _draw_function_desc(rng, space, allow_prod=False),
            _draw_function_desc(rng, space, allow_prod=False))


def _draw_kernel_desc(rng, space: SearchSpace, allow_compound: bool = True) -> tuple:
    fams = space.kernel_families
    if not allow_compound:
        fams = tuple(f for f in fams if f not in ("scaled", "max")) or ("id",)
    fam = fams[_draw_int(rng, 0, len(fams) - 1)]
    if fam in ("id", "one"):
        return (fam,)
    if fam == "pow":
        return ("pow", float(rng.uniform(*space.kernel_s_range)))
    if fam == "scaled":
        return ("scaled", float(rng.uniform(*space.kernel_scale_range)),
                _draw_kernel_desc(rng, space, allow_compound=False))
    return ("max", _draw_kernel_desc(rng, space, allow_compound=False),
            _draw_kernel_desc(rng, space, allow_compound=False))


def _draw_interval(rng, space: SearchSpace) -> tuple[float, float]:
    gap = 1e-6 * space.span
    for _ in range(64):
        a = float(rng.uniform(*space.a_range))
        b_lo = max(space.b_range[0], a + gap)
        if b_lo <= space.b_range[1]:
            return a, float(rng.uniform(b_lo, space.b_range[1]))
    raise ConfigurationError("interval box rejects every draw with b > a")


def _draw_candidate(rng, theorem_id: str, space: SearchSpace) -> Candidate:
    a, b = _draw_interval(rng, space)
    if theorem_id in engine.PROPOSITION_IDS:
        n = _draw_exponent(rng, *space.n_range)
        return Candidate(None, None, None, a, b, n)
    return Candidate(_draw_function_desc(rng, space),
                     _draw_function_desc(rng, space),
                     _draw_kernel_desc(rng, space), a, b)


def _clip(v, lo, hi):
    return min(max(v, lo), hi)


def _perturb_value(rng, v, lo, hi, scale):
    if hi <= lo:
        return lo
    return _clip(v + (hi - lo) * scale * float(rng.uniform(-1.0, 1.0)), lo, hi)


def _perturb_function_desc(rng, desc, space, scale):
    kind = desc[0]
    if kind == "exp":
        return ("exp", _perturb_value(rng, desc[1], *space.exp_c_range, scale))
    if kind == "poly":
        return ("poly", tuple(_perturb_value(rng, c, *space.poly_coeff_range, scale)
                              for c in desc[1]))
    if kind == "prod":
        return ("prod", _perturb_function_desc(rng, desc[1], space, scale),
                _perturb_function_desc(rng, desc[2], space, scale))
    return desc  # pow (integer), recip, symquad have no real parameters


def _perturb_kernel_desc(rng, desc, space, scale):
    kind = desc[0]
    if kind == "pow":
        return ("pow", _perturb_value(rng, desc[1], *space.kernel_s_range, scale))
    if kind == "scaled":
        return ("scaled", _perturb_value(rng, desc[1], *space.kernel_scale_range, scale),
                _perturb_kernel_desc(rng, desc[2], space, scale))
    if kind == "max":
        return ("max", _perturb_kernel_desc(rng, desc[1], space, scale),
                _perturb_kernel_desc(rng, desc[2], space, scale))
    return desc


def _perturb_candidate(rng, cand: Candidate, space: SearchSpace, scale: float) -> Candidate:
    gap = 1e-6 * space.span
    a = _perturb_value(rng, cand.a, *space.a_range, scale)
    b = _perturb_value(rng, cand.b, *space.b_range, scale)
    if b <= a + gap:
        b = _clip(a + gap, space.b_range[0], space.b_range[1])
        if b <= a:
            a, b = cand.a, cand.b
    new = replace(cand, a=a, b=b)
    if cand.f_desc is not None:
        new = replace(new,
                      f_desc=_perturb_function_desc(rng, cand.f_desc, space, scale),
                      g_desc=_perturb_function_desc(rng, cand.g_desc, space, scale),
                      h_desc=_perturb_kernel_desc(rng, cand.h_desc, space, scale))
    return new


def _materialize(cand: Candidate):
    iv = cand.interval
    f = make_function(_desc_spec(cand.f_desc), iv)
    g = make_function(_desc_spec(cand.g_desc), iv)
    h = make_kernel(_desc_spec(cand.h_desc))
    return f, g, h, iv


def _evaluate_candidate(theorem_id: str, variant: str, cand: Candidate, tol: float):
    """Inequality report for the candidate, or None when not evaluable."""
    try:
        if theorem_id in engine.PROPOSITION_IDS:
            rep = means.verify_proposition(theorem_id, cand.a, cand.b, cand.n)
        else:
            f, g, h, iv = _materialize(cand)
            rep = engine.evaluate(theorem_id, variant, f, g, h, iv, tol, sampler=None)
    except (NonEvaluableError, DomainError, ConvergenceError, EvaluationError):
        return None
    return rep


def _sub_seed(seed: int, index: int, tag: int) -> int:
    return int(np.random.SeedSequence((seed, index, tag)).generate_state(1)[0])


def _hypotheses_ok(theorem_id: str, cand: Candidate, seed: int, samples: int) -> bool:
    try:
        f, g, h, iv = _materialize(cand)
    except DomainError:
        return False
    sampler = Sampler(seed=seed, samples=samples)
    for name, _proof_only in hypothesis_names(theorem_id):
        if _run_hypothesis(name, f, g, h, iv, sampler).verdict == VERDICT_VIOLATED:
            return False
    return True


def confirm(candidate: CounterExample, tol: float) -> str:
    """Re-evaluate a candidate from its specs at a tightened tolerance."""
    theorem_id = candidate.theorem_id
    a, b = candidate.interval
    if theorem_id in engine.PROPOSITION_IDS:
        rep = means.verify_proposition(theorem_id, a, b, candidate.n)
    else:
        iv = Interval(a, b)
        f = make_function(candidate.f_spec, iv)
        g = make_function(candidate.g_spec, iv)
        h = make_kernel(candidate.h_spec)
        rep = engine.evaluate(theorem_id, candidate.variant, f, g, h, iv, tol,
                              sampler=None)
    violation = rep.lhs - rep.rhs
    strict = STRICTNESS_SCALE * (1.0 + abs(rep.lhs) + abs(rep.rhs))
    return CONFIRMED if violation > rep.quad_error + strict else RETRACTED


def _build_counterexample(theorem_id, variant, cand, rep, hyp_seed,
                          hyp_samples) -> CounterExample:
    specs = cand.specs()
    hyps: tuple[HypothesisEntry, ...] = ()
    if theorem_id in engine.PROPOSITION_IDS:
        # annotate with the function/kernel instance the printed
        # derivation plugs into the parent inequality
        fam = _PROP_INSTANCE_SPECS[theorem_id]
        inst = f"pow:{cand.n}" if fam == "pow" else "recip"
        specs = dict(specs, f=inst, g=inst, h="id")
    else:
        f, g, h, iv = _materialize(cand)
        hyps = check_hypotheses(theorem_id, f, g, h, iv,
                                Sampler(seed=hyp_seed, samples=hyp_samples)).entries
    return CounterExample(theorem_id, variant, specs["f"], specs["g"], specs["h"],
                          (cand.a, cand.b), rep.lhs, rep.rhs, rep.lhs - rep.rhs,
                          rep.quad_error, hyps, cand.n)


def falsify(theorem_id: str, variant: str, space: SearchSpace, budget: int,
            seed: int, tol: float = 1e-8,
            confirm_tol: float = 1e-11) -> FalsificationResult:
    """Search the space for a confirmed violation of one inequality."""
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    if seed < 0:
        raise ConfigurationError("seed must be nonnegative")
    if theorem_id not in engine.THEOREM_IDS + engine.PROPOSITION_IDS:
        raise ConfigurationError(f"unknown theorem id {theorem_id!r}")
    if theorem_id not in engine.PROPOSITION_IDS:
        engine._validate_variant(theorem_id, variant)
    is_prop = theorem_id in engine.PROPOSITION_IDS

    stats = SearchStats(theorem_id, variant, seed, budget)
    for index in range(budget):
        rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
        cand = _draw_candidate(rng, theorem_id, space)
        stats.drawn += 1

        if space.respect_hypotheses and not is_prop:
            if not _hypotheses_ok(theorem_id, cand, _sub_seed(seed, index, 1),
                                  space.hypothesis_samples):
                stats.filtered_out += 1
                continue

        rep = _evaluate_candidate(theorem_id, variant, cand, tol)
        if rep is None:
            stats.non_evaluable += 1
            continue
        stats.evaluated += 1
        if rep.margin < stats.min_margin:
            stats.min_margin = rep.margin
            stats.min_margin_candidate = cand.specs()

        if rep.margin >= -(rep.quad_error + REFINE_TRIGGER):
            continue

        # Violation candidate: deepen it, re-filter, confirm.
        stats.refined += 1
        refine_rng = np.random.default_rng(np.random.SeedSequence((seed, index, 2)))
        best, best_rep = cand, rep
        for step in range(REFINE_STEPS):
            scale = 0.25 * 0.5 ** (step / 12.0)
            prop_cand = _perturb_candidate(refine_rng, best, space, scale)
            prop_rep = _evaluate_candidate(theorem_id, variant, prop_cand, tol)
            if prop_rep is not None and prop_rep.margin < best_rep.margin:
                best, best_rep = prop_cand, prop_rep
        if space.respect_hypotheses and not is_prop:
            if not _hypotheses_ok(theorem_id, best, _sub_seed(seed, index, 3),
                                  4 * space.hypothesis_samples):
                best, best_rep = cand, rep  # keep the filtered original
                if not _hypotheses_ok(theorem_id, best, _sub_seed(seed, index, 4),
                                      4 * space.hypothesis_samples):
                    stats.retracted += 1
                    continue
        ce = _build_counterexample(theorem_id, variant, best, best_rep,
                                   _sub_seed(seed, index, 5), 256)
        if confirm(ce, confirm_tol) == CONFIRMED:
            if best_rep.margin < stats.min_margin:
                stats.min_margin = best_rep.margin
                stats.min_margin_candidate = best.specs()
            return FalsificationResult(ce, stats)
        stats.retracted += 1

    if (space.respect_hypotheses and not is_prop and stats.evaluated == 0
            and stats.drawn > 0):
        raise ExhaustionError(
            f"hypothesis filtering discarded all {stats.drawn} candidates "
            f"for {theorem_id}", stats=stats)
    return FalsificationResult(None, stats)
