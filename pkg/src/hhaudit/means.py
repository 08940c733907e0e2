"""Special means, the classical means chain, and its printed corollaries.

Implements the arithmetic (A), geometric (G), quadratic (K), harmonic
(H), logarithmic (L), identric (I) and p-logarithmic (Lp) means of two
positive numbers. H, L and I follow the standard textbook definitions.
Lp uses its printed power-mean formula away from the removable points
p in {-1, 0}, where it resolves to L and I; L1 coincides with A.

The six special-means corollaries (PROP301..PROP306) are evaluated in
closed form, so their verdicts carry zero integration error. Two of the
printed statements are simply false as printed (PROP303, PROP305) and
the evaluator reports that; it does not repair them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import InequalityReport, VERDICT_SATISFIED, VERDICT_VIOLATED, classify
from .errors import ConfigurationError, DomainError

MEAN_KINDS = ("A", "G", "K", "H", "L", "I", "Lp")
CHAIN_ORDER = ("H", "G", "L", "I", "A", "K")

_LP_SNAP = 1e-8  # width of the removable-point windows around p = -1, 0


@dataclass(frozen=True)
class MeanValue:
    kind: str
    value: float


@dataclass(frozen=True)
class ChainLink:
    lower: str
    upper: str
    margin: float


@dataclass(frozen=True)
class ChainReport:
    a: float
    b: float
    values: dict
    links: tuple[ChainLink, ...]
    verdict: str


def _require_positive(a: float, b: float):
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"means need positive arguments, got ({a}, {b})")


def _log_mean(a: float, b: float) -> float:
    if a == b:
        return a
    return (b - a) / (math.log(b) - math.log(a))


def _identric(a: float, b: float) -> float:
    if a == b:
        return a
    return math.exp((b * math.log(b) - a * math.log(a)) / (b - a) - 1.0)


def _lp_power_excess(a: float, b: float, p: float) -> float:
    """(b^(p+1) - a^(p+1)) / ((p+1)(b-a)) minus one, without cancellation.

    The ratio is L_p(a, b) ** p; writing its excess over 1 via expm1
    keeps full precision in the p -> 0 and p -> -1 limits.
    """
    la, lb = math.log(a), math.log(b)
    d = b * math.expm1(p * lb) - a * math.expm1(p * la) - p * (b - a)
    return d / ((p + 1.0) * (b - a))


def _lp_mean(a: float, b: float, p: float) -> float:
    if a == b:
        return a
    if abs(p) < _LP_SNAP:
        return _identric(a, b)
    if abs(p + 1.0) < _LP_SNAP:
        return _log_mean(a, b)
    return math.exp(math.log1p(_lp_power_excess(a, b, p)) / p)


def mean(kind: str, a: float, b: float, p: float | None = None) -> MeanValue:
    """Evaluate one special mean of a and b."""
    _require_positive(a, b)
    if kind == "A":
        v = 0.5 * (a + b)
    elif kind == "G":
        v = math.sqrt(a * b)
    elif kind == "K":
        v = math.sqrt(0.5 * (a * a + b * b))
    elif kind == "H":
        v = 2.0 * a * b / (a + b)
    elif kind == "L":
        v = _log_mean(a, b)
    elif kind == "I":
        v = _identric(a, b)
    elif kind == "Lp":
        if p is None:
            raise ConfigurationError("Lp mean needs the exponent p")
        v = _lp_mean(a, b, float(p))
    else:
        raise ConfigurationError(f"unknown mean kind {kind!r}")
    return MeanValue(kind, float(v))


def _lp_pow_2n(a: float, b: float, n: int) -> float:
    """L_{2n}(a, b) ** (2n) in its exact rational closed form."""
    p = 2 * n
    return (b ** (p + 1) - a ** (p + 1)) / ((p + 1) * (b - a))


def _validate_prop_args(prop_id: int, a: float, b: float, n):
    _require_positive(a, b)
    if not a < b:
        raise DomainError(f"propositions need 0 < a < b, got ({a}, {b})")
    if prop_id in (301, 302, 304, 305):
        if n is None:
            raise ConfigurationError(f"PROP{prop_id} needs the integer exponent n")
        if n != int(n) or abs(int(n)) < 1:
            raise DomainError(f"n must be a nonzero integer, got {n}")
        return int(n)
    return None  # PROP303 and PROP306 do not use n


def verify_proposition(prop_id: int, a: float, b: float,
                       n: int | None = None) -> InequalityReport:
    """Evaluate one special-means corollary in closed form."""
    if isinstance(prop_id, str) and prop_id.startswith("PROP"):
        prop_id = int(prop_id[4:])
    if prop_id not in range(301, 307):
        raise ConfigurationError(f"unknown proposition id {prop_id!r}")
    n = _validate_prop_args(prop_id, a, b, n)
    details: dict = {}

    if prop_id == 301:
        lhs = (4.0 / 3.0) * 0.5 * (a ** (n + 1) + b ** (n + 1)) \
            + 2.0 * (a * b) * 0.5 * (a ** (n - 1) + b ** (n - 1))
        rhs = _lp_pow_2n(a, b, n) + 0.5 * (a ** (2 * n) + b ** (2 * n))
        details["L2n_pow_2n"] = _lp_pow_2n(a, b, n)
    elif prop_id == 302:
        lhs = a ** n * b ** n
        rhs = a ** (2 * n) + b ** (2 * n)
    elif prop_id == 303:
        lhs = 1.0 / (a * b)
        rhs = mean("K", a, b).value
    elif prop_id == 304:
        lhs = a ** n * b ** n
        rhs = 0.5 * (a ** (2 * n) + b ** (2 * n))
    elif prop_id == 305:
        lhs = _lp_pow_2n(a, b, n)
        rhs = 0.5 * (0.5 * (a ** (2 * n) + b ** (2 * n)) + a ** n * b ** n)
        details["L2n_pow_2n"] = lhs
    else:  # 306
        lhs = mean("G", a, b).value
        rhs = mean("A", a, b).value

    margin = rhs - lhs
    verdict = classify(lhs, rhs, margin, 0.0)
    if n is not None:
        details["n"] = n
    return InequalityReport(f"PROP{prop_id}", "stated", (), float(lhs), float(rhs),
                            float(margin), 0.0, verdict, details)


def verify_chain(a: float, b: float, tol: float = 1e-12) -> ChainReport:
    """Check H <= G <= L <= I <= A <= K; a link fails below -tol (scaled)."""
    _require_positive(a, b)
    values = {k: mean(k, a, b).value for k in CHAIN_ORDER}
    links = []
    ok = True
    for lower, upper in zip(CHAIN_ORDER, CHAIN_ORDER[1:]):
        margin = values[upper] - values[lower]
        if margin < -tol * (1.0 + abs(values[upper])):
            ok = False
        links.append(ChainLink(lower, upper, float(margin)))
    return ChainReport(float(a), float(b), values, tuple(links),
                       VERDICT_SATISFIED if ok else VERDICT_VIOLATED)
