import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhaudit.engine import evaluate
from hhaudit.errors import ConfigurationError, DomainError
from hhaudit.functions import Interval, make_function
from hhaudit.kernels import make_kernel
from hhaudit.means import MEAN_KINDS, mean, verify_chain, verify_proposition

positive = st.floats(0.01, 50.0)


def test_mean_values():
    assert mean("A", 1, 3).value == 2.0
    assert mean("G", 1, 4).value == 2.0
    assert mean("K", 1, 3).value == pytest.approx(math.sqrt(5.0))
    assert mean("H", 1, 2).value == pytest.approx(4 / 3)
    assert mean("L", 1, 2).value == pytest.approx(1 / math.log(2))
    assert mean("I", 1, 2).value == pytest.approx(4 / math.e)


def test_lp_printed_values():
    assert mean("Lp", 1, 2, p=1).value == pytest.approx(1.5, rel=1e-15)
    # (b^3 - a^3) / (3 (b - a)) = 7/3 for (1, 2)
    exact = float(Fraction(7, 3)) ** 0.5
    assert mean("Lp", 1, 2, p=2).value == pytest.approx(exact, rel=1e-14)


def test_lp_removable_points():
    assert mean("Lp", 1, 2, p=0).value == mean("I", 1, 2).value
    assert mean("Lp", 1, 2, p=-1).value == mean("L", 1, 2).value
    assert mean("Lp", 3, 3, p=2).value == 3.0


@pytest.mark.parametrize("p0,ref", [(0.0, "I"), (-1.0, "L"), (1.0, "A")])
def test_lp_limit_consistency(p0, ref):
    for a, b in ((1.0, 2.0), (0.3, 7.0), (2.0, 2.5)):
        target = mean(ref, a, b).value
        for off in (-1e-8, 1e-8):
            v = mean("Lp", a, b, p=p0 + off).value
            assert abs(v - target) <= 1e-6 * abs(target)


def test_lp_monotone_in_p():
    rng = np.random.default_rng(42)
    grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]
    for _ in range(100):
        a, b = sorted(rng.uniform(0.05, 10.0, 2))
        if a == b:
            continue
        vals = [mean("Lp", a, b, p=p).value for p in grid]
        for lo, hi in zip(vals, vals[1:]):
            assert hi >= lo * (1.0 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(positive, positive)
def test_mean_symmetry_and_internality(a, b):
    for kind in MEAN_KINDS:
        p = 2.0 if kind == "Lp" else None
        v1 = mean(kind, a, b, p=p).value
        v2 = mean(kind, b, a, p=p).value
        assert abs(v1 - v2) <= 2 * np.spacing(max(abs(v1), abs(v2)))
        assert min(a, b) * (1 - 1e-12) <= v1 <= max(a, b) * (1 + 1e-12)


def test_mean_equal_arguments():
    for kind in MEAN_KINDS:
        p = 0.7 if kind == "Lp" else None
        assert mean(kind, 2.5, 2.5, p=p).value == 2.5


def test_mean_domain_errors():
    with pytest.raises(DomainError):
        mean("A", -1.0, 2.0)
    with pytest.raises(DomainError):
        mean("G", 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        mean("Lp", 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        mean("Z", 1.0, 2.0)


def test_prop306_example():
    rep = verify_proposition(306, 1.0, 4.0)
    assert rep.lhs == 2.0 and rep.rhs == 2.5
    assert rep.verdict == "satisfied"
    assert rep.quad_error == 0.0


def test_prop305_violated_witness():
    rep = verify_proposition(305, 1.0, 2.0, n=1)
    assert rep.lhs == pytest.approx(float(Fraction(7, 3)), rel=1e-15)
    assert rep.rhs == pytest.approx(2.25, rel=1e-15)
    assert rep.verdict == "violated"


def test_prop302_example():
    rep = verify_proposition(302, 1.0, 2.0, n=1)
    assert rep.lhs == 2.0 and rep.rhs == 5.0
    assert rep.verdict == "satisfied"


def test_prop303_violated_witness():
    rep = verify_proposition(303, 0.4, 0.5)
    assert rep.lhs == pytest.approx(5.0, rel=1e-14)
    assert rep.rhs == pytest.approx(math.sqrt(0.205), rel=1e-14)
    assert rep.verdict == "violated"


@settings(max_examples=200, deadline=None)
@given(positive, st.floats(0.01, 10.0), st.integers(-3, 3))
def test_prop304_306_always_hold(a, width, n):
    b = a + width
    if n != 0:
        rep = verify_proposition(304, a, b, n=n)
        assert rep.verdict == "satisfied"
    rep = verify_proposition(306, a, b)
    assert rep.verdict == "satisfied"


def test_prop301_matches_th1_stated_instance():
    # the first corollary is exactly the stated product inequality at
    # f = g = x^n, h = id; the two evaluation paths must agree
    for a, b, n in ((1.0, 2.0, 1), (0.5, 1.5, 2), (1.0, 3.0, -1)):
        rep = verify_proposition(301, a, b, n=n)
        iv = Interval(a, b)
        f = make_function(f"pow:{n}", iv)
        th = evaluate("TH1", "stated", f, f, make_kernel("id"), iv, 1e-11,
                      sampler=None)
        assert rep.lhs == pytest.approx(th.lhs, rel=1e-12)
        assert rep.rhs == pytest.approx(th.rhs, rel=1e-9)


def test_prop305_matches_th6_instance():
    # the fifth corollary is the symmetric product bound at f = g = x^n,
    # h = id (whose symmetry hypothesis x^n does not satisfy)
    for a, b, n in ((1.0, 2.0, 1), (0.5, 1.5, 2)):
        rep = verify_proposition(305, a, b, n=n)
        iv = Interval(a, b)
        f = make_function(f"pow:{n}", iv)
        th = evaluate("TH6", "stated", f, f, make_kernel("id"), iv, 1e-11,
                      sampler=None)
        assert rep.lhs == pytest.approx(th.lhs, rel=1e-9)
        assert rep.rhs == pytest.approx(th.rhs, rel=1e-9)


def test_prop_domain_and_arguments():
    with pytest.raises(DomainError):
        verify_proposition(301, 2.0, 1.0, n=1)
    with pytest.raises(DomainError):
        verify_proposition(302, 1.0, 2.0, n=0)
    with pytest.raises(ConfigurationError):
        verify_proposition(305, 1.0, 2.0)  # n required
    with pytest.raises(ConfigurationError):
        verify_proposition(300, 1.0, 2.0)
    # n ignored where the statement does not use it
    assert verify_proposition(303, 0.4, 0.5, n=7).lhs == verify_proposition(303, 0.4, 0.5).lhs


def test_chain_example_values():
    rep = verify_chain(1.0, 2.0, 1e-12)
    assert rep.verdict == "satisfied"
    expected = {"H": 4 / 3, "G": math.sqrt(2), "L": 1 / math.log(2),
                "I": 4 / math.e, "A": 1.5, "K": math.sqrt(2.5)}
    for k, v in expected.items():
        assert rep.values[k] == pytest.approx(v, rel=1e-12)
    assert all(link.margin >= 0 for link in rep.links)


def test_chain_degenerate_limit():
    for eps in (1e-3, 1e-6, 1e-9):
        rep = verify_chain(1.0, 1.0 + eps, 1e-12)
        assert rep.verdict == "satisfied"
        assert all(abs(link.margin) <= eps for link in rep.links)


def test_chain_extreme_ratio():
    rep = verify_chain(1.0, 1e6, 1e-12)
    assert rep.verdict == "satisfied"
    assert all(link.margin >= 0 for link in rep.links)
