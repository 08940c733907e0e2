import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhaudit.errors import ConfigurationError, DomainError, SpecParseError
from hhaudit.functions import (
    BUILTIN_CONVEX_SPECS,
    Interval,
    check_class,
    make_function,
)
from hhaudit.kernels import Sampler, make_kernel

IV01 = Interval(0.0, 1.0)
IV12 = Interval(1.0, 2.0)


def test_interval_validation():
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)
    with pytest.raises(DomainError):
        Interval(2.0, 1.0)
    assert Interval(0.0, 2.0).mid == 1.0


def test_make_examples():
    f = make_function("pow:2", IV01)
    assert f.eval(0.5) == 0.25
    sq = make_function("symquad", IV01)
    assert sq.eval(0.0) == 0.25
    assert sq.eval(0.5) == 0.0
    with pytest.raises(DomainError):
        make_function("recip", IV01)  # a = 0


def test_poly_constraints():
    with pytest.raises(DomainError):
        make_function("poly:1.0,-0.5", IV01)
    with pytest.raises(SpecParseError):
        make_function("poly:", IV01)
    f = make_function("poly:1.0,0.0,2.0", IV01)
    assert f.eval(2.0) == 9.0


def test_pow_constraints():
    with pytest.raises(DomainError):
        make_function("pow:0", IV01)
    with pytest.raises(DomainError):
        make_function("pow:1.5", IV01)
    with pytest.raises(DomainError):
        make_function("pow:3", Interval(-1.0, 1.0))  # odd power goes negative
    with pytest.raises(DomainError):
        make_function("pow:-1", IV01)  # needs a > 0
    f = make_function("pow:2", Interval(-1.0, 1.0))  # even power is fine
    assert f.eval(-0.5) == 0.25
    g = make_function("pow:-2", IV12)
    assert g.eval(2.0) == 0.25


def test_prod_parsing_with_poly():
    f = make_function("prod:poly:1.0,2.0,pow:2", Interval(0.0, 3.0))
    assert f.eval(2.0) == (1 + 4) * 4
    g = make_function("prod:pow:2,poly:1.0,2.0", Interval(0.0, 3.0))
    assert g.eval(2.0) == 4 * (1 + 4)
    with pytest.raises(SpecParseError):
        make_function("prod:pow:2", IV01)


def test_exp_family():
    f = make_function("exp:-1.0", IV01)
    assert f.eval(1.0) == pytest.approx(math.exp(-1.0))
    assert f.mono == -1
    assert make_function("exp:0.0", IV01).mono == 0


def test_metadata_prod():
    f = make_function("prod:pow:1,pow:2", IV01)
    assert f.convex is True and f.mono == 1
    g = make_function("prod:recip,recip", IV12)
    assert g.convex is True and g.mono == -1
    # opposite monotone directions: convexity unknown
    m = make_function("prod:pow:1,recip", IV12)
    assert m.convex is None
    # constant factor keeps convexity
    c = make_function("prod:poly:2.0,symquad", IV01)
    assert c.convex is True


def test_hconvex_example():
    rep = check_class("hconvex", make_function("pow:2", IV01), h=make_kernel("id"),
                      sampler=Sampler(seed=0, samples=500))
    assert rep.verdict == "no_violation_found"


def test_similarly_ordered_example():
    iv = Interval(0.0, 2.0)
    rep = check_class("similarly_ordered", make_function("pow:1", iv),
                      g=make_function("pow:3", iv), sampler=Sampler(seed=0, samples=500))
    assert rep.verdict == "no_violation_found"


def test_symmetric_example_violated_at_endpoint():
    rep = check_class("symmetric_about_midpoint", make_function("pow:1", IV01),
                      sampler=Sampler(seed=0, samples=100))
    assert rep.verdict == "violated"
    assert rep.witness.point == (0.0,)
    assert rep.witness.lhs == 0.0
    assert rep.witness.rhs == 1.0


def test_product_proposition_instance():
    # product of two id-convex similarly ordered functions lands in the
    # class with kernel 1 * max(t, t)
    f = make_function("prod:pow:2,pow:2", IV01)
    rep = check_class("hconvex", f, h=make_kernel("scaled:1.0,max:id,id"),
                      sampler=Sampler(seed=3, samples=1000))
    assert rep.verdict == "no_violation_found"


DOMINATING_KERNELS = ("id", "one", "pow:0.25", "pow:0.5", "pow:0.75",
                      "scaled:2.0,id", "max:id,pow:0.5")


@pytest.mark.parametrize("kspec", DOMINATING_KERNELS)
@pytest.mark.parametrize("fspec", BUILTIN_CONVEX_SPECS)
def test_dominating_kernels_admit_convex_functions(fspec, kspec):
    # whenever h(t) >= t on (0,1), every nonnegative convex function is
    # h-convex; checked on a shared sample set
    iv = Interval(0.25, 2.0)
    h = make_kernel(kspec)
    dom = check_class("hconvex", make_function(fspec, iv), h=h, interval=iv,
                      sampler=Sampler(seed=11, samples=1000))
    assert dom.verdict == "no_violation_found"


SIMILARLY_ORDERED_PAIRS = (("pow:1", "pow:2"), ("pow:2", "pow:3"),
                           ("exp:1.0", "pow:1"), ("recip", "recip"),
                           ("symquad", "symquad"))


@pytest.mark.parametrize("fspec,gspec", SIMILARLY_ORDERED_PAIRS)
def test_product_of_similarly_ordered_id_convex(fspec, gspec):
    iv = Interval(0.5, 2.0)
    f = make_function(f"prod:{fspec},{gspec}", iv)
    rep = check_class("hconvex", f, h=make_kernel("scaled:1.0,max:id,id"),
                      interval=iv, sampler=Sampler(seed=4, samples=1000))
    assert rep.verdict == "no_violation_found"


def test_dominates_identity_on_interval():
    rep = check_class("dominates_identity_on_interval", make_function("pow:1", IV12),
                      sampler=Sampler(seed=0, samples=200))
    assert rep.verdict == "no_violation_found"
    rep = check_class("dominates_identity_on_interval", make_function("symquad", IV12),
                      sampler=Sampler(seed=0, samples=200))
    assert rep.verdict == "violated"


def test_membership_aliases_via_kernels():
    # Godunova-Levin, P-function and s-convex classes are the hconvex
    # check with kernels recip, one, pow:s
    f = make_function("pow:2", Interval(0.25, 1.0))
    for kspec in ("recip", "one", "pow:0.5"):
        rep = check_class("hconvex", f, h=make_kernel(kspec),
                          sampler=Sampler(seed=2, samples=400))
        assert rep.verdict == "no_violation_found", kspec


def test_missing_arguments():
    f = make_function("pow:2", IV01)
    with pytest.raises(ConfigurationError):
        check_class("hconvex", f, sampler=Sampler(seed=0, samples=10))
    with pytest.raises(ConfigurationError):
        check_class("similarly_ordered", f, sampler=Sampler(seed=0, samples=10))
    with pytest.raises(ConfigurationError):
        check_class("no_such", f, sampler=Sampler(seed=0, samples=10))


_FAMILY_POOL = ("pow:1", "pow:2", "pow:3", "exp:1.0", "exp:0.5",
                "poly:0.5,1.0,2.0", "symquad", "recip", "prod:pow:1,pow:2")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, len(_FAMILY_POOL) - 1), st.integers(0, len(_FAMILY_POOL) - 1),
       st.floats(0.1, 5.0), st.floats(0.2, 6.0))
def test_endpoint_product_identity(i, j, a, width):
    # M - N = (f(a) - f(b)) (g(a) - g(b)) exactly, up to rounding
    b = a + width
    iv = Interval(a, b)
    f = make_function(_FAMILY_POOL[i], iv)
    g = make_function(_FAMILY_POOL[j], iv)
    fa, fb, ga, gb = f.eval(a), f.eval(b), g.eval(a), g.eval(b)
    m = fa * ga + fb * gb
    n = fa * gb + fb * ga
    lhs = m - n
    rhs = (fa - fb) * (ga - gb)
    scale = 1.0 + abs(m) + abs(n)
    assert abs(lhs - rhs) <= 1e-12 * scale
