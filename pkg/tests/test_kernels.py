import dataclasses
import json

import numpy as np
import pytest

from hhaudit.errors import ConfigurationError, DomainError, SpecParseError
from hhaudit.kernels import (
    KERNEL_PROPERTIES,
    PropertyReport,
    Sampler,
    analytic_properties,
    kernel_properties,
    make_kernel,
)

GRID = np.linspace(1e-3, 1.0, 1000)

KERNEL_SPECS = [
    "id", "one", "recip", "pow:0.5", "pow:0.25", "pow:1", "pow:-0.5",
    "scaled:2.0,id", "scaled:0.5,pow:0.5", "max:id,one",
    "max:scaled:2.0,id,pow:0.5", "scaled:3.0,max:id,one",
]


def test_parse_examples():
    assert make_kernel("pow:0.5").eval(0.25) == pytest.approx(0.5, abs=0)
    assert make_kernel("id").eval(0.3) == 0.3
    assert make_kernel("one").eval(0.7) == 1.0
    assert make_kernel("recip").eval(0.25) == 4.0


def test_parse_nested():
    k = make_kernel("max:scaled:2.0,id,pow:0.5")
    assert k.eval(0.25) == 0.5  # max(0.5, 0.5)
    assert k.eval(0.04) == pytest.approx(0.2)  # max(0.08, 0.2)
    k = make_kernel("scaled:3.0,max:id,one")
    assert k.eval(0.25) == 3.0


def test_parse_rejects_bad_exponent():
    with pytest.raises(DomainError):
        make_kernel("pow:2")


def test_parse_rejects_bad_scale():
    with pytest.raises(DomainError):
        make_kernel("scaled:0,id")
    with pytest.raises(DomainError):
        make_kernel("scaled:-1,id")


def test_parse_errors_name_token():
    with pytest.raises(SpecParseError, match="pw"):
        make_kernel("pw:1")
    with pytest.raises(SpecParseError, match="trailing"):
        make_kernel("id,one")
    with pytest.raises(SpecParseError):
        make_kernel("pow:abc")
    with pytest.raises(SpecParseError):
        make_kernel("max:id")


def test_canonical_spec_roundtrip():
    for spec in KERNEL_SPECS:
        k = make_kernel(spec)
        assert make_kernel(k.spec).spec == k.spec


def test_h1_stored():
    assert make_kernel("pow:0.5").h1 == 1.0
    assert make_kernel("scaled:2.0,id").h1 == 2.0
    assert make_kernel("one").h1 == 1.0
    assert make_kernel("max:one,pow:0.5").h1 == 1.0


@pytest.mark.parametrize("spec", KERNEL_SPECS)
def test_nonnegative_on_grid(spec):
    k = make_kernel(spec)
    assert np.all(k.eval_many(GRID) >= 0.0)


@pytest.mark.parametrize("seed", [0, 7, 12345])
@pytest.mark.parametrize("prop", KERNEL_PROPERTIES)
def test_identity_kernel_clean(prop, seed):
    rep = kernel_properties(make_kernel("id"), prop, Sampler(seed=seed, samples=500))
    assert rep.verdict == "no_violation_found"
    assert rep.witness is None


def test_reciprocal_multiplicative_4ulp():
    k = make_kernel("recip")
    xs = GRID[::31]
    for x in xs:
        hx = k.eval_many(np.full_like(xs, x))
        hy = k.eval_many(xs)
        hxy = k.eval_many(x * xs)
        gap = np.abs(hxy - hx * hy)
        assert np.all(gap <= 4 * np.spacing(np.maximum(np.abs(hxy), np.abs(hx * hy))))


def test_sqrt_superadditive_violated_with_unit_witness():
    rep = kernel_properties(make_kernel("pow:0.5"), "superadditive",
                            Sampler(seed=1, samples=100))
    assert rep.verdict == "violated"
    x, y = rep.witness.point
    # deterministic probe (0.5, 0.5): h(1) = 1 < 2 h(0.5) ~ 1.414
    assert (x, y) == (0.5, 0.5)
    assert rep.witness.lhs == pytest.approx(1.0)
    assert rep.witness.rhs == pytest.approx(2 * 0.5 ** 0.5)


def test_sqrt_dominates_identity():
    rep = kernel_properties(make_kernel("pow:0.5"), "dominates_identity",
                            Sampler(seed=1, samples=500))
    assert rep.verdict == "no_violation_found"


def test_superadditive_extended_domain():
    # widening the sampler domain to (0, 2] admits the pair (1, 1), where
    # h(2) = sqrt(2) < h(1) + h(1) = 2
    rep = kernel_properties(make_kernel("pow:0.5"), "superadditive",
                            Sampler(seed=1, samples=50, domain=(0.0, 2.0)))
    assert rep.verdict == "violated"
    assert rep.witness.point == (1.0, 1.0)
    assert rep.witness.lhs == pytest.approx(2 ** 0.5)
    assert rep.witness.rhs == pytest.approx(2.0)


def test_one_not_superadditive():
    rep = kernel_properties(make_kernel("one"), "superadditive",
                            Sampler(seed=0, samples=50))
    assert rep.verdict == "violated"
    assert rep.witness.lhs == 1.0
    assert rep.witness.rhs == 2.0


@pytest.mark.parametrize("spec,prop", [
    ("pow:0.5", "superadditive"),
    ("one", "superadditive"),
    ("scaled:0.5,id", "dominates_identity"),
])
def test_violation_witness_reverifies(spec, prop):
    k = make_kernel(spec)
    rep = kernel_properties(k, prop, Sampler(seed=3, samples=400))
    assert rep.verdict == "violated"
    w = rep.witness
    if prop == "superadditive":
        lhs, rhs = k.eval(w.point[0] + w.point[1]), k.eval(w.point[0]) + k.eval(w.point[1])
    else:
        lhs, rhs = k.eval(w.point[0]), w.point[0]
    assert lhs == pytest.approx(w.lhs, rel=1e-15)
    assert rhs == pytest.approx(w.rhs, rel=1e-15)
    assert rhs - lhs > 1e-12 * (1 + abs(lhs) + abs(rhs))


def test_report_determinism_bytes():
    k = make_kernel("max:pow:0.5,scaled:1.5,id")
    reps = [kernel_properties(k, "supermultiplicative", Sampler(seed=9, samples=333))
            for _ in range(2)]
    blobs = [json.dumps(dataclasses.asdict(r)).encode() for r in reps]
    assert blobs[0] == blobs[1]


def test_sampler_validation():
    k = make_kernel("id")
    with pytest.raises(ConfigurationError):
        kernel_properties(k, "nonnegative", Sampler(seed=0, samples=0))
    with pytest.raises(ConfigurationError):
        kernel_properties(k, "nonnegative", Sampler(seed=0, samples=10, domain=(1.0, 1.0)))
    with pytest.raises(ConfigurationError):
        kernel_properties(k, "no_such_property", Sampler(seed=0, samples=10))


def test_analytic_flags_match_sampling():
    sampler = Sampler(seed=5, samples=400)
    for spec in KERNEL_SPECS:
        k = make_kernel(spec)
        flags = analytic_properties(k)
        for prop, known in flags.items():
            if known is None:
                continue
            rep = kernel_properties(k, prop, sampler)
            if known:
                assert rep.verdict == "no_violation_found", (spec, prop)
            # known-False properties need not be caught by every sampler,
            # but a found violation must not contradict known-True


def test_sigma0_metadata():
    assert make_kernel("id").sigma0 == 1.0
    assert make_kernel("one").sigma0 == 0.0
    assert make_kernel("recip").sigma0 == -1.0
    assert make_kernel("pow:-0.5").sigma0 == -0.5
    assert make_kernel("max:id,one").sigma0 == 0.0
    assert make_kernel("scaled:2.0,pow:0.25").sigma0 == 0.25
