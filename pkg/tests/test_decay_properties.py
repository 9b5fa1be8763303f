from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wavedecay.decay_calculus import (BoundaryEta, BorderlineSum, DecayBound, Exp, Region,
                                      RuleDomain, SourceBound, apply_exterior_conversion,
                                      apply_interior_conversion, join)
from wavedecay.decay_calculus.rules import tilde_eta

tenths = st.integers(-20, 40).map(lambda k: Fraction(k, 10))
nonneg = st.integers(0, 20).map(lambda k: Fraction(k, 10))
regions = st.sampled_from([Region.EXTERIOR, Region.INTERIOR])


@st.composite
def bounds(draw, region=None):
    region = region or draw(regions)
    return DecayBound.make(region, draw(tenths), draw(tenths), draw(tenths), draw(nonneg))


@given(tenths, tenths, tenths)
def test_exp_order_is_total_and_additive(x, y, z):
    a, b, c = Exp.of(x), Exp.of(y), Exp.of(z)
    assert (a < b) + (a == b) + (a > b) == 1
    if a <= b:
        assert a + c <= b + c


@given(st.data())
def test_join_is_weaker_than_each(data):
    region = data.draw(regions)
    xs = data.draw(st.lists(bounds(region), min_size=1, max_size=4))
    j = join(xs)
    for x in xs:
        assert x.implies(j)


@given(st.data())
def test_implication_is_transitive(data):
    region = data.draw(regions)
    x, y, z = (data.draw(bounds(region)) for _ in range(3))
    if x.implies(y) and y.implies(z):
        assert x.implies(z)


@given(bounds())
def test_canonical_is_equivalent(b):
    assert b.canonical().equivalent(b)


@given(bounds(), st.integers(0, 10).map(lambda k: Fraction(k, 10)))
def test_extra_decay_is_stronger(b, extra):
    assert b.times(a=extra).implies(b)
    assert b.times(c=extra).implies(b)


def _try(rule, src):
    try:
        return rule(src)
    except (RuleDomain, BoundaryEta, BorderlineSum):
        return None


alphas = st.integers(21, 29).map(lambda k: Fraction(k, 10))
etas = st.integers(-5, 25).map(lambda k: Fraction(k, 10))


@settings(max_examples=200)
@given(alphas, etas, st.integers(1, 5).map(lambda k: Fraction(k, 10)))
def test_interior_conversion_monotone_in_eta(a, eta, d):
    lo = _try(apply_interior_conversion, SourceBound.make(a, 1, eta))
    hi = _try(apply_interior_conversion, SourceBound.make(a, 1, eta + d))
    assume(lo is not None and hi is not None)
    # a faster-decaying source never gives a weaker output
    assert hi.implies(lo)


@settings(max_examples=200)
@given(alphas, etas, st.integers(1, 5).map(lambda k: Fraction(k, 10)))
def test_exterior_conversion_monotone_in_alpha(a, eta, d):
    lo = _try(apply_exterior_conversion, SourceBound.make(a, 0, eta))
    hi = _try(apply_exterior_conversion, SourceBound.make(a + d, 0, eta))
    assume(lo is not None and hi is not None)
    assert hi.implies(lo)


@given(etas)
def test_tilde_eta_is_nondecreasing(eta):
    assume(eta >= Fraction(-1, 2) and eta != 1)
    nxt = eta + Fraction(1, 10)
    assume(nxt != 1)
    assert tilde_eta(nxt) >= tilde_eta(eta)
    assert tilde_eta(eta) <= -1 or eta > 1


@pytest.mark.parametrize("region", list(Region))
def test_join_of_one_is_identity(region):
    b = DecayBound.make(region, 1, 0, Fraction(1, 2))
    assert join([b]).equivalent(b)
