"""Conversion rules against the worked exponent examples."""
from __future__ import annotations

import pytest

from wavedecay.decay_calculus import (BorderlineSum, BoundaryEta, BoundState, DecayBound,
                                      EngineConfig, Q, Region, RuleDomain, SourceBound,
                                      SourceKind, Unsupported, apply_dt_conversion,
                                      apply_exterior_conversion, apply_interior_conversion,
                                      convert_r_to_t, derivative_gain, tangential_bound,
                                      tilde_eta)
from wavedecay.decay_calculus.bounds import Support
from wavedecay.decay_calculus.engine import (assemble_sources, exterior_initial, exterior_seed,
                                             interior_seed)
from wavedecay.decay_calculus.bounds import functionals, profile_implies, restrict

SIGMA = Q(1, 10)
E, I = Region.EXTERIOR, Region.INTERIOR


def vals(bound: DecayBound):
    return tuple(x.value for x in bound.exps())


def plain(profile):
    return tuple(None if x is None else getattr(x, "value", x) for x in profile)


def test_tilde_eta_branches():
    assert tilde_eta(Q(-1, 2)) == Q(-5, 2)
    assert tilde_eta(2) == -1
    assert tilde_eta(Q(1, 2)) == Q(-3, 2)
    with pytest.raises(BoundaryEta):
        tilde_eta(1)
    with pytest.raises(RuleDomain):
        tilde_eta(Q(-3, 4))


@pytest.mark.parametrize("abc, expect", [
    ((2 + SIGMA, 1, Q(-1, 2)), Q(-2, 5)),
    ((Q(5, 2), Q(1, 2), SIGMA), Q(1, 10)),
    ((2 + SIGMA, 1, 2), 1 + SIGMA),
])
def test_interior_conversion(abc, expect):
    out = apply_interior_conversion(SourceBound.make(*abc))
    assert out.region is I
    assert vals(out) == (1, 0, expect, 0)


@pytest.mark.parametrize("abc", [(2, 0, 0), (3, 0, 0), (Q(5, 2), -1, 0), (Q(5, 2), 0, Q(-3, 4))])
def test_interior_conversion_domain(abc):
    with pytest.raises(RuleDomain):
        apply_interior_conversion(SourceBound.make(*abc))


def test_interior_conversion_eta_one():
    with pytest.raises(BoundaryEta):
        apply_interior_conversion(SourceBound.make(Q(5, 2), 0, 1))


def test_exterior_conversion_examples():
    below = apply_exterior_conversion(SourceBound.make(Q(5, 2) + SIGMA, 0, 0))
    assert vals(below) == (Q(3, 5), 0, 0, 0)
    cone = apply_exterior_conversion(SourceBound.make(2 + SIGMA, 0, Q(1, 2)))
    assert vals(cone) == (Q(3, 5), 0, 0, 0)
    above = apply_exterior_conversion(SourceBound.make(2 + SIGMA, 1, 0))
    assert vals(above) == (1, 0, SIGMA, 0)


def test_exterior_borderline():
    with pytest.raises(BorderlineSum):
        apply_exterior_conversion(SourceBound.make(Q(5, 2), 0, Q(1, 2)))


def test_exterior_relaxed_branch():
    # the differentiated cone source of the first exterior phase
    src = SourceBound.make(Q(3, 2) + SIGMA, 0, 1)
    with pytest.raises(RuleDomain):
        apply_exterior_conversion(src)
    out = apply_exterior_conversion(src, relaxed=True)
    assert vals(out) == (Q(3, 5), 0, 0, 0)
    # eta > 1 with alpha < 2 only decays like r^(1 - alpha)
    with pytest.raises(RuleDomain):
        apply_exterior_conversion(SourceBound.make(Q(11, 10), 0, Q(3, 2)), relaxed=True)


def test_dt_conversion():
    src = SourceBound.make(2 + SIGMA, 0, 0, SourceKind.TIME_DERIVATIVE)
    assert vals(apply_dt_conversion(src)) == (1, 0, SIGMA, 0)
    assert vals(apply_dt_conversion(src, E, strict=False)) == (1, 0, SIGMA, 0)
    half = SourceBound.make(2 + SIGMA, 0, Q(1, 2), SourceKind.TIME_DERIVATIVE)
    assert vals(apply_dt_conversion(half)) == (1, 0, Q(3, 5), 0)
    with pytest.raises(BoundaryEta):
        apply_dt_conversion(SourceBound.make(2 + SIGMA, 0, 1, SourceKind.TIME_DERIVATIVE))


def test_dt_conversion_guards():
    with pytest.raises(RuleDomain):
        apply_dt_conversion(SourceBound.make(2 + SIGMA, 0, 0))
    with pytest.raises(RuleDomain):
        apply_dt_conversion(SourceBound.make(2 + SIGMA, 1, 0, SourceKind.TIME_DERIVATIVE))
    low = SourceBound.make(2 + SIGMA, 0, 0, SourceKind.TIME_DERIVATIVE)
    with pytest.raises(Unsupported):
        apply_dt_conversion(low, E, strict=True)
    neg = SourceBound.make(2 + SIGMA, 0, Q(-1, 2), SourceKind.TIME_DERIVATIVE)
    with pytest.raises(Unsupported):
        apply_dt_conversion(neg, E, strict=False)
    with pytest.raises(BorderlineSum):
        apply_dt_conversion(SourceBound.make(Q(5, 2), 0, Q(1, 2), SourceKind.TIME_DERIVATIVE), E)
    with pytest.raises(ValueError):
        SourceBound.make(Q(5, 2), 0, 0, SourceKind.TIME_DERIVATIVE, Support.EVERYWHERE)


def test_derivative_gain():
    phi = DecayBound.make(E, 1, 0, Q(2, 5))
    d = derivative_gain(BoundState(phi, phi, phi))
    assert vals(d) == (1, 0, Q(2, 5), 1)
    # on the exterior rays nu ~ <u>, so nu^-1 is one more power of <u>
    assert vals(d.canonical()) == (1, 0, Q(7, 5), 0)
    flat = DecayBound.make(I)
    assert vals(derivative_gain(BoundState(flat, flat, flat))) == (0, 0, 0, 1)
    with pytest.raises(RuleDomain):
        derivative_gain(BoundState(d, d, d))


def test_interior_derivative_gain_matches_display():
    phi = DecayBound.make(I, 0, 1, SIGMA - Q(1, 2))
    d = derivative_gain(BoundState(phi, phi, phi)).canonical()
    # <r>^-1 <u>^-(1/2 + sigma) after specializing nu
    assert vals(d) == (1, 0, Q(1, 2) + SIGMA, 0)


def test_tangential_bound_examples():
    phi = DecayBound.make(E, 1, 0, Q(-1, 2))
    dphi = DecayBound.make(E, 1, 0, Q(1, 2))
    assert vals(tangential_bound(BoundState(phi, dphi, phi)).canonical()) == (2, 0, Q(-1, 2), 0)
    phi = DecayBound.make(I, 0, 1, Q(-1, 2))
    dphi = DecayBound.make(I, 1, 0, Q(1, 2))
    assert vals(tangential_bound(BoundState(phi, dphi, phi)).canonical()) == (1, 1, Q(-1, 2), 0)
    phi = DecayBound.make(E, 1)
    dphi = DecayBound.make(E, 1, 0, 1)
    assert vals(tangential_bound(BoundState(phi, dphi, phi)).canonical()) == (2, 0, 0, 0)
    final = DecayBound.make(E, 1, 0, 1)
    dbar = tangential_bound(BoundState(final, derivative_gain(BoundState(final, final, final)), final))
    assert dbar.implies(DecayBound.make(E, 2))


def test_convert_r_to_t():
    cfg = EngineConfig(SIGMA)
    q = SIGMA - Q(1, 2)
    phi = DecayBound.make(I, 1, 0, q)
    dphi = DecayBound.make(I, 1, 0, 1 + q - SIGMA)
    assert vals(convert_r_to_t(phi, dphi, cfg)) == (0, 1, q, 0)
    one = DecayBound.make(I, 1, 0, 1)
    assert vals(convert_r_to_t(one, DecayBound.make(I, 1, 0, 2), cfg)) == (0, 1, 1, 0)
    edge = DecayBound.make(I, 1, 0, Q(-1, 2))
    assert vals(convert_r_to_t(edge, DecayBound.make(I, 1, 0, Q(1, 2)), cfg)) == (0, 1, Q(-1, 2), 0)


def test_convert_r_to_t_failures():
    cfg = EngineConfig(SIGMA)
    with pytest.raises(RuleDomain, match="weaker"):
        convert_r_to_t(DecayBound.make(I, 1, 0, 0), DecayBound.make(I, 1, 0, Q(1, 2)), cfg)
    with pytest.raises(RuleDomain):
        convert_r_to_t(DecayBound.make(I, 1, 0, Q(-3, 5)), DecayBound.make(I, 1, 0, 1), cfg)
    with pytest.raises(RuleDomain):
        convert_r_to_t(DecayBound.make(E, 1, 0, 0), DecayBound.make(E, 1, 0, 1), cfg)
    with pytest.raises(RuleDomain):
        convert_r_to_t(DecayBound.make(I, 0, 1, 0), DecayBound.make(I, 1, 0, 1), cfg)
    # q > -1 + 2 sigma fails for large sigma
    wide = EngineConfig(Q(2, 5))
    with pytest.raises(RuleDomain, match="sigma"):
        convert_r_to_t(DecayBound.make(I, 1, 0, Q(-1, 2)), DecayBound.make(I, 1, 0, 1), wide)


def test_assemble_sources_exterior_seed():
    cfg = EngineConfig(SIGMA)
    h1, h2, h3 = assemble_sources(exterior_seed(), cfg, [exterior_initial()])
    assert (h1.a.value, h1.b.value, h1.c.value) == (Q(5, 2) + SIGMA, 0, 0)
    assert h2.kind is SourceKind.TIME_DERIVATIVE and h2.cone_supported
    assert (h2.a.value, h2.b.value, h2.c.value) == (Q(3, 2) + SIGMA, 0, 0)
    # H3 <~ <r>^-(2+lambda) <u>^-(1-lambda) for every lambda in (0, 1)
    for lam in (Q(1, 10), Q(1, 2), Q(9, 10)):
        assert profile_implies(functionals(E, *(Q(x) for x in (2 + lam, 0, 1 - lam))),
                               h3.profile(E))
    assert 2 < h3.a.value < 3


def test_assemble_sources_interior_seed():
    cfg = EngineConfig(SIGMA)
    h1, h2, h3 = assemble_sources(interior_seed(), cfg)
    assert (h1.a.value, h1.b.value, h1.c.value) == (2 + SIGMA, 1, Q(-1, 2))
    band = restrict(I, functionals(I, 1 + SIGMA, Q(1), Q(-1, 2)), Support.CONE_BAND)
    assert plain(h2.profile(I)) == plain(band)
    prod = functionals(I, *(Q(x) for x in (2, 1, 0)))
    assert profile_implies(prod, h3.profile(I))
    assert 2 < h3.a.value < 3


def test_assemble_sources_phase_boundary():
    cfg = EngineConfig(SIGMA)
    state = BoundState(DecayBound.make(E, 1), DecayBound.make(E, 1, 0, 1),
                       DecayBound.make(E, 2), 5)
    h1, h2, h3 = assemble_sources(state, cfg)
    assert (h1.a.value, h1.b.value, h1.c.value) == (3 + SIGMA, 0, 0)
    assert (h2.a.value, h2.b.value, h2.c.value) == (2 + SIGMA, 0, 0)
    assert profile_implies(functionals(E, *(Q(x) for x in (3, 0, 1))), h3.profile(E))
