"""Bootstrap iteration: sources -> conversions -> new bounds, until nothing improves."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .bounds import (BoundState, DecayBound, DecayError, NoAdmissibleSplit, Profile,
                     Region, SourceBound, SourceKind, StepCapExceeded, Support,
                     from_profile, functionals, join, profile_implies, profile_join,
                     restrict)
from .exponents import Exp
from .rules import (EngineConfig, apply_dt_conversion, apply_exterior_conversion,
                    apply_interior_conversion, convert_r_to_t, derivative_gain,
                    tangential_bound)

HALF = Fraction(1, 2)
CHANNELS = ("phi1", "phi2", "phi3")


@dataclass(frozen=True)
class RuleApplication:
    step: int
    channel: str
    rule: str
    region: Region
    source: SourceBound
    output: DecayBound


@dataclass
class IterationTrace:
    region: Region
    seed: BoundState
    states: List[BoundState]
    terminated: bool
    fixed_point: BoundState
    applications: List[RuleApplication] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    background: List[BoundState] = field(default_factory=list)
    switch_index: Optional[int] = None

    @property
    def phase1_length(self) -> int:
        """Steps until phi first reaches <r>^-1 (exterior) or <v>^-1 <u>^0 (interior)."""
        for st in self.states[1:]:
            can = st.phi.canonical()
            if self.region is Region.EXTERIOR and can.a.value >= 1:
                return st.step_index
            if self.region is Region.INTERIOR and can.c.value >= 0:
                return st.step_index
        return len(self.states) - 1

    def channel_outputs(self, channel: str) -> List[RuleApplication]:
        return [ap for ap in self.applications if ap.channel == channel]


def exterior_initial() -> BoundState:
    """Bounds available from the global-existence argument in r > t+1."""
    E = Region.EXTERIOR
    return BoundState(DecayBound.make(E, 1, 0, -HALF), DecayBound.make(E, 1, 0, HALF),
                      DecayBound.make(E, 2, 0, -HALF), 0)


def exterior_seed() -> BoundState:
    """The initial bounds weakened with <u> <= <r>."""
    E = Region.EXTERIOR
    return BoundState(DecayBound.make(E, HALF), DecayBound.make(E, HALF, 0, 1),
                      DecayBound.make(E, Fraction(3, 2)), 0)


def interior_seed() -> BoundState:
    I = Region.INTERIOR
    return BoundState(DecayBound.make(I, 0, 1, -HALF), DecayBound.make(I, 1, 0, HALF),
                      DecayBound.make(I, 1, 1, -HALF), 0)


# --- source assembly ------------------------------------------------------

@dataclass(frozen=True)
class _Source:
    channel: str
    route: str
    profile: Profile
    kind: SourceKind
    support: Support


def _source_profiles(state: BoundState, cfg: EngineConfig) -> List[_Source]:
    phi, dphi, dbar = state.phi, state.dphi, state.dbar_phi
    region = phi.region
    s = cfg.s
    lower = phi.times(a=2 + s).profile()
    away = restrict(region, dphi.times(a=1 + s).profile(), Support.OFF_CONE)
    h1 = profile_join(lower, away)
    g2 = restrict(region, phi.times(a=1 + s).profile(), Support.CONE_BAND)
    dg2 = join([dphi, phi.times(a=1)]).times(a=1 + s)
    dg2 = restrict(region, dg2.profile(), Support.CONE_BAND)
    h3 = (dphi * dbar).profile()
    out = [
        _Source("phi1", "plain", h1, SourceKind.PLAIN, Support.EVERYWHERE),
        _Source("phi2", "plain", dg2, SourceKind.PLAIN, Support.CONE_BAND),
    ]
    if _dt_hypothesis(state):
        out.append(_Source("phi2", "dt", g2, SourceKind.TIME_DERIVATIVE, Support.CONE_BAND))
    out.append(_Source("phi3", "null", h3, SourceKind.NULL_FORM, Support.EVERYWHERE))
    return out


def _dt_hypothesis(state: BoundState) -> bool:
    """<u>-weighted derivative control on the band: <u> d(phi) <~ phi."""
    region = state.region
    weighted = join([state.dphi, state.phi.times(a=1)]).times(c=-1)
    lhs = restrict(region, weighted.profile(), Support.CONE_BAND)
    rhs = restrict(region, state.phi.profile(), Support.CONE_BAND)
    return profile_implies(lhs, rhs)


def _rules(src: _Source, region: Region, cfg: EngineConfig):
    if src.route == "dt":
        strict = region is not Region.EXTERIOR or not cfg.wide_exterior_dt
        return [("dt", lambda x: apply_dt_conversion(x, region, strict=strict))]
    if region is Region.INTERIOR:
        return [("interior", apply_interior_conversion)]
    if src.route == "plain" and src.channel == "phi2":
        return [("exterior-relaxed", lambda x: apply_exterior_conversion(x, relaxed=True))]
    return [("exterior", apply_exterior_conversion)]


def _triples(prof: Profile, region: Region, cfg: EngineConfig,
             b_zero: bool) -> Iterator[Tuple[Exp, Exp, Exp]]:
    """Finite candidate set of (a, b, c) re-expressions of a source profile."""
    s = cfg.s
    rep = from_profile(region, prof)
    inf = None
    fa = prof[0]
    ft = prof[-1]
    fb = prof[1] if region is Region.INTERIOR else inf
    a_vals = {Exp.of(2) + lam for lam in cfg.lambda_grid}
    a_vals |= {2 + s, 2 + Exp.sigma(cfg.sigma, 2), 3 - s, rep[0]}
    if fa is not None:
        a_vals |= {fa, fa - HALF, fa - 1, fa - s}
    seen = set()
    for a in sorted(a_vals):
        if not (a > 1 and a < 3):
            continue
        caps = [ft - a + HALF]
        if fa is not None:
            caps.append(fa - a)
        if fb is not None:
            caps.append(fb + HALF)
        bmax = min(caps)
        if bmax < 0:
            continue
        b_vals = {Exp.of(0)} if b_zero else {Exp.of(0), bmax}
        if not b_zero and rep[1] >= 0 and rep[1] <= bmax:
            b_vals.add(rep[1])
        for b in sorted(b_vals):
            ccaps = [ft - a - b]
            if fb is not None:
                ccaps.append(fb - b)
            cmax = min(ccaps)
            if cmax < -HALF:
                continue
            # conversion outputs grow with c except across eta = 1, so the cap and
            # a point just under it (for borderline sums or eta = 1) suffice
            for c in sorted({cmax, cmax - s}):
                if c > cmax or c < -HALF:
                    continue
                key = (a, b, c)
                if key in seen:
                    continue
                seen.add(key)
                yield key


def _better(new: DecayBound, old: Optional[DecayBound]) -> bool:
    if old is None:
        return True
    if new.implies(old):
        return not old.implies(new)
    if old.implies(new):
        return False
    # incomparable: prefer more decay in <u>, then in <r>
    return (new.canonical().c, new.canonical().a) > (old.canonical().c, old.canonical().a)


def best_conversion(src: _Source, region: Region, cfg: EngineConfig):
    """Strongest rule output over admissible re-expressions of ``src``."""
    return _best_conversion(src, region, cfg)


@lru_cache(maxsize=4096)
def _best_conversion(src: _Source, region: Region, cfg: EngineConfig):
    best = None
    rules = _rules(src, region, cfg)
    dt = src.route == "dt"
    for a, b, c in _triples(src.profile, region, cfg, b_zero=dt):
        if dt and c.value < 0:
            # the time-derivative estimate is only invoked with eta >= 0
            continue
        if not profile_implies(src.profile, functionals(region, a, b, c)):
            continue
        sb = SourceBound(a, b, c, src.kind, src.support)
        for name, rule in rules:
            try:
                out = rule(sb)
            except DecayError:
                continue
            if best is None or _better(out, best[1]):
                best = (sb, out, name)
    if best is None:
        raise NoAdmissibleSplit(f"no admissible triple for {src.channel}/{src.route}")
    return best


def assemble_sources(state: BoundState, cfg: EngineConfig,
                     background: Sequence[BoundState] = ()) -> Tuple[SourceBound, SourceBound, SourceBound]:
    """(H1, H2, H3): plain off-cone source, cone time-derivative source, null-form
    source.  H3 is returned as the admissible triple chosen by the split search,
    over ``state`` and any ``background`` states valid in the same region."""
    region = state.region
    srcs = {(x.channel, x.route): x for x in _source_profiles(state, cfg)}
    h1 = srcs[("phi1", "plain")]
    a, b, c = from_profile(region, h1.profile)
    H1 = SourceBound(a, b, c, SourceKind.PLAIN)
    g2 = restrict(region, state.phi.times(a=1 + cfg.s).profile(), Support.CONE_BAND)
    a, b, c = from_profile(region, g2)
    H2 = SourceBound(a, b, c, SourceKind.TIME_DERIVATIVE, Support.CONE_BAND)
    best = None
    for st in [state, *background]:
        null = [x for x in _source_profiles(st, cfg) if x.channel == "phi3"][0]
        try:
            cand = best_conversion(null, region, cfg)
        except NoAdmissibleSplit:
            continue
        if best is None or _better(cand[1], best[1]):
            best = cand
    if best is None:
        raise NoAdmissibleSplit("no admissible triple for the null-form source")
    return H1, H2, best[0]


# --- iteration ------------------------------------------------------------

def _convert_all(states: Sequence[BoundState], step: int, cfg: EngineConfig,
                 apps: List[RuleApplication]) -> Tuple[DecayBound, bool]:
    region = states[0].region
    outs: Dict[str, Tuple[SourceBound, DecayBound, str]] = {}
    for st in states:
        for src in _source_profiles(st, cfg):
            try:
                cand = best_conversion(src, region, cfg)
            except NoAdmissibleSplit:
                continue
            prev = outs.get(src.channel)
            if prev is None or _better(cand[1], prev[1]) or (
                    cand[2] == "dt" and cand[1].equivalent(prev[1])):
                outs[src.channel] = cand
    for ch in CHANNELS:
        if ch not in outs:
            raise NoAdmissibleSplit(f"channel {ch} has no admissible source at step {step}")
        sb, out, name = outs[ch]
        apps.append(RuleApplication(step, ch, name, region, sb, out))
    used_dt = outs["phi2"][2] == "dt"
    return join([outs[ch][1] for ch in CHANNELS]), used_dt


def _complete(phi: DecayBound, step: int) -> BoundState:
    phi = phi.canonical()
    partial = BoundState(phi, phi, phi, step)
    dphi = derivative_gain(partial).canonical()
    dbar = tangential_bound(BoundState(phi, dphi, phi, step)).canonical()
    return BoundState(phi, dphi, dbar, step)


def _iterate(seed: BoundState, background: List[BoundState], cfg: EngineConfig,
             to_t: bool) -> IterationTrace:
    region = seed.region
    trace = IterationTrace(region, seed, [seed], False, seed, background=list(background))
    state = seed
    for step in range(1, cfg.max_steps + 1):
        phi_r, used_dt = _convert_all([state] + trace.background, step, cfg, trace.applications)
        if to_t:
            phi_new = convert_r_to_t(phi_r, state.dphi, cfg)
        else:
            phi_new = phi_r
        new = _complete(phi_new, step)
        if new.phi.same_values(state.phi) or not new.phi.implies(state.phi):
            del trace.applications[-len(CHANNELS):]
            trace.terminated = True
            trace.fixed_point = state
            return trace
        if used_dt and trace.switch_index is None:
            trace.switch_index = step - 1
            trace.notes.append(f"phi2 switches to the cone time-derivative estimate at state {step - 1}")
        trace.states.append(new)
        state = new
    raise StepCapExceeded(f"no fixed point within {cfg.max_steps} steps")


def run_exterior_iteration(cfg: EngineConfig) -> IterationTrace:
    trace = _iterate(exterior_seed(), [exterior_initial()], cfg, to_t=False)
    return trace


def run_interior_iteration(cfg: EngineConfig, exterior: IterationTrace) -> IterationTrace:
    if not exterior.terminated:
        raise DecayError("exterior iteration must reach its fixed point first")
    trace = _iterate(interior_seed(), [], cfg, to_t=True)
    first = [ap for ap in trace.applications if ap.step == 1 and ap.channel == "phi3"]
    if first:
        q = first[0].output.canonical().c
        printed = Exp.sigma(cfg.sigma) - HALF
        if q > printed:
            trace.notes.append(
                f"first-cycle null-form output <r>^-1 <u>^-{q.text()} is stronger than the "
                f"printed <r>^-1 <u>^-({printed.text()}); the computed value is kept")
    return trace
