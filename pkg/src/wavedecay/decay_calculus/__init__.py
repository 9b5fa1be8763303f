"""Exact-rational decay-bound calculus and the bootstrap iteration."""
from .exponents import Exp, Q, to_q
from .bounds import (BorderlineSum, BoundaryEta, BoundState, DecayBound, DecayError,
                     NoAdmissibleSplit, Region, RuleDomain, SourceBound, SourceKind,
                     StepCapExceeded, Support, Unsupported, join)
from .rules import (EngineConfig, apply_dt_conversion, apply_exterior_conversion,
                    apply_interior_conversion, convert_r_to_t, derivative_gain,
                    tangential_bound, tilde_eta)
from .engine import (IterationTrace, RuleApplication, assemble_sources,
                     run_exterior_iteration, run_interior_iteration)
from .oracle import check_application, quadrature_oracle
from .trace_io import format_trace, load_golden, read_states, write_trace

__all__ = [
    "Exp", "Q", "to_q", "BorderlineSum", "BoundaryEta", "BoundState", "DecayBound",
    "DecayError", "NoAdmissibleSplit", "Region", "RuleDomain", "SourceBound", "SourceKind",
    "StepCapExceeded", "Support", "Unsupported", "join", "EngineConfig",
    "apply_dt_conversion", "apply_exterior_conversion", "apply_interior_conversion",
    "convert_r_to_t", "derivative_gain", "tangential_bound", "tilde_eta",
    "IterationTrace", "RuleApplication", "assemble_sources", "run_exterior_iteration",
    "run_interior_iteration", "check_application", "quadrature_oracle", "format_trace",
    "load_golden", "read_states", "write_trace",
]
