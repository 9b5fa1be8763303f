"""Weighted spacetime norms, dyadic suprema, decay fits and energy tracking."""
from .regions import (ConeRegion, DyadicRegionSpec, EmptyRegion, RegionKind, admissible_scales,
                      cone_region, cover, dyadic_T)
from .norms import (NormKind, NormReport, annuli, annulus_squares, energy_history,
                    hat_weights, jbracket, lestar_of_values, region_sup,
                    weighted_dyadic_norm, word_with_gradient, words_up_to)
from .fitting import (DecayMeasurement, FitResult, decay_samples, envelope_constants, fit_decay_exponents,
                      measure_decay, subtract_reference, u_band_samples, v_band_samples)
from .reports import (ReportRow, read_csv, read_two_column, rows_to_csv, summary_document,
                      write_csv, write_json, write_two_column)

__all__ = [
    "ConeRegion", "DyadicRegionSpec", "EmptyRegion", "RegionKind", "admissible_scales", "cone_region",
    "cover", "dyadic_T", "NormKind", "NormReport", "annuli", "annulus_squares",
    "energy_history", "hat_weights", "jbracket", "lestar_of_values", "region_sup",
    "weighted_dyadic_norm", "word_with_gradient", "words_up_to", "DecayMeasurement",
    "FitResult", "decay_samples", "envelope_constants", "fit_decay_exponents", "measure_decay",
    "subtract_reference", "u_band_samples", "v_band_samples", "ReportRow", "read_csv",
    "read_two_column", "rows_to_csv", "summary_document", "write_csv", "write_json",
    "write_two_column",
]
