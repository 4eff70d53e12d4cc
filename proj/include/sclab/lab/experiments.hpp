#pragma once

#include "sclab/lab/config.hpp"
#include "sclab/lab/record.hpp"

namespace sclab::lab {

/// hbar -> 0 at fixed width: quantum-term norm and classical HJ residual per
/// snapshot, and the hbar exponent of the quantum-term norm at t = 0.
RunRecord run_standard_limit(const RunConfig& cfg);

/// epsilon -> 0 at fixed hbar: width A(t_final) per epsilon and the
/// divergence of the quantum coupling term on the grid.
RunRecord run_deterministic_limit(const RunConfig& cfg);

/// epsilon = k hbar with hbar -> 0: deviation of <x> from Newton, width and
/// kurtosis, plus the detpot verdict for the potential.
RunRecord run_combined_limit(const RunConfig& cfg);

/// Observables time series for one packet (or one per hbar_list entry) with
/// the uncertainty product checked against hbar/2.
RunRecord run_uncertainty(const RunConfig& cfg);

/// detpot::classify on the configured grid and widths.
RunRecord run_detpot(const RunConfig& cfg);

/// Classical HJ by characteristics from S0 = p0 x - m x^2 / (2 focal_time),
/// with the Gaussian density transported along the fan.
RunRecord run_phj_demo(const RunConfig& cfg);

/// Phase-space blob under the Liouville flow next to Newton's trajectory of
/// its centre.
RunRecord run_liouville_demo(const RunConfig& cfg);

/// Validates cfg and dispatches on cfg.experiment; sets wall_seconds.
RunRecord run_experiment(const RunConfig& cfg);

}  // namespace sclab::lab
