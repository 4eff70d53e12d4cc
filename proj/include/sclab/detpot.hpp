#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sclab/grid.hpp"
#include "sclab/potential.hpp"

namespace sclab {

/// Circular convolution with the normalized Gaussian of variance eps/2
/// (density exp(-x^2/eps) / sqrt(pi eps)), sampled on the grid and applied
/// by FFT. eps = 0 is the identity. DomainError when sqrt(eps) > L/12 (the
/// kernel wraps) or 0 < sqrt(eps) < 2 dx (the kernel is not resolved).
RealField gaussian_convolve(const RealField& F, double epsilon);

/// Half-open index range of the central 50% of the grid.
struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;
};
Window central_window(const Grid& grid);

/// ||F - delta_eps * F|| / (||F|| + tiny) over the central window, F = -V'.
double detpot_residual(const PotentialSpec& V, double epsilon, const Grid& grid);

/// Per-mode view of the same residual: |F(k)| |1 - K(k)| with K the
/// transform of the sampled kernel, scaled so that the squares sum to
/// dx * sum |F - delta*F|^2 over the whole periodic grid.
struct FourierResidual {
  std::vector<double> k;          ///< FFT order
  std::vector<double> factor;     ///< |1 - K(k)|
  std::vector<double> magnitude;  ///< |F(k)| |1 - K(k)|, Parseval scaled
  double total_norm = 0.0;        ///< sqrt(sum magnitude^2)
  /// Inverse transform of the per-mode residual, restricted to the central
  /// window and divided by ||F|| there. The seam of a non-periodic force
  /// lives outside the window.
  double window_norm = 0.0;
};

FourierResidual fourier_residual(const PotentialSpec& V, double epsilon, const Grid& grid);

enum class Verdict { Deterministic, NonDeterministic };
const char* to_string(Verdict v);

struct DetpotRow {
  double epsilon = 0.0;
  double residual = 0.0;
  double fourier_window_norm = 0.0;
};

struct DetpotReport {
  std::string potential;
  double tol = 0.0;
  std::vector<DetpotRow> rows;
  /// Slope of log residual against log eps (non-deterministic only).
  std::optional<double> scaling_exponent;
  /// ||F''|| / ||F|| on the window; zero for linear forces.
  double second_derivative_norm = 0.0;
  Verdict verdict = Verdict::NonDeterministic;
  std::vector<std::string> notes;
};

inline constexpr double kDetpotTolerance = 1e-8;

/// {1e-1, 1e-2, 1e-3} * (L/12)^2.
std::vector<double> default_epsilons(const Grid& grid);

/// Deterministic iff every residual <= tol; NonDeterministic iff every
/// residual > tol; InconclusiveError when they straddle tol. Needs at least
/// 3 widths spanning 2 decades (DomainError).
DetpotReport classify(const PotentialSpec& V, const Grid& grid,
                      const std::vector<double>& epsilons, double tol = kDetpotTolerance);

}  // namespace sclab
