#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sclab/grid.hpp"

namespace sclab {

/// Finite-difference weights for derivatives 0..max_order at x0 from
/// arbitrary nodes (Fornberg's recursion). Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_order);

/// Number of points in the non-periodic difference stencils below. Stencils
/// are exact for polynomials up to degree kStencilWidth - 1.
inline constexpr std::size_t kStencilWidth = 9;

/// Derivative (order 1 or 2) of uniformly spaced, non-periodic samples,
/// restricted to the index range [begin, end): stencils never reach outside
/// the range and become one-sided near its ends. Returns end - begin values.
/// Ranges shorter than the stencil fall back to the widest stencil that fits.
std::vector<double> stencil_derivative(std::span<const double> values, double dx, int order,
                                       std::size_t begin, std::size_t end);

/// Whole-grid non-periodic derivative of a field.
RealField stencil_derivative(const RealField& f, int order);

/// Local Lagrange interpolation of uniform samples y_i = f(x0 + i*dx) at x,
/// using `points` nodes centred on x (shifted inward near the ends).
double interpolate_uniform(std::span<const double> values, double x0, double dx, double x,
                           std::size_t points = 6);

/// Piecewise cubic Hermite interpolation through (xs, ys) with slopes dys.
/// xs must be strictly increasing; x outside [xs.front(), xs.back()] is
/// clamped to the nearest end value.
double hermite_interpolate(std::span<const double> xs, std::span<const double> ys,
                           std::span<const double> dys, double x);

/// Gauss-Hermite rule for weight exp(-x^2): nodes and weights, n >= 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(std::size_t n);

/// Ordinary least squares y = slope*x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log|y| against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Derivative of a uniformly sampled series: centered in the interior,
/// second-order one-sided at the two ends. Needs at least 3 samples.
std::vector<double> time_derivative(std::span<const double> series, double step);

}  // namespace sclab
