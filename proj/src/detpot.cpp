#include "sclab/detpot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sclab/errors.hpp"
#include "sclab/fft.hpp"
#include "sclab/numerics.hpp"

namespace sclab {

namespace {

constexpr double kTiny = 1e-300;

// Transform of the sampled, normalized kernel (real and even).
std::vector<complex> kernel_transform(const Grid& g, double epsilon) {
  const double L = g.length();
  const double root = std::sqrt(epsilon);
  if (root > L / 12.0) {
    throw DomainError("gaussian_convolve: sqrt(eps) exceeds L/12; the kernel wraps around");
  }
  if (root < 2.0 * g.dx()) {
    throw DomainError("gaussian_convolve: sqrt(eps) below 2 dx; the kernel is not resolved");
  }
  const std::size_t n = g.n();
  std::vector<complex> k(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = static_cast<double>(j <= n / 2 ? j : n - j) * g.dx();
    const double w = std::exp(-d * d / epsilon);
    k[j] = w;
    total += w;
  }
  for (auto& v : k) v /= total;
  fft::forward(k);
  return k;
}

double window_norm(const Grid& g, std::span<const double> v) {
  const auto w = central_window(g);
  double s = 0.0;
  for (std::size_t i = w.begin; i < w.end; ++i) s += v[i] * v[i];
  return std::sqrt(s * g.dx());
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

Window central_window(const Grid& grid) { return {grid.n() / 4, 3 * grid.n() / 4}; }

RealField gaussian_convolve(const RealField& F, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("gaussian_convolve: epsilon must be >= 0");
  if (epsilon == 0.0) return F;
  const Grid& g = F.grid();
  const auto K = kernel_transform(g, epsilon);
  std::vector<complex> v(F.values().begin(), F.values().end());
  fft::forward(v);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] *= K[j];
  fft::inverse(v);
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j].real();
  return RealField(g, std::move(out));
}

double detpot_residual(const PotentialSpec& V, double epsilon, const Grid& grid) {
  const auto F = force_field(V, grid, 0.0);
  const auto smooth = gaussian_convolve(F, epsilon);
  std::vector<double> r(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) r[i] = F[i] - smooth[i];
  return window_norm(grid, r) / (window_norm(grid, F.values()) + kTiny);
}

FourierResidual fourier_residual(const PotentialSpec& V, double epsilon, const Grid& grid) {
  if (!(epsilon >= 0.0)) throw DomainError("fourier_residual: epsilon must be >= 0");
  const auto F = force_field(V, grid, 0.0);
  const std::size_t n = grid.n();
  std::vector<complex> K(n, complex(1.0, 0.0));
  if (epsilon > 0.0) K = kernel_transform(grid, epsilon);
  std::vector<complex> spec(F.values().begin(), F.values().end());
  fft::forward(spec);

  FourierResidual out;
  const auto k = grid.wavenumbers();
  out.k.assign(k.begin(), k.end());
  const double scale = std::sqrt(grid.dx() / static_cast<double>(n));
  std::vector<complex> res(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const complex one_minus = 1.0 - K[j];
    res[j] = spec[j] * one_minus;
    out.factor.push_back(std::abs(one_minus));
    out.magnitude.push_back(std::abs(res[j]) * scale);
    acc += out.magnitude.back() * out.magnitude.back();
  }
  out.total_norm = std::sqrt(acc);
  fft::inverse(res);
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = res[j].real();
  out.window_norm = window_norm(grid, r) / (window_norm(grid, F.values()) + kTiny);
  return out;
}

const char* to_string(Verdict v) {
  return v == Verdict::Deterministic ? "deterministic" : "non-deterministic";
}

std::vector<double> default_epsilons(const Grid& grid) {
  const double s = std::pow(grid.length() / 12.0, 2);
  return {1e-1 * s, 1e-2 * s, 1e-3 * s};
}

DetpotReport classify(const PotentialSpec& V, const Grid& grid,
                      const std::vector<double>& epsilons, double tol) {
  if (epsilons.size() < 3) throw DomainError("classify: needs at least 3 widths");
  const auto [lo, hi] = std::minmax_element(epsilons.begin(), epsilons.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw DomainError("classify: widths must be positive and span at least two decades");
  }
  if (!(tol > 0.0)) throw DomainError("classify: tol must be > 0");

  DetpotReport rep;
  rep.potential = V.describe();
  rep.tol = tol;
  std::size_t above = 0;
  for (double eps : epsilons) {
    DetpotRow row;
    row.epsilon = eps;
    row.residual = detpot_residual(V, eps, grid);
    row.fourier_window_norm = fourier_residual(V, eps, grid).window_norm;
    if (row.residual > tol) ++above;
    rep.rows.push_back(row);
  }

  const auto F = force_field(V, grid, 0.0);
  const auto w = central_window(grid);
  const auto d2 = stencil_derivative(F.values(), grid.dx(), 2, w.begin, w.end);
  double s = 0.0;
  for (double v : d2) s += v * v;
  rep.second_derivative_norm = std::sqrt(s * grid.dx()) / (window_norm(grid, F.values()) + kTiny);

  if (above != 0 && above != epsilons.size()) {
    std::string table;
    for (const auto& r : rep.rows) table += " eps=" + fmt(r.epsilon) + ":" + fmt(r.residual);
    throw InconclusiveError("classify: residuals straddle tol = " + fmt(tol) + " across widths;" +
                            table + " (grid or window artifacts suspected)");
  }
  if (above == 0) {
    rep.verdict = Verdict::Deterministic;
    double worst = 0.0;
    for (const auto& r : rep.rows) worst = std::max(worst, r.residual);
    if (worst > 0.0 && rep.second_derivative_norm > 1e-12) {
      rep.notes.push_back("residuals are below tol but nonzero (max " + fmt(worst) +
                          "): the force has a sub-tolerance nonlinear part");
    }
  } else {
    rep.verdict = Verdict::NonDeterministic;
    std::vector<double> e, r;
    for (const auto& row : rep.rows) {
      e.push_back(row.epsilon);
      r.push_back(row.residual);
    }
    rep.scaling_exponent = fit_loglog_slope(e, r);
  }
  rep.notes.push_back("static classification; time-dependent coefficients are not examined");
  return rep;
}

}  // namespace sclab
