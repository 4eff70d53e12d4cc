#include "sclab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sclab/errors.hpp"
#include "sclab/fft.hpp"

namespace sclab {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Grid::Grid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw DomainError("grid: need finite bounds with x_max > x_min");
  }
  if (n < 16 || !is_power_of_two(n)) {
    throw DomainError("grid: point count " + std::to_string(n) +
                      " is not a power of two >= 16");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n);
  auto k = std::make_shared<std::vector<double>>(n);
  const double base = 2.0 * std::numbers::pi / (x_max - x_min);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    auto m = static_cast<std::ptrdiff_t>(j);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n);
    (*k)[j] = base * static_cast<double>(m);
  }
  k_ = std::move(k);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

Grid make_grid(double x_min, double x_max, std::size_t n) { return Grid(x_min, x_max, n); }

RealField::RealField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.n()) {
    throw DomainError("field: value count does not match grid size");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("field: non-finite sample");
  }
}

RealField RealField::zeros(const Grid& grid) {
  return RealField(grid, std::vector<double>(grid.n(), 0.0));
}

RealField RealField::sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) v[i] = f(grid.x(i));
  return RealField(grid, std::move(v));
}

ComplexField::ComplexField(Grid grid, std::vector<complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.n()) {
    throw DomainError("field: value count does not match grid size");
  }
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("field: non-finite sample");
    }
  }
}

void spectral_derivative_inplace(const Grid& grid, std::span<complex> values, int order) {
  if (order != 1 && order != 2) {
    throw DomainError("spectral_derivative: order must be 1 or 2");
  }
  fft::forward(values);
  const auto k = grid.wavenumbers();
  const std::size_t nyquist = grid.n() / 2;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (order == 1) {
      values[j] = (j == nyquist) ? complex{0.0, 0.0} : values[j] * complex{0.0, k[j]};
    } else {
      values[j] *= -k[j] * k[j];
    }
  }
  fft::inverse(values);
}

RealField spectral_derivative(const RealField& f, int order) {
  std::vector<complex> buf(f.values().begin(), f.values().end());
  spectral_derivative_inplace(f.grid(), buf, order);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return RealField(f.grid(), std::move(out));
}

ComplexField spectral_derivative(const ComplexField& f, int order) {
  std::vector<complex> buf(f.values().begin(), f.values().end());
  spectral_derivative_inplace(f.grid(), buf, order);
  return ComplexField(f.grid(), std::move(buf));
}

double integrate(const Grid& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return grid.dx() * sum;
}

double integrate(const RealField& f) { return integrate(f.grid(), f.values()); }

}  // namespace sclab
