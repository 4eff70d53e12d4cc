#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sclab {

using complex = std::complex<double>;

/// Uniform periodic lattice x_i = x_min + i*dx, i in [0, n), with the
/// matching angular wavenumbers in standard FFT order.
class Grid {
 public:
  /// Throws DomainError unless x_max > x_min and n is a power of two >= 16.
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double length() const { return x_max_ - x_min_; }
  double dx() const { return dx_; }
  std::size_t n() const { return n_; }
  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
  std::vector<double> points() const;

  /// k_j = 2*pi*j/L for j < n/2, 2*pi*(j-n)/L otherwise.
  std::span<const double> wavenumbers() const { return *k_; }
  double k_max() const { return 3.14159265358979323846 / dx_; }

  bool operator==(const Grid& other) const {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  std::shared_ptr<const std::vector<double>> k_;
};

Grid make_grid(double x_min, double x_max, std::size_t n);

bool is_power_of_two(std::size_t n);

/// Smallest power of two >= n.
std::size_t next_power_of_two(std::size_t n);

/// Finite real samples on a grid.
class RealField {
 public:
  /// Throws DomainError on size mismatch or a non-finite entry.
  RealField(Grid grid, std::vector<double> values);
  static RealField zeros(const Grid& grid);
  static RealField sample(const Grid& grid, const std::function<double(double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const& { return values_; }
  /// Spans into a temporary would dangle.
  std::span<const double> values() && = delete;
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Finite complex samples on a grid.
class ComplexField {
 public:
  ComplexField(Grid grid, std::vector<complex> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const complex> values() const& { return values_; }
  std::span<const complex> values() && = delete;
  const complex& operator[](std::size_t i) const { return values_[i]; }

 private:
  Grid grid_;
  std::vector<complex> values_;
};

/// FFT derivative of order 1 or 2 (DomainError otherwise). Exact for
/// band-limited periodic samples; the Nyquist mode is dropped for order 1.
RealField spectral_derivative(const RealField& f, int order);
ComplexField spectral_derivative(const ComplexField& f, int order);

/// In-place variant on raw samples of a grid.
void spectral_derivative_inplace(const Grid& grid, std::span<complex> values, int order);

/// dx * sum(f_i): the trapezoid rule on a periodic grid.
double integrate(const RealField& f);
double integrate(const Grid& grid, std::span<const double> values);

}  // namespace sclab
